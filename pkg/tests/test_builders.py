"""Tests for wplab.surfaces.builders."""

from __future__ import annotations

import math

import pytest

from wplab.errors import NonSurfaceGroupError, SpecFormatError
from wplab.models import SurfaceSpec
from wplab.plane import ElementKind, Geodesic, axis, classify, translation_length
from wplab.surfaces.builders import (
    build_cylinder,
    build_pants,
    build_punctured_torus,
    build_surface,
    build_xpiece,
    commutator_trace,
    hexagon,
    punctured_torus_generators,
    seam_length,
)


class TestHexagon:
    def test_seam_symmetric(self) -> None:
        assert seam_length(1.0, 0.5, 0.7) == pytest.approx(seam_length(1.0, 0.7, 0.5))
        assert seam_length(1.0, 1.0, 1.0) > 0.0

    @pytest.mark.parametrize("lengths", [(1.0, 1.0, 1.0), (0.1, 2.0, 0.7), (3.0, 0.2, 0.2)])
    def test_boundary_lengths(self, lengths: tuple[float, float, float]) -> None:
        hx = hexagon(*lengths)
        for g, length in zip(hx.gammas, lengths):
            assert translation_length(g) == pytest.approx(length, rel=1e-9)

    def test_product_is_identity(self) -> None:
        hx = hexagon(0.4, 1.1, 2.0)
        assert (hx.gammas[0] @ hx.gammas[1] @ hx.gammas[2]).is_identity(1e-9)

    def test_first_boundary_on_imaginary_axis(self) -> None:
        a, b, c, d = hexagon(0.5, 1.0, 1.0).gammas[0].entries
        assert b == pytest.approx(0.0, abs=1e-12)
        assert c == pytest.approx(0.0, abs=1e-12)
        assert abs(math.log(abs(a / d))) == pytest.approx(0.5)

    def test_first_axis_is_vertical_despite_rounding(self) -> None:
        ax = axis(hexagon(0.2, 1.0, 1.0).gammas[0])
        assert math.isinf(ax.start) or math.isinf(ax.end)
        assert ax.same_line(Geodesic.imaginary_axis(), tol=1e-9)


class TestPants:
    def test_boundary_words(self) -> None:
        G = build_pants(0.3, 1.0, 2.0)
        lengths = [translation_length(g) for g in G.boundary_elements]
        assert lengths == pytest.approx([0.3, 1.0, 2.0], rel=1e-9)

    def test_center_is_in_plane(self) -> None:
        G = build_pants(1.0, 1.0, 1.0)
        assert G.center is not None
        assert G.center.y > 0.0

    def test_rejects_tiny_length(self) -> None:
        with pytest.raises(SpecFormatError):
            build_pants(1e-6, 1.0, 1.0)

    def test_rejects_nonpositive_length(self) -> None:
        with pytest.raises(SpecFormatError):
            build_pants(1.0, 0.0, 1.0)


class TestPuncturedTorus:
    @pytest.mark.parametrize("length", [0.05, 0.5, 2.0])
    def test_trace_of_a(self, length: float) -> None:
        A, _ = punctured_torus_generators(length)
        assert A.trace == pytest.approx(2.0 * math.cosh(0.5 * length))

    @pytest.mark.parametrize("twist", [0.0, 0.4, -1.3])
    def test_commutator_parabolic(self, twist: float) -> None:
        A, B = punctured_torus_generators(0.7, twist)
        assert commutator_trace(A, B) == pytest.approx(-2.0, abs=1e-9)

    def test_fricke_at_zero_twist(self) -> None:
        A, B = punctured_torus_generators(0.7)
        assert B.trace == pytest.approx((A @ B).trace)

    def test_boundary_parabolic(self) -> None:
        G = build_punctured_torus(1.0, 0.2)
        (comm,) = G.boundary_elements
        assert classify(comm) is ElementKind.PARABOLIC

    def test_twist_changes_b(self) -> None:
        _, B0 = punctured_torus_generators(0.5, 0.0)
        _, B1 = punctured_torus_generators(0.5, 0.3)
        assert B1.trace != pytest.approx(B0.trace)

    def test_trace_continuous_in_twist(self) -> None:
        traces = [punctured_torus_generators(0.5, t)[1].trace for t in (0.3, 0.3 + 1e-6, 0.3 + 2e-6)]
        assert abs(traces[1] - traces[0]) < 1e-5
        assert traces[2] - traces[1] == pytest.approx(traces[1] - traces[0], rel=1e-3)

    def test_full_dehn_twist_keeps_trace(self) -> None:
        _, B0 = punctured_torus_generators(0.5, 0.0)
        _, B1 = punctured_torus_generators(0.5, 0.5)
        assert B1.trace == pytest.approx(B0.trace, rel=1e-12)


class TestXPiece:
    def test_boundary_lengths(self) -> None:
        spec = SurfaceSpec("xpiece", (0.5, 1.0, 1.2, 0.8, 1.5), 0.3)
        G = build_xpiece(spec)
        assert G.rank == 3
        assert translation_length(G.generators[0]) == pytest.approx(0.5, rel=1e-9)
        lengths = [translation_length(g) for g in G.boundary_elements]
        assert lengths == pytest.approx([1.0, 1.2, 0.8, 1.5], rel=1e-8)

    def test_needs_xpiece_spec(self) -> None:
        with pytest.raises(SpecFormatError):
            build_xpiece(SurfaceSpec("pants", (1.0, 1.0, 1.0)))

    def test_generators_hyperbolic(self) -> None:
        G = build_xpiece(SurfaceSpec("xpiece", (0.2, 1.0, 1.0, 1.0, 1.0)))
        assert all(classify(g) is ElementKind.HYPERBOLIC for g in G.generators)


class TestBuildSurface:
    @pytest.mark.parametrize(
        ("spec", "rank"),
        [
            (SurfaceSpec("cylinder", (0.2,)), 1),
            (SurfaceSpec("pants", (1.0, 1.0, 1.0)), 2),
            (SurfaceSpec("punctured_torus", (0.5,), 0.1), 2),
            (SurfaceSpec("xpiece", (1.0, 1.0, 1.0, 1.0, 1.0)), 3),
        ],
    )
    def test_dispatch(self, spec: SurfaceSpec, rank: int) -> None:
        G = build_surface(spec)
        assert G.rank == rank
        assert translation_length(G.generators[0]) == pytest.approx(spec.lengths[0], rel=1e-9)

    def test_cylinder_generator(self) -> None:
        G = build_cylinder(0.25)
        assert G.generators[0].entries[1] == 0.0
        assert G.basepoint().y == 1.0


class TestValidation:
    def test_every_builder_checks_for_elliptics(self, monkeypatch: pytest.MonkeyPatch) -> None:
        from wplab.surfaces import builders

        seen: list[float] = []
        real = builders.validate_group

        def recording(G, base, R, **kwargs):
            seen.append(R)
            return real(G, base, R, **kwargs)

        monkeypatch.setattr(builders, "validate_group", recording)
        build_cylinder(0.5)
        build_pants(1.0, 1.0, 1.0)
        build_punctured_torus(1.0)
        build_xpiece(SurfaceSpec("xpiece", (1.0, 1.0, 1.0, 1.0, 1.0)))
        assert seen == [builders.VALIDATION_RADIUS] * 4

    def test_elliptic_group_rejected(self) -> None:
        from wplab.groups import FuchsianGroup
        from wplab.plane import Isometry, PlanePoint
        from wplab.surfaces.builders import _validated

        half_turn = Isometry(0.0, -1.0, 1.0, 0.0)
        G = FuchsianGroup((half_turn, Isometry.diagonal(1.0)), center=PlanePoint(0.0, 1.0))
        with pytest.raises(NonSurfaceGroupError):
            _validated(G)
