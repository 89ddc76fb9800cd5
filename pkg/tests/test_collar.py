"""Tests for wplab.surfaces.collar."""

from __future__ import annotations

import math

import numpy as np
import pytest

from wplab.groups import FuchsianGroup, GeodesicClass, injectivity_radius
from wplab.plane import (
    Isometry,
    PlanePoint,
    axis,
    common_perpendicular,
    cylinder_injectivity,
    from_hyperboloid,
    geodesic_distance,
    intersection,
    to_hyperboloid,
)
from wplab.surfaces.collar import (
    angle_of,
    annulus_quadrature,
    collar_chart,
    extended_half_width,
    signed_distance,
    standard_half_width,
    thick_thin,
)


def _at(x: float, s: float = 0.0) -> PlanePoint:
    theta = float(angle_of(x))
    return PlanePoint(math.exp(s) * math.cos(theta), math.exp(s) * math.sin(theta))


class TestWidths:
    @pytest.mark.parametrize("length", [0.01, 0.1, 0.5, 1.0])
    def test_extended_definition(self, length: float) -> None:
        w = extended_half_width(length)
        assert math.sinh(w) * math.sinh(0.5 * length) == pytest.approx(1.0)

    @pytest.mark.parametrize("length", [0.01, 0.1, 0.5, 1.0])
    def test_standard_inside_extended(self, length: float) -> None:
        assert standard_half_width(length) < extended_half_width(length)

    def test_standard_value(self) -> None:
        assert standard_half_width(0.1) == pytest.approx(-math.log(math.tan(0.05)))

    def test_log_asymptotics(self) -> None:
        ell = 0.01
        ratio = abs(extended_half_width(ell) - math.log(4.0 / ell)) / ell**2
        assert ratio == pytest.approx(1.0 / 48.0, rel=1e-3)

    def test_angle_round_trip(self) -> None:
        x = np.linspace(-4.0, 4.0, 9)
        assert signed_distance(angle_of(x)) == pytest.approx(x)
        assert float(angle_of(0.0)) == pytest.approx(0.5 * math.pi)


class TestAnnulusQuadrature:
    def test_constant(self) -> None:
        result = annulus_quadrature(lambda s, x: np.ones_like(x), 0.3, -2.0, 2.0)
        assert result.value == pytest.approx(0.3 * 2.0 * math.sinh(2.0), rel=1e-10)

    def test_sech_squared(self) -> None:
        # ∫ sech²x · cosh x dx = 2·atan(sinh a) on [-a, a]
        result = annulus_quadrature(lambda s, x: 1.0 / np.cosh(x) ** 2, 0.5, -3.0, 3.0)
        assert result.value == pytest.approx(0.5 * 2.0 * math.atan(math.sinh(3.0)), rel=1e-9)

    def test_periodic_in_s(self) -> None:
        ell = 0.4
        result = annulus_quadrature(
            lambda s, x: np.cos(2.0 * math.pi * s / ell) ** 2 * np.ones_like(x), ell, -1.0, 1.0
        )
        assert result.value == pytest.approx(0.5 * ell * 2.0 * math.sinh(1.0), rel=1e-9)


class TestCollarChart:
    def test_chart_of_cylinder(self) -> None:
        chart = collar_chart(GeodesicClass.of(Isometry.diagonal(0.1)))
        assert chart.length == pytest.approx(0.1)
        assert chart.angular_range == pytest.approx((0.1, math.pi - 0.1))
        assert chart.half_width_standard < chart.half_width_extended

    def test_fermi_and_contains(self) -> None:
        chart = collar_chart(GeodesicClass.of(Isometry.diagonal(0.1)))
        s, x = chart.fermi(_at(1.5, 0.03))
        assert s == pytest.approx(0.03)
        assert x == pytest.approx(1.5)
        assert chart.contains(_at(3.5))
        assert not chart.contains(_at(3.5), extended=False)
        assert not chart.contains(_at(4.0))

    def test_integrate_standard_collar(self) -> None:
        chart = collar_chart(GeodesicClass.of(Isometry.diagonal(0.2)))
        w = chart.half_width_standard
        result = chart.integrate(lambda s, x: np.ones_like(x))
        assert result.value == pytest.approx(0.2 * 2.0 * math.sinh(w), rel=1e-8)


class TestThickThin:
    def test_cylinder_regions(self, cylinder: FuchsianGroup) -> None:
        labels = thick_thin(cylinder, 0.3, [PlanePoint(0.0, 1.0), _at(5.0)])
        assert [c.region for c in labels] == ["collar", "thick"]
        assert labels[0].geodesic == 0
        assert labels[1].injectivity == pytest.approx(cylinder_injectivity(0.1, 5.0), rel=1e-9)

    def test_injectivity_matches_cylinder_formula(self, cylinder: FuchsianGroup) -> None:
        assert injectivity_radius(cylinder, _at(2.0)) == pytest.approx(
            cylinder_injectivity(0.1, 2.0), rel=1e-9
        )

    def test_torus_collar_points(self) -> None:
        from wplab.surfaces.builders import build_punctured_torus

        G = build_punctured_torus(0.3)
        sample = [PlanePoint(0.0, 1.0), PlanePoint(math.sinh(1.0), 1.0), PlanePoint(-math.sinh(1.5), 1.0)]
        labels = thick_thin(G, 0.5, sample)
        assert [c.region for c in labels] == ["collar"] * 3
        assert {c.geodesic for c in labels} == {0}

    def test_torus_without_short_curves_is_thick_at_center(self, torus: FuchsianGroup) -> None:
        (label,) = thick_thin(torus, 0.5, [PlanePoint(0.0, 1.0)])
        assert label.region == "thick"
        assert label.injectivity == pytest.approx(injectivity_radius(torus, PlanePoint(0.0, 1.0)))


def _between(p: PlanePoint, q: PlanePoint, t: float) -> PlanePoint:
    """The point a fraction t of the way from p to q along their geodesic."""
    d = math.acosh(max(float(-to_hyperboloid(p) @ (to_hyperboloid(q) * np.array([-1.0, 1.0, 1.0]))), 1.0))
    X = (math.sinh((1.0 - t) * d) * to_hyperboloid(p) + math.sinh(t * d) * to_hyperboloid(q)) / math.sinh(d)
    return from_hyperboloid(X)


class TestXPieceCollars:
    @pytest.fixture(scope="class")
    def xpiece(self):
        from wplab.models import SurfaceSpec
        from wplab.surfaces.builders import build_xpiece

        G = build_xpiece(SurfaceSpec("xpiece", (0.2, 1.0, 1.0, 0.2, 1.0)))
        ax_a, ax_c = axis(G.generators[0]), axis(G.generators[2])
        perp = common_perpendicular(ax_a, ax_c)
        return G, ax_a, ax_c, intersection(perp, ax_a), intersection(perp, ax_c)

    def test_standard_collars_disjoint(self, xpiece) -> None:
        _, ax_a, ax_c, _, _ = xpiece
        assert geodesic_distance(ax_a, ax_c) > 2.0 * standard_half_width(0.2)

    def test_points_near_each_core_get_their_own_collar(self, xpiece) -> None:
        G, _, _, foot_a, foot_c = xpiece
        mid = _between(foot_a, foot_c, 0.5)
        sample = [_between(foot_a, foot_c, 0.25), _between(foot_a, foot_c, 0.75)]
        labels = thick_thin(G, 0.5, sample, base=mid)
        assert [c.region for c in labels] == ["collar", "collar"]
        assert labels[0].geodesic != labels[1].geodesic
