"""Tests for wplab.surfaces.domain — Dirichlet domains, area and Green's mass."""

from __future__ import annotations

import math

import numpy as np
import pytest

from wplab.errors import InfiniteCovolumeError
from wplab.groups import FuchsianGroup, cyclic_group
from wplab.plane import Isometry, PlanePoint, apply
from wplab.surfaces.domain import dirichlet_domain, green_mass, reduce_points, sample_domain


@pytest.fixture(scope="module")
def torus_domain(torus: FuchsianGroup):
    return dirichlet_domain(torus)


class TestDirichletDomain:
    def test_torus_area(self, torus_domain) -> None:
        assert torus_domain.area == pytest.approx(2.0 * math.pi, rel=0.01)

    def test_area_by_angle_deficit(self, torus_domain) -> None:
        assert torus_domain.area_deficit == pytest.approx(torus_domain.area, rel=1e-3)

    def test_pants_convex_core_area(self, pants: FuchsianGroup) -> None:
        domain = dirichlet_domain(pants)
        assert domain.area == pytest.approx(2.0 * math.pi, rel=0.01)

    def test_certified_by_default(self, torus: FuchsianGroup, torus_domain) -> None:
        assert torus_domain.certified
        assert not dirichlet_domain(torus, certify=False).certified

    def test_contains_center(self, torus_domain) -> None:
        assert torus_domain.contains(torus_domain.center)
        assert not torus_domain.is_band

    def test_cylinder_has_infinite_area(self, cylinder: FuchsianGroup) -> None:
        with pytest.raises(InfiniteCovolumeError):
            dirichlet_domain(cylinder)

    def test_integrate_constant(self, torus_domain) -> None:
        result = torus_domain.integrate(lambda x, y: np.ones_like(x))
        assert result.value == pytest.approx(torus_domain.area, rel=0.01)


class TestBand:
    def test_band_domain(self, cylinder: FuchsianGroup) -> None:
        band = dirichlet_domain(cylinder, band=True)
        assert band.is_band
        assert band.band_length == pytest.approx(0.1)
        assert math.isinf(band.area)

    def test_band_integral(self, cylinder: FuchsianGroup) -> None:
        band = dirichlet_domain(cylinder, band=True)
        result = band.integrate(lambda x, y: np.ones_like(x), x_max=3.0)
        assert result.value == pytest.approx(0.1 * 2.0 * math.sinh(3.0), rel=1e-6)

    def test_band_reduction(self, cylinder: FuchsianGroup) -> None:
        band = dirichlet_domain(cylinder, band=True)
        q, g = band.reduce_point(PlanePoint(0.5, 3.0))
        assert band.contains(q)
        image = apply(g, PlanePoint(0.5, 3.0))
        assert (q.x, q.y) == pytest.approx((image.x, image.y))
        assert 1.0 <= math.hypot(q.x, q.y) < math.exp(0.1)

    def test_band_needs_cyclic(self, torus: FuchsianGroup) -> None:
        with pytest.raises(InfiniteCovolumeError):
            dirichlet_domain(torus, band=True)

    def test_band_needs_axis_on_imaginary_axis(self) -> None:
        g = Isometry.diagonal(0.5).conjugate_by(Isometry(1.0, 1.0, 0.0, 1.0))
        with pytest.raises(InfiniteCovolumeError):
            dirichlet_domain(cyclic_group(g), band=True)


class TestSampling:
    def test_samples_inside(self, torus_domain) -> None:
        points = sample_domain(torus_domain, 5, seed=3)
        assert len(points) == 5
        assert all(torus_domain.contains(p) for p in points)

    def test_seeded(self, torus_domain) -> None:
        assert sample_domain(torus_domain, 3, seed=7) == sample_domain(torus_domain, 3, seed=7)

    def test_reduce_orbit_point(self, torus: FuchsianGroup, torus_domain) -> None:
        p = sample_domain(torus_domain, 1, seed=1)[0]
        moved = apply(torus.element((1, 2, 1)), p)
        (back,) = reduce_points(torus_domain, [moved])
        assert (back.x, back.y) == pytest.approx((p.x, p.y), abs=1e-8)


class TestGreenMass:
    @pytest.mark.slow
    def test_unit_mass_on_torus(self, torus: FuchsianGroup, torus_domain) -> None:
        result = green_mass(torus, torus_domain, torus_domain.center, 6.0)
        assert result.value == pytest.approx(1.0, abs=0.05)
        assert result.kernel_tail == pytest.approx((4.0 / 3.0) * math.exp(-6.0))

    @pytest.mark.slow
    @pytest.mark.parametrize("length", [0.5, 1.0])
    def test_unit_mass_at_three_basepoints(self, length: float) -> None:
        from wplab.surfaces.builders import build_punctured_torus

        G = build_punctured_torus(length)
        domain = dirichlet_domain(G)
        for p in [domain.center, *sample_domain(domain, 2, seed=11)]:
            result = green_mass(G, domain, p, 6.0)
            assert result.value == pytest.approx(1.0, abs=0.05)
            assert result.kernel_tail < 0.01 * result.value
