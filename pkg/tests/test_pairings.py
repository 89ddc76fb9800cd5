"""Tests for wplab.curvature.pairings — the annular Green operator and quartic pairings."""

from __future__ import annotations

import math

import numpy as np
import pytest

from wplab.curvature.differentials import model_gradient, model_thick
from wplab.curvature.pairings import (
    GREEN_KERNEL_SCALE,
    Frame,
    Product,
    annular_kernel,
    annular_kernel_direct,
    annular_left,
    annular_right,
    holder_chain,
    max_principle,
    pairing,
    riemann_entry,
    wp_inner,
)
from wplab.groups import GeodesicClass
from wplab.plane import Isometry, signed_distance_arrays


@pytest.fixture(scope="module")
def frame() -> Frame:
    return Frame.build(GeodesicClass.of(Isometry.diagonal(0.1)))


@pytest.fixture(scope="module")
def pair(frame: Frame):
    return model_gradient(frame), model_thick(frame, 1)


class TestAnnularSolutions:
    def test_value_at_core(self) -> None:
        assert annular_left(0.0) == pytest.approx(1.0)
        assert annular_right(0.0) == pytest.approx(1.0)

    def test_series_branch_is_continuous(self) -> None:
        # θ = 1e-2 sits at x = log tan(5e-3)
        x0 = math.log(math.tan(5e-3))
        lo, hi = annular_left(np.array([x0 - 1e-9, x0 + 1e-9]))
        assert lo == pytest.approx(hi, rel=1e-7)

    def test_left_vanishes_at_minus_infinity(self) -> None:
        assert annular_left(-30.0) < 1e-20
        assert annular_left(30.0) > 1e10

    @pytest.mark.parametrize("x", [-2.0, -0.3, 0.7, 1.5])
    def test_ode(self, x: float) -> None:
        # u'' + tanh(x) u' - 2u = 0 for functions of the distance to the core
        h = 1e-4
        u = [float(annular_left(x + k * h)) for k in (-1, 0, 1)]
        second = (u[2] - 2.0 * u[1] + u[0]) / h**2
        first = (u[2] - u[0]) / (2.0 * h)
        assert abs(second + math.tanh(x) * first - 2.0 * u[1]) < 1e-5 * max(1.0, u[1])

    @pytest.mark.parametrize(("x", "x2"), [(0.3, 1.2), (-1.0, 0.5), (2.0, 2.5), (-0.4, -2.2)])
    def test_kernel_matches_line_integral(self, x: float, x2: float) -> None:
        assert annular_kernel(x, x2) == pytest.approx(annular_kernel_direct(x, x2), rel=1e-7)

    def test_kernel_symmetric(self) -> None:
        assert annular_kernel(0.4, -1.1) == annular_kernel(-1.1, 0.4)

    def test_direct_needs_distinct_points(self) -> None:
        with pytest.raises(ValueError):
            annular_kernel_direct(0.5, 0.5)


class TestFrame:
    def test_integrate_constant(self, frame: Frame) -> None:
        span = frame.breakpoints[-1]
        assert frame.integrate(np.ones_like(frame.nodes)) == pytest.approx(
            0.1 * 2.0 * math.sinh(span), rel=1e-10
        )

    def test_breakpoints_symmetric(self, frame: Frame) -> None:
        b = np.array(frame.breakpoints)
        assert b == pytest.approx(-b[::-1])
        assert frame.chart.half_width_standard in frame.breakpoints

    def test_points_have_their_signed_distance(self, frame: Frame) -> None:
        px, py = frame.points()
        assert px.shape == (frame.s_nodes, frame.nodes.size)
        x = signed_distance_arrays(frame.axis, px, py)
        assert x == pytest.approx(np.broadcast_to(frame.nodes, x.shape), abs=1e-8)

    def test_with_budget_cached(self, frame: Frame) -> None:
        assert frame.with_budget(frame.budget) is frame
        assert frame.with_budget(48) is frame.with_budget(48)
        assert frame.with_budget(48).nodes.size == 2 * frame.nodes.size

    def test_same_as(self, frame: Frame) -> None:
        other = Frame.build(GeodesicClass.of(Isometry.diagonal(0.1)), budget=12)
        assert frame.same_as(other)
        assert not frame.same_as(Frame.build(GeodesicClass.of(Isometry.diagonal(0.2))))

    def test_lift_count(self, frame: Frame) -> None:
        assert frame.lift_count() == math.ceil(frame.twist_span / 0.1)


class TestGreenOperator:
    def test_symmetric(self, frame: Frame) -> None:
        rng = np.random.default_rng(0)
        f = rng.normal(size=frame.nodes.size) / np.cosh(frame.nodes)
        h = rng.normal(size=frame.nodes.size) / np.cosh(frame.nodes)
        assert frame.pair(f, h) == pytest.approx(frame.pair(h, f), rel=1e-10)

    def test_matches_dense_kernel(self, frame: Frame) -> None:
        x = frame.nodes
        K = GREEN_KERNEL_SCALE * annular_left(np.minimum.outer(x, x)) * annular_right(np.maximum.outer(x, x))
        h = np.exp(-((x - 1.0) ** 2))
        dense = K @ (frame.weights * h)
        assert frame.green(h).values == pytest.approx(dense, rel=1e-9)

    def test_positive(self, frame: Frame) -> None:
        rng = np.random.default_rng(1)
        for _ in range(5):
            f = rng.normal(size=frame.nodes.size) / np.cosh(frame.nodes)
            assert frame.pair(f, f) > 0.0

    def test_positive_on_random_products(self, frame: Frame) -> None:
        rng = np.random.default_rng(2)
        pool = [model_gradient(frame)]
        for _ in range(6):
            pool.append(
                model_thick(
                    frame,
                    int(rng.choice([1, -1])),
                    radius=float(rng.uniform(0.3, 1.0)),
                    penetration=float(rng.uniform(0.1, 2.0)),
                    decay=float(rng.uniform(0.5, 2.0)),
                )
            )
        x = frame.nodes
        for _ in range(50):
            a, b, c, d = (pool[k] for k in rng.integers(0, len(pool), size=4))
            f = a.magnitude(x) * b.magnitude(x)
            h = c.magnitude(x) * d.magnitude(x)
            assert frame.pair(f, h) > 0.0
            assert frame.pair(f, f) > 0.0
            assert np.all(frame.green(h).values > 0.0)

    def test_constant_is_almost_fixed(self, frame: Frame) -> None:
        ones = np.ones_like(frame.nodes)
        worst, top = max_principle(frame, ones)
        assert top == 1.0
        assert worst <= 1.0 + 1e-2
        assert frame.green(ones)(np.array([0.0]))[0] == pytest.approx(1.0, abs=2e-2)

    def test_max_principle(self, frame: Frame) -> None:
        h = np.exp(-frame.nodes**2)
        worst, top = max_principle(frame, h)
        assert 0.0 < worst < top

    def test_profile_outside_grid(self, frame: Frame) -> None:
        h = np.exp(-frame.nodes**2)
        profile = frame.green(h)
        far = frame.breakpoints[-1] + 2.0
        inside = profile(np.array([frame.breakpoints[-1] - 1e-6]))[0]
        outside = profile(np.array([far]))[0]
        assert 0.0 < outside < inside


class TestPairings:
    def test_wp_inner_matches_norm(self, pair) -> None:
        grad, _ = pair
        assert wp_inner(grad, grad).value == pytest.approx(grad.norm_squared(), rel=1e-12)

    def test_wp_inner_symmetric(self, pair) -> None:
        grad, thick = pair
        assert wp_inner(grad, thick).value == pytest.approx(wp_inner(thick, grad).value, rel=1e-12)

    def test_pairing_positive_and_symmetric(self, pair) -> None:
        grad, thick = pair
        a = pairing(Product(grad, grad), Product(thick, thick))
        b = pairing(Product(thick, thick), Product(grad, grad))
        assert a.value > 0.0
        assert a.value == pytest.approx(b.value, rel=1e-10)
        assert a.quadrature_error <= 0.03 * a.value

    def test_product_frame(self, pair, frame: Frame) -> None:
        grad, thick = pair
        assert Product(grad, thick).frame is frame

    def test_riemann_entry(self, pair) -> None:
        grad, thick = pair
        entry = riemann_entry(grad, thick, grad, thick)
        single = pairing(Product(grad, thick), Product(grad, thick))
        assert entry.value == pytest.approx(2.0 * single.value, rel=1e-12)


class TestHolderChain:
    def test_six_entries(self, pair) -> None:
        chain = holder_chain(*pair)
        assert len(chain) == 6
        assert chain[0].value == chain[1].value == chain[2].value
        assert chain[3].value == chain[4].value

    def test_nondecreasing(self, pair) -> None:
        values = [c.value for c in holder_chain(*pair)]
        for a, b in zip(values[:-1], values[1:]):
            assert a <= b + 1e-12 * abs(b)

    def test_last_entry_is_split_product(self, pair) -> None:
        grad, thick = pair
        q = pairing(Product(grad, grad), Product(thick, thick)).value
        assert holder_chain(grad, thick)[-1].value == pytest.approx(q, rel=0.03)
