"""The Green operator in collar frames and the quartic pairings built on it.

A frame is the annular cover of a closed geodesic, coordinatized by the
position s along the lift and the signed distance x from it.  On functions
of x alone, Δ = -2(D-2)⁻¹ has the separable kernel

    K(x, x') = (2/π)·u_L(min)·u_R(max),   u_L = 1 - θ cot θ,   u_R(x) = u_L(-x)

against cosh x' dx', with θ = 2·arctan(e^x).  The discretized kernel is a
semiseparable matrix, so Δ costs O(n) per profile and the bilinear form
fᵀWKWh is symmetric up to rounding and positive.

Differentials anchored in another frame are brought over through the twist
family Aⁿ·L of lifts of their geodesic adjacent to this frame's axis.
Pairings that mix frames keep the rotation-invariant part of the integrand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np
from scipy import integrate

from ..errors import QuadratureError
from ..groups import GeodesicClass
from ..helpers import debug_log
from ..kernels import GREEN_SCALE, q1_fundamental
from ..models import PairingValue
from ..plane import Geodesic, fermi_points, signed_distance_arrays
from ..surfaces.collar import CollarChart, collar_chart

if TYPE_CHECKING:
    from .differentials import ModelDifferential
    from .surface import SurfaceGreen

GREEN_KERNEL_SCALE = 2.0 / math.pi
MAX_BUDGET = 256
PANEL = 0.5
# Below this angle 1 - θ cot θ is summed from its series.
_SERIES_ANGLE = 1e-2


# ── Annular solutions ─────────────────────────────────────


def annular_left(x: np.ndarray | float) -> np.ndarray:
    """u_L(x) = 1 - θ cot θ, the solution of (D - 2)u = 0 vanishing as x → -∞."""
    x = np.clip(np.asarray(x, dtype=float), -700.0, 700.0)
    theta = 2.0 * np.arctan(np.exp(x))
    out = np.empty_like(theta)
    small = theta < _SERIES_ANGLE
    t2 = theta[small] ** 2
    out[small] = t2 * (1.0 / 3.0 + t2 * (1.0 / 45.0 + t2 * (2.0 / 945.0 + t2 / 4725.0)))
    big = ~small
    # cot θ = -sinh x
    out[big] = 1.0 + theta[big] * np.sinh(x[big])
    return out


def annular_right(x: np.ndarray | float) -> np.ndarray:
    return annular_left(-np.asarray(x, dtype=float))


def annular_kernel(x: float, x2: float) -> float:
    """K(x, x') of Δ on profiles depending only on the distance to the core."""
    lo, hi = min(x, x2), max(x, x2)
    return float(GREEN_KERNEL_SCALE * annular_left(lo) * annular_right(hi))


def annular_kernel_direct(x: float, x2: float, *, t_max: float = 60.0) -> float:
    """K(x, x') as the integral of q1_fundamental/(2π) along the geodesic."""
    if x == x2:
        raise ValueError("direct annular kernel needs x != x'")
    a = math.cosh(x) * math.cosh(x2)
    b = math.sinh(x) * math.sinh(x2)

    def f(t: float) -> float:
        return q1_fundamental(math.acosh(a * math.cosh(t) - b))

    value, _ = integrate.quad(f, 0.0, t_max, limit=200, epsabs=0.0, epsrel=1e-11)
    return 2.0 * GREEN_SCALE * value


# ── Frames ────────────────────────────────────────────────


@dataclass(frozen=True)
class GreenProfile:
    """Δh for a profile h of one frame, evaluable at any signed distance."""

    nodes: np.ndarray
    values: np.ndarray
    left_total: float  # Σ u_R w h, the weight seen from x < nodes[0]
    right_total: float  # Σ u_L w h, the weight seen from x > nodes[-1]

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.interp(x, self.nodes, self.values)
        left = x < self.nodes[0]
        right = x > self.nodes[-1]
        if np.any(left):
            out[left] = GREEN_KERNEL_SCALE * annular_left(x[left]) * self.left_total
        if np.any(right):
            out[right] = GREEN_KERNEL_SCALE * annular_right(x[right]) * self.right_total
        return out


def max_principle(frame: "Frame", values: np.ndarray, points: np.ndarray | None = None) -> tuple[float, float]:
    """(max |Δh| at *points*, max |h|) for a profile h on frame's nodes."""
    h = np.asarray(values, dtype=float)
    x = frame.nodes if points is None else np.asarray(points, dtype=float)
    return float(np.max(np.abs(frame.green(h)(x)))), float(np.max(np.abs(h)))


def _panel_rule(breaks: list[float], budget: int) -> tuple[np.ndarray, np.ndarray]:
    t, w = np.polynomial.legendre.leggauss(budget)
    xs, ws = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        pieces = max(1, math.ceil((b - a) / PANEL))
        edges = np.linspace(a, b, pieces + 1)
        for lo, hi in zip(edges[:-1], edges[1:]):
            xs.append(0.5 * (hi - lo) * t + 0.5 * (hi + lo))
            ws.append(0.5 * (hi - lo) * w)
    return np.concatenate(xs), np.concatenate(ws)


@dataclass(eq=False)
class Frame:
    """Annular cover of one closed geodesic with a Gauss–Legendre x-grid."""

    geodesic: GeodesicClass
    chart: CollarChart
    breakpoints: tuple[float, ...]
    budget: int
    s_nodes: int = 8
    twist_span: float = 6.0
    nodes: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)
    _left: np.ndarray = field(init=False, repr=False)
    _right: np.ndarray = field(init=False, repr=False)
    _budgets: dict[int, "Frame"] = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self) -> None:
        x, w = _panel_rule(list(self.breakpoints), self.budget)
        self.nodes = x
        self.weights = w * np.cosh(x)
        self._left = annular_left(x)
        self._right = annular_right(x)

    @classmethod
    def build(
        cls,
        alpha: GeodesicClass,
        *,
        thick_radius: float = 0.5,
        budget: int = 24,
        s_nodes: int = 8,
        twist_span: float = 6.0,
        reach: float = 6.0,
    ) -> "Frame":
        """Frame about *alpha*; panels break at the collar and thick-band edges."""
        chart = collar_chart(alpha)
        w, wt = chart.half_width_standard, chart.half_width_extended
        outer = w + 2.0 * thick_radius
        span = max(outer, wt) + reach
        cuts = {0.0, w, wt, outer, span}
        breaks = sorted({c for c in cuts} | {-c for c in cuts})
        return cls(alpha, chart, tuple(breaks), budget, s_nodes, twist_span)

    @property
    def length(self) -> float:
        return self.geodesic.length

    @property
    def axis(self) -> Geodesic:
        return self.geodesic.axis

    def with_budget(self, budget: int) -> "Frame":
        if budget == self.budget:
            return self
        cached = self._budgets.get(budget)
        if cached is None:
            cached = Frame(
                self.geodesic, self.chart, self.breakpoints, budget, self.s_nodes, self.twist_span
            )
            self._budgets[budget] = cached
        return cached

    def same_as(self, other: "Frame") -> bool:
        return self is other or (
            abs(self.length - other.length) <= 1e-12 * max(1.0, self.length)
            and self.axis.same_line(other.axis)
        )

    # ── Integration and Δ on profiles ──

    def integrate(self, values: np.ndarray) -> float:
        """∫ over one fundamental annulus; 2-D values are averaged over s first."""
        values = np.asarray(values, dtype=float)
        if values.ndim == 2:
            values = values.mean(axis=0)
        return self.length * float(np.dot(self.weights, values))

    def green(self, values: np.ndarray) -> GreenProfile:
        h = np.asarray(values, dtype=float)
        a = self._left * self.weights * h
        b = self._right * self.weights * h
        below = np.cumsum(a)
        above = np.concatenate((np.cumsum(b[::-1])[::-1][1:], [0.0]))
        H = GREEN_KERNEL_SCALE * (self._right * below + self._left * above)
        return GreenProfile(self.nodes, H, float(np.sum(b)), float(np.sum(a)))

    def pair(self, f: np.ndarray, h: np.ndarray) -> float:
        """ℓ·fᵀ W K W h for profiles on this frame's nodes."""
        return self.integrate(np.asarray(f, dtype=float) * self.green(h).values)

    # ── Points and lifts ──

    def points(self) -> tuple[np.ndarray, np.ndarray]:
        """Upper half-plane coordinates of the (s, x) grid, shape (s_nodes, n)."""
        s = (np.arange(self.s_nodes) + 0.5) * (self.length / self.s_nodes)
        S, X = np.meshgrid(s, self.nodes, indexing="ij")
        return fermi_points(self.axis, S, X)

    def lift_count(self) -> int:
        return math.ceil(self.twist_span / self.length)

    def lift_distances(self, other: "Frame") -> list[tuple[int, np.ndarray]]:
        """Signed distances of the grid to the twist family Aⁿ·axis(other)."""
        px, py = self.points()
        A = self.geodesic.representative
        N = self.lift_count()
        out: list[tuple[int, np.ndarray]] = []
        step = A.power(-N)
        forward = A
        ax = other.axis.image(step)
        for n in range(-N, N + 1):
            out.append((n, signed_distance_arrays(ax, px, py)))
            ax = ax.image(forward)
        return out


def lifted(frame: Frame, other: Frame, fn) -> tuple[np.ndarray, np.ndarray]:
    """Σ over the twist family of fn(signed distance to the lift), and the outermost terms."""
    N = frame.lift_count()
    total: np.ndarray | None = None
    edge: np.ndarray | None = None
    for n, x in frame.lift_distances(other):
        v = fn(x)
        total = v if total is None else total + v
        if abs(n) == N:
            edge = v if edge is None else edge + v
    assert total is not None and edge is not None
    return total, edge


def _tail_factor(length: float) -> float:
    q = math.exp(-length)
    return q / (1.0 - q)


# ── Products and pairings ─────────────────────────────────


@dataclass(frozen=True)
class Product:
    """Pointwise product |μ|·|ν| of two model differentials."""

    left: "ModelDifferential"
    right: "ModelDifferential"

    @property
    def frame(self) -> Frame | None:
        """The common frame when both factors live in one, else None."""
        f = self.left.frame
        return f if f.same_as(self.right.frame) else None

    def on_frame(self, frame: Frame) -> tuple[np.ndarray, np.ndarray]:
        """Values on frame's (s, x) grid, and the part carried by outermost lifts."""
        a, ea = self.left.on_frame(frame)
        b, eb = self.right.on_frame(frame)
        return a * b, np.abs(a * eb) + np.abs(ea * b)


def _green_on(h: Product, home: Frame, frame: Frame) -> tuple[np.ndarray, np.ndarray]:
    """Δh on frame's grid for a product living in *home*."""
    values, _ = h.on_frame(home)
    profile = home.green(values[0])
    if home.same_as(frame):
        v = np.broadcast_to(profile(frame.nodes), (frame.s_nodes, frame.nodes.size))
        return v, np.zeros_like(v)
    return lifted(frame, home, profile)


def _pair_once(f: Product, h: Product, frame: Frame) -> tuple[float, float]:
    fv, fe = f.on_frame(frame)
    hv, he = h.on_frame(frame)
    if h.frame is not None and h.frame.same_as(frame):
        value = frame.pair(fv.mean(axis=0), hv[0])
        edge = frame.pair(fe.mean(axis=0), hv[0])
    else:
        value = frame.pair(fv.mean(axis=0), hv.mean(axis=0))
        edge = frame.pair(fe.mean(axis=0), hv.mean(axis=0)) + frame.pair(
            fv.mean(axis=0), he.mean(axis=0)
        )
    return value, abs(edge) * _tail_factor(frame.length)


def _home(f: Product, h: Product) -> tuple[Product, Product, Frame]:
    if h.frame is not None:
        return f, h, h.frame
    if f.frame is not None:
        return h, f, f.frame
    return f, h, f.left.frame


def pairing(
    f: Product,
    h: Product,
    *,
    rel_tol: float = 0.03,
    abs_tol: float = 1e-300,
    max_budget: int = MAX_BUDGET,
    surface: "SurfaceGreen | None" = None,
) -> PairingValue:
    """(f, h) = ∫ f·Δh dA, refined until two budgets agree to rel_tol.

    The integral is taken in a frame where h lives when there is one
    (self-adjointness lets f and h swap).  With *surface* both products are
    carried onto its domain and paired through the surface Green operator.
    """
    if surface is not None:
        return surface.pair(surface.product(f), surface.product(h), rel_tol=rel_tol, abs_tol=abs_tol)
    f, h, home = _home(f, h)
    budget = home.budget
    coarse, _ = _pair_once(f, h, home.with_budget(max(4, budget // 2)))
    while True:
        value, tail = _pair_once(f, h, home.with_budget(budget))
        err = abs(value - coarse)
        if err <= rel_tol * abs(value) + abs_tol:
            return PairingValue(value, err, tail)
        if budget * 2 > max_budget:
            raise QuadratureError(
                f"pairing did not settle: {value:.6g} vs {coarse:.6g} at budget {budget}"
            )
        coarse, budget = value, budget * 2


def wp_inner(
    mu: "ModelDifferential", nu: "ModelDifferential", *, surface: "SurfaceGreen | None" = None
) -> PairingValue:
    """⟨μ, ν⟩ = ∫ |μ||ν| dA in μ's frame, or over the surface's domain."""
    if surface is not None:
        return surface.integrate(surface.product(Product(mu, nu)))
    frame = mu.frame
    vals = []
    tail = 0.0
    for b in (max(4, frame.budget // 2), frame.budget):
        fr = frame.with_budget(b)
        v, e = Product(mu, nu).on_frame(fr)
        vals.append(fr.integrate(v))
        tail = abs(fr.integrate(e)) * _tail_factor(fr.length)
    return PairingValue(vals[1], abs(vals[1] - vals[0]), tail)


def riemann_entry(
    a: "ModelDifferential",
    b: "ModelDifferential",
    c: "ModelDifferential",
    d: "ModelDifferential",
    *,
    rel_tol: float = 0.03,
    surface: "SurfaceGreen | None" = None,
) -> PairingValue:
    """R(a b̄ c d̄) = (a b̄, c d̄) + (a d̄, c b̄) on magnitudes."""
    return pairing(Product(a, b), Product(c, d), rel_tol=rel_tol, surface=surface) + pairing(
        Product(a, d), Product(c, b), rel_tol=rel_tol, surface=surface
    )


# ── Hölder chain ──────────────────────────────────────────


def _chain_once(
    mu1: "ModelDifferential", mu2: "ModelDifferential", frame: Frame
) -> tuple[float, float, float, float]:
    cross = Product(mu1, mu2)
    F, _ = cross.on_frame(frame)
    sq1 = Product(mu1, mu1)
    sq2 = Product(mu2, mu2)
    a1, _ = sq1.on_frame(frame)
    a2, _ = sq2.on_frame(frame)
    D1, _ = _green_on(sq1, mu1.frame, frame)
    D2, _ = _green_on(sq2, mu2.frame, frame)
    P, _ = _pair_once(cross, cross, frame)
    middle = frame.integrate(F * np.sqrt(D1 * D2))
    A = frame.integrate(a1 * D2)
    B = frame.integrate(a2 * D1)
    return P, middle, A, B


def holder_chain(mu1: "ModelDifferential", mu2: "ModelDifferential") -> list[PairingValue]:
    """The six entries from Re(μ1μ̄2, μ1μ̄2) up to the split Hölder product.

    Magnitude models carry no phase, so the first three entries coincide,
    as do the fourth and fifth.
    """
    frame = mu1.frame
    fine = _chain_once(mu1, mu2, frame)
    coarse = _chain_once(mu1, mu2, frame.with_budget(max(4, frame.budget // 2)))
    P, middle, A, B = fine
    last = math.sqrt(max(A, 0.0) * max(B, 0.0))
    coarse_last = math.sqrt(max(coarse[2], 0.0) * max(coarse[3], 0.0))
    eP = abs(P - coarse[0])
    eM = abs(middle - coarse[1])
    eL = abs(last - coarse_last) + 0.5 * abs(A - B)
    chain = [
        PairingValue(P, eP),
        PairingValue(P, eP),
        PairingValue(P, eP),
        PairingValue(middle, eM),
        PairingValue(middle, eM),
        PairingValue(last, eL),
    ]
    debug_log("pairings", "holder_chain", values=[c.value for c in chain])
    return chain
