"""Collars of short geodesics and the thick-thin decomposition.

Points near a geodesic are described in Fermi coordinates of a lift moved
onto the imaginary axis: polar (r, θ), or the signed distance
x = log tan(θ/2) with sin θ = sech x.  The area element is
dA = (dr/r)·(dθ/sin²θ) = d(log r)·cosh x dx.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal, Sequence

import numpy as np

from ..errors import CollarOverlapError, QuadratureError
from ..groups import (
    DEFAULT_CAP,
    FuchsianGroup,
    GeodesicClass,
    coset_representatives,
    injectivity_radius,
    short_geodesics,
)
from ..helpers import debug_log
from ..models import PairingValue
from ..plane import PlanePoint, fermi_coordinates


def extended_half_width(length: float) -> float:
    """w̃ with sinh w̃ · sinh(ℓ/2) = 1."""
    return math.asinh(1.0 / math.sinh(0.5 * length))


def standard_half_width(length: float) -> float:
    """Distance from the core to the θ = ℓ ray."""
    return -math.log(math.tan(0.5 * length))


def angle_of(x: float | np.ndarray) -> float | np.ndarray:
    """θ for a signed Fermi distance x."""
    return 2.0 * np.arctan(np.exp(x))


def signed_distance(theta: float | np.ndarray) -> float | np.ndarray:
    return np.log(np.tan(0.5 * theta))


@dataclass(frozen=True)
class CollarChart:
    geodesic: GeodesicClass
    half_width_extended: float
    half_width_standard: float

    @property
    def length(self) -> float:
        return self.geodesic.length

    @property
    def angular_range(self) -> tuple[float, float]:
        return (self.length, math.pi - self.length)

    def fermi(self, p: PlanePoint) -> tuple[float, float]:
        """(log r mod ℓ, x) of p relative to this lift."""
        r, theta = fermi_coordinates(p, self.geodesic.axis)
        return math.log(r) % self.length, float(signed_distance(theta))

    def contains(self, p: PlanePoint, *, extended: bool = True) -> bool:
        """True when p lies in the collar about this particular lift."""
        _, x = self.fermi(p)
        w = self.half_width_extended if extended else self.half_width_standard
        return abs(x) <= w

    def integrate(
        self,
        f: Callable[[np.ndarray, np.ndarray], np.ndarray],
        x_lo: float | None = None,
        x_hi: float | None = None,
        *,
        nodes: int = 32,
        rel_tol: float = 1e-8,
        max_nodes: int = 4096,
    ) -> PairingValue:
        """∫ f(s, x) ds·cosh x dx over one fundamental annulus s ∈ [0, ℓ).

        Defaults to the standard collar |x| <= w.  f must be vectorized.
        """
        lo = -self.half_width_standard if x_lo is None else x_lo
        hi = self.half_width_standard if x_hi is None else x_hi
        return annulus_quadrature(f, self.length, lo, hi, nodes=nodes, rel_tol=rel_tol, max_nodes=max_nodes)


def collar_chart(alpha: GeodesicClass) -> CollarChart:
    length = alpha.length
    return CollarChart(alpha, extended_half_width(length), standard_half_width(length))


def annulus_quadrature(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    length: float,
    x_lo: float,
    x_hi: float,
    *,
    nodes: int = 32,
    s_nodes: int = 8,
    rel_tol: float = 1e-8,
    max_nodes: int = 4096,
) -> PairingValue:
    """Tensor rule: periodic trapezoid in s, Gauss–Legendre in x, doubled until stable."""
    prev: float | None = None
    n = nodes
    while n <= max_nodes:
        t, wt = np.polynomial.legendre.leggauss(n)
        x = 0.5 * (x_hi - x_lo) * t + 0.5 * (x_hi + x_lo)
        wx = 0.5 * (x_hi - x_lo) * wt * np.cosh(x)
        s = (np.arange(s_nodes) + 0.5) * (length / s_nodes)
        S, X = np.meshgrid(s, x, indexing="ij")
        vals = np.asarray(f(S, X), dtype=float)
        value = float(np.sum(vals * wx[None, :]) * (length / s_nodes))
        if prev is not None and abs(value - prev) <= rel_tol * max(abs(value), 1e-300):
            return PairingValue(value, abs(value - prev))
        prev = value
        n *= 2
    raise QuadratureError(f"annulus quadrature did not converge with {max_nodes} nodes")


# ── Thick-thin decomposition ──────────────────────────────

Region = Literal["collar", "thick", "cusp"]


@dataclass(frozen=True)
class PointClass:
    point: PlanePoint
    region: Region
    geodesic: int | None = None
    injectivity: float | None = None


def thick_thin(
    G: FuchsianGroup,
    epsilon: float,
    sample: Sequence[PlanePoint],
    *,
    base: PlanePoint | None = None,
    cap: int = DEFAULT_CAP,
) -> list[PointClass]:
    """Label each sample point as in the collar of a short geodesic, thick, or cusp.

    A point is in the collar of α (ℓα < ε) when it is within w̃(α) of a
    lift of α.  Other points are thick when inj >= ε/2.
    """
    base = G.basepoint() if base is None else base
    short = [c for c in short_geodesics(G, base, epsilon, cap=cap) if c.length < epsilon]
    charts = [collar_chart(c) for c in short]

    out: list[PointClass] = []
    for p in sample:
        owners = [
            k
            for k, chart in enumerate(charts)
            if coset_representatives(G, chart.geodesic.representative, p, chart.half_width_extended, cap=cap)
        ]
        if len(owners) > 1:
            raise CollarOverlapError(
                f"point ({p.x:.6g}, {p.y:.6g}) lies in {len(owners)} collars; epsilon {epsilon} is too large"
            )
        if owners:
            out.append(PointClass(p, "collar", owners[0]))
            continue
        inj = injectivity_radius(G, p, cap=cap)
        out.append(PointClass(p, "thick" if inj >= 0.5 * epsilon else "cusp", None, inj))
    debug_log(
        "collar", "thick_thin",
        epsilon=epsilon, points=len(sample), collars=len(charts),
        thin=sum(1 for c in out if c.region != "thick"),
    )
    return out
