"""Δ on a whole finite-area surface, through its automorphic Green's function.

The annular kernel of :mod:`.pairings` is exact on the cylinder covering one
collar and is the collar approximation on a surface.  Here

    Δh(p) = ∫_D G(p, q) h(q) dA(q),   G(p, q) = (1/2π)·Σ_γ q1(d(p, γq)),

over a Dirichlet domain D, with the orbit sum truncated at R.  Beyond R the
orbit is spread evenly enough that its share is the mean of h times
∫_R^∞ q1(r)·sinh r dr.  A node coinciding with p contributes the mean of q1
over a disk with the node's area.

Model differentials are carried onto the domain by summing their profile
over the lifts of their geodesic that pass near it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING, Callable

import numpy as np
from scipy import integrate

from ..errors import InfiniteCovolumeError, QuadratureError
from ..groups import DEFAULT_CAP, FuchsianGroup, GeodesicClass, orbit_ball
from ..helpers import debug_log
from ..kernels import GREEN_SCALE, q1_fundamental, q1_profile
from ..models import PairingValue
from ..plane import (
    ElementKind,
    Geodesic,
    PlanePoint,
    apply,
    classify,
    distance_to_geodesic,
    signed_distance_arrays,
    to_hyperboloid,
    to_hyperboloid_arrays,
)
from ..surfaces.domain import FundamentalDomain, dirichlet_domain

if TYPE_CHECKING:
    from .differentials import ModelDifferential
    from .pairings import Product

SurfaceFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]

MINKOWSKI = np.array([-1.0, 1.0, 1.0])
# Orbit points closer than this to a node are that node.
COINCIDENT = 1e-6
# Relative uncertainty of the mean-field share beyond R.
FAR_FIELD_RTOL = 0.1
# Profiles are summed over lifts within this distance of a node.
PROFILE_REACH = 3.0


def far_field(R: float) -> float:
    """∫_R^∞ q1(r)·sinh r dr: the mass of G beyond R for an evenly spread orbit."""
    value, _ = integrate.quad(lambda r: q1_fundamental(r) * math.sinh(r), R, R + 40.0, limit=200)
    return float(value)


def self_cell(weights: np.ndarray) -> np.ndarray:
    """G averaged over a disk of area w about its pole: (1/2π)(-2·log(r/2) - 1), πr² = w."""
    r = np.sqrt(np.asarray(weights, dtype=float) / math.pi)
    return GREEN_SCALE * (-2.0 * np.log(0.5 * r) - 1.0)


def lifts_near(
    G: FuchsianGroup,
    alpha: GeodesicClass,
    center: PlanePoint,
    reach: float,
    *,
    cap: int = DEFAULT_CAP,
) -> list[Geodesic]:
    """Distinct lifts γ·axis(α) passing within *reach* of center, orientation kept."""
    d0 = distance_to_geodesic(center, alpha.axis)
    ball = orbit_ball(G, center, center, reach + d0 + alpha.length, cap=cap, certify=False)
    seen: set[tuple] = set()
    out: list[Geodesic] = []
    for e in ball.elements:
        lift = alpha.axis.image(e.isometry)
        if distance_to_geodesic(center, lift) > reach:
            continue
        key = tuple(round(t, 9) if abs(t) < 1e12 else math.inf for t in (lift.start, lift.end))
        if key in seen:
            continue
        seen.add(key)
        out.append(lift)
    return out


@dataclass
class SurfaceGreen:
    """Green operator of a finite-area surface on functions of the upper half-plane."""

    group: FuchsianGroup
    domain: FundamentalDomain
    radius: float = 3.0
    rho_max: float = 5.0
    nodes: int = 8
    cap: int = DEFAULT_CAP
    _lifts: dict[tuple[float, float, float], list[Geodesic]] = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self) -> None:
        if self.domain.is_band or not math.isfinite(self.domain.area):
            raise InfiniteCovolumeError("the surface Green operator needs a finite-area domain")
        if any(classify(b) is ElementKind.HYPERBOLIC for b in self.group.boundary_elements):
            raise InfiniteCovolumeError(
                "the surface has geodesic boundary; its Green operator lives on infinite area"
            )
        if not self.radius > 0.0:
            raise ValueError(f"truncation radius must be positive, got {self.radius}")

    @classmethod
    def build(
        cls,
        G: FuchsianGroup,
        *,
        radius: float = 3.0,
        rho_max: float = 5.0,
        nodes: int = 8,
        cap: int = DEFAULT_CAP,
    ) -> "SurfaceGreen":
        return cls(G, dirichlet_domain(G, cap=cap), radius, rho_max, nodes, cap)

    @cached_property
    def far(self) -> float:
        return far_field(self.radius)

    def rule(self, n: int | None = None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.domain.quadrature_nodes(n or self.nodes, self.rho_max)

    def lost_area(self, n: int | None = None) -> float:
        """Area of the domain outside the rule: the cusp beyond rho_max."""
        _, _, w = self.rule(n)
        return max(self.domain.area - float(np.sum(w)), 0.0)

    # ── The kernel ──

    def kernel(
        self,
        px: np.ndarray,
        py: np.ndarray,
        qx: np.ndarray,
        qy: np.ndarray,
        qw: np.ndarray,
    ) -> np.ndarray:
        """Truncated G(p_i, q_j) as an (M, N) matrix; each p is first reduced into the domain."""
        px, py = np.ravel(px), np.ravel(py)
        Qm = to_hyperboloid_arrays(np.ravel(qx), np.ravel(qy)) * MINKOWSKI
        Xc = to_hyperboloid(self.domain.center)
        node_radius = float(np.arccosh(np.maximum(-(Qm @ Xc), 1.0)).max())
        reach = self.radius + node_radius
        cell = self_cell(qw)

        out = np.empty((px.size, Qm.shape[0]))
        for i in range(px.size):
            p, _ = self.domain.reduce_point(PlanePoint(float(px[i]), float(py[i])))
            ball = orbit_ball(self.group, self.domain.center, p, reach, cap=self.cap, certify=False)
            P = np.array([to_hyperboloid(apply(e.isometry, p)) for e in ball.elements])
            d = np.arccosh(np.maximum(-(P @ Qm.T), 1.0))
            near = d <= COINCIDENT
            mask = (d <= self.radius) & ~near
            vals = np.zeros_like(d)
            vals[mask] = q1_profile(d[mask])
            out[i] = GREEN_SCALE * vals.sum(axis=0) + np.where(near.any(axis=0), cell, 0.0)
        return out

    # ── Δ and the pairing ──

    def apply(self, h: SurfaceFunction, x: np.ndarray, y: np.ndarray, *, nodes: int | None = None) -> np.ndarray:
        """Δh at the points (x, y)."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        qx, qy, qw = self.rule(nodes)
        hw = qw * np.asarray(h(qx, qy), dtype=float)
        K = self.kernel(x, y, qx, qy, qw)
        values = K @ hw + self.far * float(np.sum(hw)) / self.domain.area
        return values.reshape(x.shape)

    def quadratic_form(self, f: SurfaceFunction, h: SurfaceFunction, nodes: int | None = None) -> tuple[float, float]:
        """(fᵀWKWh plus the mean-field share, the mean-field share) on one rule."""
        x, y, w = self.rule(nodes)
        fw = w * np.asarray(f(x, y), dtype=float)
        hw = w * np.asarray(h(x, y), dtype=float)
        K = self.kernel(x, y, x, y, w)
        far = self.far * float(np.sum(fw)) * float(np.sum(hw)) / self.domain.area
        return float(fw @ K @ hw) + far, far

    def pair(
        self,
        f: SurfaceFunction,
        h: SurfaceFunction,
        *,
        rel_tol: float = 0.03,
        abs_tol: float = 1e-300,
        max_nodes: int = 16,
    ) -> PairingValue:
        """∫_D f·Δh dA, refined until two rules agree to rel_tol.

        The kernel tail carries the mean-field uncertainty and the share of
        the cusp beyond rho_max.
        """
        step = max(2, self.nodes // 2)
        n = self.nodes
        coarse, _ = self.quadratic_form(f, h, n)
        while True:
            n += step
            value, far = self.quadratic_form(f, h, n)
            err = abs(value - coarse)
            if err <= rel_tol * abs(value) + abs_tol:
                lost = self.lost_area(n) / self.domain.area
                tail = FAR_FIELD_RTOL * abs(far) + lost * abs(value)
                debug_log("surface", "pair", value=value, err=err, tail=tail, nodes=n)
                return PairingValue(value, err, tail)
            if n + step > max_nodes:
                raise QuadratureError(
                    f"surface pairing did not settle: {value:.6g} vs {coarse:.6g} at {n} nodes"
                )
            coarse = value

    def integrate(self, f: SurfaceFunction) -> PairingValue:
        """∫_D f dA on the operator's rule and one refinement."""
        vals = []
        for n in (self.nodes, self.nodes + max(2, self.nodes // 2)):
            x, y, w = self.rule(n)
            vals.append(float(np.sum(w * np.asarray(f(x, y), dtype=float))))
        return PairingValue(vals[1], abs(vals[1] - vals[0]))

    def max_principle(self, h: SurfaceFunction, x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
        """(max Δh at the points, max h on the rule)."""
        qx, qy, _ = self.rule()
        top = float(np.max(h(qx, qy)))
        return float(np.max(self.apply(h, x, y))), top

    # ── Model differentials on the surface ──

    def differential(self, mu: "ModelDifferential") -> SurfaceFunction:
        """|μ| summed over the lifts of its geodesic near the domain."""
        alpha = mu.frame.geodesic
        key = mu.frame.axis.start, mu.frame.axis.end, mu.frame.length
        lifts = self._lifts.get(key)
        if lifts is None:
            lifts = lifts_near(
                self.group, alpha, self.domain.center, self.rho_max + PROFILE_REACH, cap=self.cap
            )
            self._lifts[key] = lifts

        def values(x: np.ndarray, y: np.ndarray) -> np.ndarray:
            out = np.zeros(np.shape(x))
            for lift in lifts:
                out += mu.magnitude(signed_distance_arrays(lift, x, y))
            return out

        return values

    def product(self, f: "Product") -> SurfaceFunction:
        a, b = self.differential(f.left), self.differential(f.right)
        return lambda x, y: a(x, y) * b(x, y)


def collar_gap(annular: PairingValue, surface: PairingValue) -> float:
    """Relative gap between the collar approximation and the surface value."""
    return abs(annular.value - surface.value) / max(abs(surface.value), 1e-300)
