"""Orbit sums of distance kernels and their closed-form comparison families.

``q1_fundamental`` is the radial fundamental solution of Δ = -2(D-2)⁻¹:
with t = cosh d it equals 2·(t·arccoth t - 1), the Legendre function
Q₁(t) of the second kind scaled by two.  It is positive, logarithmic as
d → 0 and ≈ (8/3)·e^{-2d} for large d.  The automorphic Green's function is
``(1/2π)·Σ_γ q1_fundamental(d(p, γq))``, normalized so that ∫ G(p, ·) dA = 1.
"""

from __future__ import annotations

import math
from typing import Callable

import mpmath
import numpy as np

from .errors import OnDiagonalError, SingularEvaluationError
from .groups import (
    DEFAULT_CAP,
    FuchsianGroup,
    coset_representatives,
    fit_growth,
    orbit_ball,
)
from .helpers import debug_log
from .models import KernelValue
from .plane import Isometry, PlanePoint, apply, axis, distance_to_geodesic

Q1_ASYMPTOTIC = 8.0 / 3.0
GREEN_SCALE = 1.0 / (2.0 * math.pi)
DIAGONAL_TOL = 1e-8

# Σ_{k>=1} t^{-2k}/(2k+1) converges by a factor 1/9 per term once t >= 3.
_SERIES_SWITCH = 3.0
_SERIES_TERMS = 18


# ── The radial kernel ─────────────────────────────────────


def q1_profile(d: np.ndarray) -> np.ndarray:
    """Vectorized q1_fundamental; caller guarantees d > 0."""
    d = np.asarray(d, dtype=float)
    t = np.cosh(d)
    out = np.empty_like(t)
    near = t < _SERIES_SWITCH
    if np.any(near):
        tn = t[near]
        out[near] = 2.0 * (tn * -np.log(np.tanh(0.5 * d[near])) - 1.0)
    far = ~near
    if np.any(far):
        u = 1.0 / (t[far] * t[far])
        acc = np.zeros_like(u)
        for k in range(_SERIES_TERMS, 0, -1):
            acc = u * (1.0 / (2 * k + 1) + acc)
        out[far] = 2.0 * acc
    return out


def q1_fundamental(d: float) -> float:
    """-2·Q₁(cosh d) with the sign fixed so the value is positive."""
    if not d > 0.0:
        raise SingularEvaluationError(f"q1_fundamental needs d > 0, got {d}")
    return float(q1_profile(np.array([d]))[0])


def q1_reference(d: float, dps: int = 40) -> float:
    """High-precision q1_fundamental through mpmath's Legendre Q."""
    if not d > 0.0:
        raise SingularEvaluationError(f"q1_reference needs d > 0, got {d}")
    with mpmath.workdps(dps):
        t = mpmath.cosh(mpmath.mpf(d))
        return float(2 * mpmath.legenq(1, 0, t, type=3).real)


# ── Orbit sums ────────────────────────────────────────────


def _tail(
    dists: np.ndarray, radius: float, prefactor: float
) -> tuple[float, float]:
    """Integrated e^{-2r} tail beyond *radius* for a fitted orbit-count growth."""
    g, c = fit_growth(dists, radius)
    if g >= 2.0:
        return math.inf, g
    return prefactor * c * g * math.exp((g - 2.0) * radius) / (2.0 - g), g


def _pairwise_sum(values: np.ndarray) -> float:
    # Sorted ascending so the reduction order is fixed and small terms go first.
    return float(math.fsum(np.sort(values)))


def orbit_kernel_sum(
    G: FuchsianGroup,
    p: PlanePoint,
    q: PlanePoint,
    R: float,
    kernel: Callable[[np.ndarray], np.ndarray],
    *,
    prefactor: float = 1.0,
    cap: int = DEFAULT_CAP,
) -> KernelValue:
    ball = orbit_ball(G, p, q, R, cap=cap)
    dists = ball.distances
    value = _pairwise_sum(kernel(dists))
    tail, g = _tail(dists, R, prefactor)
    return KernelValue(value, float(R), tail, len(ball), g)


def k_sum(
    G: FuchsianGroup, p: PlanePoint, q: PlanePoint, R: float, *, cap: int = DEFAULT_CAP
) -> KernelValue:
    """K(p, q) = Σ_γ e^{-2 d(p, γq)} over the orbit ball of radius R."""
    result = orbit_kernel_sum(G, p, q, R, lambda d: np.exp(-2.0 * d), cap=cap)
    debug_log("kernels", "k_sum", radius=R, value=result.value, tail=result.tail)
    return result


def green(
    G: FuchsianGroup, p: PlanePoint, q: PlanePoint, R: float, *, cap: int = DEFAULT_CAP
) -> KernelValue:
    """G(p, q) = (1/2π)·Σ_γ q1_fundamental(d(p, γq))."""
    ball = orbit_ball(G, p, q, R, cap=cap)
    dists = ball.distances
    if dists.size and dists.min() < DIAGONAL_TOL:
        raise OnDiagonalError(
            f"orbit point within {DIAGONAL_TOL:g} of the base point (d = {dists.min():.3g})"
        )
    value = GREEN_SCALE * _pairwise_sum(q1_profile(dists))
    tail, g = _tail(dists, R, GREEN_SCALE * Q1_ASYMPTOTIC)
    debug_log("kernels", "green", radius=R, value=value, tail=tail, terms=dists.size)
    return KernelValue(value, float(R), tail, int(dists.size), g)


def p_alpha(
    G: FuchsianGroup, A: Isometry, p: PlanePoint, R: float, *, cap: int = DEFAULT_CAP
) -> KernelValue:
    """P_α(p) = Σ over ⟨A⟩\\Γ of e^{-2 d(axis(A), γp)}."""
    ax = axis(A)
    reps = coset_representatives(G, A, p, R, cap=cap)
    dists = np.array([distance_to_geodesic(apply(g, p), ax) for g in reps])
    value = _pairwise_sum(np.exp(-2.0 * dists))
    tail, g = _tail(dists, R, 1.0)
    return KernelValue(value, float(R), tail, len(reps), g)


# ── Twist families ────────────────────────────────────────


def twist_family_sum(w: float, length: float) -> float:
    """Σ_n e^{-2(2w + |n|ℓ)} = e^{-4w}·coth ℓ."""
    return math.exp(-4.0 * w) / math.tanh(length)


def half_collar_family_sum(w: float, length: float) -> float:
    """Σ_n e^{-2(w + |n|ℓ)} = e^{-2w}·coth ℓ."""
    return math.exp(-2.0 * w) / math.tanh(length)


def twist_family_direct(w: float, length: float, n: int = 10_000) -> float:
    """Direct summation of the twist family over |k| <= n."""
    k = np.arange(-n, n + 1, dtype=float)
    return math.fsum(np.exp(-2.0 * (2.0 * w + np.abs(k) * length)))


def _log_cosh(x: np.ndarray | float) -> np.ndarray:
    x = np.abs(np.asarray(x, dtype=float))
    near = np.log(np.cosh(np.minimum(x, 20.0)))
    return np.where(x < 20.0, near, x + np.log1p(np.exp(-2.0 * x)) - math.log(2.0))


def _acosh_of_exp(log_c: np.ndarray) -> np.ndarray:
    """acosh(e^L) for L >= 0 without forming e^L."""
    log_c = np.maximum(log_c, 0.0)
    return log_c + np.log1p(np.sqrt(-np.expm1(-2.0 * log_c)))


def crossing_length(w: float, t: float) -> float:
    """Length of the geodesic joining points w from the core on opposite sides, feet t apart."""
    return float(2.0 * _acosh_of_exp(_log_cosh(w) + _log_cosh(0.5 * t)))


def crossing_family_direct(w: float, length: float, n: int = 10_000) -> float:
    """Σ_k e^{-2·crossing_length(w, |k|ℓ)} over |k| <= n."""
    k = np.abs(np.arange(-n, n + 1, dtype=float))
    half = _acosh_of_exp(_log_cosh(w) + _log_cosh(0.5 * k * length))
    return math.fsum(np.exp(-4.0 * half))


def twist_family_upper_sum(w: float, length: float, kappa: float = 0.5) -> float:
    """Closed-form bound on the crossing family.

    crossing_length(w, t) >= 2w always, and >= 2w + κt once (1-κ)t >= 2·log 2.
    """
    if not 0.0 < kappa < 1.0:
        raise ValueError(f"kappa must lie in (0, 1), got {kappa}")
    n0 = math.ceil(2.0 * math.log(2.0) / ((1.0 - kappa) * length))
    q = math.exp(-2.0 * kappa * length)
    return math.exp(-4.0 * w) * ((2 * n0 - 1) + 2.0 * q**n0 / (1.0 - q))
