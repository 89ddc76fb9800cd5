"""Sectional curvature of the span of two model differentials."""

from __future__ import annotations

import math

import numpy as np

from ..errors import NearDependenceError
from ..helpers import debug_log
from ..models import SectionReport
from .differentials import ModelDifferential
from .pairings import Product, pairing, wp_inner
from .surface import SurfaceGreen

DEPENDENCE_TOL = 1e-8


def gbar(g11: float, g22: float, g12: float) -> float:
    """4g₁₁g₂₂ - 2|g₁₂|² - 2(Re g₁₂)² for a real Gram matrix."""
    return 4.0 * g11 * g22 - 4.0 * g12 * g12


def orthonormalizer(gram: np.ndarray) -> np.ndarray:
    """Upper-triangular M with MᵀGM = I, keeping the first vector's direction."""
    L = np.linalg.cholesky(gram)
    return np.linalg.inv(L).T


def bochner_curvature(
    mu1: ModelDifferential,
    mu2: ModelDifferential,
    *,
    rel_tol: float = 0.03,
    surface: SurfaceGreen | None = None,
) -> SectionReport:
    """R̄/ḡ on the plane spanned by μ1 and μ2.

    Magnitudes carry no phase, so Re(12̄, 12̄) and (12̄, 21̄) are both the
    pairing P of |μ1μ2| with itself and the numerator on a unit-norm pair
    is 2P - 2Q with Q = (|μ1|², |μ2|²).  Gram–Schmidt acts on the Gram
    matrix; the numerator scales by det(M)².  With *surface* every pairing
    and inner product is taken over that surface's domain.
    """
    g11 = wp_inner(mu1, mu1, surface=surface).value
    g22 = wp_inner(mu2, mu2, surface=surface).value
    g12 = wp_inner(mu1, mu2, surface=surface).value
    if not (g11 > 0.0 and g22 > 0.0):
        raise NearDependenceError(f"zero-norm differential in span of {mu1.label}, {mu2.label}")

    u1 = mu1.scaled(1.0 / math.sqrt(g11))
    u2 = mu2.scaled(1.0 / math.sqrt(g22))
    c = g12 / math.sqrt(g11 * g22)
    det = 1.0 - c * c
    if det < DEPENDENCE_TOL:
        raise NearDependenceError(
            f"{mu1.label} and {mu2.label} are nearly dependent (Gram determinant {det:.3g})"
        )

    cross = Product(u1, u2)
    P = pairing(cross, cross, rel_tol=rel_tol, surface=surface)
    Q = pairing(Product(u1, u1), Product(u2, u2), rel_tol=rel_tol, surface=surface)
    rbar_unit = 2.0 * P.value - 2.0 * Q.value

    gram = np.array([[1.0, c], [c, 1.0]])
    M = orthonormalizer(gram)
    G = M.T @ gram @ M
    g_bar = gbar(G[0, 0], G[1, 1], G[0, 1])
    rbar = rbar_unit * float(np.linalg.det(M)) ** 2
    curvature = rbar / g_bar

    quad_err = 2.0 * (P.quadrature_error + Q.quadrature_error) / det
    tail_err = 2.0 * (P.kernel_tail + Q.kernel_tail) / det
    violation = None
    if curvature >= 0.0:
        violation = f"nonnegative curvature {curvature:.3g} (error bar {quad_err + tail_err:.3g})"

    debug_log(
        "bochner",
        "section",
        pair=[mu1.label, mu2.label],
        rbar=rbar,
        gbar=g_bar,
        curvature=curvature,
        violation=violation,
    )
    return SectionReport(
        g11=g11,
        g22=g22,
        g12=g12,
        rbar=rbar,
        gbar=g_bar,
        curvature=curvature,
        quad_err=quad_err,
        tail_err=tail_err,
        violation=violation,
    )
