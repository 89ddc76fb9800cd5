"""Magnitude models of geodesic-length gradients and thick-region differentials.

Every model lives in the frame of one short geodesic and depends only on the
signed distance x to it (sin θ = sech x).  Collar terms are a·sin²θ on the
standard collar |x| <= w; a thick differential is a raised-cosine bump on
the band just outside one side of the collar, leaking into the collar as
a penetration term and a boundary-decay term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Literal

import mpmath
import numpy as np

from ..errors import QuadratureError
from ..helpers import debug_log
from .pairings import Frame, lifted

PRINCIPAL_COEFFICIENT = 2.0 / math.pi
Side = Literal[1, -1]


# ── Profiles ──────────────────────────────────────────────


@dataclass(frozen=True)
class GradientProfile:
    """(2/π)·sin²θ on the collar, c·ℓ·e^{-|x|}/inj outside."""

    length: float
    half_width: float
    coefficient: float = PRINCIPAL_COEFFICIENT

    @property
    def envelope(self) -> float:
        """c making the profile continuous at |x| = w."""
        w, ell = self.half_width, self.length
        inj = math.asinh(math.sinh(0.5 * ell) * math.cosh(w))
        return self.coefficient * inj * math.exp(w) / (ell * math.cosh(w) ** 2)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        inside = ax <= self.half_width
        out = np.empty_like(x)
        out[inside] = self.coefficient / np.cosh(x[inside]) ** 2
        xo = np.minimum(ax[~inside], 700.0)
        inj = np.arcsinh(np.sinh(0.5 * self.length) * np.cosh(xo))
        out[~inside] = self.envelope * self.length * np.exp(-xo) / inj
        return out


@dataclass(frozen=True)
class ThickProfile:
    """Bump on w <= side·x <= w + 2ρ plus the collar leakage on |x| <= w."""

    length: float
    half_width: float
    side: Side = 1
    radius: float = 0.5
    penetration: float = 1.0
    decay: float = 1.0

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        ell, w = self.length, self.half_width
        out = np.zeros_like(x)

        d = self.side * x - w
        band = (d >= 0.0) & (d <= 2.0 * self.radius)
        out[band] = 0.5 * (1.0 - np.cos(math.pi * d[band] / self.radius))

        collar = np.abs(x) <= w
        sin2 = 1.0 / np.cosh(x[collar]) ** 2
        # Angle measured from the collar boundary on this differential's side.
        theta_side = 2.0 * np.arctan(np.exp(-self.side * x[collar]))
        leak = self.penetration + self.decay * np.exp(
            -2.0 * math.pi * np.maximum(theta_side - ell, 0.0) / ell
        )
        out[collar] = ell * ell * leak * sin2
        return out


# ── Model differentials ───────────────────────────────────


@dataclass(frozen=True)
class ModelDifferential:
    """|μ| as a profile in a frame, times a normalization constant."""

    label: str
    frame: Frame
    profile: Callable[[np.ndarray], np.ndarray]
    normalization: float = 1.0
    anchor: str = "collar"

    def magnitude(self, x: np.ndarray) -> np.ndarray:
        return self.normalization * self.profile(x)

    def scaled(self, c: float) -> "ModelDifferential":
        return replace(self, normalization=self.normalization * c)

    def on_frame(self, frame: Frame) -> tuple[np.ndarray, np.ndarray]:
        """Values on frame's (s, x) grid and the share of the outermost lifts."""
        if self.frame.same_as(frame):
            v = np.broadcast_to(self.magnitude(frame.nodes), (frame.s_nodes, frame.nodes.size))
            return v, np.zeros_like(v)
        return lifted(frame, self.frame, self.magnitude)

    def norm_squared(self) -> float:
        return self.frame.integrate(self.magnitude(self.frame.nodes) ** 2)

    def unit(self) -> "ModelDifferential":
        n2 = self.norm_squared()
        if not n2 > 0.0:
            raise QuadratureError(f"{self.label} has zero norm on its frame")
        return self.scaled(1.0 / math.sqrt(n2))


def model_gradient(frame: Frame, *, normalized: bool = True) -> ModelDifferential:
    """Gradient of the length of the frame's geodesic.

    With ``normalized`` the profile is scaled by (π/2ℓ)^{1/2}, which makes
    the collar part unit norm up to O(ℓ³).
    """
    ell = frame.length
    profile = GradientProfile(ell, frame.chart.half_width_standard)
    scale = math.sqrt(math.pi / (2.0 * ell)) if normalized else 1.0
    return ModelDifferential(f"grad[{ell:.6g}]", frame, profile, scale, "collar")


def model_thick(
    frame: Frame,
    side: Side = 1,
    *,
    radius: float = 0.5,
    penetration: float = 1.0,
    decay: float = 1.0,
) -> ModelDifferential:
    """Unit-norm differential of the thick region on one side of the collar."""
    if side not in (1, -1):
        raise ValueError(f"side must be +1 or -1, got {side}")
    profile = ThickProfile(
        frame.length, frame.chart.half_width_standard, side, radius, penetration, decay
    )
    anchor = "thick+" if side == 1 else "thick-"
    mu = ModelDifferential(f"{anchor}[{frame.length:.6g}]", frame, profile, 1.0, anchor).unit()
    debug_log("differentials", "model_thick", length=frame.length, side=side, scale=mu.normalization)
    return mu


# ── Closed forms from the collar analysis ─────────────────


def collar_sin6_integral(length: float) -> float:
    """∫∫ sin⁶θ (dr/r)(dθ/sin²θ) over 1 <= r <= e^ℓ, ℓ <= θ <= π - ℓ."""
    if not length > 0.0:
        raise ValueError(f"length must be positive, got {length}")
    ell = length
    return ell * (
        3.0 * math.pi / 8.0 - 0.75 * ell + 0.5 * math.sin(2.0 * ell) - math.sin(4.0 * ell) / 16.0
    )


def golden_section_argmax(
    f: Callable[[mpmath.mpf], mpmath.mpf],
    lo: float,
    hi: float,
    *,
    dps: int = 40,
    iterations: int = 200,
) -> float:
    """Maximizer of a unimodal f on [lo, hi] by golden-section search at *dps* digits."""
    with mpmath.workdps(dps):
        a, b = mpmath.mpf(lo), mpmath.mpf(hi)
        r = (mpmath.sqrt(5) - 1) / 2
        c, d = b - r * (b - a), a + r * (b - a)
        fc, fd = f(c), f(d)
        for _ in range(iterations):
            if fc > fd:
                b, d, fd = d, c, fc
                c = b - r * (b - a)
                fc = f(c)
            else:
                a, c, fc = c, d, fd
                d = a + r * (b - a)
                fd = f(d)
        return float((a + b) / 2)


def sine_decay(theta: float, length: float, c: float) -> float:
    return math.sin(theta) * math.exp(-c * theta / length)


def sine_decay_argmax(length: float, c: float, *, verify: bool = True) -> float:
    """θ* = arctan(ℓ/c), the maximizer of sin θ·e^{-cθ/ℓ} on (0, π/2)."""
    if not (length > 0.0 and c > 0.0):
        raise ValueError(f"length and c must be positive, got {length}, {c}")
    theta = math.atan(length / c)
    if verify:
        ell, cc = mpmath.mpf(length), mpmath.mpf(c)
        found = golden_section_argmax(
            lambda t: mpmath.sin(t) * mpmath.exp(-cc * t / ell), 0.0, math.pi / 2
        )
        if abs(found - theta) > 1e-10:
            raise QuadratureError(f"golden-section maximum {found!r} disagrees with {theta!r}")
    return theta


def sine_decay_max(length: float, c: float) -> float:
    return sine_decay(sine_decay_argmax(length, c, verify=False), length, c)
