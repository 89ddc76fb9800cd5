"""Explicit Fuchsian groups for the experiment families.

Pants come from right-angled hexagons: reflections in the three seams
pair up into the boundary translations.  The X-piece glues two pants
along their first boundary with a half-turn and a Fenchel–Nielsen twist,
and the punctured torus is built from the trace relation
x² + y² + z² = xyz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from ..errors import ConstructionError, SpecFormatError
from ..groups import FuchsianGroup, validate_group
from ..helpers import debug_log
from ..models import SurfaceSpec
from ..plane import (
    Geodesic,
    Isometry,
    PlanePoint,
    Reflection,
    axis,
    common_perpendicular,
    hyperboloid_mean,
    intersection,
    translation_length,
)

MIN_LENGTH = 1e-4
TRACE_RTOL = 1e-9
HALF_TURN = Isometry(0.0, -1.0, 1.0, 0.0)
# Every built group is checked for elliptic elements moving its center this far.
VALIDATION_RADIUS = 6.0


def _check_length(name: str, length: float) -> float:
    length = float(length)
    if not math.isfinite(length) or length <= 0.0:
        raise SpecFormatError(f"{name} must be positive, got {length}")
    if length < MIN_LENGTH:
        raise SpecFormatError(
            f"{name} = {length:g} is below {MIN_LENGTH:g}; the collar is too wide to enumerate"
        )
    return length


def _validated(G: FuchsianGroup) -> FuchsianGroup:
    checked = validate_group(G, G.basepoint(), VALIDATION_RADIUS)
    debug_log("builders", "validated", elements=checked)
    return G


def _check_trace(name: str, g: Isometry, length: float) -> None:
    want = 2.0 * math.cosh(0.5 * length)
    got = abs(g.trace)
    if abs(got - want) > TRACE_RTOL * want:
        raise ConstructionError(
            f"{name}: |trace| {got:.15g} does not match 2cosh(ℓ/2) = {want:.15g}"
        )


def seam_length(opposite: float, left: float, right: float) -> float:
    """Seam of a right-angled hexagon between sides *left* and *right*.

    Alternate sides have lengths ℓ/2; the seam faces the third one.
    """
    a, b, c = 0.5 * opposite, 0.5 * left, 0.5 * right
    return math.acosh((math.cosh(a) + math.cosh(b) * math.cosh(c)) / (math.sinh(b) * math.sinh(c)))


def _orthogonal_at(scale: float, s: float) -> Geodesic:
    """Geodesic orthogonal to |z| = scale, crossing it at distance s right of the imaginary axis."""
    phi = 2.0 * math.atan(math.exp(-s))
    center, radius = scale / math.cos(phi), scale * math.tan(phi)
    return Geodesic(center - radius, center + radius)


# ── Hexagons and pants ────────────────────────────────────


@dataclass(frozen=True)
class Hexagon:
    """Right-angled hexagon with L1 on the imaginary axis and the pants it generates."""

    boundary: tuple[Geodesic, Geodesic, Geodesic]
    seams: tuple[Geodesic, Geodesic, Geodesic]  # S12, S23, S31
    gammas: tuple[Isometry, Isometry, Isometry]
    vertices: tuple[PlanePoint, ...]

    @property
    def center(self) -> PlanePoint:
        return hyperboloid_mean(list(self.vertices))


def hexagon(l1: float, l2: float, l3: float) -> Hexagon:
    """Hexagon with alternate sides ℓ1/2, ℓ2/2, ℓ3/2 and γ1 = z ↦ e^{ℓ1} z."""
    lift = math.exp(0.5 * l1)
    L1 = Geodesic.imaginary_axis()
    S12 = Geodesic(-1.0, 1.0)
    S31 = Geodesic(-lift, lift)
    L2 = _orthogonal_at(1.0, seam_length(l3, l1, l2))
    L3 = _orthogonal_at(lift, seam_length(l2, l3, l1))
    S23 = common_perpendicular(L2, L3)

    r12, r23, r31 = Reflection.across(S12), Reflection.across(S23), Reflection.across(S31)
    g1 = r31 @ r12
    g2 = r12 @ r23
    g3 = r23 @ r31
    vertices = (
        intersection(L1, S12),
        intersection(S12, L2),
        intersection(L2, S23),
        intersection(S23, L3),
        intersection(L3, S31),
        intersection(S31, L1),
    )
    return Hexagon((L1, L2, L3), (S12, S23, S31), (g1, g2, g3), vertices)


def build_pants(l1: float, l2: float, l3: float) -> FuchsianGroup:
    """Pair of pants with boundary classes a, b and (ab)⁻¹."""
    lengths = tuple(_check_length(f"ℓ{k + 1}", x) for k, x in enumerate((l1, l2, l3)))
    hx = hexagon(*lengths)
    for k, (g, length) in enumerate(zip(hx.gammas, lengths)):
        _check_trace(f"γ{k + 1}", g, length)
    residual = hx.gammas[0] @ hx.gammas[1] @ hx.gammas[2]
    if not residual.is_identity(1e-9):
        raise ConstructionError(f"γ1γ2γ3 is not the identity: {residual.entries}")
    debug_log("builders", "pants", lengths=list(lengths))
    return _validated(
        FuchsianGroup(
            hx.gammas[:2],
            ("a", "b"),
            boundary=((1,), (2,), (-2, -1)),
            center=hx.center,
        )
    )


# ── Cylinder and punctured torus ──────────────────────────


def build_cylinder(length: float) -> FuchsianGroup:
    length = _check_length("ℓ", length)
    return _validated(FuchsianGroup((Isometry.diagonal(length),), ("a",), center=PlanePoint(0.0, 1.0)))


def punctured_torus_generators(length: float, twist: float = 0.0) -> tuple[Isometry, Isometry]:
    lam = math.exp(0.5 * length)
    x = lam + 1.0 / lam
    y = x / math.sqrt(x - 2.0)
    c0 = 1.0 / math.sinh(0.5 * length)
    A = Isometry(lam, 0.0, 0.0, 1.0 / lam)
    B = Isometry(y / (1.0 + lam), c0, c0, lam * y / (1.0 + lam))
    return A, Isometry.diagonal(twist) @ B


def commutator_trace(A: Isometry, B: Isometry) -> float:
    """tr[A, B] through the Fricke identity x² + y² + z² - xyz - 2."""
    x, y, z = A.trace, B.trace, (A @ B).trace
    return x * x + y * y + z * z - x * y * z - 2.0


def build_punctured_torus(length: float, twist: float = 0.0) -> FuchsianGroup:
    """tr A = 2cosh(ℓ/2), tr B = tr AB at zero twist, [A, B] parabolic."""
    length = _check_length("ℓ", length)
    A, B = punctured_torus_generators(length, twist)
    _check_trace("A", A, length)
    residual = commutator_trace(A, B) + 2.0
    scale = A.trace**2 + B.trace**2
    if abs(residual) > 1e-9 + 1e-12 * scale:
        raise ConstructionError(f"tr[A, B] + 2 = {residual:.3g}, expected 0")
    return _validated(
        FuchsianGroup(
            (A, B),
            ("a", "b"),
            boundary=((1, 2, -1, -2),),
            center=PlanePoint(0.0, 1.0),
        )
    )


# ── X-piece ───────────────────────────────────────────────


def build_xpiece(spec: SurfaceSpec) -> FuchsianGroup:
    """Two pants glued along their first boundary, then twisted.

    Lengths are (glued, ℓ2, ℓ3, ℓ4, ℓ5).  The generators are the glued
    translation a, the second boundary b of the first pants, and the second
    boundary c of the second pants, whose axis meets the glued axis's
    collar across a seam.
    """
    if spec.kind != "xpiece":
        raise SpecFormatError(f"build_xpiece needs an xpiece spec, got {spec.kind!r}")
    la, l2, l3, l4, l5 = (_check_length(f"ℓ{k}", x) for k, x in enumerate(spec.lengths, 1))
    first = hexagon(la, l2, l3)
    second = hexagon(la, l4, l5)
    for k, (g, length) in enumerate(zip(first.gammas + second.gammas, (la, l2, l3, la, l4, l5))):
        _check_trace(f"γ{k + 1}", g, length)

    A = first.gammas[0]
    flip = Isometry.diagonal(spec.twist) @ HALF_TURN
    glued = second.gammas[0].conjugate_by(flip)
    if not axis(glued).same_line(axis(A)) or not (glued @ A).is_identity(1e-9):
        raise ConstructionError("glued boundary axes do not match")
    if abs(translation_length(glued) - la) > TRACE_RTOL * max(1.0, la):
        raise ConstructionError("glued boundary lengths differ")

    b = first.gammas[1]
    c = second.gammas[1].conjugate_by(flip)
    debug_log("builders", "xpiece", lengths=list(spec.lengths), twist=spec.twist)
    return _validated(
        FuchsianGroup(
            (A, b, c),
            ("a", "b", "c"),
            boundary=((2,), (-2, -1), (3,), (-3, 1)),
            center=first.center,
        )
    )


# ── Dispatch ──────────────────────────────────────────────


def _pants(spec: SurfaceSpec) -> FuchsianGroup:
    return build_pants(*spec.lengths)


BUILDERS: dict[str, Callable[[SurfaceSpec], FuchsianGroup]] = {
    "cylinder": lambda spec: build_cylinder(spec.lengths[0]),
    "pants": _pants,
    "punctured_torus": lambda spec: build_punctured_torus(spec.lengths[0], spec.twist),
    "xpiece": build_xpiece,
}


def build_surface(spec: SurfaceSpec) -> FuchsianGroup:
    return BUILDERS[spec.kind](spec)