"""Result records shared across wplab."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import SpecFormatError
from .helpers import round17


@dataclass(frozen=True)
class KernelValue:
    """A truncated orbit sum with its tail estimate."""

    value: float
    radius: float
    tail: float
    terms: int
    growth: float = 1.0

    def accepted(self, fraction: float = 0.01) -> bool:
        return self.tail < fraction * abs(self.value)

    @property
    def relative_tail(self) -> float:
        return self.tail / abs(self.value) if self.value else math.inf

    def to_dict(self) -> dict:
        return {
            "value": round17(self.value),
            "radius": round17(self.radius),
            "tail": round17(self.tail),
            "terms": self.terms,
        }


@dataclass(frozen=True)
class PairingValue:
    """A quadrature result with its numerical error bars."""

    value: float
    quadrature_error: float = 0.0
    kernel_tail: float = 0.0

    @property
    def error(self) -> float:
        return self.quadrature_error + self.kernel_tail

    def __add__(self, other: "PairingValue") -> "PairingValue":
        return PairingValue(
            self.value + other.value,
            self.quadrature_error + other.quadrature_error,
            self.kernel_tail + other.kernel_tail,
        )

    def scaled(self, c: float) -> "PairingValue":
        return PairingValue(self.value * c, self.quadrature_error * abs(c), self.kernel_tail * abs(c))

    def to_dict(self) -> dict:
        return {
            "value": round17(self.value),
            "quad_err": round17(self.quadrature_error),
            "tail_err": round17(self.kernel_tail),
        }


@dataclass(frozen=True)
class SectionReport:
    """Bochner data for the section spanned by two model differentials."""

    g11: float
    g22: float
    g12: float
    rbar: float
    gbar: float
    curvature: float
    quad_err: float = 0.0
    tail_err: float = 0.0
    violation: Optional[str] = None

    @property
    def accepted(self) -> bool:
        return self.violation is None and self.curvature < 0.0

    def to_dict(self) -> dict:
        return {
            "g11": round17(self.g11),
            "g22": round17(self.g22),
            "g12": round17(self.g12),
            "Rbar": round17(self.rbar),
            "gbar": round17(self.gbar),
            "curvature": round17(self.curvature),
            "quad_err": round17(self.quad_err),
            "tail_err": round17(self.tail_err),
            "violation": self.violation,
        }


@dataclass
class ExperimentPoint:
    """One grid point of a scaling experiment."""

    kind: str
    l1: float
    l2: Optional[float] = None
    report: Optional[SectionReport] = None
    error: Optional[str] = None

    @property
    def sigma(self) -> float:
        return self.l1 * (self.l2 if self.l2 is not None else 1.0)

    @property
    def ok(self) -> bool:
        return self.report is not None and self.error is None


@dataclass
class SlopeFit:
    slope: float
    stderr: float
    intercept: float
    points: int

    def to_dict(self) -> dict:
        return {
            "slope": round17(self.slope),
            "stderr": round17(self.stderr),
            "intercept": round17(self.intercept),
            "points": self.points,
        }


@dataclass
class ScalingExperiment:
    """A family of surfaces indexed by short lengths, with fitted slopes."""

    kind: str
    points: list[ExperimentPoint] = field(default_factory=list)
    fit: Optional[SlopeFit] = None
    per_variable: dict[str, SlopeFit] = field(default_factory=dict)
    error: Optional[str] = None

    @property
    def family(self) -> list[tuple[float, float]]:
        """(σ, curvature) for every surviving point, in grid order."""
        return [(p.sigma, p.report.curvature) for p in self.points if p.ok and p.report]

    @property
    def slope(self) -> float | None:
        return self.fit.slope if self.fit else None

    @property
    def slope_stderr(self) -> float | None:
        return self.fit.stderr if self.fit else None

    @property
    def failures(self) -> list[ExperimentPoint]:
        return [p for p in self.points if not p.ok]


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one invariant check run by ``wplab checks``."""

    name: str
    passed: bool
    measured: float | None = None
    expected: float | None = None
    tolerance: float | None = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "measured": None if self.measured is None else round17(self.measured),
            "expected": None if self.expected is None else round17(self.expected),
            "tolerance": None if self.tolerance is None else round17(self.tolerance),
            "detail": self.detail,
        }


# ── Surface specifications ────────────────────────────────


@dataclass(frozen=True)
class SurfaceKind:
    """Arity and description of a buildable surface family."""

    id: str
    name: str
    lengths: int
    chi: int | None
    twisted: bool = False


# Insertion order is the display order of `wplab build --help`.
SURFACE_KINDS: dict[str, SurfaceKind] = {
    "cylinder": SurfaceKind("cylinder", "Hyperbolic cylinder", 1, None),
    "pants": SurfaceKind("pants", "Pair of pants", 3, -1),
    "punctured_torus": SurfaceKind("punctured_torus", "Once-punctured torus", 1, -1, True),
    "xpiece": SurfaceKind("xpiece", "X-piece (two glued pants)", 5, -2, True),
}


@dataclass(frozen=True)
class SurfaceSpec:
    """Fenchel–Nielsen data for one of the buildable families.

    For ``xpiece`` the lengths are (glued, first pants ×2, second pants ×2).
    """

    kind: str
    lengths: tuple[float, ...]
    twist: float = 0.0

    def __post_init__(self) -> None:
        meta = SURFACE_KINDS.get(self.kind)
        if meta is None:
            known = ", ".join(SURFACE_KINDS)
            raise SpecFormatError(f"unknown surface kind {self.kind!r} (expected one of {known})")
        lengths = tuple(float(x) for x in self.lengths)
        if len(lengths) != meta.lengths:
            raise SpecFormatError(
                f"{self.kind} needs {meta.lengths} length(s), got {len(lengths)}"
            )
        if any(not math.isfinite(x) or x <= 0.0 for x in lengths):
            raise SpecFormatError(f"lengths must be positive and finite, got {list(lengths)}")
        if not math.isfinite(self.twist):
            raise SpecFormatError("twist must be finite")
        if self.twist and not meta.twisted:
            raise SpecFormatError(f"{self.kind} takes no twist")
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "twist", float(self.twist))

    @property
    def meta(self) -> SurfaceKind:
        return SURFACE_KINDS[self.kind]

    @classmethod
    def from_dict(cls, d: object) -> "SurfaceSpec":
        if not isinstance(d, dict):
            raise SpecFormatError("surface spec must be a JSON object")
        try:
            kind = str(d["kind"])
            lengths = tuple(float(x) for x in d["lengths"])
            twist = float(d.get("twist", 0.0))
        except KeyError as e:
            raise SpecFormatError(f"surface spec is missing {e}") from e
        except (TypeError, ValueError) as e:
            raise SpecFormatError(f"bad surface spec: {e}") from e
        return cls(kind, lengths, twist)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "lengths": [round17(x) for x in self.lengths], "twist": round17(self.twist)}
