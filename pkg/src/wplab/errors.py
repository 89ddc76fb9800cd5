"""Error hierarchy for wplab.

Input problems subclass ValueError, computational failures subclass
RuntimeError.  Every error carries the process exit code the CLI uses
for it: 1 check/computation failure, 2 input error, 3 resource cap.
"""

from __future__ import annotations


class LabError(Exception):
    """Base class for all wplab errors."""

    exit_code: int = 1


# ── Input errors (exit 2) ─────────────────────────────────


class LabInputError(LabError, ValueError):
    exit_code = 2


class InvalidPointError(LabInputError):
    """Point with y <= 1e-300 or a non-finite coordinate."""


class TrivialElementError(LabInputError):
    """Operation needs a nontrivial element."""


class NotHyperbolicError(LabInputError):
    """Operation needs a hyperbolic element (|trace| > 2)."""


class DegenerateGeodesicError(LabInputError):
    """Geodesic endpoints coincide or are not finite/infinite as required."""


class SingularEvaluationError(LabInputError):
    """Kernel evaluated at a nonpositive distance."""


class SpecFormatError(LabInputError):
    """Malformed SurfaceSpec or group document."""


# ── Resource cap (exit 3) ─────────────────────────────────


class BallTooLargeError(LabError, RuntimeError):
    """Orbit enumeration exceeded the element cap."""

    exit_code = 3

    def __init__(self, count: int, cap: int, growth_exponent: float | None) -> None:
        self.count = count
        self.cap = cap
        self.growth_exponent = growth_exponent
        growth = (
            f"{growth_exponent:.3f}" if growth_exponent is not None else "unknown"
        )
        super().__init__(
            f"Orbit ball too large: {count} elements exceed cap {cap} "
            f"(growth exponent {growth})"
        )


# ── Computational failures (exit 1) ───────────────────────


class LabComputationError(LabError, RuntimeError):
    exit_code = 1


class NonSurfaceGroupError(LabComputationError):
    """Elliptic element found in an enumeration."""


class NoClosedGeodesicError(LabComputationError):
    """Group has no hyperbolic elements in reach."""


class OnDiagonalError(LabComputationError):
    """Green evaluation with an orbit point on top of the base point."""


class ConstructionError(LabComputationError):
    """Builder relation residual or axis matching failed."""


class InfiniteCovolumeError(LabComputationError):
    """Dirichlet domain reaches the boundary at infinity along an arc."""


class QuadratureError(LabComputationError):
    """Refinement did not converge within the budget."""


class CollarOverlapError(LabComputationError):
    """A point lies in the collars of two distinct short geodesics."""


class NearDependenceError(LabComputationError):
    """Gram determinant of a section below tolerance."""
