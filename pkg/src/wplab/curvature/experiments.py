"""Scaling experiments — curvature of model sections along pinching families.

Each example builds a surface for every grid point, places two model
differentials on it and records the Bochner report.  Points run in a thread
pool and a failing point keeps its error message; slopes are fitted on the
points that survive.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..config import LabConfig
from ..errors import LabError
from ..groups import FuchsianGroup, GeodesicClass
from ..helpers import debug_log, loglog_slope
from ..models import ExperimentPoint, ScalingExperiment, SectionReport, SlopeFit, SurfaceSpec
from ..surfaces.builders import build_surface
from .bochner import bochner_curvature
from .differentials import ModelDifferential, model_gradient, model_thick
from .pairings import Frame

DEFAULT_GRID: tuple[float, ...] = (0.30, 0.24, 0.19, 0.15, 0.12, 0.10)
MIN_POINTS = 5
MIN_SPAN = 3.0
MAX_EXPONENT = 7.5
# Lengths of the curves that stay long in every family.
THICK_LENGTH = 1.0


@dataclass(frozen=True)
class ExampleKind:
    """One of the example sections and its expected decay rate."""

    id: str
    name: str
    surface: str
    rate: float
    two_lengths: bool = False


# Insertion order is the display order of `wplab experiment --help`.
EXAMPLES: dict[str, ExampleKind] = {
    "adjacent_thick": ExampleKind("adjacent_thick", "Thick regions on both sides of a collar", "xpiece", 3.0),
    "collar_thick": ExampleKind("collar_thick", "Collar gradient and adjacent thick region", "punctured_torus", 1.0),
    "two_collars": ExampleKind("two_collars", "Gradients of two short geodesics", "xpiece", 1.0, True),
}


def _frame(alpha: GeodesicClass, config: LabConfig) -> Frame:
    return Frame.build(
        alpha,
        thick_radius=config.thick_radius,
        budget=config.quad_budget,
        s_nodes=config.s_nodes,
        twist_span=config.twist_span,
    )


def _thick(frame: Frame, side: int, config: LabConfig) -> ModelDifferential:
    return model_thick(
        frame,
        side,  # type: ignore[arg-type]
        radius=config.thick_radius,
        penetration=config.penetration,
        decay=config.decay,
    )


def example_surface(kind: str, l1: float, l2: float | None = None) -> FuchsianGroup:
    """The surface carrying the short geodesic(s) of one grid point."""
    t = THICK_LENGTH
    if kind == "adjacent_thick":
        spec = SurfaceSpec("xpiece", (l1, t, t, t, t))
    elif kind == "collar_thick":
        spec = SurfaceSpec("punctured_torus", (l1,))
    elif kind == "two_collars":
        if l2 is None:
            raise ValueError("two_collars needs two lengths")
        spec = SurfaceSpec("xpiece", (l1, t, t, l2, t))
    else:
        raise ValueError(f"unknown example {kind!r} (expected one of {', '.join(EXAMPLES)})")
    return build_surface(spec)


def example_pair(
    kind: str, l1: float, l2: float | None = None, config: LabConfig | None = None
) -> tuple[ModelDifferential, ModelDifferential]:
    """The two model differentials of one grid point."""
    config = config or LabConfig.default()
    G = example_surface(kind, l1, l2)
    first = _frame(GeodesicClass.of(G.generators[0]), config)
    if kind == "adjacent_thick":
        return _thick(first, 1, config), _thick(first, -1, config)
    if kind == "collar_thick":
        return model_gradient(first), _thick(first, 1, config)
    second = _frame(GeodesicClass.of(G.generators[2]), config)
    return model_gradient(first), model_gradient(second)


def example_point(
    kind: str, l1: float, l2: float | None = None, config: LabConfig | None = None
) -> ExperimentPoint:
    """Bochner report for one grid point; errors are kept on the point."""
    config = config or LabConfig.default()
    try:
        mu1, mu2 = example_pair(kind, l1, l2, config)
        report: SectionReport | None = bochner_curvature(mu1, mu2, rel_tol=config.quad_rel_tol)
        error = report.violation
    except (LabError, ValueError, ArithmeticError, np.linalg.LinAlgError) as e:
        report, error = None, str(e) or type(e).__name__
    debug_log(
        "experiments",
        "point",
        kind=kind,
        l1=l1,
        l2=l2,
        curvature=report.curvature if report else None,
        error=error,
    )
    return ExperimentPoint(kind, l1, l2, report, error)


def experiment_grid(kind: str, grid: Sequence[float]) -> list[tuple[float, float | None]]:
    """Grid points in run order; two_collars takes the full product grid."""
    if not grid:
        raise ValueError("grid must be nonempty")
    if any(not (math.isfinite(x) and x > 0.0) for x in grid):
        raise ValueError(f"grid lengths must be positive, got {list(grid)}")
    if EXAMPLES[kind].two_lengths:
        return [(a, b) for a in grid for b in grid]
    return [(a, None) for a in grid]


def fit_family(points: Sequence[ExperimentPoint]) -> SlopeFit:
    """Least-squares slope of log|curvature| against log σ."""
    xs = [p.sigma for p in points]
    ys = [abs(p.report.curvature) for p in points if p.report]
    slope, stderr, intercept = loglog_slope(xs, ys)
    return SlopeFit(slope, stderr, intercept, len(xs))


def fit_per_variable(points: Sequence[ExperimentPoint]) -> dict[str, SlopeFit]:
    """log|K| = a·log ℓ1 + b·log ℓ2 + c, with standard errors from the residuals."""
    X = np.array([[math.log(p.l1), math.log(p.l2), 1.0] for p in points if p.l2 is not None])
    y = np.array([math.log(abs(p.report.curvature)) for p in points if p.report])
    n = len(y)
    if n < 4:
        raise ValueError(f"per-variable fit needs at least 4 points, got {n}")
    coef, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < 3:
        raise ValueError("per-variable fit needs both lengths to vary")
    resid = y - X @ coef
    s2 = float(resid @ resid) / (n - 3) if n > 3 else 0.0
    cov = s2 * np.linalg.inv(X.T @ X)
    return {
        "l1": SlopeFit(float(coef[0]), math.sqrt(cov[0, 0]), float(coef[2]), n),
        "l2": SlopeFit(float(coef[1]), math.sqrt(cov[1, 1]), float(coef[2]), n),
    }


def example_experiment(
    kind: str,
    grid: Sequence[float] = DEFAULT_GRID,
    *,
    config: LabConfig | None = None,
    min_points: int = MIN_POINTS,
    point_fn: Callable[..., ExperimentPoint] = example_point,
) -> ScalingExperiment:
    """Run every grid point in parallel and fit the decay slope."""
    if kind not in EXAMPLES:
        raise ValueError(f"unknown example {kind!r} (expected one of {', '.join(EXAMPLES)})")
    config = config or LabConfig.default()
    todo = experiment_grid(kind, grid)

    with ThreadPoolExecutor(max_workers=min(config.workers, len(todo))) as pool:
        futures = [pool.submit(point_fn, kind, l1, l2, config) for l1, l2 in todo]
        points = [f.result() for f in futures]

    result = ScalingExperiment(kind, points)
    good = [p for p in points if p.ok]
    if len(good) < min_points:
        result.error = f"only {len(good)} of {len(points)} points survived (need {min_points})"
        return result

    sigmas = [p.sigma for p in good]
    span = max(sigmas) / min(sigmas)
    if span < MIN_SPAN * (1.0 - 1e-9):
        result.error = f"family spans a factor {span:.3g} in σ (need {MIN_SPAN:g})"
        return result

    try:
        result.fit = fit_family(good)
        if EXAMPLES[kind].two_lengths:
            result.per_variable = fit_per_variable(good)
    except ValueError as e:
        result.error = str(e)
        return result

    if result.fit.slope > MAX_EXPONENT:
        result.error = f"decay exponent {result.fit.slope:.3g} exceeds {MAX_EXPONENT:g}"
    debug_log(
        "experiments",
        "fit",
        kind=kind,
        slope=result.fit.slope,
        stderr=result.fit.stderr,
        failures=len(points) - len(good),
    )
    return result
