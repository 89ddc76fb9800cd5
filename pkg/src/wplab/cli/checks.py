"""``wplab checks`` — invariant checks on a built surface.

Each check applies to some surfaces only (unit mass needs finite area and
no geodesic boundary, Gauss–Bonnet needs a known Euler characteristic).  A
check that raises is reported as failed with the error as its detail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from ..config import LabConfig
from ..errors import LabError
from ..groups import FuchsianGroup, GeodesicClass, short_geodesics, systole
from ..helpers import debug_log
from ..models import CheckResult, SurfaceSpec
from ..plane import ElementKind, PlanePoint, classify
from ..surfaces.collar import extended_half_width, standard_half_width
from ..surfaces.domain import FundamentalDomain, dirichlet_domain, green_mass, sample_domain
from .build import GAUSS_BONNET_RTOL, expected_area
from .report import SCHEMA, dumps, read_group, write_text

UNIT_MASS_TOL = 0.05
SURFACE_PAIRING_TOL = 0.05
GBAR_TOL = 1e-6
# |w̃ - log(4/ℓ)| / ℓ² tends to 1/48.
COLLAR_RATIO_MAX = 0.05


@dataclass
class CheckContext:
    spec: SurfaceSpec | None
    group: FuchsianGroup
    config: LabConfig

    @property
    def base(self) -> PlanePoint:
        return self.group.basepoint()

    @cached_property
    def domain(self) -> FundamentalDomain:
        return dirichlet_domain(self.group, self.base, cap=self.config.element_cap)

    @cached_property
    def short(self) -> list[GeodesicClass]:
        cut = max(self.config.epsilon, systole(self.group, self.base) * (1.0 + 1e-9))
        return short_geodesics(self.group, self.base, cut, cap=self.config.element_cap)

    @property
    def has_core_boundary(self) -> bool:
        return any(classify(g) is ElementKind.HYPERBOLIC for g in self.group.boundary_elements)


@dataclass(frozen=True)
class Check:
    name: str
    applies: Callable[[CheckContext], bool]
    run: Callable[[CheckContext], CheckResult]


def check_gauss_bonnet(ctx: CheckContext) -> CheckResult:
    expected = expected_area(ctx.spec)  # type: ignore[arg-type]
    area = ctx.domain.area
    return CheckResult(
        "gauss_bonnet",
        abs(area - expected) <= GAUSS_BONNET_RTOL * expected,
        area,
        expected,
        GAUSS_BONNET_RTOL * expected,
    )


def check_unit_mass(ctx: CheckContext) -> CheckResult:
    """∫ G(p, ·) dA at the center and two seeded sample points."""
    cfg = ctx.config
    points = [ctx.base, *sample_domain(ctx.domain, 2, seed=cfg.seed)]
    masses = [green_mass(ctx.group, ctx.domain, p, cfg.radius, cap=cfg.element_cap) for p in points]
    worst = max(masses, key=lambda m: abs(m.value - 1.0))
    tail = max(m.kernel_tail for m in masses)
    return CheckResult(
        "unit_mass",
        abs(worst.value - 1.0) <= UNIT_MASS_TOL and tail < cfg.tail_fraction,
        worst.value,
        1.0,
        UNIT_MASS_TOL,
        f"{len(masses)} basepoints, truncation tail {tail:.3g}",
    )


def check_collar_widths(ctx: CheckContext) -> CheckResult:
    worst = 0.0
    for c in ctx.short:
        ell = c.length
        if not standard_half_width(ell) < extended_half_width(ell):
            return CheckResult("collar_widths", False, ell, detail="standard collar not inside extended")
        worst = max(worst, abs(extended_half_width(ell) - math.log(4.0 / ell)) / ell**2)
    lengths = ", ".join(f"{c.length:.6g}" for c in ctx.short)
    return CheckResult("collar_widths", worst <= COLLAR_RATIO_MAX, worst, None, COLLAR_RATIO_MAX, f"lengths {lengths}")


def _default_pair(ctx: CheckContext):
    from ..curvature.differentials import model_gradient, model_thick
    from ..curvature.pairings import Frame

    cfg = ctx.config
    frame = Frame.build(
        ctx.short[0],
        thick_radius=cfg.thick_radius,
        budget=cfg.quad_budget,
        s_nodes=cfg.s_nodes,
        twist_span=cfg.twist_span,
    )
    nu = model_gradient(frame)
    thick = model_thick(frame, 1, radius=cfg.thick_radius, penetration=cfg.penetration, decay=cfg.decay)
    return nu, thick


def check_holder_chain(ctx: CheckContext) -> CheckResult:
    from ..curvature.pairings import holder_chain

    chain = holder_chain(*_default_pair(ctx))
    slack = max(
        (a.value - b.value) - (a.error + b.error) for a, b in zip(chain[:-1], chain[1:])
    )
    return CheckResult(
        "holder_chain",
        slack <= 0.0,
        slack,
        0.0,
        None,
        "values " + ", ".join(f"{c.value:.6g}" for c in chain),
    )


def check_bochner(ctx: CheckContext) -> CheckResult:
    from ..curvature.bochner import bochner_curvature

    report = bochner_curvature(*_default_pair(ctx), rel_tol=ctx.config.quad_rel_tol)
    ok = abs(report.gbar - 4.0) <= GBAR_TOL and report.accepted
    return CheckResult(
        "bochner_gbar",
        ok,
        report.gbar,
        4.0,
        GBAR_TOL,
        f"curvature {report.curvature:.6g}" + (f"; {report.violation}" if report.violation else ""),
    )


def check_surface_pairing(ctx: CheckContext) -> CheckResult:
    """(1, 1) = area through the surface Green operator, with the collar gap of ⟨ν, ν⟩."""
    from ..curvature.pairings import wp_inner
    from ..curvature.surface import SurfaceGreen, collar_gap

    surface = SurfaceGreen(ctx.group, ctx.domain, cap=ctx.config.element_cap)

    def one(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.ones_like(x)

    value = surface.pair(one, one, rel_tol=ctx.config.quad_rel_tol)
    area = ctx.domain.area
    detail = f"tail {value.kernel_tail:.3g}"
    if ctx.short:
        nu, _ = _default_pair(ctx)
        gap = collar_gap(wp_inner(nu, nu), wp_inner(nu, nu, surface=surface))
        detail += f"; collar gap of ⟨ν, ν⟩ {gap:.3g}"
    return CheckResult(
        "surface_pairing",
        abs(value.value - area) <= SURFACE_PAIRING_TOL * area + value.error,
        value.value,
        area,
        SURFACE_PAIRING_TOL * area,
        detail,
    )


def _finite_area(ctx: CheckContext) -> bool:
    return ctx.spec is not None and ctx.spec.meta.chi is not None


CHECKS: list[Check] = [
    Check("gauss_bonnet", _finite_area, check_gauss_bonnet),
    Check("unit_mass", lambda ctx: _finite_area(ctx) and not ctx.has_core_boundary, check_unit_mass),
    Check(
        "surface_pairing",
        lambda ctx: _finite_area(ctx) and not ctx.has_core_boundary,
        check_surface_pairing,
    ),
    Check("collar_widths", lambda ctx: True, check_collar_widths),
    Check("holder_chain", lambda ctx: True, check_holder_chain),
    Check("bochner_gbar", lambda ctx: True, check_bochner),
]


def run_checks_on(ctx: CheckContext) -> list[CheckResult]:
    results = []
    for check in CHECKS:
        if not check.applies(ctx):
            continue
        try:
            result = check.run(ctx)
        except (LabError, ValueError, ArithmeticError) as e:
            result = CheckResult(check.name, False, detail=f"{type(e).__name__}: {e}")
        debug_log("checks", check.name, passed=result.passed, measured=result.measured)
        results.append(result)
    return results


def run_checks(group_path: str, config: LabConfig, *, out: str | None = None, json_output: bool = False) -> bool:
    """Run every applicable check; True iff all pass."""
    from rich.console import Console
    from rich.table import Table

    spec, G = read_group(group_path)
    results = run_checks_on(CheckContext(spec, G, config))
    passed = all(r.passed for r in results)
    payload = {"schema": SCHEMA, "passed": passed, "checks": [r.to_dict() for r in results]}
    if out:
        write_text(out, dumps(payload))
    if json_output:
        print(dumps(payload), end="")
        return passed

    table = Table(title="wplab checks")
    table.add_column("Check")
    table.add_column("Result")
    table.add_column("Measured", justify="right")
    table.add_column("Expected", justify="right")
    table.add_column("Detail")
    for r in results:
        table.add_row(
            r.name,
            "[green]pass[/]" if r.passed else "[red]FAIL[/]",
            "" if r.measured is None else f"{r.measured:.6g}",
            "" if r.expected is None else f"{r.expected:.6g}",
            r.detail,
        )
    Console().print(table)
    return passed
