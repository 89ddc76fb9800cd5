"""``wplab experiment`` — run one scaling example and write its reports."""

from __future__ import annotations

from typing import Sequence

from ..config import LabConfig
from ..curvature.experiments import DEFAULT_GRID, EXAMPLES, example_experiment
from ..errors import SpecFormatError
from ..models import ScalingExperiment
from .report import dumps, experiment_summary, write_experiment


def parse_grid(text: str | None) -> tuple[float, ...]:
    """Comma-separated lengths; the default grid when empty."""
    if not text:
        return DEFAULT_GRID
    try:
        grid = tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError as e:
        raise SpecFormatError(f"grid must be comma-separated numbers, got {text!r}") from e
    if not grid:
        raise SpecFormatError("grid is empty")
    if any(not x > 0.0 for x in grid):
        raise SpecFormatError(f"grid lengths must be positive, got {list(grid)}")
    return grid


def run_experiment(
    kind: str,
    config: LabConfig,
    *,
    grid: Sequence[float] = DEFAULT_GRID,
    out: str | None = None,
    json_output: bool = False,
) -> ScalingExperiment:
    from rich.console import Console
    from rich.table import Table

    result = example_experiment(kind, grid, config=config)
    written = write_experiment(result, grid, out) if out else []

    if json_output:
        print(dumps(experiment_summary(result, grid)), end="")
        return result

    console = Console()
    meta = EXAMPLES[kind]
    table = Table(title=f"wplab experiment: {meta.name}")
    table.add_column("ℓ1", justify="right")
    if meta.two_lengths:
        table.add_column("ℓ2", justify="right")
    table.add_column("curvature", justify="right")
    table.add_column("error bar", justify="right")
    table.add_column("note")
    for p in result.points:
        row = [f"{p.l1:.4g}"]
        if meta.two_lengths:
            row.append(f"{p.l2:.4g}")
        if p.report:
            row += [f"{p.report.curvature:.6g}", f"{p.report.quad_err + p.report.tail_err:.2g}"]
        else:
            row += ["", ""]
        row.append(f"[yellow]{p.error}[/]" if p.error else "")
        table.add_row(*row)
    console.print(table)

    if result.fit:
        console.print(
            f"  [bold]slope[/bold] {result.fit.slope:.4f} ± {result.fit.stderr:.2g} "
            f"(expected {meta.rate:g}) over {result.fit.points} points"
        )
    for name, fit in result.per_variable.items():
        console.print(f"  [bold]slope in {name}[/bold] {fit.slope:.4f} ± {fit.stderr:.2g}")
    if result.error:
        console.print(f"  [red]✗ {result.error}[/]")
    for path in written:
        console.print(f"  [dim]wrote {path}[/dim]")
    return result
