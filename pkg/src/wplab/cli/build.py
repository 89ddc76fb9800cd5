"""``wplab build`` — construct a group from a surface spec and report on it."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..config import LabConfig
from ..errors import InfiniteCovolumeError
from ..groups import FuchsianGroup, short_geodesics, systole
from ..helpers import round17
from ..models import SurfaceSpec
from ..surfaces.builders import build_surface
from ..surfaces.domain import dirichlet_domain
from .report import dumps, group_document, read_spec, write_text

SHORT_LENGTH = 0.5
GAUSS_BONNET_RTOL = 0.01


@dataclass
class BuildDiagnostics:
    systole: float
    short_lengths: list[float] = field(default_factory=list)
    area: float | None = None
    expected_area: float | None = None
    certified: bool | None = None

    @property
    def gauss_bonnet_ok(self) -> bool | None:
        if self.area is None or self.expected_area is None:
            return None
        return abs(self.area - self.expected_area) <= GAUSS_BONNET_RTOL * self.expected_area

    def to_dict(self) -> dict:
        return {
            "systole": round17(self.systole),
            "short_geodesics": [round17(x) for x in self.short_lengths],
            "area": None if self.area is None else round17(self.area),
            "expected_area": None if self.expected_area is None else round17(self.expected_area),
            "gauss_bonnet": self.gauss_bonnet_ok,
            "certified": self.certified,
        }


def expected_area(spec: SurfaceSpec) -> float | None:
    """-2πχ, or None for the cylinder."""
    chi = spec.meta.chi
    return None if chi is None else -2.0 * math.pi * chi


def diagnose(spec: SurfaceSpec, G: FuchsianGroup, config: LabConfig) -> BuildDiagnostics:
    base = G.basepoint()
    diag = BuildDiagnostics(systole(G, base))
    diag.short_lengths = [c.length for c in short_geodesics(G, base, SHORT_LENGTH, cap=config.element_cap)]
    diag.expected_area = expected_area(spec)
    if diag.expected_area is not None:
        try:
            domain = dirichlet_domain(G, base, cap=config.element_cap)
            diag.area = domain.area
            diag.certified = domain.certified
        except InfiniteCovolumeError:
            diag.area = math.inf
    return diag


def run_build(spec_path: str, config: LabConfig, *, out: str | None = None, json_output: bool = False) -> None:
    from rich.console import Console
    from rich.panel import Panel

    spec = read_spec(spec_path)
    G = build_surface(spec)
    diag = diagnose(spec, G, config)
    doc = group_document(spec, G)
    if out:
        write_text(out, dumps(doc))

    if json_output:
        print(dumps({**doc, "diagnostics": diag.to_dict()}), end="")
        return

    console = Console()
    lines = [
        f"  [bold]Kind:[/bold] {spec.meta.name}",
        f"  [bold]Lengths:[/bold] {', '.join(f'{x:.6g}' for x in spec.lengths)}",
        f"  [bold]Systole:[/bold] {diag.systole:.10g}",
    ]
    if diag.short_lengths:
        shorts = ", ".join(f"{x:.6g}" for x in diag.short_lengths)
        lines.append(f"  [bold]Short geodesics (< {SHORT_LENGTH:g}):[/bold] {shorts}")
    if diag.area is not None:
        color = "green" if diag.gauss_bonnet_ok else "red"
        lines.append(
            f"  [bold]Dirichlet area:[/bold] [{color}]{diag.area:.10g}[/] "
            f"(Gauss–Bonnet {diag.expected_area:.10g})"
        )
    if diag.certified is not None:
        lines.append(f"  [bold]Orbit ball certified:[/bold] {'yes' if diag.certified else 'no'}")
    if out:
        lines.append(f"  [dim]Group written to {out}[/dim]")
    console.print(Panel("\n".join(lines), title=f"wplab build: {spec.kind}", border_style="cyan"))
