"""``wplab kernel`` — truncated K and G sums between two points."""

from __future__ import annotations

from typing import Sequence

from ..config import LabConfig
from ..errors import SpecFormatError
from ..groups import FuchsianGroup
from ..kernels import green, k_sum
from ..models import KernelValue
from ..plane import PlanePoint
from .report import SCHEMA, csv_text, dumps, read_group, write_text

KERNELS = ("k", "green")
COLUMNS = ("kernel", "p_x", "p_y", "q_x", "q_y", "radius", "value", "tail", "terms", "accepted")
SYMMETRY_RTOL = 1e-9


def parse_point(text: str) -> PlanePoint:
    """'x,y' in the upper half-plane."""
    try:
        x, y = (float(t) for t in text.split(","))
    except ValueError as e:
        raise SpecFormatError(f"point must be 'x,y', got {text!r}") from e
    return PlanePoint(x, y)


def evaluate(
    G: FuchsianGroup,
    p: PlanePoint,
    q: PlanePoint,
    radius: float,
    kernels: Sequence[str],
    config: LabConfig,
) -> list[tuple[str, KernelValue]]:
    fns = {"k": k_sum, "green": green}
    return [(name, fns[name](G, p, q, radius, cap=config.element_cap)) for name in kernels]


def symmetry_gap(G: FuchsianGroup, p: PlanePoint, q: PlanePoint, radius: float, config: LabConfig) -> float:
    """|G(p, q) - G(q, p)| relative to |G(p, q)|."""
    a = green(G, p, q, radius, cap=config.element_cap).value
    b = green(G, q, p, radius, cap=config.element_cap).value
    return abs(a - b) / max(abs(a), 1e-300)


def run_kernel(
    group_path: str,
    p_text: str,
    q_text: str,
    config: LabConfig,
    *,
    kernels: Sequence[str] = KERNELS,
    symmetry: bool = False,
    out: str | None = None,
    json_output: bool = False,
) -> bool:
    """Print (or write) the CSV rows; returns False when the symmetry check fails.

    A tail above the accepted fraction only warns.
    """
    from rich.console import Console

    warn = Console(stderr=True, highlight=False)
    _, G = read_group(group_path)
    p, q = parse_point(p_text), parse_point(q_text)
    rows = []
    values = []
    ok = True
    for name, kv in evaluate(G, p, q, config.radius, kernels, config):
        accepted = kv.accepted(config.tail_fraction)
        if not accepted:
            warn.print(
                f"[yellow]wplab: warning: {name} tail {kv.tail:.3g} exceeds "
                f"{config.tail_fraction:g} of |value| at R = {kv.radius:g}[/]"
            )
        rows.append([name, p.x, p.y, q.x, q.y, kv.radius, kv.value, kv.tail, kv.terms, str(accepted).lower()])
        values.append({"kernel": name, **kv.to_dict(), "accepted": accepted})

    text = csv_text(COLUMNS, rows)
    if json_output:
        text = dumps({"schema": SCHEMA, "p": [p.x, p.y], "q": [q.x, q.y], "values": values})
    if out:
        write_text(out, text)
    else:
        print(text, end="")

    if symmetry:
        gap = symmetry_gap(G, p, q, config.radius, config)
        passed = gap <= SYMMETRY_RTOL
        ok = passed
        print(f"green symmetry: {'pass' if passed else 'FAIL'} (relative gap {gap:.3g})")
    return ok
