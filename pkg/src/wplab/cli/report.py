"""File output for the wplab CLI: group documents, CSV rows and summaries.

Numbers go through fmt17/round17 so that a rerun with the same seed and
config reproduces every file byte for byte.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

from ..errors import SpecFormatError
from ..groups import FuchsianGroup
from ..helpers import fmt17
from ..models import ScalingExperiment, SurfaceSpec

SCHEMA = 1

EXPERIMENT_COLUMNS = (
    "kind", "l1", "l2", "sigma",
    "g11", "g22", "g12", "Rbar", "curvature",
    "quad_err", "tail_err", "error",
)


def read_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise SpecFormatError(f"{path}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from e
    except OSError as e:
        raise SpecFormatError(f"{path}: {e.strerror or e}") from e


def read_spec(path: str | Path) -> SurfaceSpec:
    return SurfaceSpec.from_dict(read_json(path))


def group_document(spec: SurfaceSpec | None, G: FuchsianGroup) -> dict:
    doc: dict = {"schema": SCHEMA}
    if spec is not None:
        doc["spec"] = spec.to_dict()
    doc["group"] = G.to_dict()
    return doc


def read_group(path: str | Path) -> tuple[SurfaceSpec | None, FuchsianGroup]:
    """A group document written by ``wplab build``, or a bare group object."""
    doc = read_json(path)
    if not isinstance(doc, dict):
        raise SpecFormatError(f"{path}: group document must be a JSON object")
    if "group" not in doc:
        return None, FuchsianGroup.from_dict(doc)
    spec = SurfaceSpec.from_dict(doc["spec"]) if "spec" in doc else None
    return spec, FuchsianGroup.from_dict(doc["group"])


def dumps(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=False) + "\n"


def write_text(path: str | Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, str) else fmt17(v) for v in row])
    return buf.getvalue()


def experiment_rows(result: ScalingExperiment) -> list[list[Any]]:
    rows = []
    for p in result.points:
        r = p.report
        rows.append([
            p.kind, p.l1, p.l2, p.sigma,
            r.g11 if r else None, r.g22 if r else None, r.g12 if r else None,
            r.rbar if r else None, r.curvature if r else None,
            r.quad_err if r else None, r.tail_err if r else None,
            p.error or "",
        ])
    return rows


def experiment_summary(result: ScalingExperiment, grid: Sequence[float]) -> dict:
    return {
        "schema": SCHEMA,
        "kind": result.kind,
        "grid": [float(fmt17(x)) for x in grid],
        "points": len(result.points),
        "failures": len(result.failures),
        "fit": result.fit.to_dict() if result.fit else None,
        "per_variable": {k: v.to_dict() for k, v in result.per_variable.items()},
        "error": result.error,
    }


def points_text(result: ScalingExperiment) -> str:
    """Two columns, log σ and log|curvature|, one surviving point per line."""
    lines = ["# log_sigma log_abs_curvature"]
    for sigma, curvature in result.family:
        lines.append(f"{fmt17(math.log(sigma))} {fmt17(math.log(abs(curvature)))}")
    return "\n".join(lines) + "\n"


def write_experiment(result: ScalingExperiment, grid: Sequence[float], out: str | Path) -> list[Path]:
    """<out>.csv, <out>.json and <out>.points.dat."""
    out = Path(out)
    stem = out.with_suffix("") if out.suffix in {".csv", ".json"} else out
    return [
        write_text(stem.with_name(stem.name + ".csv"), csv_text(EXPERIMENT_COLUMNS, experiment_rows(result))),
        write_text(stem.with_name(stem.name + ".json"), dumps(experiment_summary(result, grid))),
        write_text(stem.with_name(stem.name + ".points.dat"), points_text(result)),
    ]
