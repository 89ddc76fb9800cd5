"""Shared helpers for wplab: config paths, debug tracing, number formatting."""

from __future__ import annotations

import json
import math
import os
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Sequence

import numpy as np
from scipy import stats


def config_dir(*parts: str) -> Path:
    """Return a path under the wplab XDG config directory.

    >>> config_dir("settings.json")
    PosixPath('/home/user/.config/wplab/settings.json')
    """
    xdg = os.environ.get("XDG_CONFIG_HOME", "")
    base = Path(xdg) if xdg else Path.home() / ".config"
    return base / "wplab" / Path(*parts) if parts else base / "wplab"


# ── Debug logging ─────────────────────────────────────────


def _debug_enabled() -> bool:
    """Return True if debug tracing is enabled via env var."""
    raw = os.environ.get("WPLAB_DEBUG", "").strip().lower()
    return raw in {"1", "true", "yes", "on"}


def _debug_log_path() -> Path:
    """Path to debug log file.

    Override with WPLAB_DEBUG_LOG_PATH, otherwise defaults to
    ~/.config/wplab/debug.log.
    """
    custom = os.environ.get("WPLAB_DEBUG_LOG_PATH", "").strip()
    if custom:
        return Path(custom).expanduser()
    return config_dir("debug.log")


def debug_log(component: str, phase: str, **fields: Any) -> None:
    """Write one JSON log event for a computation stage."""
    if not _debug_enabled():
        return

    event: dict[str, Any] = {
        "ts": datetime.now(timezone.utc).isoformat(),
        "component": component,
        "phase": phase,
    }
    event.update({k: v for k, v in fields.items() if v is not None})

    path = _debug_log_path()
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd = os.open(path, os.O_WRONLY | os.O_CREAT | os.O_APPEND, 0o600)
        with os.fdopen(fd, "a", encoding="utf-8") as f:
            f.write(json.dumps(event, default=str) + "\n")
        try:
            path.chmod(0o600)
        except OSError:
            pass
    except OSError:
        # Tracing must never break a computation.
        pass


# ── Numbers ───────────────────────────────────────────────


def fmt17(x: float | int | None) -> str:
    """Format a number with 17 significant digits (empty for None)."""
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return repr(x)
    return f"{x:.17g}"


def round17(x: float) -> float:
    """Round-trip a float through its 17-digit text form (JSON stability)."""
    return float(fmt17(x))


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float, float]:
    """Least-squares slope of log|y| against log x.

    Returns (slope, stderr, intercept).  Needs at least three points.
    """
    x = np.log(np.asarray(xs, dtype=float))
    y = np.log(np.abs(np.asarray(ys, dtype=float)))
    if x.size < 3:
        raise ValueError("slope fit needs at least three points")
    fit = stats.linregress(x, y)
    return float(fit.slope), float(fit.stderr), float(fit.intercept)
