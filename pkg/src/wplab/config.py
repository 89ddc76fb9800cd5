"""Configuration file handling for wplab.

Config lives at ~/.config/wplab/settings.json (XDG).  Every field is
optional; missing fields take the defaults below and numeric fields are
clamped to their allowed ranges on load.

Example config:
{
  "radius": 6.0,
  "quad_budget": 24,
  "epsilon": 0.3,
  "thick_radius": 0.5,
  "penetration": 1.0,
  "threads": 4,
  "seed": 0
}

WPLAB_THREADS overrides ``threads``; command-line flags override both.
"""

from __future__ import annotations

import json
import os
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .helpers import config_dir


@dataclass
class LabConfig:
    """Numerical budgets and model constants shared by all commands."""

    radius: float = 6.0
    element_cap: int = 10_000_000
    tail_fraction: float = 0.01
    quad_budget: int = 24
    quad_rel_tol: float = 0.03
    epsilon: float = 0.3
    thick_radius: float = 0.5
    penetration: float = 1.0
    decay: float = 1.0
    twist_span: float = 6.0
    s_nodes: int = 8
    threads: int | None = None
    seed: int = 0

    MIN_RADIUS = 0.1
    MAX_RADIUS = 30.0
    MIN_BUDGET = 4
    MAX_BUDGET = 256
    MAX_CAP = 100_000_000

    def __post_init__(self) -> None:
        self.radius = max(self.MIN_RADIUS, min(self.MAX_RADIUS, float(self.radius)))
        self.quad_budget = max(self.MIN_BUDGET, min(self.MAX_BUDGET, int(self.quad_budget)))
        self.element_cap = max(1, min(self.MAX_CAP, int(self.element_cap)))
        self.tail_fraction = max(0.0, float(self.tail_fraction))
        self.quad_rel_tol = max(1e-6, float(self.quad_rel_tol))
        self.epsilon = max(1e-3, float(self.epsilon))
        self.thick_radius = max(0.05, float(self.thick_radius))
        self.s_nodes = max(2, int(self.s_nodes))
        if self.threads is not None:
            self.threads = max(1, int(self.threads))

    @property
    def workers(self) -> int:
        """Parallelism cap: WPLAB_THREADS, then config, then CPU count."""
        raw = os.environ.get("WPLAB_THREADS", "").strip()
        if raw:
            try:
                return max(1, int(raw))
            except ValueError:
                print(
                    f"wplab: ignoring non-integer WPLAB_THREADS={raw!r}",
                    file=sys.stderr,
                )
        if self.threads is not None:
            return self.threads
        return os.cpu_count() or 1

    @classmethod
    def from_dict(cls, d: dict) -> "LabConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(k for k in d if k not in known)
        if unknown:
            print(
                f"wplab: ignoring unknown config keys: {', '.join(unknown)}",
                file=sys.stderr,
            )
        return cls(**{k: v for k, v in d.items() if k in known})

    def to_dict(self) -> dict:
        """Serialize back to a JSON-friendly dict."""
        return asdict(self)

    @classmethod
    def default(cls) -> "LabConfig":
        return cls()


def config_path() -> Path:
    """Return the config file path, preferring XDG."""
    return config_dir("settings.json")


def load_config() -> LabConfig:
    """Load config from disk, or return defaults if no file exists."""
    path = config_path()
    if not path.exists():
        return LabConfig.default()

    try:
        data = json.loads(path.read_text())
        if not isinstance(data, dict):
            raise TypeError("top-level value must be an object")
        return LabConfig.from_dict(data)
    except (json.JSONDecodeError, TypeError, ValueError, OSError) as e:
        print(f"wplab: bad config ({path}): {e} — using defaults", file=sys.stderr)
        return LabConfig.default()


def init_config() -> None:
    """Create a config file holding the defaults."""
    path = config_path()
    if path.exists():
        print(f"Config already exists: {path}")
        return

    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(LabConfig.default().to_dict(), indent=2) + "\n")
    print(f"Created config: {path}")
