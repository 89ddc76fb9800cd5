"""Shared fixtures for wplab tests."""

from __future__ import annotations

import json
import os
from pathlib import Path

import pytest

from wplab.groups import FuchsianGroup
from wplab.models import SurfaceSpec
from wplab.surfaces.builders import build_cylinder, build_pants, build_punctured_torus


def pytest_collection_modifyitems(config: pytest.Config, items: list[pytest.Item]) -> None:
    """Skip the long scaling reproductions unless WPLAB_SLOW=1."""
    if os.environ.get("WPLAB_SLOW", "").strip() == "1":
        return
    skip = pytest.mark.skip(reason="slow; set WPLAB_SLOW=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture()
def tmp_config_dir(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    """Redirect XDG_CONFIG_HOME to a temp directory so settings.json is isolated."""
    config_home = tmp_path / "config"
    config_home.mkdir()
    monkeypatch.setenv("XDG_CONFIG_HOME", str(config_home))
    monkeypatch.delenv("WPLAB_THREADS", raising=False)
    return config_home / "wplab"


@pytest.fixture(scope="session")
def torus() -> FuchsianGroup:
    return build_punctured_torus(1.0)


@pytest.fixture(scope="session")
def pants() -> FuchsianGroup:
    return build_pants(1.0, 1.0, 1.0)


@pytest.fixture(scope="session")
def cylinder() -> FuchsianGroup:
    return build_cylinder(0.1)


@pytest.fixture()
def spec_file(tmp_path: Path):
    """Factory writing a SurfaceSpec (or raw dict) to a JSON file."""

    def write(spec: SurfaceSpec | dict, name: str = "spec.json") -> Path:
        data = spec.to_dict() if isinstance(spec, SurfaceSpec) else spec
        path = tmp_path / name
        path.write_text(json.dumps(data, indent=2))
        return path

    return write
