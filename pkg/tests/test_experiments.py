"""Tests for wplab.curvature.experiments."""

from __future__ import annotations

import pytest

from wplab.config import LabConfig
from wplab.curvature.experiments import (
    DEFAULT_GRID,
    EXAMPLES,
    example_experiment,
    example_surface,
    experiment_grid,
    fit_family,
    fit_per_variable,
)
from wplab.models import ExperimentPoint, SectionReport
from wplab.plane import translation_length


def _report(curvature: float) -> SectionReport:
    return SectionReport(1.0, 1.0, 0.0, curvature, 4.0, curvature)


def _power_law(rate: float, scale: float = 2.0, fail: frozenset[float] = frozenset()):
    """A point function with curvature −scale·σ^rate, failing on the listed l1."""

    def point(kind: str, l1: float, l2: float | None, config: LabConfig) -> ExperimentPoint:
        if l1 in fail:
            return ExperimentPoint(kind, l1, l2, None, "quadrature did not converge")
        sigma = l1 * (l2 if l2 is not None else 1.0)
        return ExperimentPoint(kind, l1, l2, _report(-scale * sigma**rate))

    return point


@pytest.fixture()
def config() -> LabConfig:
    return LabConfig(threads=2)


class TestExamples:
    def test_registry(self) -> None:
        assert list(EXAMPLES) == ["adjacent_thick", "collar_thick", "two_collars"]
        assert EXAMPLES["adjacent_thick"].rate == 3.0
        assert EXAMPLES["two_collars"].two_lengths

    def test_surface_short_length(self) -> None:
        G = example_surface("collar_thick", 0.2)
        assert translation_length(G.generators[0]) == pytest.approx(0.2, abs=1e-9)

    def test_two_collars_needs_two_lengths(self) -> None:
        with pytest.raises(ValueError, match="two lengths"):
            example_surface("two_collars", 0.2)

    def test_unknown_kind(self) -> None:
        with pytest.raises(ValueError, match="unknown example"):
            example_surface("three_collars", 0.2)
        with pytest.raises(ValueError, match="unknown example"):
            example_experiment("three_collars")


class TestGrid:
    def test_single_length(self) -> None:
        assert experiment_grid("collar_thick", [0.3, 0.1]) == [(0.3, None), (0.1, None)]

    def test_product_grid(self) -> None:
        assert experiment_grid("two_collars", [0.3, 0.1]) == [(0.3, 0.3), (0.3, 0.1), (0.1, 0.3), (0.1, 0.1)]

    def test_empty(self) -> None:
        with pytest.raises(ValueError):
            experiment_grid("collar_thick", [])

    def test_nonpositive(self) -> None:
        with pytest.raises(ValueError, match="positive"):
            experiment_grid("collar_thick", [0.2, 0.0])


class TestFits:
    def test_exact_power_law(self) -> None:
        points = [ExperimentPoint("collar_thick", l, None, _report(-3.0 * l)) for l in DEFAULT_GRID]
        fit = fit_family(points)
        assert fit.slope == pytest.approx(1.0)
        assert fit.stderr == pytest.approx(0.0, abs=1e-9)
        assert fit.points == len(DEFAULT_GRID)

    def test_per_variable(self) -> None:
        grid = (0.3, 0.2, 0.1)
        points = [
            ExperimentPoint("two_collars", a, b, _report(-(a**1.5) * b**0.5)) for a in grid for b in grid
        ]
        fits = fit_per_variable(points)
        assert fits["l1"].slope == pytest.approx(1.5)
        assert fits["l2"].slope == pytest.approx(0.5)

    def test_per_variable_needs_both_to_vary(self) -> None:
        points = [ExperimentPoint("two_collars", a, 0.1, _report(-a)) for a in (0.3, 0.2, 0.15, 0.1)]
        with pytest.raises(ValueError, match="both lengths"):
            fit_per_variable(points)

    def test_per_variable_needs_points(self) -> None:
        points = [ExperimentPoint("two_collars", a, a, _report(-a)) for a in (0.3, 0.1)]
        with pytest.raises(ValueError, match="at least 4"):
            fit_per_variable(points)


class TestExampleExperiment:
    def test_recovers_rate(self, config: LabConfig) -> None:
        result = example_experiment("adjacent_thick", config=config, point_fn=_power_law(3.0))
        assert result.error is None
        assert result.slope == pytest.approx(3.0)
        assert [s for s, _ in result.family] == pytest.approx(list(DEFAULT_GRID))
        assert all(k < 0.0 for _, k in result.family)

    def test_keeps_grid_order(self, config: LabConfig) -> None:
        result = example_experiment("collar_thick", config=config, point_fn=_power_law(1.0))
        assert [p.l1 for p in result.points] == list(DEFAULT_GRID)

    def test_failures_are_recorded(self, config: LabConfig) -> None:
        result = example_experiment(
            "collar_thick", config=config, point_fn=_power_law(1.0, fail=frozenset({0.19}))
        )
        assert result.error is None
        assert [p.l1 for p in result.failures] == [0.19]
        assert result.fit is not None and result.fit.points == 5

    def test_too_few_points(self, config: LabConfig) -> None:
        result = example_experiment(
            "collar_thick", config=config, point_fn=_power_law(1.0, fail=frozenset({0.19, 0.15}))
        )
        assert result.error == "only 4 of 6 points survived (need 5)"
        assert result.fit is None

    def test_min_points_override(self, config: LabConfig) -> None:
        result = example_experiment(
            "collar_thick",
            config=config,
            min_points=4,
            point_fn=_power_law(1.0, fail=frozenset({0.19, 0.15})),
        )
        assert result.error is None

    def test_span_too_small(self, config: LabConfig) -> None:
        result = example_experiment(
            "collar_thick", (0.3, 0.27, 0.24, 0.21, 0.18), config=config, point_fn=_power_law(1.0)
        )
        assert result.error is not None
        assert result.error.startswith("family spans a factor")
        assert result.error.endswith("(need 3)")

    def test_exponent_too_large(self, config: LabConfig) -> None:
        result = example_experiment("adjacent_thick", config=config, point_fn=_power_law(8.0))
        assert result.error == "decay exponent 8 exceeds 7.5"
        assert result.slope == pytest.approx(8.0)

    def test_two_collars_per_variable(self, config: LabConfig) -> None:
        result = example_experiment(
            "two_collars", (0.3, 0.2, 0.1), config=config, min_points=5, point_fn=_power_law(1.0)
        )
        assert result.error is None
        assert len(result.points) == 9
        assert result.slope == pytest.approx(1.0)
        assert result.per_variable["l1"].slope == pytest.approx(1.0)
        assert result.per_variable["l2"].slope == pytest.approx(1.0)


@pytest.mark.slow
class TestScalingReproductions:
    def test_adjacent_thick(self) -> None:
        result = example_experiment("adjacent_thick")
        assert result.error is None
        assert result.slope == pytest.approx(3.0, abs=0.4)

    def test_collar_thick(self) -> None:
        result = example_experiment("collar_thick")
        assert result.error is None
        assert result.slope == pytest.approx(1.0, abs=0.3)

    def test_two_collars(self) -> None:
        result = example_experiment("two_collars", (0.3, 0.2, 0.1))
        assert result.error is None
        assert result.per_variable["l1"].slope == pytest.approx(1.0, abs=0.3)
        assert result.per_variable["l2"].slope == pytest.approx(1.0, abs=0.3)
