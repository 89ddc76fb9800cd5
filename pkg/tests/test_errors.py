"""Tests for the error hierarchy and its exit codes."""

from __future__ import annotations

import pytest

from wplab.errors import (
    BallTooLargeError,
    CollarOverlapError,
    ConstructionError,
    DegenerateGeodesicError,
    InfiniteCovolumeError,
    InvalidPointError,
    LabError,
    NearDependenceError,
    NonSurfaceGroupError,
    NotHyperbolicError,
    QuadratureError,
    SpecFormatError,
    TrivialElementError,
)


class TestExitCodes:
    @pytest.mark.parametrize(
        "cls",
        [InvalidPointError, TrivialElementError, NotHyperbolicError, DegenerateGeodesicError, SpecFormatError],
    )
    def test_input_errors_exit_2_and_are_value_errors(self, cls: type[LabError]) -> None:
        err = cls("bad input")
        assert err.exit_code == 2
        assert isinstance(err, ValueError)
        assert isinstance(err, LabError)

    @pytest.mark.parametrize(
        "cls",
        [
            NonSurfaceGroupError,
            ConstructionError,
            InfiniteCovolumeError,
            QuadratureError,
            CollarOverlapError,
            NearDependenceError,
        ],
    )
    def test_computation_errors_exit_1_and_are_runtime_errors(self, cls: type[LabError]) -> None:
        err = cls("failed")
        assert err.exit_code == 1
        assert isinstance(err, RuntimeError)
        assert not isinstance(err, ValueError)


class TestBallTooLarge:
    def test_carries_count_and_growth(self) -> None:
        err = BallTooLargeError(1200, 1000, 0.987)
        assert err.exit_code == 3
        assert err.count == 1200
        assert err.cap == 1000
        assert err.growth_exponent == pytest.approx(0.987)
        assert "1200" in str(err)
        assert "0.987" in str(err)

    def test_unknown_growth_exponent(self) -> None:
        err = BallTooLargeError(5, 4, None)
        assert "unknown" in str(err)
