"""Tests for wplab.curvature.bochner."""

from __future__ import annotations

import math

import numpy as np
import pytest

from wplab.curvature.bochner import bochner_curvature, gbar, orthonormalizer
from wplab.curvature.differentials import model_gradient, model_thick
from wplab.curvature.pairings import Frame, riemann_entry, wp_inner
from wplab.errors import NearDependenceError
from wplab.groups import GeodesicClass
from wplab.plane import Isometry


@pytest.fixture(scope="module")
def frame() -> Frame:
    return Frame.build(GeodesicClass.of(Isometry.diagonal(0.15)))


@pytest.fixture(scope="module")
def report(frame: Frame):
    return bochner_curvature(model_gradient(frame), model_thick(frame, 1))


class TestGbar:
    def test_orthonormal(self) -> None:
        assert gbar(1.0, 1.0, 0.0) == 4.0

    def test_degenerate(self) -> None:
        assert gbar(2.0, 2.0, 2.0) == 0.0

    def test_orthonormalizer(self) -> None:
        gram = np.array([[2.0, 0.6], [0.6, 1.5]])
        M = orthonormalizer(gram)
        assert M.T @ gram @ M == pytest.approx(np.eye(2))
        assert M[1, 0] == 0.0


class TestBochner:
    def test_gbar_after_orthonormalization(self, report) -> None:
        assert report.gbar == pytest.approx(4.0, abs=1e-6)

    def test_negative(self, report) -> None:
        assert report.curvature < 0.0
        assert report.rbar < 0.0
        assert report.violation is None
        assert report.accepted

    def test_gram_entries(self, frame: Frame, report) -> None:
        grad = model_gradient(frame)
        assert report.g11 == pytest.approx(wp_inner(grad, grad).value)
        assert report.g22 == pytest.approx(1.0, rel=1e-12)
        assert 0.0 < report.g12 < math.sqrt(report.g11 * report.g22)

    def test_numerator_from_riemann_entries(self, frame: Frame, report) -> None:
        mu1, mu2 = model_gradient(frame), model_thick(frame, 1)
        u1 = mu1.scaled(1.0 / math.sqrt(report.g11))
        u2 = mu2.scaled(1.0 / math.sqrt(report.g22))
        c = report.g12 / math.sqrt(report.g11 * report.g22)
        unit = 2.0 * riemann_entry(u1, u2, u1, u2).value - 2.0 * riemann_entry(u1, u1, u2, u2).value
        assert report.rbar * (1.0 - c * c) == pytest.approx(unit, rel=1e-9)

    def test_error_bars_reported(self, report) -> None:
        assert report.quad_err >= 0.0
        assert report.tail_err == 0.0
        assert report.to_dict()["Rbar"] == pytest.approx(report.rbar)

    def test_dependent_pair(self, frame: Frame) -> None:
        mu = model_thick(frame, 1)
        with pytest.raises(NearDependenceError):
            bochner_curvature(mu, mu.scaled(2.0))

    def test_zero_norm(self, frame: Frame) -> None:
        mu = model_thick(frame, 1)
        with pytest.raises(NearDependenceError):
            bochner_curvature(mu, mu.scaled(0.0))

    def test_scale_invariant(self, frame: Frame, report) -> None:
        again = bochner_curvature(model_gradient(frame).scaled(3.0), model_thick(frame, 1))
        assert again.curvature == pytest.approx(report.curvature, rel=1e-9)
