import dataclasses

import pytest

from clusterbell.core.errors import ConfigError, CoverageError
from clusterbell.core.noise import NoiseParams, TrajectoryRng
from clusterbell.modes.fit.grid_fit import (
    FitGrid,
    FitPoint,
    FitResult,
    axis,
    delta_fidelity,
    delta_stabilizers,
    grid_fit,
    select_best,
)
from clusterbell.modes.tomography.estimation import EstimationReport, load_reference_report
from clusterbell.modes.tomography.pipeline import run_tomography


def _shifted(report: EstimationReport, delta: float) -> EstimationReport:
    estimates = {k: dataclasses.replace(e, value=e.value + delta) for k, e in report.estimates.items()}
    return EstimationReport(report.n, estimates, report.blocks)


class TestDeltas:
    def test_uniform_shift(self):
        reference = load_reference_report()
        shifted = _shifted(reference, 0.01)
        assert delta_fidelity(reference, shifted) == pytest.approx(63 * 0.01 / 64)
        assert delta_stabilizers(reference, shifted) == pytest.approx(63 * 0.01 / 64)

    def test_cancelling_shift(self):
        reference = load_reference_report()
        estimates = dict(reference.estimates)
        labels = sorted(estimates)
        estimates[labels[0]] = dataclasses.replace(estimates[labels[0]], value=estimates[labels[0]].value + 0.1)
        estimates[labels[1]] = dataclasses.replace(estimates[labels[1]], value=estimates[labels[1]].value - 0.1)
        other = EstimationReport(6, estimates, reference.blocks)
        assert delta_fidelity(reference, other) == pytest.approx(0.0, abs=1e-12)
        assert delta_stabilizers(reference, other) == pytest.approx(0.2 / 64)

    def test_label_mismatch(self):
        reference = load_reference_report()
        estimates = dict(reference.estimates)
        estimates.pop("111111")
        with pytest.raises(CoverageError):
            delta_fidelity(reference, EstimationReport(6, estimates, reference.blocks))


class TestGrid:
    def test_axis(self):
        assert axis(0.0, 0.01, 0.005) == (0.0, 0.005, 0.01)
        with pytest.raises(ConfigError):
            axis(0.0, 0.01, 0.0)

    def test_default_size(self):
        grid = FitGrid.default()
        assert len(grid) == len(grid.points()) == 8 * 13 * 13

    def test_too_few_shots(self):
        with pytest.raises(ConfigError):
            FitGrid((0.0,), (0.0,), (0.0,), shots=100)

    def test_unsorted_axis(self):
        with pytest.raises(ConfigError):
            FitGrid((0.01, 0.0), (0.0,), (0.0,))

    def test_dict_form(self):
        grid = FitGrid((0.0, 0.01), (0.02,), (0.03,), tolerance=0.01)
        assert FitGrid.from_dict(grid.to_dict()) == grid


class TestSelection:
    def _points(self):
        return [
            FitPoint(0.0, 0.0, 0.0, delta_f=0.02, delta_s=0.01, fidelity=0.9),
            FitPoint(0.0, 0.0, 0.01, delta_f=0.004, delta_s=0.03, fidelity=0.7),
            FitPoint(0.0, 0.0, 0.02, delta_f=0.001, delta_s=0.05, fidelity=0.6),
        ]

    def test_level_set_then_delta_s(self):
        level_set, best, fallback = select_best(self._points(), 0.005)
        assert level_set == [1, 2]
        assert best.p2d == 0.01
        assert not fallback

    def test_fallback(self, caplog):
        level_set, best, fallback = select_best(self._points(), 0.0005)
        assert level_set == []
        assert best.p2d == 0.02
        assert fallback
        assert "falling back" in caplog.text

    def test_result_dict(self):
        points = self._points()
        result = FitResult(points, [1, 2], points[1])
        assert FitResult.from_dict(result.to_dict()).best == points[1]
        assert list(result.to_frame().columns) == ["p1d", "p2XX", "p2d", "delta_f", "delta_s", "fidelity"]


@pytest.mark.slow
class TestGridFit:
    def test_recovers_p2d(self):
        truth = NoiseParams.device(0.012, 0.035, 0.035)
        reference = run_tomography(truth, 20_000, TrajectoryRng(100)).raw
        grid = FitGrid((0.012,), (0.035,), (0.015, 0.035, 0.055), shots=10_000, tolerance=0.02)
        result = grid_fit(reference, grid, seed=7, workers=2)
        assert result.best.p2d == pytest.approx(0.035)
        assert len(result.points) == 3

    def test_noiseless_reference(self):
        reference = run_tomography(None, 10_000, TrajectoryRng(5)).raw
        grid = FitGrid((0.0, 0.01), (0.0,), (0.0, 0.02), shots=10_000, base=NoiseParams.noiseless())
        result = grid_fit(reference, grid, seed=3)
        assert result.best.rates == (0.0, 0.0, 0.0)
        assert result.best.delta_s == pytest.approx(0.0, abs=1e-12)

    def test_worker_count_does_not_matter(self):
        reference = load_reference_report()
        grid = FitGrid((0.012,), (0.0, 0.035), (0.035,), shots=10_000)
        a = grid_fit(reference, grid, seed=1, workers=1)
        b = grid_fit(reference, grid, seed=1, workers=3)
        assert a.to_dict() == b.to_dict()
        # XX gate errors are needed to match the shipped table
        assert a.points[1].delta_s < a.points[0].delta_s
