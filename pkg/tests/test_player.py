import json
import math

import numpy as np
import pytest

from clusterbell.core.noise import NoiseParams, TrajectoryRng
from clusterbell.core.pauli import BinaryVector
from clusterbell.core.readout import ConfusionModel
from clusterbell.modes.games import GameInstance, play_quantum
from clusterbell.modes.games.player import (
    InputRate,
    aggregate,
    cbf_success_from_fidelity,
    fidelity_from_cbf_success,
    win_values,
)
from clusterbell.modes.games.referee import satisfies
from clusterbell.modes.tomography.pipeline import run_tomography


class TestWinValues:
    def test_single_constraint(self):
        outcomes = np.arange(4)
        np.testing.assert_allclose(win_values([(0b011, 1)], outcomes, 2), [0.0, 1.0, 1.0, 0.0])
        np.testing.assert_allclose(win_values([(0b011, 0)], outcomes, 2), [1.0, 0.0, 0.0, 1.0])

    def test_closed_group_is_exact(self):
        game = GameInstance.build("ss", "full")
        x = BinaryVector.from_string("000000")
        values = win_values(game.constraints(x), np.arange(64), 6)
        expected = [float(satisfies(game.constraints(x), y)) for y in range(64)]
        np.testing.assert_allclose(values, expected, atol=1e-12)


class TestAggregate:
    def test_mean_and_error(self):
        rows = [InputRate("00", 1.0, 0.0, 10), InputRate("01", 0.5, 0.1, 10)]
        est = aggregate(rows)
        assert est.p_hat == pytest.approx(0.75)
        assert est.stderr == pytest.approx(0.05)
        assert list(est.to_frame().columns) == ["input", "rate", "stderr", "shots"]


class TestPerfectPlay:
    """The quantum strategy never loses without noise."""

    @pytest.mark.parametrize("kind,inputs", [("cbf", "full"), ("cbf", "mermin55"), ("ss", "hlf8"), ("ss", "hlf5")])
    def test_zero_losses(self, kind, inputs):
        game = GameInstance.build(kind, inputs)
        result = play_quantum(game, None, 1000, TrajectoryRng(7))
        assert result.losses == 0
        assert result.estimate().p_hat == 1.0

    def test_noiseless_params_take_ideal_path(self):
        game = GameInstance.build("ss", "hlf5")
        result = play_quantum(game, NoiseParams.noiseless(), 200, TrajectoryRng(1))
        assert result.losses == 0

    def test_hlfn5_on_larger_cycle(self):
        game = GameInstance.build("ss", "hlfn5", n=8)
        assert play_quantum(game, None, 200, TrajectoryRng(2)).losses == 0


class TestNoisyPlay:
    def test_deterministic(self):
        game = GameInstance.build("ss", "hlf5")
        noise = NoiseParams.device()
        a = play_quantum(game, noise, 300, TrajectoryRng(3), workers=1)
        b = play_quantum(game, noise, 300, TrajectoryRng(3), workers=3)
        for label in a.outcomes:
            np.testing.assert_array_equal(a.outcomes[label], b.outcomes[label])

    @pytest.mark.slow
    def test_fitted_noise_hlf8_near_device_band(self):
        game = GameInstance.build("ss", "hlf8")
        est = play_quantum(game, NoiseParams.device(), 5000, TrajectoryRng(4)).estimate()
        assert 0.7 < est.p_hat < 0.95

    @pytest.mark.slow
    def test_readout_correction_restores_rate(self):
        game = GameInstance.build("ss", "hlf5")
        confusion = ConfusionModel.symmetric(6, 0.05)
        result = play_quantum(game, None, 20_000, TrajectoryRng(9), readout=confusion)
        raw = result.estimate()
        corrected = result.estimate(confusion)
        assert raw.p_hat < 0.95
        assert corrected.corrected
        assert corrected.p_hat == pytest.approx(1.0, abs=4 * corrected.stderr + 1e-3)


class TestNoiseMonotonicity:
    @pytest.mark.slow
    @pytest.mark.parametrize("channel", ["p2d", "p2XX"])
    def test_win_rate_does_not_grow_with_two_qubit_noise(self, channel):
        game = GameInstance.build("ss", "hlf5")
        base = NoiseParams.device()
        estimates = []
        for rate in (0.0, 0.01, 0.03, 0.06):
            rates = {"p1d": base.p1d, "p2XX": base.p2XX, "p2d": base.p2d, channel: rate}
            noise = base.with_rates(**rates)
            estimates.append(play_quantum(game, noise, 2000, TrajectoryRng(21)).estimate())
        for lower, higher in zip(estimates, estimates[1:]):
            assert higher.p_hat <= lower.p_hat + 3 * math.hypot(lower.stderr, higher.stderr)
        assert estimates[-1].p_hat < estimates[0].p_hat


class TestRounds:
    def test_records(self):
        game = GameInstance.build("cbf", "full")
        result = play_quantum(game, None, 3, TrajectoryRng(5))
        records = list(result.rounds())
        assert len(records) == 64 * 3
        first = json.loads(records[0].to_json())
        assert first["x"] == "000000"
        assert first["won"] is True
        assert first["strategy"] == "quantum-cbf"
        assert first["stream"] == [0, 0, 0]


class TestFidelityLink:
    def test_round_trip(self):
        assert cbf_success_from_fidelity(0.6) == pytest.approx(0.8)
        assert fidelity_from_cbf_success(0.8) == pytest.approx(0.6)

    @pytest.mark.slow
    def test_cbf_rate_matches_tomography_fidelity(self):
        noise = NoiseParams.device()
        game = GameInstance.build("cbf", "full")
        est = play_quantum(game, noise, 2000, TrajectoryRng(31)).estimate()
        run = run_tomography(noise, 4000, TrajectoryRng(32))
        predicted = cbf_success_from_fidelity(run.raw_fidelity.fidelity)
        predicted_err = run.raw_fidelity.fidelity_stderr / 2
        assert est.p_hat == pytest.approx(predicted, abs=4 * math.hypot(est.stderr, predicted_err) + 5e-3)
