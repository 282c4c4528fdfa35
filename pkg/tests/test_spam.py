import numpy as np
import pytest

from clusterbell.core.noise import TrajectoryRng
from clusterbell.core.readout import ConfusionModel
from clusterbell.modes.tomography.estimation import estimate_expectations
from clusterbell.modes.tomography.pipeline import run_tomography, simulate_dataset
from clusterbell.modes.tomography.plan import greedy_clique_cover
from clusterbell.modes.tomography.spam import corrected_distributions, spam_correct


@pytest.fixture(scope="module")
def plan():
    return greedy_clique_cover(n=6)


class TestSpamCorrection:
    def test_identity_is_a_no_op(self, plan):
        dataset = simulate_dataset(plan, None, 200, TrajectoryRng(8),
                                   readout=ConfusionModel.symmetric(6, 0.05))
        raw = estimate_expectations(plan, dataset)
        corrected = spam_correct(plan, dataset, ConfusionModel.identity(6))
        for label, e in raw.estimates.items():
            assert corrected.value(label) == pytest.approx(e.value)
            assert corrected.estimates[label].stderr == pytest.approx(e.stderr)
        assert corrected.corrected and not raw.corrected

    def test_recovers_ideal_values(self, plan):
        readout = ConfusionModel.symmetric(6, 0.02)
        run = run_tomography(None, 4000, TrajectoryRng(9), plan=plan, readout=readout)
        assert run.raw_fidelity.fidelity < 0.95
        fid = run.corrected_fidelity
        assert abs(fid.fidelity - 1.0) <= 4 * fid.fidelity_stderr + 1e-9
        weight_six = run.corrected.estimates["111111"]
        assert abs(weight_six.value - 1.0) <= 4 * weight_six.stderr

    def test_wrong_width(self, plan):
        dataset = simulate_dataset(plan, None, 10, TrajectoryRng(1))
        with pytest.raises(ValueError):
            spam_correct(plan, dataset, ConfusionModel.identity(5))

    def test_quasi_distributions_normalised(self, plan):
        dataset = simulate_dataset(plan, None, 500, TrajectoryRng(3),
                                   readout=ConfusionModel.from_flip_rates(6, 0.03, 0.01))
        for q in corrected_distributions(dataset, ConfusionModel.from_flip_rates(6, 0.03, 0.01)):
            assert q.sum() == pytest.approx(1.0)
            assert np.isfinite(q).all()
