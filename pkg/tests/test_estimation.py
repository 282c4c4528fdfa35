import numpy as np
import pytest

from clusterbell.core.errors import CliqueMismatchError, CoverageError, EmptyDatasetError
from clusterbell.core.noise import TrajectoryRng
from clusterbell.core.pauli import nontrivial_stabilizers
from clusterbell.modes.tomography.estimation import (
    CliqueTally,
    covariances,
    EstimationReport,
    ShotDataset,
    estimate_expectations,
    fidelity_and_witness,
    format_uncertainty,
    load_reference_report,
    report_from_table,
    table_frame,
)
from clusterbell.modes.tomography.pipeline import run_tomography, simulate_dataset
from clusterbell.modes.tomography.plan import greedy_clique_cover, load_stabilizer_table, reference_plan


@pytest.fixture(scope="module")
def plan():
    return greedy_clique_cover(n=6)


@pytest.fixture(scope="module")
def ideal_dataset(plan):
    return simulate_dataset(plan, None, 300, TrajectoryRng(11))


class TestNoiseless:
    def test_every_stabilizer_is_one(self, plan, ideal_dataset):
        report = estimate_expectations(plan, ideal_dataset)
        assert len(report.estimates) == 63
        for e in report.estimates.values():
            assert e.value == pytest.approx(1.0)
            assert e.stderr == pytest.approx(0.0, abs=1e-12)
        assert not report.flags

    def test_fidelity_and_witness(self, plan, ideal_dataset):
        result = fidelity_and_witness(estimate_expectations(plan, ideal_dataset))
        assert result.fidelity == pytest.approx(1.0)
        assert result.witness == pytest.approx(-0.5)
        assert result.entangled
        assert result.fidelity_stderr == pytest.approx(0.0, abs=1e-9)

    def test_covariance_blocks(self, plan, ideal_dataset):
        report = estimate_expectations(plan, ideal_dataset)
        for block in report.blocks.values():
            assert np.allclose(block.matrix, 0.0)
            assert block.shots == 300

    def test_reference_plan(self):
        plan = reference_plan()
        dataset = simulate_dataset(plan, None, 100, TrajectoryRng(5), form="CZ")
        result = fidelity_and_witness(estimate_expectations(plan, dataset))
        assert result.fidelity == pytest.approx(1.0)

    def test_omega_sign(self, ideal_dataset):
        negated = greedy_clique_cover([(str(x), -s) for x, s in nontrivial_stabilizers(6)])
        dataset = ShotDataset(6, negated.plan_hash(), ideal_dataset.cliques)
        report = estimate_expectations(negated, dataset)
        assert all(v == pytest.approx(-1.0) for v in report.values().values())
        assert fidelity_and_witness(report).fidelity == pytest.approx(-62 / 64)


class TestCovariances:
    def test_blocks_match_stderr(self, plan):
        from clusterbell.core.readout import ConfusionModel

        dataset = simulate_dataset(plan, None, 2000, TrajectoryRng(21), readout=ConfusionModel.symmetric(6, 0.1))
        report = estimate_expectations(plan, dataset)
        blocks = covariances(plan, dataset)
        for index, block in blocks.items():
            np.testing.assert_allclose(block.matrix, block.matrix.T)
            for k, label in enumerate(block.labels):
                assert block.matrix[k, k] / block.shots == pytest.approx(report.estimates[label].stderr ** 2)
                assert report.estimates[label].clique == index


class TestErrors:
    def test_plan_mismatch(self, ideal_dataset):
        with pytest.raises(CliqueMismatchError):
            estimate_expectations(reference_plan(), ideal_dataset)

    def test_outcome_count(self, plan):
        with pytest.raises(CliqueMismatchError):
            ShotDataset.from_outcomes(plan, [np.zeros(3, dtype=np.int64)])

    def test_empty_clique(self, plan, ideal_dataset):
        cliques = [CliqueTally(ideal_dataset.cliques[0].basis, {})] + ideal_dataset.cliques[1:]
        with pytest.raises(EmptyDatasetError):
            estimate_expectations(plan, ShotDataset(6, ideal_dataset.plan_hash, cliques))

    def test_missing_stabilizer(self, plan, ideal_dataset):
        report = estimate_expectations(plan, ideal_dataset)
        estimates = dict(report.estimates)
        estimates.pop("111111")
        with pytest.raises(CoverageError):
            fidelity_and_witness(EstimationReport(6, estimates, report.blocks))

    def test_covariance_across_cliques(self, plan, ideal_dataset):
        report = estimate_expectations(plan, ideal_dataset)
        first, second = plan.cliques[0].members[0].label, plan.cliques[1].members[0].label
        with pytest.raises(CliqueMismatchError):
            report.covariance(first, second)

    def test_merge_other_plan(self, ideal_dataset):
        other = simulate_dataset(reference_plan(), None, 10, TrajectoryRng(2))
        with pytest.raises(CliqueMismatchError):
            ideal_dataset.merge(other)


class TestDataset:
    def test_write_read(self, tmp_path, ideal_dataset):
        path = tmp_path / "dataset.json"
        ideal_dataset.write(path)
        assert ShotDataset.read(path).to_dict() == ideal_dataset.to_dict()

    def test_merge_adds_shots(self, ideal_dataset):
        merged = ideal_dataset.merge(ideal_dataset)
        assert all(c.shots == 600 for c in merged.cliques)

    def test_tallies_keyed_by_bitstring(self, ideal_dataset):
        keys = next(iter(ideal_dataset.to_dict()["cliques"]))["tallies"]
        assert all(len(k) == 6 and set(k) <= {"0", "1"} for k in keys)


class TestReferenceTable:
    def test_shipped_table_fidelities(self):
        spam = fidelity_and_witness(load_reference_report("spam"))
        raw = fidelity_and_witness(load_reference_report("raw"))
        assert spam.fidelity == pytest.approx(0.66387, abs=1e-4)
        assert raw.fidelity == pytest.approx(0.60607, abs=1e-4)
        assert spam.entangled and raw.entangled
        assert spam.corrected and not raw.corrected

    def test_bad_column(self):
        with pytest.raises(ValueError):
            load_reference_report("value")

    def test_from_table_diagonal(self):
        report = report_from_table(load_stabilizer_table(), "raw", shots=1000)
        block = report.blocks[0]
        assert np.count_nonzero(block.matrix - np.diag(np.diag(block.matrix))) == 0
        assert report.estimates["000001"].stderr == pytest.approx(0.0010)

    def test_missing_columns(self):
        with pytest.raises(ValueError):
            report_from_table(load_stabilizer_table()[["input", "stabilizer", "group"]])


class TestFormatting:
    def test_uncertainty(self):
        assert format_uncertainty(0.8304, 0.0008) == "0.8304(8)"
        assert format_uncertainty(0.6061, 0.0079) == "0.606(8)"
        assert format_uncertainty(0.5, 0.0123) == "0.50(1)"

    def test_uncertainty_carries_into_next_digit(self):
        assert format_uncertainty(0.7031, 0.0097) == "0.70(1)"

    def test_uncertainty_large_and_zero_errors(self):
        assert format_uncertainty(123.4, 46.0) == "123(50)"
        assert format_uncertainty(0.25, 0.0) == "0.2500"

    @pytest.mark.slow
    def test_table_frame(self):
        from clusterbell.core.readout import ConfusionModel

        run = run_tomography(None, 200, TrajectoryRng(4), readout=ConfusionModel.symmetric(6, 0.01))
        frame = table_frame(run.raw, run.corrected)
        assert list(frame.columns) == ["input", "stabilizer", "clique", "raw", "raw_err", "spam", "spam_err"]
        assert len(frame) == 63
        assert list(table_frame(run.raw).columns)[-1] == "raw_err"


@pytest.mark.slow
class TestNoisyTomography:
    def test_fitted_noise(self):
        from clusterbell.core.noise import NoiseParams

        run = run_tomography(NoiseParams.device(), 5000, TrajectoryRng(1))
        assert 0.60 <= run.raw_fidelity.fidelity <= 0.73
        assert run.raw_fidelity.entangled


@pytest.mark.slow
class TestStderrCalibration:
    def test_fidelity_stderr_matches_spread_over_seeds(self, plan):
        from clusterbell.core.readout import ConfusionModel

        readout = ConfusionModel.symmetric(6, 0.05)
        fidelities, stderrs = [], []
        for seed in range(100):
            dataset = simulate_dataset(plan, None, 500, TrajectoryRng(1000 + seed), readout=readout)
            result = fidelity_and_witness(estimate_expectations(plan, dataset))
            fidelities.append(result.fidelity)
            stderrs.append(result.fidelity_stderr)
        assert np.mean(stderrs) == pytest.approx(np.std(fidelities, ddof=1), rel=0.15)
