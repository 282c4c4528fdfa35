import numpy as np
import pytest

from clusterbell.core.errors import DimensionError, SingularConfusionError
from clusterbell.core.readout import ConfusionModel, confusion_from_rates


class TestConfusionModel:
    def test_inverse(self):
        model = ConfusionModel.from_flip_rates(3, 0.02, 0.05)
        np.testing.assert_allclose(model.inverse() @ model.matrix(), np.eye(8), atol=1e-9)

    def test_singular(self):
        with pytest.raises(SingularConfusionError):
            ConfusionModel.symmetric(2, 0.5)

    def test_columns_must_be_stochastic(self):
        with pytest.raises(ValueError):
            ConfusionModel(1, factors=(np.array([[0.9, 0.1], [0.2, 0.9]]),))

    def test_factor_count(self):
        with pytest.raises(DimensionError):
            ConfusionModel(2, factors=(np.eye(2),))

    def test_exactly_one_form(self):
        with pytest.raises(ValueError):
            ConfusionModel(1)

    def test_from_rates(self):
        assert confusion_from_rates(6, None) is None
        assert confusion_from_rates(6, (0.0,)) is None
        model = confusion_from_rates(6, (0.01, 0.03))
        assert model.factors[0][1, 0] == pytest.approx(0.01)
        assert model.factors[0][0, 1] == pytest.approx(0.03)


class TestParityValues:
    def test_identity_gives_plain_signs(self):
        model = ConfusionModel.identity(3)
        outcomes = np.arange(8)
        expected = np.array([1, -1, 1, -1, -1, 1, -1, 1], dtype=float)  # mask 0b101
        np.testing.assert_allclose(model.parity_values(outcomes, 0b101), expected)

    def test_tensor_and_full_agree(self):
        tensor = ConfusionModel.from_flip_rates(3, 0.03, 0.07)
        full = ConfusionModel(3, full=tensor.matrix())
        outcomes = np.arange(8)
        for mask in range(8):
            np.testing.assert_allclose(tensor.parity_values(outcomes, mask), full.parity_values(outcomes, mask), atol=1e-12)

    def test_unbiased_on_exact_distribution(self):
        # expected corrected parity under the noisy distribution equals the true parity
        model = ConfusionModel.from_flip_rates(2, 0.04, 0.1)
        true = np.array([0.5, 0.0, 0.0, 0.5])
        observed = model.matrix() @ true
        values = model.parity_values(np.arange(4), 0b11)
        assert observed @ values == pytest.approx(1.0, abs=1e-12)

    def test_corrected_distribution(self):
        model = ConfusionModel.from_flip_rates(2, 0.04, 0.1)
        true = np.array([0.1, 0.2, 0.3, 0.4])
        counts = model.matrix() @ true * 1000
        np.testing.assert_allclose(model.corrected_distribution(counts), true, atol=1e-12)


class TestInjection:
    def test_flip_rates(self, rng):
        model = ConfusionModel.from_flip_rates(2, 0.1, 0.3)
        zeros = model.apply(np.zeros(100_000, dtype=np.int64), rng)
        assert ((zeros & 1) == 1).mean() == pytest.approx(0.1, abs=0.01)
        ones = model.apply(np.full(100_000, 3, dtype=np.int64), rng)
        assert ((ones >> 1 & 1) == 0).mean() == pytest.approx(0.3, abs=0.01)

    def test_full_matrix(self, rng):
        m = np.array([[0.9, 0.0], [0.1, 1.0]])
        model = ConfusionModel(1, full=m)
        out = model.apply(np.zeros(50_000, dtype=np.int64), rng)
        assert out.mean() == pytest.approx(0.1, abs=0.01)
