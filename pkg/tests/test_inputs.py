import pytest

from clusterbell.core.errors import UnsupportedInputSetError
from clusterbell.core.pauli import BinaryVector
from clusterbell.modes.games.inputs import InputKind, InputSet, build_input_set, hlf_positions


class TestInputSets:
    def test_sizes(self):
        assert len(build_input_set("full", 6)) == 64
        assert len(build_input_set("mermin55", 6)) == 55
        assert len(build_input_set("hlf8", 6)) == 8
        assert len(build_input_set("hlf5", 6)) == 5
        assert len(build_input_set("hlfn5", 18)) == 5

    def test_mermin_excludes_low_weight_and_alternating(self):
        labels = set(build_input_set("mermin55", 6).labels())
        assert "000000" not in labels
        assert "010000" not in labels
        assert "010101" not in labels and "101010" not in labels
        assert "110000" in labels

    def test_hlf5_members(self):
        assert build_input_set("hlf5", 6).labels() == ["000000", "001010", "100010", "101000", "101010"]

    def test_hlf_positions(self):
        assert hlf_positions(6) == (0, 2, 4)
        assert hlf_positions(18) == (0, 6, 12)

    def test_sorted_by_string(self):
        labels = build_input_set("hlf8", 6).labels()
        assert labels == sorted(labels)

    @pytest.mark.parametrize("kind", ["mermin55", "hlf8", "hlf5"])
    def test_six_only(self, kind):
        with pytest.raises(UnsupportedInputSetError):
            build_input_set(kind, 8)

    def test_hlfn5_needs_even_n(self):
        with pytest.raises(UnsupportedInputSetError):
            build_input_set("hlfn5", 9)
        with pytest.raises(UnsupportedInputSetError):
            build_input_set("hlfn5", 4)

    def test_custom(self):
        inputs = build_input_set(InputKind.CUSTOM, 4, ["0000", "1010"])
        assert inputs.labels() == ["0000", "1010"]
        with pytest.raises(UnsupportedInputSetError):
            build_input_set(InputKind.CUSTOM, 4, ["0000", "0000"])
        with pytest.raises(UnsupportedInputSetError):
            build_input_set(InputKind.CUSTOM, 4, ["000"])

    def test_empty(self):
        with pytest.raises(UnsupportedInputSetError):
            InputSet(InputKind.CUSTOM, 3, ())

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            build_input_set("hlf9", 6)

    def test_vectors(self):
        inputs = build_input_set("hlf5", 6)
        assert BinaryVector.from_string("101010") in inputs.inputs
