import numpy as np
import pytest

from gannet.data import Dataset
from gannet.exceptions import DataValidationError


class TestDataset:
    def test_basic_access(self):
        ds = Dataset({"a": [1.0, 2.0], "b": [3.0, 4.0]})
        assert ds.n == 2
        assert "a" in ds
        np.testing.assert_array_equal(ds.column("b"), [3.0, 4.0])
        with pytest.raises(DataValidationError, match="zz"):
            ds.column("zz")

    def test_length_mismatch_rejected(self):
        with pytest.raises(DataValidationError):
            Dataset({"a": [1.0], "b": [1.0, 2.0]})

    def test_require_names_missing(self):
        ds = Dataset({"a": [1.0]})
        with pytest.raises(DataValidationError, match="b, c"):
            ds.require(["a", "b", "c"])


class TestCsvRoundTrip:
    def test_exact_float_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        ds = Dataset({"x": rng.normal(0, 1, 50), "y": rng.normal(0, 1e-8, 50)})
        path = tmp_path / "d.csv"
        ds.to_csv(path)
        back = Dataset.from_csv(path)
        np.testing.assert_array_equal(back.column("x"), ds.column("x"))
        np.testing.assert_array_equal(back.column("y"), ds.column("y"))

    def test_column_selection(self, tmp_path):
        path = tmp_path / "d.csv"
        Dataset({"a": [1.0], "b": [2.0], "c": [3.0]}).to_csv(path)
        back = Dataset.from_csv(path, columns=["c", "a"])
        assert back.names() == ["c", "a"]

    def test_missing_column_error(self, tmp_path):
        path = tmp_path / "d.csv"
        Dataset({"a": [1.0]}).to_csv(path)
        with pytest.raises(DataValidationError, match="q"):
            Dataset.from_csv(path, columns=["q"])

    def test_missing_values_dropped_with_count(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("a,b\n1,2\n,3\n4,NA\n5,6\n")
        ds = Dataset.from_csv(path)
        assert ds.n == 2
        assert ds.n_dropped == 2
        np.testing.assert_array_equal(ds.column("a"), [1.0, 5.0])

    def test_missing_outside_selection_ignored(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("a,b\n1,\n2,3\n")
        ds = Dataset.from_csv(path, columns=["a"])
        assert ds.n == 2
        assert ds.n_dropped == 0

    def test_non_numeric_token_is_error(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("a,b\n1,fish\n")
        with pytest.raises(DataValidationError, match="fish"):
            Dataset.from_csv(path)

    def test_header_only_gives_empty_dataset(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("a,b\n")
        ds = Dataset.from_csv(path)
        assert ds.n == 0
        assert ds.names() == ["a", "b"]

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("")
        with pytest.raises(DataValidationError, match="header"):
            Dataset.from_csv(path)

    def test_ragged_row_rejected(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("a,b\n1,2,3\n")
        with pytest.raises(DataValidationError, match="expected 2 fields"):
            Dataset.from_csv(path)
