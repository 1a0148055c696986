"""
Unit tests for dataset persistence.

Tests cover:
- CSV header detection, id columns and error positions
- CLRE binary round trip (bit-exact) and corruption checks
- key=value text files
"""
import struct

import numpy as np
import pytest

from src.core.exceptions import ConfigError, DataFormatError, ShapeError
from src.models.data_matrix import DataMatrix
from src.models.grid import Grid
from src.repositories.key_value_file import parse_key_value_text, read_key_value_file, write_key_value_file
from src.repositories.matrix_repository import (
    load_binary,
    load_csv,
    read_csv_array,
    read_clre,
    save_binary,
    write_csv_array,
)


class TestCsv:
    """Test CSV reading and writing."""

    @pytest.mark.unit
    def test_plain_numeric_csv(self, tmp_path):
        # Arrange
        path = tmp_path / "data.csv"
        path.write_text("1,2,3,4\n5,6,7,8\n9,10,11,12\n")

        # Act
        matrix = load_csv(path, Grid.one_d(4))

        # Assert
        assert (matrix.n, matrix.t) == (3, 4)
        assert matrix.row_ids == (0, 1, 2)
        assert matrix.values[2, 3] == 12.0

    @pytest.mark.unit
    def test_header_row_is_skipped(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("a,b,c\r\n1,2,3\r\n\r\n4,5,6\r\n")

        values, row_ids, header = read_csv_array(path)

        assert header == ["a", "b", "c"]
        assert row_ids is None
        assert values.shape == (2, 3)

    @pytest.mark.unit
    def test_id_column(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("id,x1,x2\nalpha,1,2\nbeta,3,4\n")

        matrix = load_csv(path, Grid.one_d(2), id_column=0)

        assert matrix.row_ids == ("alpha", "beta")
        np.testing.assert_array_equal(matrix.values, [[1.0, 2.0], [3.0, 4.0]])

    @pytest.mark.unit
    def test_non_numeric_cell_position(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("1,2,3\n4,oops,6\n")

        with pytest.raises(DataFormatError, match="line 2, column 2"):
            read_csv_array(path)

    @pytest.mark.unit
    def test_non_finite_cell(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("1,2\n3,nan\n")

        with pytest.raises(DataFormatError, match="non-finite"):
            read_csv_array(path)

    @pytest.mark.unit
    def test_ragged_row(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("1,2,3\n4,5\n")

        with pytest.raises(DataFormatError, match="ragged"):
            read_csv_array(path)

    @pytest.mark.unit
    def test_grid_mismatch(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("1,2,3\n4,5,6\n")

        with pytest.raises(ShapeError):
            load_csv(path, Grid.one_d(4))

    @pytest.mark.unit
    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            read_csv_array(tmp_path / "absent.csv")

    @pytest.mark.unit
    def test_written_floats_read_back_exactly(self, tmp_path):
        values = np.random.default_rng(0).normal(size=(4, 5))
        path = tmp_path / "out.csv"

        write_csv_array(path, values, ["id"] + [f"x{j}" for j in range(5)], row_ids=["a", "b", "c", "d"])
        read_back, row_ids, _ = read_csv_array(path, id_column=0)

        np.testing.assert_array_equal(read_back, values)
        assert row_ids == ["a", "b", "c", "d"]


class TestClre:
    """Test the binary matrix container."""

    @pytest.mark.unit
    def test_round_trip_is_bit_exact(self, tmp_path, image_matrix):
        path = tmp_path / "images.clre"

        save_binary(image_matrix, path)
        loaded = load_binary(path)

        assert loaded.grid == image_matrix.grid
        assert loaded.values.tobytes() == image_matrix.values.tobytes()

    @pytest.mark.unit
    def test_header_layout(self, tmp_path):
        path = tmp_path / "tiny.clre"
        matrix = DataMatrix(values=np.array([[1.0, 2.0], [3.0, 4.0]]), grid=Grid.one_d(2))

        save_binary(matrix, path)
        data = path.read_bytes()

        assert len(data) == 41 + 4 * 8
        assert struct.unpack("<4sIQQBQQ", data[:41]) == (b"CLRE", 1, 2, 2, 1, 0, 0)

    @pytest.mark.unit
    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.clre"
        path.write_bytes(b"NOPE" + bytes(60))

        with pytest.raises(DataFormatError, match="bad magic"):
            read_clre(path)

    @pytest.mark.unit
    def test_truncated_payload(self, tmp_path, small_matrix):
        path = tmp_path / "short.clre"
        save_binary(small_matrix, path)
        path.write_bytes(path.read_bytes()[:-8])

        with pytest.raises(DataFormatError, match="inconsistent length"):
            read_clre(path)


class TestKeyValueFile:

    @pytest.mark.unit
    def test_comments_and_spacing(self):
        entries = parse_key_value_text("# run\n\nlearn = pca\n  folds=5  \n")

        assert [(e.key, e.value, e.line) for e in entries] == [("learn", "pca", 3), ("folds", "5", 4)]

    @pytest.mark.unit
    def test_missing_equals_reports_line(self):
        with pytest.raises(ConfigError) as exc_info:
            parse_key_value_text("learn=pca\nfolds\n")

        assert exc_info.value.line == 2

    @pytest.mark.unit
    def test_duplicate_key(self):
        with pytest.raises(ConfigError, match="duplicate key 'seed'"):
            parse_key_value_text("seed=1\nseed=2\n")

    @pytest.mark.unit
    def test_write_then_read(self, tmp_path):
        path = tmp_path / "metadata.txt"

        write_key_value_file(path, [("learn", "dwt"), ("qualifying_dimension", None)])

        assert path.read_text() == "learn=dwt\nqualifying_dimension=\n"
        assert [e.value for e in read_key_value_file(path)] == ["dwt", ""]
