"""
Unit tests for Grid and DataMatrix.

Tests cover:
- Grid parsing of "T" and "RxC"
- Construction checks (shape, finiteness, unique row ids)
- Row selection keeps ids; values are read-only
"""
import numpy as np
import pytest
from pydantic import ValidationError

from src.core.exceptions import DataFormatError, DomainError, ShapeError
from src.models.data_matrix import DataMatrix
from src.models.grid import Grid


class TestGrid:
    """Test grid construction and parsing."""

    @pytest.mark.unit
    def test_parse_one_d(self):
        grid = Grid.parse("128")

        assert not grid.is_two_d
        assert grid.length == 128
        assert (grid.rows, grid.cols) == (0, 0)

    @pytest.mark.unit
    def test_parse_two_d(self):
        grid = Grid.parse("64x32")

        assert grid.is_two_d
        assert grid.length == 2048
        assert (grid.rows, grid.cols) == (64, 32)
        assert str(grid) == "64x32"

    @pytest.mark.unit
    @pytest.mark.parametrize("text", ["", "abc", "3x", "x4"])
    def test_parse_rejects_garbage(self, text):
        with pytest.raises(ValueError):
            Grid.parse(text)

    @pytest.mark.unit
    def test_dimensions_below_two_rejected(self):
        with pytest.raises(ValidationError):
            Grid.two_d(1, 8)


class TestDataMatrix:
    """Test DataMatrix invariants."""

    @pytest.mark.unit
    def test_default_row_ids(self):
        # Arrange
        values = np.arange(12.0).reshape(3, 4)

        # Act
        matrix = DataMatrix(values=values, grid=Grid.one_d(4))

        # Assert
        assert matrix.n == 3 and matrix.t == 4
        assert matrix.row_ids == (0, 1, 2)

    @pytest.mark.unit
    def test_values_are_copied_and_read_only(self):
        values = np.ones((2, 3))
        matrix = DataMatrix(values=values, grid=Grid.one_d(3))

        values[0, 0] = 5.0

        assert matrix.values[0, 0] == 1.0
        with pytest.raises(ValueError):
            matrix.values[0, 0] = 2.0

    @pytest.mark.unit
    def test_grid_length_mismatch(self):
        with pytest.raises(ShapeError):
            DataMatrix(values=np.ones((2, 3)), grid=Grid.one_d(4))

    @pytest.mark.unit
    def test_non_finite_value_reports_position(self):
        values = np.ones((3, 3))
        values[2, 1] = np.inf

        with pytest.raises(DataFormatError, match="row 2, column 1"):
            DataMatrix(values=values, grid=Grid.one_d(3))

    @pytest.mark.unit
    def test_too_small_matrix(self):
        with pytest.raises(DomainError):
            DataMatrix(values=np.ones((1, 3)), grid=Grid.one_d(3))

    @pytest.mark.unit
    def test_duplicate_row_ids(self):
        with pytest.raises(DomainError):
            DataMatrix(values=np.ones((2, 3)), grid=Grid.one_d(3), row_ids=("a", "a"))

    @pytest.mark.unit
    def test_take_keeps_row_ids(self, small_matrix):
        subset = small_matrix.take([3, 0])

        assert subset.row_ids == ("r3", "r0")
        np.testing.assert_array_equal(subset.values, small_matrix.values[[3, 0]])
        assert small_matrix.row_position("r3") == 3

    @pytest.mark.unit
    def test_row_position_missing(self, small_matrix):
        with pytest.raises(DomainError):
            small_matrix.row_position("nope")

    @pytest.mark.unit
    def test_row_image(self, image_matrix):
        image = image_matrix.row_image(0)

        assert image.shape == (8, 8)
        np.testing.assert_array_equal(image.ravel(), image_matrix.values[0])
