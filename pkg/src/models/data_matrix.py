"""The N x T data matrix under evaluation."""
from dataclasses import dataclass, field
from typing import Hashable, Optional, Sequence

import numpy as np

from src.core.exceptions import DataFormatError, DomainError, ShapeError
from src.models.grid import Grid


@dataclass(frozen=True, eq=False)
class DataMatrix:
    """
    Observations in rows, grid points in columns.

    The values array is copied to float64 and marked read-only, so instances
    can be shared across worker threads.

    Attributes:
        values: N x T float64 matrix, every entry finite
        grid: Measurement grid with grid.length == T
        row_ids: N unique opaque identifiers (0..N-1 by default)
    """

    values: np.ndarray
    grid: Grid
    row_ids: tuple[Hashable, ...] = field(default=())

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64, copy=True)
        if values.ndim != 2:
            raise ShapeError("data matrix", "2 dimensions (N x T)", f"{values.ndim} dimension(s)")
        n, t = values.shape
        if n < 2 or t < 2:
            raise DomainError(f"data matrix needs N >= 2 and T >= 2, got {n} x {t}")
        if t != self.grid.length:
            raise ShapeError("columns vs grid length", self.grid.length, t)

        bad = np.argwhere(~np.isfinite(values))
        if bad.size:
            row, col = (int(i) for i in bad[0])
            raise DataFormatError(
                f"non-finite value {values[row, col]!r} at row {row}, column {col}"
            )

        row_ids = tuple(self.row_ids) if self.row_ids else tuple(range(n))
        if len(row_ids) != n:
            raise ShapeError("row_ids", n, len(row_ids))
        if len(set(row_ids)) != n:
            raise DomainError("row_ids must be unique")

        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "row_ids", row_ids)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def t(self) -> int:
        return self.values.shape[1]

    def take(self, indices: Sequence[int] | np.ndarray) -> "DataMatrix":
        """Sub-matrix of the given row positions, keeping their row ids."""
        idx = np.asarray(indices, dtype=np.intp)
        return DataMatrix(
            values=self.values[idx],
            grid=self.grid,
            row_ids=tuple(self.row_ids[i] for i in idx),
        )

    def row_position(self, row_id: Hashable) -> int:
        try:
            return self.row_ids.index(row_id)
        except ValueError:
            raise DomainError(f"row id {row_id!r} not present in data matrix") from None

    def row_image(self, position: int) -> np.ndarray:
        """One observation reshaped to its grid (rows x cols for 2D)."""
        return self.values[position].reshape(self.grid.dims)

    def with_values(self, values: np.ndarray, grid: Optional[Grid] = None) -> "DataMatrix":
        return DataMatrix(values=values, grid=grid or self.grid, row_ids=self.row_ids)
