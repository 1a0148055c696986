"""Measurement grid shared by every observation of a dataset."""
import math
import re
from enum import Enum

from pydantic import BaseModel, ConfigDict, model_validator


class GridKind(str, Enum):
    ONE_D = "one_d"
    TWO_D = "two_d"


class Grid(BaseModel):
    """A 1D grid of T points, or a 2D grid of rows x cols points (T = rows * cols)."""

    model_config = ConfigDict(frozen=True)

    kind: GridKind
    dims: tuple[int, ...]

    @model_validator(mode="after")
    def check_dims(self) -> "Grid":
        expected = 1 if self.kind is GridKind.ONE_D else 2
        if len(self.dims) != expected:
            raise ValueError(f"{self.kind.value} grid needs {expected} dimension(s), got {self.dims}")
        if any(d < 2 for d in self.dims):
            raise ValueError(f"all grid dimensions must be >= 2, got {self.dims}")
        return self

    @classmethod
    def one_d(cls, length: int) -> "Grid":
        return cls(kind=GridKind.ONE_D, dims=(length,))

    @classmethod
    def two_d(cls, rows: int, cols: int) -> "Grid":
        return cls(kind=GridKind.TWO_D, dims=(rows, cols))

    @classmethod
    def parse(cls, text: str) -> "Grid":
        """Parse "T" (1D) or "RxC" (2D)."""
        value = str(text).strip().lower()
        match = re.fullmatch(r"(\d+)\s*[x*]\s*(\d+)", value)
        if match:
            return cls.two_d(int(match.group(1)), int(match.group(2)))
        if value.isdigit():
            return cls.one_d(int(value))
        raise ValueError(f"grid must be 'T' or 'RxC', got '{text}'")

    @property
    def is_two_d(self) -> bool:
        return self.kind is GridKind.TWO_D

    @property
    def length(self) -> int:
        """Number of grid points T."""
        return math.prod(self.dims)

    @property
    def rows(self) -> int:
        """Image rows for 2D grids, 0 for 1D (the CLRE header convention)."""
        return self.dims[0] if self.is_two_d else 0

    @property
    def cols(self) -> int:
        return self.dims[1] if self.is_two_d else 0

    def __str__(self) -> str:
        return "x".join(str(d) for d in self.dims)
