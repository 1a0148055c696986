"""
Dataset persistence: CSV text files and the CLRE little-endian binary container.

CLRE layout (41-byte header, then N*T float64 row-major):
    magic "CLRE" | version u32 = 1 | N u64 | T u64 | grid_kind u8 | rows u64 | cols u64
grid_kind is 1 for OneD (rows = cols = 0) and 2 for TwoD (rows * cols = T).
"""
import csv
import logging
import math
import struct
from pathlib import Path
from typing import Hashable, NamedTuple, Optional, Sequence

import numpy as np

from src.core.constants import FileFormatConstants
from src.core.exceptions import DataFormatError, ShapeError
from src.models.data_matrix import DataMatrix
from src.models.grid import Grid

logger = logging.getLogger(__name__)

PathLike = str | Path


class ClreMatrix(NamedTuple):
    """Raw CLRE contents, before DataMatrix validation."""
    values: np.ndarray
    grid_kind: int
    rows: int
    cols: int


def _parse_number(cell: str) -> Optional[float]:
    try:
        return float(cell.strip())
    except ValueError:
        return None


def read_csv_array(
    path: PathLike, id_column: Optional[int] = None
) -> tuple[np.ndarray, Optional[list[str]], Optional[list[str]]]:
    """
    Read a comma-separated numeric matrix.

    A first row whose fields do not all parse as numbers is treated as a
    header and skipped. Blank lines are ignored; LF and CRLF both work.

    Args:
        path: CSV file
        id_column: 0-based column holding row identifiers (excluded from values)

    Returns:
        (values, row_ids or None, header or None)

    Raises:
        OSError: File cannot be read
        DataFormatError: Ragged rows, non-numeric or non-finite cells
    """
    with open(path, "r", newline="", encoding="utf-8") as handle:
        records = [(line_no, row) for line_no, row in enumerate(csv.reader(handle), start=1) if row]

    if not records:
        raise DataFormatError(f"{path}: no data rows")

    header: Optional[list[str]] = None
    first_line, first_row = records[0]
    first_cells = [c for j, c in enumerate(first_row) if j != id_column]
    if any(_parse_number(c) is None for c in first_cells):
        header = [c.strip() for c in first_row]
        records = records[1:]
        logger.debug(f"{path}: treating line {first_line} as a header")

    width = len(records[0][1]) if records else 0
    if id_column is not None and not 0 <= id_column < max(width, 1):
        raise DataFormatError(f"{path}: id column {id_column} outside {width} columns")

    values: list[list[float]] = []
    row_ids: Optional[list[str]] = [] if id_column is not None else None
    for line_no, row in records:
        if len(row) != width:
            raise DataFormatError(
                f"{path}: ragged row at line {line_no}: expected {width} fields, found {len(row)}"
            )
        parsed: list[float] = []
        for col_no, cell in enumerate(row, start=1):
            if id_column is not None and col_no - 1 == id_column:
                assert row_ids is not None
                row_ids.append(cell.strip())
                continue
            number = _parse_number(cell)
            if number is None or not math.isfinite(number):
                kind = "non-numeric" if number is None else "non-finite"
                raise DataFormatError(
                    f"{path}: {kind} cell '{cell.strip()}' at line {line_no}, column {col_no}"
                )
            parsed.append(number)
        values.append(parsed)

    if not values:
        raise DataFormatError(f"{path}: header only, no data rows")
    return np.asarray(values, dtype=np.float64), row_ids, header


def write_csv_array(
    path: PathLike,
    values: np.ndarray,
    header: Sequence[str],
    row_ids: Optional[Sequence[Hashable]] = None,
) -> None:
    """Write a matrix with 17-significant-digit floats; row ids become the first column."""
    fmt = FileFormatConstants.FLOAT_FORMAT
    matrix = np.atleast_2d(np.asarray(values, dtype=np.float64))
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(list(header))
        for i, row in enumerate(matrix):
            cells = [format(float(v), fmt) for v in row]
            if row_ids is not None:
                cells.insert(0, str(row_ids[i]))
            writer.writerow(cells)


def load_csv(path: PathLike, grid: Grid, id_column: Optional[int] = None) -> DataMatrix:
    """
    Load a CSV dataset onto a grid.

    Raises:
        OSError: File cannot be read
        DataFormatError: Malformed CSV
        ShapeError: Column count differs from grid.length
    """
    values, row_ids, _ = read_csv_array(path, id_column=id_column)
    if values.shape[1] != grid.length:
        raise ShapeError(f"{path}: columns vs grid {grid}", grid.length, values.shape[1])
    matrix = DataMatrix(values=values, grid=grid, row_ids=tuple(row_ids) if row_ids else ())
    logger.info(f"Loaded {matrix.n} x {matrix.t} matrix from {path} (grid {grid})")
    return matrix


def write_clre(path: PathLike, values: np.ndarray, grid_kind: int, rows: int = 0, cols: int = 0) -> None:
    """Write any 2D float64 array in the CLRE container."""
    matrix = np.ascontiguousarray(values, dtype="<f8")
    if matrix.ndim != 2:
        raise ShapeError("CLRE payload", "2 dimensions", matrix.ndim)
    n, t = matrix.shape
    header = struct.pack(
        FileFormatConstants.CLRE_HEADER_FORMAT,
        FileFormatConstants.CLRE_MAGIC,
        FileFormatConstants.CLRE_VERSION,
        n,
        t,
        grid_kind,
        rows,
        cols,
    )
    with open(path, "wb") as handle:
        handle.write(header)
        handle.write(matrix.tobytes(order="C"))


def read_clre(path: PathLike) -> ClreMatrix:
    """
    Read a CLRE container without DataMatrix checks.

    Raises:
        DataFormatError: bad magic, unsupported version, or sizes inconsistent with file length
    """
    data = Path(path).read_bytes()
    header_size = FileFormatConstants.CLRE_HEADER_SIZE
    if len(data) >= 4 and data[:4] != FileFormatConstants.CLRE_MAGIC:
        raise DataFormatError(f"{path}: bad magic {data[:4]!r}")
    if len(data) < header_size:
        raise DataFormatError(f"{path}: inconsistent length ({len(data)} bytes, header needs {header_size})")

    magic, version, n, t, kind, rows, cols = struct.unpack(
        FileFormatConstants.CLRE_HEADER_FORMAT, data[:header_size]
    )
    if magic != FileFormatConstants.CLRE_MAGIC:
        raise DataFormatError(f"{path}: bad magic {magic!r}")
    if version != FileFormatConstants.CLRE_VERSION:
        raise DataFormatError(f"{path}: unsupported version {version}")
    if kind not in (FileFormatConstants.GRID_KIND_ONE_D, FileFormatConstants.GRID_KIND_TWO_D):
        raise DataFormatError(f"{path}: unknown grid kind {kind}")
    if kind == FileFormatConstants.GRID_KIND_TWO_D and rows * cols != t:
        raise DataFormatError(f"{path}: inconsistent grid {rows}x{cols} for T={t}")

    expected = header_size + n * t * 8
    if len(data) != expected:
        raise DataFormatError(f"{path}: inconsistent length ({len(data)} bytes, expected {expected})")

    values = np.frombuffer(data, dtype="<f8", offset=header_size).astype(np.float64).reshape(n, t)
    return ClreMatrix(values=values, grid_kind=kind, rows=rows, cols=cols)


def load_binary(path: PathLike) -> DataMatrix:
    """Load a DataMatrix saved with save_binary (bit-exact)."""
    raw = read_clre(path)
    t = raw.values.shape[1]
    if raw.grid_kind == FileFormatConstants.GRID_KIND_TWO_D:
        grid = Grid.two_d(raw.rows, raw.cols)
    else:
        grid = Grid.one_d(t)
    return DataMatrix(values=raw.values, grid=grid)


def save_binary(matrix: DataMatrix, path: PathLike) -> None:
    """Save a DataMatrix in the CLRE container (row ids are not stored)."""
    kind = (
        FileFormatConstants.GRID_KIND_TWO_D if matrix.grid.is_two_d else FileFormatConstants.GRID_KIND_ONE_D
    )
    write_clre(path, matrix.values, kind, matrix.grid.rows, matrix.grid.cols)
