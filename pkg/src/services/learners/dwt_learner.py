"""
Thresholded discrete wavelet transform codec.

Fitting:
    1. pad every training row to dyadic length (each axis independently for images)
    2. transform each row with the orthonormal periodic DWT
    3. per row, the relative energy of coefficient k is the share of the row's
       total energy held by coefficients at least as large as |c_k|
    4. the scree of coefficient k is its relative energy averaged over rows
    5. keep the K coefficients with the smallest scree (ties: smaller index)

Encoding keeps the retained coefficients in keep-set order; decoding scatters
them back, zero-fills the rest, inverts the transform and removes the padding.
"""
import logging
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from src.core.exceptions import DomainError, LearnerError
from src.core.rng import RngSpec
from src.models.codec import Codec, CodecMethod
from src.models.data_matrix import DataMatrix
from src.models.grid import Grid
from src.services.learners.base import Learner
from src.services.wavelet import (
    DyadicPadding,
    WaveletFilter,
    default_levels,
    dwt_images,
    dwt_rows,
    get_filter,
    idwt_images,
    idwt_rows,
    la8_filter,
    pad_axis,
    unpad_axis,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DwtModel:
    """
    Attributes:
        filter: Analysis filter
        levels: Decomposition depth J
        padding: One DyadicPadding (1D) or (rows, cols) paddings (2D)
        keep_set: K coefficient indices, smallest scree first
        scree: Mean relative energy of every coefficient
        grid: Grid of the training data
    """
    filter: WaveletFilter
    levels: int
    padding: tuple[DyadicPadding, ...]
    keep_set: np.ndarray
    scree: np.ndarray
    grid: Grid

    @property
    def is_two_d(self) -> bool:
        return len(self.padding) == 2

    @property
    def k(self) -> int:
        return self.keep_set.shape[0]

    @property
    def padded_size(self) -> int:
        return int(np.prod([p.padded_length for p in self.padding]))


def paddings_for(grid: Grid, two_d: bool) -> tuple[DyadicPadding, ...]:
    if two_d:
        if not grid.is_two_d:
            raise DomainError(f"dwt.2d needs a two-dimensional grid, got {grid}")
        return (DyadicPadding.for_length(grid.rows), DyadicPadding.for_length(grid.cols))
    return (DyadicPadding.for_length(grid.length),)


def forward_rows(
    values: np.ndarray, wavelet: WaveletFilter, levels: int, padding: tuple[DyadicPadding, ...]
) -> np.ndarray:
    """Pad and transform every row; returns N x (padded size) coefficients."""
    x = np.atleast_2d(np.asarray(values, dtype=np.float64))
    if len(padding) == 1:
        return dwt_rows(pad_axis(x, padding[0], axis=1), wavelet, levels)
    rows_pad, cols_pad = padding
    images = x.reshape(x.shape[0], rows_pad.original_length, cols_pad.original_length)
    images = pad_axis(pad_axis(images, rows_pad, axis=1), cols_pad, axis=2)
    return dwt_images(images, wavelet, levels)


def inverse_rows(
    coeffs: np.ndarray, wavelet: WaveletFilter, levels: int, padding: tuple[DyadicPadding, ...]
) -> np.ndarray:
    """Inverse of forward_rows; returns N x T."""
    c = np.atleast_2d(coeffs)
    if len(padding) == 1:
        return unpad_axis(idwt_rows(c, wavelet, levels), padding[0], axis=1)
    rows_pad, cols_pad = padding
    images = idwt_images(c, (rows_pad.padded_length, cols_pad.padded_length), wavelet, levels)
    images = unpad_axis(unpad_axis(images, rows_pad, axis=1), cols_pad, axis=2)
    return images.reshape(c.shape[0], -1)


def relative_energy(coeffs: np.ndarray, row_ids: Optional[tuple[Any, ...]] = None) -> np.ndarray:
    """
    Per-row relative energy of every coefficient.

    For row i and coefficient k: sum of c[i, k']^2 over all k' with
    |c[i, k']| >= |c[i, k]|, divided by the row's total energy. Tied magnitudes
    all include each other.

    Raises:
        LearnerError: A row has zero total energy
    """
    c = np.atleast_2d(np.asarray(coeffs, dtype=np.float64))
    result = np.empty_like(c)
    for i, row in enumerate(c):
        magnitude = np.abs(row)
        order = np.argsort(-magnitude, kind="stable")
        sorted_mag = magnitude[order]
        csum = np.cumsum(row[order] ** 2)
        total = csum[-1]
        if total == 0.0:
            label = row_ids[i] if row_ids is not None else i
            raise LearnerError(f"row {label!r} is identically zero; relative energy is undefined")
        # last position holding a magnitude >= the current one
        ends = np.searchsorted(-sorted_mag, -sorted_mag, side="right") - 1
        result[i, order] = csum[ends] / total
    return result


def compute_scree(coeffs: np.ndarray, row_ids: Optional[tuple[Any, ...]] = None) -> np.ndarray:
    """Column means of the relative-energy matrix."""
    return relative_energy(coeffs, row_ids).mean(axis=0)


def select_keep_set(scree: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k smallest scree values, smaller index first among ties."""
    if not 1 <= k <= scree.shape[0]:
        raise DomainError(f"DWT latent dimension must be in 1..{scree.shape[0]}, got {k}")
    keep = np.argsort(scree, kind="stable")[:k].astype(np.int64)
    keep.setflags(write=False)
    return keep


def dwt_codec(model: DwtModel) -> Codec:
    keep = model.keep_set
    size = model.padded_size

    def encode(x: np.ndarray) -> np.ndarray:
        return forward_rows(x, model.filter, model.levels, model.padding)[:, keep]

    def decode(z: np.ndarray) -> np.ndarray:
        full = np.zeros((z.shape[0], size), dtype=np.float64)
        full[:, keep] = z
        return inverse_rows(full, model.filter, model.levels, model.padding)

    return Codec(
        method=CodecMethod.DWT,
        k=model.k,
        t=model.grid.length,
        grid=model.grid,
        encode_fn=encode,
        decode_fn=decode,
        model=model,
    )


def learn_dwt(
    train: DataMatrix,
    k: int,
    wavelet: Optional[WaveletFilter] = None,
    levels: Optional[int] = None,
    two_d: bool = False,
) -> Codec:
    """
    Fit a thresholded DWT codec keeping k coefficients.

    Args:
        train: Training rows
        k: Number of retained coefficients, 1..padded size
        wavelet: Filter (default LA8)
        levels: Decomposition depth (default min(4, log2 of the smallest padded axis))
        two_d: Transform each row as an image on the 2D grid

    Raises:
        DomainError: k or levels out of range, or two_d on a 1D grid
        LearnerError: An all-zero training row
    """
    wavelet = wavelet or la8_filter()
    padding = paddings_for(train.grid, two_d)
    if levels is None:
        levels = default_levels(min(p.padded_length for p in padding))

    coeffs = forward_rows(train.values, wavelet, levels, padding)
    scree = compute_scree(coeffs, train.row_ids)
    scree.setflags(write=False)
    keep = select_keep_set(scree, k)
    logger.debug(f"DWT fit: N={train.n}, padded size={coeffs.shape[1]}, J={levels}, K={k}")

    model = DwtModel(
        filter=wavelet, levels=levels, padding=padding, keep_set=keep, scree=scree, grid=train.grid
    )
    return dwt_codec(model)


class DwtLearner(Learner):
    """Hard-thresholded wavelet coefficients ranked by relative energy scree."""

    method = CodecMethod.DWT

    def __init__(self, two_d: bool = False, levels: Optional[int] = None, filter_name: str = "la8"):
        self.two_d = two_d
        self.levels = levels
        self.wavelet = get_filter(filter_name)
        self.name = "dwt.2d" if two_d else "dwt"

    def max_dimension(self, n_train: int, t: int, grid: Grid) -> int:
        padding = paddings_for(grid, self.two_d)
        return int(np.prod([p.padded_length for p in padding]))

    def fit(self, train: DataMatrix, k: int, rng: RngSpec) -> Codec:
        return learn_dwt(train, k, wavelet=self.wavelet, levels=self.levels, two_d=self.two_d)

    def describe(self) -> dict[str, Any]:
        return {
            "learn": self.name,
            "dwt.filter": self.wavelet.name,
            "dwt.levels": "default" if self.levels is None else self.levels,
        }
