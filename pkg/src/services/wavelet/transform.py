"""
Periodic orthonormal discrete wavelet transforms (1D and separable 2D).

Coefficient ordering
--------------------
1D, J levels on T_pad points:
    [d1 (T_pad/2), d2 (T_pad/4), ..., dJ (T_pad/2^J), aJ (T_pad/2^J)]
i.e. finest details first and the coarsest approximation last.

2D, J levels on an R x C image: for each level j = 1..J the three detail
subbands LH_j, HL_j, HH_j (each R/2^j x C/2^j, flattened row-major), then
the coarsest approximation LL_J. The first letter is the vertical (column)
filter, the second the horizontal (row) filter.

Each level correlates the signal with h and g at the even circular shifts
(a gather of L taps per output, O(n L)); the inverse scatters the taps back.
"""
from dataclasses import dataclass

import numpy as np

from src.core.exceptions import DomainError, ShapeError
from src.models.grid import Grid
from src.services.wavelet.filters import WaveletFilter
from src.services.wavelet.padding import DyadicPadding


@dataclass(frozen=True, eq=False)
class WaveletCoeffs:
    """
    Flattened wavelet coefficients of one signal or image.

    Attributes:
        values: T_pad (1D) or R_pad * C_pad (2D) coefficients in the documented order
        levels: Decomposition depth J
        padding: One DyadicPadding per axis
        grid: Grid of the unpadded signal
        filter: Filter the coefficients were computed with
    """
    values: np.ndarray
    levels: int
    padding: tuple[DyadicPadding, ...]
    grid: Grid
    filter: WaveletFilter

    @property
    def padded_shape(self) -> tuple[int, ...]:
        return tuple(p.padded_length for p in self.padding)


def _is_dyadic(n: int) -> bool:
    return n >= 2 and (n & (n - 1)) == 0


def _check_levels(levels: int, lengths: tuple[int, ...]) -> None:
    for n in lengths:
        if not _is_dyadic(n):
            raise DomainError(f"length {n} is not a power of two >= 2; pad with pad_to_dyadic first")
    max_levels = min(lengths).bit_length() - 1
    if not 1 <= levels <= max_levels:
        raise DomainError(f"levels must be in 1..{max_levels} for shape {lengths}, got {levels}")


def tap_indices(n: int, length: int) -> np.ndarray:
    """(n/2) x L positions (2i + l) mod n read by output i of one periodic analysis level."""
    return (2 * np.arange(n // 2)[:, None] + np.arange(length)[None, :]) % n


def analysis_step(x: np.ndarray, wavelet: WaveletFilter) -> tuple[np.ndarray, np.ndarray]:
    """One periodic analysis level along the last axis: (approximation, detail), each of length n/2."""
    taps = x[..., tap_indices(x.shape[-1], wavelet.length)]
    return taps @ wavelet.lowpass, taps @ wavelet.highpass


def synthesis_step(approx: np.ndarray, detail: np.ndarray, wavelet: WaveletFilter) -> np.ndarray:
    """Adjoint of analysis_step: rebuild the length-2n signal along the last axis."""
    n = 2 * approx.shape[-1]
    idx = tap_indices(n, wavelet.length)
    out = np.zeros(approx.shape[:-1] + (n,), dtype=np.float64)
    # for a fixed tap the positions (2i + l) mod n are distinct
    for tap in range(wavelet.length):
        out[..., idx[:, tap]] += approx * wavelet.lowpass[tap] + detail * wavelet.highpass[tap]
    return out


def _swap(x: np.ndarray) -> np.ndarray:
    return np.swapaxes(x, -1, -2)


# ---------------------------------------------------------------------------
# 1D, batched over rows
# ---------------------------------------------------------------------------

def dwt_rows(signals: np.ndarray, wavelet: WaveletFilter, levels: int) -> np.ndarray:
    """Forward DWT of every row of an N x T_pad matrix."""
    x = np.atleast_2d(np.asarray(signals, dtype=np.float64))
    n = x.shape[1]
    _check_levels(levels, (n,))

    details: list[np.ndarray] = []
    approx = x
    for _ in range(levels):
        approx, detail = analysis_step(approx, wavelet)
        details.append(detail)
    return np.concatenate(details + [approx], axis=1)


def idwt_rows(coeffs: np.ndarray, wavelet: WaveletFilter, levels: int) -> np.ndarray:
    """Inverse of dwt_rows."""
    c = np.atleast_2d(np.asarray(coeffs, dtype=np.float64))
    n = c.shape[1]
    _check_levels(levels, (n,))

    sizes = [n >> j for j in range(1, levels + 1)]
    offsets = np.cumsum([0] + sizes)
    approx = c[:, offsets[-1]:]
    for j in range(levels - 1, -1, -1):
        approx = synthesis_step(approx, c[:, offsets[j]:offsets[j + 1]], wavelet)
    return approx


def dwt_1d(
    signal: np.ndarray,
    wavelet: WaveletFilter,
    levels: int,
    padding: DyadicPadding | None = None,
) -> WaveletCoeffs:
    """
    Forward DWT of one dyadic-length signal.

    Args:
        signal: T_pad values (already padded)
        wavelet: Analysis filter
        levels: Decomposition depth, 1 <= J <= log2(T_pad)
        padding: Padding that produced the signal; defaults to none

    Raises:
        DomainError: Non-dyadic length or J out of range
    """
    x = np.asarray(signal, dtype=np.float64)
    if x.ndim != 1:
        raise ShapeError("dwt_1d input", "a vector", x.shape)
    n = x.shape[0]
    if padding is None:
        padding = DyadicPadding(original_length=n, padded_length=n, left=0, right=0)
    elif padding.padded_length != n:
        raise ShapeError("dwt_1d input vs padding", padding.padded_length, n)
    values = dwt_rows(x, wavelet, levels)[0]
    return WaveletCoeffs(
        values=values,
        levels=levels,
        padding=(padding,),
        grid=Grid.one_d(padding.original_length),
        filter=wavelet,
    )


def idwt_1d(coeffs: WaveletCoeffs) -> np.ndarray:
    """Inverse DWT back to the T_pad padded signal."""
    if len(coeffs.padding) != 1 or coeffs.values.shape != (coeffs.padding[0].padded_length,):
        raise ShapeError("1D coefficient vector", coeffs.padded_shape, coeffs.values.shape)
    return idwt_rows(coeffs.values, coeffs.filter, coeffs.levels)[0]


# ---------------------------------------------------------------------------
# 2D, batched over a stack of images
# ---------------------------------------------------------------------------

def _subband_shapes(rows: int, cols: int, levels: int) -> list[tuple[int, int]]:
    return [(rows >> j, cols >> j) for j in range(1, levels + 1)]


def dwt_images(images: np.ndarray, wavelet: WaveletFilter, levels: int) -> np.ndarray:
    """Forward 2D DWT of a stack of N x R_pad x C_pad images, flattened to N x (R_pad*C_pad)."""
    x = np.asarray(images, dtype=np.float64)
    if x.ndim == 2:
        x = x[np.newaxis]
    _, rows, cols = x.shape
    _check_levels(levels, (rows, cols))

    pieces: list[np.ndarray] = []
    approx = x
    for _ in range(levels):
        # rows first (along the horizontal axis), then columns
        low, high = analysis_step(approx, wavelet)
        ll, hl = (_swap(band) for band in analysis_step(_swap(low), wavelet))
        lh, hh = (_swap(band) for band in analysis_step(_swap(high), wavelet))
        pieces.extend(band.reshape(band.shape[0], -1) for band in (lh, hl, hh))
        approx = ll
    pieces.append(approx.reshape(approx.shape[0], -1))
    return np.concatenate(pieces, axis=1)


def idwt_images(coeffs: np.ndarray, shape: tuple[int, int], wavelet: WaveletFilter, levels: int) -> np.ndarray:
    """Inverse of dwt_images; returns an N x R_pad x C_pad stack."""
    c = np.atleast_2d(np.asarray(coeffs, dtype=np.float64))
    rows, cols = shape
    _check_levels(levels, (rows, cols))
    if c.shape[1] != rows * cols:
        raise ShapeError("2D coefficient vector", rows * cols, c.shape[1])

    n = c.shape[0]
    shapes = _subband_shapes(rows, cols, levels)
    # per level: start of LH, HL, HH; LL follows the last level
    starts: list[tuple[int, int, int]] = []
    position = 0
    for hr, hc in shapes:
        size = hr * hc
        starts.append((position, position + size, position + 2 * size))
        position += 3 * size

    lr, lc = shapes[-1]
    approx = c[:, position:position + lr * lc].reshape(n, lr, lc)
    for j in range(levels - 1, -1, -1):
        hr, hc = shapes[j]
        size = hr * hc
        lh_start, hl_start, hh_start = starts[j]
        lh = c[:, lh_start:lh_start + size].reshape(n, hr, hc)
        hl = c[:, hl_start:hl_start + size].reshape(n, hr, hc)
        hh = c[:, hh_start:hh_start + size].reshape(n, hr, hc)
        low = _swap(synthesis_step(_swap(approx), _swap(hl), wavelet))
        high = _swap(synthesis_step(_swap(lh), _swap(hh), wavelet))
        approx = synthesis_step(low, high, wavelet)
    return approx


def dwt_2d(
    image: np.ndarray,
    wavelet: WaveletFilter,
    levels: int,
    padding: tuple[DyadicPadding, DyadicPadding] | None = None,
) -> WaveletCoeffs:
    """Forward 2D DWT of one dyadic R x C image (rows then columns at each level)."""
    x = np.asarray(image, dtype=np.float64)
    if x.ndim != 2:
        raise ShapeError("dwt_2d input", "a matrix", x.shape)
    rows, cols = x.shape
    if padding is None:
        padding = (
            DyadicPadding(original_length=rows, padded_length=rows, left=0, right=0),
            DyadicPadding(original_length=cols, padded_length=cols, left=0, right=0),
        )
    elif (padding[0].padded_length, padding[1].padded_length) != (rows, cols):
        raise ShapeError("dwt_2d input vs padding", (padding[0].padded_length, padding[1].padded_length), x.shape)
    values = dwt_images(x, wavelet, levels)[0]
    return WaveletCoeffs(
        values=values,
        levels=levels,
        padding=padding,
        grid=Grid.two_d(padding[0].original_length, padding[1].original_length),
        filter=wavelet,
    )


def idwt_2d(coeffs: WaveletCoeffs) -> np.ndarray:
    """Inverse 2D DWT back to the padded R_pad x C_pad image."""
    if len(coeffs.padding) != 2:
        raise ShapeError("2D coefficient padding", 2, len(coeffs.padding))
    shape = (coeffs.padding[0].padded_length, coeffs.padding[1].padded_length)
    if coeffs.values.shape != (shape[0] * shape[1],):
        raise ShapeError("2D coefficient vector", shape[0] * shape[1], coeffs.values.shape)
    return idwt_images(coeffs.values, shape, coeffs.filter, coeffs.levels)[0]
