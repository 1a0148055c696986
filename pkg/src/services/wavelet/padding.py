"""Zero padding to dyadic length."""
from dataclasses import dataclass

import numpy as np

from src.core.constants import ClareDefaults
from src.core.exceptions import DomainError, ShapeError


@dataclass(frozen=True)
class DyadicPadding:
    """
    Zeros added around a length-T signal to reach T_pad, the next power of two.

    left = ceil((T_pad - T) / 2), right = floor((T_pad - T) / 2).
    """
    original_length: int
    padded_length: int
    left: int
    right: int

    @classmethod
    def for_length(cls, length: int) -> "DyadicPadding":
        if length < 2:
            raise DomainError(f"signal length must be >= 2, got {length}")
        padded = 1 << (length - 1).bit_length()
        extra = padded - length
        return cls(original_length=length, padded_length=padded, left=(extra + 1) // 2, right=extra // 2)

    @property
    def levels_max(self) -> int:
        return self.padded_length.bit_length() - 1


def pad_to_dyadic(signal: np.ndarray) -> tuple[np.ndarray, DyadicPadding]:
    """Pad a vector (or each row of a matrix) with zeros to dyadic length."""
    arr = np.asarray(signal, dtype=np.float64)
    padding = DyadicPadding.for_length(arr.shape[-1])
    return pad_axis(arr, padding, axis=-1), padding


def pad_axis(arr: np.ndarray, padding: DyadicPadding, axis: int) -> np.ndarray:
    if arr.shape[axis] != padding.original_length:
        raise ShapeError("padding input", padding.original_length, arr.shape[axis])
    widths = [(0, 0)] * arr.ndim
    widths[axis] = (padding.left, padding.right)
    return np.pad(arr, widths, mode="constant", constant_values=0.0)


def unpad_axis(arr: np.ndarray, padding: DyadicPadding, axis: int) -> np.ndarray:
    """Drop the left/right padding columns along one axis."""
    if arr.shape[axis] != padding.padded_length:
        raise ShapeError("unpad input", padding.padded_length, arr.shape[axis])
    index = [slice(None)] * arr.ndim
    index[axis] = slice(padding.left, padding.left + padding.original_length)
    return arr[tuple(index)]


def unpad(signal: np.ndarray, padding: DyadicPadding) -> np.ndarray:
    return unpad_axis(np.asarray(signal, dtype=np.float64), padding, axis=-1)


def default_levels(padded_length: int, cap: int = ClareDefaults.DWT_MAX_DEFAULT_LEVELS) -> int:
    """Decomposition depth min(cap, log2(T_pad))."""
    return min(cap, padded_length.bit_length() - 1)
