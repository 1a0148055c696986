"""Orthonormal wavelet filters."""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# Daubechies least-asymmetric scaling filter of length 8 (LA8 / "symlet 4"),
# tabulated to about 13 digits; la8_filter() refines it to double precision.
_LA8_LOWPASS = (
    -0.07576571478927333,
    -0.02963552764599851,
    0.49761866763201545,
    0.8037387518059161,
    0.29785779560527736,
    -0.09921954357684722,
    -0.012603967262037833,
    0.0322231006040427,
)

_REFINE_STEPS = 4


@dataclass(frozen=True, eq=False)
class WaveletFilter:
    """
    Lowpass (h) and highpass (g) analysis filters of length L.

    g is the quadrature mirror of h: g[l] = (-1)**l * h[L - 1 - l].
    """

    lowpass: np.ndarray
    highpass: np.ndarray
    name: str

    @classmethod
    def from_lowpass(cls, lowpass: tuple[float, ...] | np.ndarray, name: str) -> "WaveletFilter":
        h = np.array(lowpass, dtype=np.float64)
        length = h.shape[0]
        signs = np.where(np.arange(length) % 2 == 0, 1.0, -1.0)
        g = signs * h[::-1]
        h.setflags(write=False)
        g.setflags(write=False)
        return cls(lowpass=h, highpass=g, name=name)

    @property
    def length(self) -> int:
        return self.lowpass.shape[0]


def daubechies_conditions(lowpass: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Residuals and Jacobian of the conditions defining an orthonormal filter
    with L/2 vanishing moments.

    Rows: sum_k h[k] h[k + 2m] - delta(m) for m = 0..L/2-1, then
    sum_k (-1)**k k**p h[k] for p = 0..L/2-1.
    """
    h = np.asarray(lowpass, dtype=np.float64)
    length = h.shape[0]
    half = length // 2
    k = np.arange(length, dtype=np.float64)
    signs = np.where(np.arange(length) % 2 == 0, 1.0, -1.0)

    residuals = np.empty(length)
    jacobian = np.zeros((length, length))
    for m in range(half):
        shift = 2 * m
        residuals[m] = h[: length - shift] @ h[shift:] - (1.0 if m == 0 else 0.0)
        jacobian[m, : length - shift] += h[shift:]
        jacobian[m, shift:] += h[: length - shift]
    for p in range(half):
        weights = signs * k ** p
        residuals[half + p] = weights @ h
        jacobian[half + p] = weights
    return residuals, jacobian


def refine_lowpass(lowpass: tuple[float, ...] | np.ndarray, steps: int = _REFINE_STEPS) -> np.ndarray:
    """Newton-polish tabulated filter taps onto the nearest exact solution of daubechies_conditions."""
    h = np.array(lowpass, dtype=np.float64)
    for _ in range(steps):
        residuals, jacobian = daubechies_conditions(h)
        step, *_ = np.linalg.lstsq(jacobian, residuals, rcond=None)
        h = h - step
    return h


@lru_cache(maxsize=1)
def _la8_lowpass() -> tuple[float, ...]:
    return tuple(refine_lowpass(_LA8_LOWPASS).tolist())


def la8_filter() -> WaveletFilter:
    """The Daubechies least-asymmetric length-8 filter used for thresholded DWT codecs."""
    return WaveletFilter.from_lowpass(_la8_lowpass(), name="la8")


def haar_filter() -> WaveletFilter:
    """Length-2 Haar filter (handy for hand-checkable transforms)."""
    r = 1.0 / np.sqrt(2.0)
    return WaveletFilter.from_lowpass((r, r), name="haar")


FILTERS = {
    "la8": la8_filter,
    "haar": haar_filter,
}


def get_filter(name: str) -> WaveletFilter:
    try:
        return FILTERS[name.lower()]()
    except KeyError:
        raise ValueError(f"unknown wavelet filter '{name}', expected one of {sorted(FILTERS)}") from None
