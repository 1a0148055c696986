"""Orthonormal periodic wavelet transforms used by the thresholded-DWT learner."""
from src.services.wavelet.filters import WaveletFilter, get_filter, haar_filter, la8_filter
from src.services.wavelet.padding import DyadicPadding, default_levels, pad_axis, pad_to_dyadic, unpad, unpad_axis
from src.services.wavelet.transform import (
    WaveletCoeffs,
    analysis_step,
    dwt_1d,
    dwt_2d,
    dwt_images,
    dwt_rows,
    idwt_1d,
    idwt_2d,
    idwt_images,
    idwt_rows,
    synthesis_step,
)

__all__ = [
    "DyadicPadding",
    "WaveletCoeffs",
    "WaveletFilter",
    "analysis_step",
    "default_levels",
    "dwt_1d",
    "dwt_2d",
    "dwt_images",
    "dwt_rows",
    "get_filter",
    "haar_filter",
    "idwt_1d",
    "idwt_2d",
    "idwt_images",
    "idwt_rows",
    "la8_filter",
    "pad_axis",
    "pad_to_dyadic",
    "synthesis_step",
    "unpad",
    "unpad_axis",
]
