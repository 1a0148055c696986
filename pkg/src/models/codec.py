"""Learned encode/decode pairs."""
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Optional

import numpy as np

from src.core.exceptions import ShapeError
from src.models.grid import Grid

BatchFn = Callable[[np.ndarray], np.ndarray]


class CodecMethod(str, Enum):
    PCA = "pca"
    DWT = "dwt"
    AE = "ae"
    USER = "user"


@dataclass(frozen=True, eq=False)
class Codec:
    """
    A latent feature representation of dimension k for data of dimension t.

    encode_fn and decode_fn work on batches (n x t -> n x k and back).
    The public encode/decode/reconstruct methods also accept single vectors
    and check shapes on the way in and out.

    Attributes:
        method: Which learner produced the codec
        k: Latent dimension
        t: Data-space dimension
        grid: Grid of the training data
        encode_fn: Batch encoder
        decode_fn: Batch decoder
        model: Learner-specific parameters (PcaModel, DwtModel, AeModel) or None
    """

    method: CodecMethod
    k: int
    t: int
    grid: Grid
    encode_fn: BatchFn
    decode_fn: BatchFn
    model: Optional[Any] = None

    def encode(self, x: np.ndarray) -> np.ndarray:
        batch, single = self._as_batch(x, self.t, "encode input")
        z = np.asarray(self.encode_fn(batch), dtype=np.float64)
        if z.shape != (batch.shape[0], self.k):
            raise ShapeError(f"{self.method.value} encode output", (batch.shape[0], self.k), z.shape)
        return z[0] if single else z

    def decode(self, z: np.ndarray) -> np.ndarray:
        batch, single = self._as_batch(z, self.k, "decode input")
        x = np.asarray(self.decode_fn(batch), dtype=np.float64)
        if x.shape != (batch.shape[0], self.t):
            raise ShapeError(f"{self.method.value} decode output", (batch.shape[0], self.t), x.shape)
        return x[0] if single else x

    def reconstruct(self, x: np.ndarray) -> np.ndarray:
        """decode(encode(x))."""
        return self.decode(self.encode(x))

    @staticmethod
    def _as_batch(x: np.ndarray, width: int, what: str) -> tuple[np.ndarray, bool]:
        arr = np.asarray(x, dtype=np.float64)
        single = arr.ndim == 1
        if single:
            arr = arr[np.newaxis, :]
        if arr.ndim != 2 or arr.shape[1] != width:
            raise ShapeError(what, f"length-{width} vectors", arr.shape)
        return arr, single
