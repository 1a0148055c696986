"""Plug-in learners built from a user-supplied fitting function."""
import logging
from typing import Any, Callable, Optional

import numpy as np

from src.core.exceptions import ShapeError
from src.core.rng import RngSpec
from src.models.codec import Codec, CodecMethod
from src.models.data_matrix import DataMatrix
from src.models.grid import Grid
from src.services.learners.base import Learner

logger = logging.getLogger(__name__)

VectorFn = Callable[[np.ndarray], np.ndarray]
LearnFn = Callable[[DataMatrix, int], tuple[VectorFn, VectorFn]]


def _row_wise(fn: VectorFn) -> Callable[[np.ndarray], np.ndarray]:
    def apply(batch: np.ndarray) -> np.ndarray:
        return np.vstack([np.asarray(fn(row), dtype=np.float64) for row in batch])
    return apply


def _check_shapes(encode: VectorFn, decode: VectorFn, sample: np.ndarray, k: int, t: int, name: str) -> None:
    z = np.asarray(encode(sample), dtype=np.float64)
    if z.shape != (k,):
        raise ShapeError(f"user learner '{name}' encode output", (k,), z.shape)
    x = np.asarray(decode(z), dtype=np.float64)
    if x.shape != (t,):
        raise ShapeError(f"user learner '{name}' decode output", (t,), x.shape)


class UserLearner(Learner):
    """
    Wraps learn_fn(train, K) -> (encode, decode), where encode maps a length-T
    vector to K features and decode maps them back.

    The returned functions are checked on the first training row so shape
    errors surface at fit time with the expected and actual dimensions.
    """

    method = CodecMethod.USER

    def __init__(self, learn_fn: LearnFn, name: str = "user", max_dim: Optional[int] = None):
        self.learn_fn = learn_fn
        self.name = name
        self.max_dim = max_dim

    def max_dimension(self, n_train: int, t: int, grid: Grid) -> int:
        return t if self.max_dim is None else min(self.max_dim, t)

    def fit(self, train: DataMatrix, k: int, rng: RngSpec) -> Codec:
        encode, decode = self.learn_fn(train, k)
        _check_shapes(encode, decode, train.values[0], k, train.t, self.name)
        return Codec(
            method=CodecMethod.USER,
            k=k,
            t=train.t,
            grid=train.grid,
            encode_fn=_row_wise(encode),
            decode_fn=_row_wise(decode),
        )

    def describe(self) -> dict[str, Any]:
        return {"learn": self.name}


def user_codec(learn_fn: LearnFn, name: str = "user", max_dim: Optional[int] = None) -> UserLearner:
    """Turn a user fitting function into a learner the evaluation driver accepts."""
    return UserLearner(learn_fn, name=name, max_dim=max_dim)
