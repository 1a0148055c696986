"""Common interface of latent feature representation learners."""
from abc import ABC, abstractmethod
from typing import Any

from src.core.rng import RngSpec
from src.models.codec import Codec, CodecMethod
from src.models.data_matrix import DataMatrix
from src.models.grid import Grid


class Learner(ABC):
    """
    Maps (training data, latent dimension K) to a fitted Codec.

    Implementations must be deterministic functions of (train, k, their own
    configuration, rng) and must not mutate shared state, so the evaluation
    driver can call fit concurrently from worker threads.
    """

    name: str = ""
    method: CodecMethod = CodecMethod.USER

    @abstractmethod
    def max_dimension(self, n_train: int, t: int, grid: Grid) -> int:
        """Largest K this learner can fit on n_train rows of length t."""

    @abstractmethod
    def fit(self, train: DataMatrix, k: int, rng: RngSpec) -> Codec:
        """Fit a codec of latent dimension k on the training rows."""

    def describe(self) -> dict[str, Any]:
        """Configuration echoed into run metadata."""
        return {"learn": self.name}

    def __repr__(self) -> str:
        return f"{type(self).__name__}(name={self.name!r})"
