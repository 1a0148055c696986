"""Principal component analysis codec (projection onto leading eigenvectors)."""
import logging
from dataclasses import dataclass

import numpy as np

from src.core.exceptions import DomainError
from src.core.rng import RngSpec
from src.models.codec import Codec, CodecMethod
from src.models.data_matrix import DataMatrix
from src.models.grid import Grid
from src.services.learners.base import Learner

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PcaModel:
    """
    Column means and the T x K matrix of leading right singular vectors.

    Each basis column is sign-normalised so its largest-magnitude entry is
    positive, which makes the model reproducible across LAPACK builds.
    """
    column_means: np.ndarray
    basis: np.ndarray
    singular_values: np.ndarray

    @property
    def k(self) -> int:
        return self.basis.shape[1]

    @property
    def t(self) -> int:
        return self.basis.shape[0]


def _fix_signs(components: np.ndarray) -> np.ndarray:
    """Flip rows of Vt so the largest |entry| of each is positive."""
    pivots = np.argmax(np.abs(components), axis=1)
    signs = np.sign(components[np.arange(components.shape[0]), pivots])
    signs[signs == 0] = 1.0
    return components * signs[:, None]


def fit_pca_model(values: np.ndarray, k: int) -> PcaModel:
    """
    Column-centre the rows and keep the top-k right singular vectors.

    Raises:
        DomainError: k outside 1..min(N-1, T)
    """
    x = np.asarray(values, dtype=np.float64)
    n, t = x.shape
    max_k = min(n - 1, t)
    if not 1 <= k <= max_k:
        raise DomainError(f"PCA latent dimension must be in 1..{max_k} (min(N-1, T)), got {k}")

    means = x.mean(axis=0)
    _, s, vt = np.linalg.svd(x - means, full_matrices=False)
    vt = _fix_signs(vt[:k])
    basis = np.ascontiguousarray(vt.T)
    for arr in (means, basis):
        arr.setflags(write=False)
    return PcaModel(column_means=means, basis=basis, singular_values=s[:k].copy())


def pca_codec(model: PcaModel, grid: Grid) -> Codec:
    """Wrap a fitted PcaModel: encode(x) = B^T (x - m), decode(z) = B z + m."""
    basis = model.basis
    means = model.column_means
    return Codec(
        method=CodecMethod.PCA,
        k=model.k,
        t=model.t,
        grid=grid,
        encode_fn=lambda x: (x - means) @ basis,
        decode_fn=lambda z: z @ basis.T + means,
        model=model,
    )


def learn_pca(train: DataMatrix, k: int) -> Codec:
    """Fit a PCA codec of dimension k on the training rows."""
    model = fit_pca_model(train.values, k)
    logger.debug(f"PCA fit: N={train.n}, T={train.t}, K={k}")
    return pca_codec(model, train.grid)


class PcaLearner(Learner):
    """Principal components computed by the SVD of the centred data."""

    name = "pca"
    method = CodecMethod.PCA

    def max_dimension(self, n_train: int, t: int, grid: Grid) -> int:
        return min(n_train - 1, t)

    def fit(self, train: DataMatrix, k: int, rng: RngSpec) -> Codec:
        return learn_pca(train, k)
