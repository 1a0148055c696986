"""Row subsampling for the sample-size experiment."""
import logging

import numpy as np

from src.core.exceptions import DomainError
from src.core.rng import RngSpec, RngStream
from src.models.data_matrix import DataMatrix

logger = logging.getLogger(__name__)


def subsample(matrix: DataMatrix, n: int, rng: RngSpec) -> DataMatrix:
    """
    Draw n distinct rows uniformly without replacement.

    Selected rows keep their original order and row ids; n == N returns every
    row unpermuted. The draw always uses the Subsample stream of the seed.

    Raises:
        DomainError: n outside 2..N
    """
    if not 2 <= n <= matrix.n:
        raise DomainError(f"subsample size must be in 2..{matrix.n}, got {n}")
    if n == matrix.n:
        return matrix.take(np.arange(n))

    generator = rng.with_stream(RngStream.SUBSAMPLE).generator()
    chosen = np.sort(generator.choice(matrix.n, size=n, replace=False))
    logger.debug(f"Subsampled {n} of {matrix.n} rows (seed {rng.seed})")
    return matrix.take(chosen)
