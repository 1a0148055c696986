"""
Per-observation information loss.

sq_corr_loss is 1 - rho^2 between an observation and its reconstruction, with
means taken over the T grid points; it is 1 by convention when either vector
is constant. press is the residual sum of squares.
"""
from typing import Callable

import numpy as np

from src.core.exceptions import DataFormatError, DomainError, ShapeError

RowLoss = Callable[[np.ndarray, np.ndarray], np.ndarray]

# a vector is treated as constant when max - min <= this times max|entry|
CONSTANT_SPREAD_RTOL = 1e-14


def _pair(x: np.ndarray, xhat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(x, dtype=np.float64)
    b = np.asarray(xhat, dtype=np.float64)
    if a.shape != b.shape:
        raise ShapeError("loss inputs", a.shape, b.shape)
    if a.shape[-1] < 2:
        raise DomainError(f"loss needs at least 2 grid points, got {a.shape[-1]}")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise DataFormatError("loss inputs must be finite")
    return a, b


def _varies(rows: np.ndarray) -> np.ndarray:
    """Rows whose spread exceeds rounding noise relative to their largest |entry|."""
    spread = np.ptp(rows, axis=1)
    return spread > CONSTANT_SPREAD_RTOL * np.max(np.abs(rows), axis=1)


def _unit_scaled(deviations: np.ndarray) -> np.ndarray:
    """Divide each row by its largest |entry| so tiny magnitudes cannot underflow."""
    scale = np.max(np.abs(deviations), axis=1, keepdims=True)
    return np.divide(deviations, scale, out=np.zeros_like(deviations), where=scale > 0.0)


def sq_corr_loss_rows(x: np.ndarray, xhat: np.ndarray) -> np.ndarray:
    """1 - rho^2 for each row pair of two N x T matrices."""
    a, b = _pair(np.atleast_2d(x), np.atleast_2d(xhat))
    da = _unit_scaled(a - a.mean(axis=1, keepdims=True))
    db = _unit_scaled(b - b.mean(axis=1, keepdims=True))
    sxx = np.einsum("ij,ij->i", da, da)
    syy = np.einsum("ij,ij->i", db, db)
    sxy = np.einsum("ij,ij->i", da, db)

    loss = np.ones(a.shape[0], dtype=np.float64)
    varies = _varies(a) & _varies(b)
    defined = varies & (sxx > 0.0) & (syy > 0.0)
    rho2 = sxy[defined] ** 2 / (sxx[defined] * syy[defined])
    loss[defined] = 1.0 - np.clip(rho2, 0.0, 1.0)
    return loss


def sq_corr_loss(x: np.ndarray, xhat: np.ndarray) -> float:
    """
    Complement of the squared correlation between x and its reconstruction.

    Raises:
        ShapeError: Length mismatch
        DataFormatError: Non-finite input
    """
    a, b = _pair(x, xhat)
    if a.ndim != 1:
        raise ShapeError("sq_corr_loss input", "a vector", a.shape)
    return float(sq_corr_loss_rows(a, b)[0])


def press_rows(x: np.ndarray, xhat: np.ndarray) -> np.ndarray:
    a, b = _pair(np.atleast_2d(x), np.atleast_2d(xhat))
    residual = a - b
    return np.einsum("ij,ij->i", residual, residual)


def press(x: np.ndarray, xhat: np.ndarray) -> float:
    """Predicted residual sum of squares, sum_t (x(t) - xhat(t))^2."""
    a, b = _pair(x, xhat)
    if a.ndim != 1:
        raise ShapeError("press input", "a vector", a.shape)
    return float(press_rows(a, b)[0])


def check_press_identity(x: np.ndarray, basis: np.ndarray, tol: float = 1e-12) -> float:
    """
    |sq_corr_loss(x, P x) - press(x, P x) / ||x||^2| for P = basis basis^T.

    For a row-centred x and orthonormal, zero-mean basis columns the two
    losses coincide, so the residual should be below 1e-10.

    Raises:
        DomainError: x not centred, basis not orthonormal, or a basis column with non-zero mean
    """
    v = np.asarray(x, dtype=np.float64)
    b = np.asarray(basis, dtype=np.float64)
    if b.ndim == 1:
        b = b[:, np.newaxis]
    if b.shape[0] != v.shape[0]:
        raise ShapeError("basis rows", v.shape[0], b.shape[0])
    scale = max(1.0, float(np.max(np.abs(v))))
    if abs(v.mean()) > tol * scale:
        raise DomainError("x must be centred (mean over the grid equal to 0)")
    if not np.allclose(b.T @ b, np.eye(b.shape[1]), atol=1e-10):
        raise DomainError("basis columns must be orthonormal")
    if np.any(np.abs(b.mean(axis=0)) > 1e-10):
        raise DomainError("basis columns must each have zero mean")

    xhat = b @ (b.T @ v)
    norm2 = float(v @ v)
    if norm2 == 0.0:
        raise DomainError("x must be non-zero")
    return abs(sq_corr_loss(v, xhat) - press(v, xhat) / norm2)


LOSS_REGISTRY: dict[str, RowLoss] = {
    "sq_corr": sq_corr_loss_rows,
    "press": press_rows,
}


def get_loss(name: str) -> RowLoss:
    try:
        return LOSS_REGISTRY[name]
    except KeyError:
        raise ValueError(f"unknown loss '{name}', expected one of {sorted(LOSS_REGISTRY)}") from None
