"""Types produced and consumed by the cross-validation driver."""
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core.exceptions import DomainError
from src.models.codec import Codec


class KGrid(BaseModel):
    """Equally spaced candidate latent dimensions from..to in steps of by."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    start: int = Field(ge=1, alias="from")
    stop: int = Field(ge=1, alias="to")
    step: int = Field(default=1, ge=1, alias="by")

    @model_validator(mode="after")
    def check_order(self) -> "KGrid":
        if self.start > self.stop:
            raise ValueError(f"latent_dim_from ({self.start}) exceeds latent_dim_to ({self.stop})")
        return self

    def values(self) -> list[int]:
        return list(range(self.start, self.stop + 1, self.step))

    def clamp(self, maximum: int) -> "KGrid":
        """Grid with stop lowered to maximum (start must stay feasible)."""
        if self.start > maximum:
            raise DomainError(
                f"infeasible grid: latent_dim_from={self.start} exceeds the method's "
                f"maximum latent dimension {maximum}"
            )
        return KGrid(start=self.start, stop=min(self.stop, maximum), step=self.step)


class Criterion(BaseModel):
    """Qualifying criterion: tolerance epsilon and attainment rate 1 - alpha."""

    model_config = ConfigDict(frozen=True)

    tolerance: float = Field(gt=0.0, lt=1.0)
    attainment: float = Field(gt=0.0, le=1.0)
    user_quantile: float = Field(default=0.9, gt=0.0, lt=1.0)


@dataclass(frozen=True, eq=False)
class FoldPlan:
    """Assignment of each of N observations to one of k_folds folds."""

    assignment: np.ndarray
    k_folds: int
    seed: int

    def __post_init__(self) -> None:
        assignment = np.array(self.assignment, dtype=np.intp, copy=True)
        n = assignment.shape[0]
        if not 2 <= self.k_folds <= n:
            raise DomainError(f"k_folds must be in 2..{n}, got {self.k_folds}")
        if assignment.min() < 0:
            raise DomainError("fold labels must be non-negative")
        counts = np.bincount(assignment, minlength=self.k_folds)
        if counts.shape[0] != self.k_folds or np.any(counts == 0):
            raise DomainError("every fold must be non-empty and labelled 0..k_folds-1")
        assignment.setflags(write=False)
        object.__setattr__(self, "assignment", assignment)

    @property
    def n(self) -> int:
        return self.assignment.shape[0]

    @property
    def is_leave_one_out(self) -> bool:
        return self.k_folds == self.n

    def validation_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == fold)

    def training_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignment != fold)

    def fold_sizes(self) -> list[int]:
        return [int(c) for c in np.bincount(self.assignment, minlength=self.k_folds)]


@dataclass(frozen=True, eq=False)
class LossSurface:
    """Per-observation cross-validated and training losses over the K grid."""

    cv: np.ndarray
    train: np.ndarray
    k_values: tuple[int, ...]
    fold_plan: FoldPlan
    row_ids: tuple[Any, ...]

    @property
    def n(self) -> int:
        return self.cv.shape[0]


@dataclass(frozen=True)
class SummaryRow:
    """Distribution summary of one K column of the loss surface."""
    k: int
    mean_train: float
    mean_cv: float
    min_cv: float
    max_cv: float
    q_attain: float
    q_user: float


@dataclass(frozen=True, eq=False)
class EvaluationReport:
    """Everything one run of the cross-validation driver produces."""

    surface: LossSurface
    summary: tuple[SummaryRow, ...]
    criterion: Criterion
    t: int
    learner_name: str
    learner_config: dict[str, Any] = field(default_factory=dict)
    qualifying_dimension: Optional[int] = None
    compression_ratio: Optional[int] = None
    final_codec: Optional[Codec] = None

    @property
    def k_values(self) -> tuple[int, ...]:
        return self.surface.k_values

    @property
    def seed(self) -> int:
        return self.surface.fold_plan.seed

    @property
    def criterion_met(self) -> bool:
        return self.qualifying_dimension is not None


def format_compression_ratio(ratio: int) -> str:
    """Printed form of a compression ratio, e.g. 26 -> "26:1"."""
    return f"{ratio}:1"
