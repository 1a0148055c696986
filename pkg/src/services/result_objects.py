"""Result objects for command-level operations."""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from src.core.exceptions import ErrorCode


@dataclass
class ServiceResult:
    """Base result object for command operations."""
    success: bool
    message: str
    errors: list[str] = field(default_factory=list)
    error_code: ErrorCode = ErrorCode.NONE


@dataclass
class EvaluateResult(ServiceResult):
    """Result for one evaluate run."""
    report: Optional[Any] = None  # EvaluationReport
    output_dir: Optional[Path] = None

    @property
    def criterion_met(self) -> bool:
        return self.report is not None and self.report.qualifying_dimension is not None


@dataclass
class CompareResult(ServiceResult):
    """Result for a multi-learner comparison, ranking best first."""
    ranking: list[tuple[str, Any]] = field(default_factory=list)  # (learner, EvaluationReport)
    output_dir: Optional[Path] = None

    @property
    def criterion_met(self) -> bool:
        return bool(self.ranking) and self.ranking[0][1].qualifying_dimension is not None


@dataclass
class SubsampleResult(ServiceResult):
    """Result for the sample-size experiment."""
    reports: list[tuple[int, str, Any]] = field(default_factory=list)  # (n, learner, EvaluationReport)
    output_dir: Optional[Path] = None

    @property
    def criterion_met(self) -> bool:
        return bool(self.reports) and all(r.qualifying_dimension is not None for _, _, r in self.reports)


@dataclass
class ApplyResult(ServiceResult):
    """Result for applying a saved codec to a dataset."""
    direction: str = ""
    output_path: Optional[Path] = None
    rows: int = 0
    columns: int = 0
