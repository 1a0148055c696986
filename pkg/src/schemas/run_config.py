"""Pydantic schema for run configuration files (flat key=value)."""
from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.core.constants import ClareDefaults
from src.core.rng import RngSpec, RngStream
from src.models.evaluation import Criterion, KGrid
from src.models.grid import Grid
from src.services.learners import LEARNER_NAMES, AeHyperparameters, Learner, create_learner
from src.services.learners.ae_learner import AeLoss, OutputActivation


class DataFormat(str, Enum):
    CSV = "csv"
    CLRE = "clre"


class RunConfig(BaseModel):
    """
    Every accepted config key with its default.

    Aliases are the literal config keys (including the dotted learner keys);
    unknown keys are rejected.
    """

    data: Optional[str] = None
    data_format: DataFormat = Field(default=DataFormat.CSV, alias="format")
    grid: Optional[str] = None
    id_column: Optional[int] = Field(default=None, ge=0)
    learn: str = "pca"
    latent_dim_from: int = Field(default=ClareDefaults.LATENT_DIM_FROM, ge=1)
    latent_dim_to: int = Field(default=ClareDefaults.LATENT_DIM_TO, ge=1)
    latent_dim_by: int = Field(default=ClareDefaults.LATENT_DIM_BY, ge=1)
    folds: str = str(ClareDefaults.FOLDS)
    seed: int = Field(default=ClareDefaults.SEED, ge=0, le=2**64 - 1)
    tolerance_level: float = Field(default=ClareDefaults.TOLERANCE_LEVEL, gt=0.0, lt=1.0)
    attainment_rate: float = Field(default=ClareDefaults.ATTAINMENT_RATE, gt=0.0, le=1.0)
    cvqlines: float = Field(default=ClareDefaults.CVQLINES, gt=0.0, lt=1.0)
    out: str = "clare_output"
    threads: int = Field(default=0, ge=0)
    verbose: bool = False
    sizes: Optional[str] = None

    ae_hidden: int = Field(default=ClareDefaults.AE_HIDDEN, ge=1, alias="ae.hidden")
    ae_epochs: int = Field(default=ClareDefaults.AE_EPOCHS, ge=1, alias="ae.epochs")
    ae_batch: int = Field(default=ClareDefaults.AE_BATCH, ge=1, alias="ae.batch")
    ae_lr: float = Field(default=ClareDefaults.AE_LEARNING_RATE, gt=0.0, alias="ae.lr")
    ae_output_activation: OutputActivation = Field(default=OutputActivation.SIGMOID, alias="ae.output_activation")
    ae_loss: AeLoss = Field(default=AeLoss.MSE, alias="ae.loss")
    dwt_levels: Optional[int] = Field(default=None, ge=1, alias="dwt.levels")

    model_config = ConfigDict(populate_by_name=True, extra="forbid", frozen=True)

    @field_validator("folds", mode="before")
    @classmethod
    def normalise_folds(cls, value: object) -> str:
        text = str(value).strip().lower()
        if text == "loo":
            return text
        if not text.isdigit() or int(text) < 2:
            raise ValueError("folds must be an integer >= 2 or 'loo'")
        return str(int(text))

    @field_validator("learn")
    @classmethod
    def check_learners(cls, value: str) -> str:
        names = [name.strip().lower() for name in value.split(",") if name.strip()]
        if not names:
            raise ValueError("learn must name at least one learner")
        unknown = [name for name in names if name not in LEARNER_NAMES]
        if unknown:
            raise ValueError(f"unknown learner(s) {', '.join(unknown)}; expected {', '.join(LEARNER_NAMES)}")
        return ",".join(names)

    @field_validator("grid")
    @classmethod
    def check_grid(cls, value: Optional[str]) -> Optional[str]:
        if value is not None and value.strip():
            Grid.parse(value)
            return value.strip()
        return None

    @field_validator("sizes")
    @classmethod
    def check_sizes(cls, value: Optional[str]) -> Optional[str]:
        if value is None or not value.strip():
            return None
        parts = [p.strip() for p in value.split(",") if p.strip()]
        if not all(p.isdigit() and int(p) >= 2 for p in parts):
            raise ValueError("sizes must be a comma-separated list of integers >= 2")
        return ",".join(parts)

    @model_validator(mode="after")
    def check_consistency(self) -> "RunConfig":
        if self.latent_dim_from > self.latent_dim_to:
            raise ValueError(
                f"latent_dim_from ({self.latent_dim_from}) exceeds latent_dim_to ({self.latent_dim_to})"
            )
        if self.ae_loss is AeLoss.BCE and self.ae_output_activation is not OutputActivation.SIGMOID:
            raise ValueError("ae.loss=bce requires ae.output_activation=sigmoid")
        return self

    @property
    def learner_names(self) -> list[str]:
        return self.learn.split(",")

    @property
    def size_list(self) -> list[int]:
        return [int(p) for p in self.sizes.split(",")] if self.sizes else []

    @property
    def is_leave_one_out(self) -> bool:
        return self.folds == "loo"

    def fold_count(self, n: int) -> int:
        return n if self.is_leave_one_out else int(self.folds)

    def parsed_grid(self) -> Optional[Grid]:
        return Grid.parse(self.grid) if self.grid else None

    def k_grid(self) -> KGrid:
        return KGrid(start=self.latent_dim_from, stop=self.latent_dim_to, step=self.latent_dim_by)

    def criterion(self) -> Criterion:
        return Criterion(
            tolerance=self.tolerance_level, attainment=self.attainment_rate, user_quantile=self.cvqlines
        )

    def rng(self) -> RngSpec:
        return RngSpec(self.seed, RngStream.FOLD_SHUFFLE)

    def ae_hyperparameters(self) -> AeHyperparameters:
        return AeHyperparameters(
            hidden=self.ae_hidden,
            epochs=self.ae_epochs,
            batch_size=self.ae_batch,
            learning_rate=self.ae_lr,
            output_activation=self.ae_output_activation,
            loss=self.ae_loss,
        )

    def build_learner(self, name: str) -> Learner:
        return create_learner(name, dwt_levels=self.dwt_levels, ae_hyper=self.ae_hyperparameters())

    def build_learners(self) -> list[Learner]:
        return [self.build_learner(name) for name in self.learner_names]
