"""Single-hidden-layer autoencoder codec trained with mini-batch Adam."""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np
import torch
from pydantic import BaseModel, ConfigDict, Field, model_validator
from torch import nn

from src.core.constants import ClareDefaults
from src.core.exceptions import DomainError, LearnerError
from src.core.rng import RngSpec, RngStream
from src.models.codec import Codec, CodecMethod
from src.models.data_matrix import DataMatrix
from src.models.grid import Grid
from src.services.learners.base import Learner

logger = logging.getLogger(__name__)


class OutputActivation(str, Enum):
    LINEAR = "linear"
    SIGMOID = "sigmoid"


class AeLoss(str, Enum):
    MSE = "mse"
    BCE = "bce"


class AeHyperparameters(BaseModel):
    """Autoencoder training settings (config keys ae.*)."""

    model_config = ConfigDict(frozen=True)

    hidden: int = Field(default=ClareDefaults.AE_HIDDEN, ge=1)
    epochs: int = Field(default=ClareDefaults.AE_EPOCHS, ge=1)
    batch_size: int = Field(default=ClareDefaults.AE_BATCH, ge=1)
    learning_rate: float = Field(default=ClareDefaults.AE_LEARNING_RATE, gt=0.0)
    output_activation: OutputActivation = OutputActivation.SIGMOID
    loss: AeLoss = AeLoss.MSE

    @model_validator(mode="after")
    def check_loss_activation(self) -> "AeHyperparameters":
        if self.loss is AeLoss.BCE and self.output_activation is not OutputActivation.SIGMOID:
            raise ValueError("ae.loss=bce requires ae.output_activation=sigmoid")
        return self


class AutoencoderNetwork(nn.Module):
    """Encoder T -> H (ReLU) -> K, decoder K -> H (ReLU) -> T (linear or sigmoid)."""

    def __init__(self, t: int, hidden: int, k: int, output_activation: OutputActivation):
        super().__init__()
        self.output_activation = output_activation
        self.encoder = nn.Sequential(
            nn.Linear(t, hidden, dtype=torch.float64),
            nn.ReLU(),
            nn.Linear(hidden, k, dtype=torch.float64),
        )
        decoder_layers: list[nn.Module] = [
            nn.Linear(k, hidden, dtype=torch.float64),
            nn.ReLU(),
            nn.Linear(hidden, t, dtype=torch.float64),
        ]
        if output_activation is OutputActivation.SIGMOID:
            decoder_layers.append(nn.Sigmoid())
        self.decoder = nn.Sequential(*decoder_layers)

    def initialise(self, generator: np.random.Generator) -> None:
        """He-uniform weights before ReLU, Glorot-uniform elsewhere, zero biases."""
        with torch.no_grad():
            for stack in (self.encoder, self.decoder):
                layers = list(stack)
                for position, layer in enumerate(layers):
                    if not isinstance(layer, nn.Linear):
                        continue
                    fan_out, fan_in = layer.weight.shape
                    feeds_relu = position + 1 < len(layers) and isinstance(layers[position + 1], nn.ReLU)
                    if feeds_relu:
                        limit = np.sqrt(6.0 / fan_in)
                    else:
                        limit = np.sqrt(6.0 / (fan_in + fan_out))
                    weights = generator.uniform(-limit, limit, size=(fan_out, fan_in))
                    layer.weight.copy_(torch.from_numpy(weights))
                    layer.bias.zero_()

    def encode(self, x: torch.Tensor) -> torch.Tensor:
        return self.encoder(x)

    def decode(self, z: torch.Tensor) -> torch.Tensor:
        return self.decoder(z)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.decode(self.encode(x))


def loss_module(kind: AeLoss) -> nn.Module:
    return nn.BCELoss() if kind is AeLoss.BCE else nn.MSELoss()


@dataclass(eq=False)
class AeModel:
    """A trained network together with the settings that produced it."""
    network: AutoencoderNetwork
    hyper: AeHyperparameters
    t: int
    k: int
    rng: RngSpec | None = None
    loss_history: list[float] = field(default_factory=list)

    @property
    def final_loss(self) -> float:
        return self.loss_history[-1] if self.loss_history else float("nan")


def _check_inputs(train: DataMatrix, k: int, hyper: AeHyperparameters) -> None:
    if not 1 <= k < train.t:
        raise DomainError(f"AE latent dimension must be in 1..{train.t - 1}, got {k}")
    if hyper.hidden < k:
        raise DomainError(f"ae.hidden ({hyper.hidden}) must be >= the latent dimension {k}")

    in_unit_range = bool(np.all((train.values >= 0.0) & (train.values <= 1.0)))
    if hyper.loss is AeLoss.BCE and not in_unit_range:
        raise LearnerError("binary cross-entropy needs data in [0, 1]; use ae.loss=mse")
    if hyper.output_activation is OutputActivation.SIGMOID and not in_unit_range:
        logger.warning(
            "Sigmoid output on data outside [0, 1]: reconstructions cannot reach those values; "
            "consider ae.output_activation=linear"
        )


def train_network(
    values: np.ndarray, k: int, hyper: AeHyperparameters, rng: RngSpec
) -> AeModel:
    """
    Train an autoencoder on the rows of values.

    Raises:
        LearnerError: The epoch loss becomes non-finite
    """
    n, t = values.shape
    network = AutoencoderNetwork(t, hyper.hidden, k, hyper.output_activation)
    network.initialise(rng.with_stream(RngStream.AE_INIT).generator())
    order_rng = rng.with_stream(RngStream.AE_BATCH_ORDER).generator()

    optimizer = torch.optim.Adam(
        network.parameters(),
        lr=hyper.learning_rate,
        betas=(ClareDefaults.AE_BETA1, ClareDefaults.AE_BETA2),
        eps=ClareDefaults.AE_EPSILON,
    )
    criterion = loss_module(hyper.loss)
    data = torch.from_numpy(np.ascontiguousarray(values, dtype=np.float64))

    model = AeModel(network=network, hyper=hyper, t=t, k=k, rng=rng)
    network.train()
    for epoch in range(1, hyper.epochs + 1):
        permutation = torch.from_numpy(order_rng.permutation(n))
        epoch_loss = 0.0
        for start in range(0, n, hyper.batch_size):
            batch = data[permutation[start:start + hyper.batch_size]]
            optimizer.zero_grad()
            loss = criterion(network(batch), batch)
            loss.backward()
            optimizer.step()
            epoch_loss += loss.item() * batch.shape[0]
        epoch_loss /= n
        if not np.isfinite(epoch_loss):
            raise LearnerError(f"autoencoder training diverged at epoch {epoch} (loss {epoch_loss})")
        model.loss_history.append(epoch_loss)

    network.eval()
    logger.debug(f"AE fit: N={n}, T={t}, H={hyper.hidden}, K={k}, final loss {model.final_loss:.6g}")
    return model


def ae_codec(model: AeModel, grid: Grid) -> Codec:
    network = model.network

    def encode(x: np.ndarray) -> np.ndarray:
        with torch.no_grad():
            return network.encode(torch.from_numpy(np.ascontiguousarray(x))).numpy()

    def decode(z: np.ndarray) -> np.ndarray:
        with torch.no_grad():
            return network.decode(torch.from_numpy(np.ascontiguousarray(z))).numpy()

    return Codec(
        method=CodecMethod.AE,
        k=model.k,
        t=model.t,
        grid=grid,
        encode_fn=encode,
        decode_fn=decode,
        model=model,
    )


def learn_ae(train: DataMatrix, k: int, hyper: AeHyperparameters, rng: RngSpec) -> Codec:
    """
    Fit an autoencoder codec with a K-dimensional bottleneck.

    Raises:
        DomainError: k outside 1..T-1 or hidden < k
        LearnerError: BCE on data outside [0, 1], or divergence
    """
    _check_inputs(train, k, hyper)
    model = train_network(train.values, k, hyper, rng)
    return ae_codec(model, train.grid)


class AeLearner(Learner):
    """Autoencoder with one hidden layer on each side of the bottleneck."""

    name = "ae"
    method = CodecMethod.AE

    def __init__(self, hyper: AeHyperparameters | None = None):
        self.hyper = hyper or AeHyperparameters()

    def max_dimension(self, n_train: int, t: int, grid: Grid) -> int:
        return min(t - 1, self.hyper.hidden)

    def fit(self, train: DataMatrix, k: int, rng: RngSpec) -> Codec:
        return learn_ae(train, k, self.hyper, rng)

    def describe(self) -> dict[str, Any]:
        return {
            "learn": self.name,
            "ae.hidden": self.hyper.hidden,
            "ae.epochs": self.hyper.epochs,
            "ae.batch": self.hyper.batch_size,
            "ae.lr": self.hyper.learning_rate,
            "ae.output_activation": self.hyper.output_activation.value,
            "ae.loss": self.hyper.loss.value,
        }
