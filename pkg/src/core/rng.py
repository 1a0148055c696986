"""
Seeded randomness contract.

One numpy generator per (seed, stream, keys). The stream tag is hashed into
the seed sequence so fold shuffling, autoencoder initialisation, batch order,
subsampling and plot jitter never perturb each other.
"""
import hashlib
from dataclasses import dataclass
from enum import Enum

import numpy as np

_MAX_SEED = 2**64 - 1


class RngStream(str, Enum):
    FOLD_SHUFFLE = "FoldShuffle"
    AE_INIT = "AeInit"
    AE_BATCH_ORDER = "AeBatchOrder"
    SUBSAMPLE = "Subsample"
    PLOT_JITTER = "PlotJitter"


def _stream_tag(stream: RngStream) -> int:
    digest = hashlib.blake2b(stream.value.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


@dataclass(frozen=True)
class RngSpec:
    """A (seed, stream) pair, optionally keyed further by task identifiers."""

    seed: int
    stream: RngStream
    keys: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not 0 <= self.seed <= _MAX_SEED:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if any(k < 0 for k in self.keys):
            raise ValueError(f"derived keys must be non-negative, got {self.keys}")

    def with_stream(self, stream: RngStream) -> "RngSpec":
        return RngSpec(self.seed, stream, self.keys)

    def derive(self, *keys: int) -> "RngSpec":
        """Spec for an independent sub-stream, e.g. one per (K, fold) task."""
        return RngSpec(self.seed, self.stream, self.keys + tuple(int(k) for k in keys))

    def generator(self) -> np.random.Generator:
        """A fresh generator; the same spec always yields the same sequence."""
        entropy = [self.seed & 0xFFFFFFFF, self.seed >> 32, _stream_tag(self.stream)]
        sequence = np.random.SeedSequence(entropy=entropy, spawn_key=self.keys)
        return np.random.default_rng(sequence)
