"""BPSK over AWGN with per-frame reproducible noise substreams."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ChannelParams:
    """Eb/N0 operating point for a code of the given rate.

    sigma is the per-dimension noise standard deviation,
    sigma = sqrt(1 / (2 * rate * 10^(ebn0_db/10))).
    """

    ebn0_db: float
    rate: float

    def __post_init__(self):
        if not (0.0 < self.rate <= 1.0):
            raise ValueError(f"rate must be in (0, 1], got {self.rate}")

    @property
    def sigma(self) -> float:
        return float(np.sqrt(1.0 / (2.0 * self.rate * 10.0 ** (self.ebn0_db / 10.0))))


def frame_rng(master_seed: int, frame_index: int) -> np.random.Generator:
    """Counter-style substream for one frame: reproducible regardless of the
    order frames are simulated in."""
    return np.random.default_rng(np.random.SeedSequence(entropy=master_seed, spawn_key=(frame_index,)))


def transmit(x, params: ChannelParams, rng: np.random.Generator) -> np.ndarray:
    """Map bits through BPSK (b -> 1-2b), add white Gaussian noise, and
    return channel LLRs 2*y/sigma^2."""
    x = np.asarray(x, dtype=np.uint8)
    sigma = params.sigma
    y = (1.0 - 2.0 * x) + sigma * rng.standard_normal(x.size)
    return (2.0 / (sigma * sigma)) * y
