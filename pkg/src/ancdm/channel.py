"""Block Rayleigh fading, AWGN, and seeded random substreams."""
from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class ChannelRealization:
    """Reciprocal S1<->R and S2<->R gains, constant over a frame.

    ``h1``/``h2`` are complex scalars or arrays of shape ``(frames,)``.
    """

    h1: complex | np.ndarray
    h2: complex | np.ndarray


@dataclass(frozen=True)
class NoiseModel:
    n0: float

    def __post_init__(self):
        if not self.n0 > 0:
            raise ConfigError(f"noise variance must be positive, got {self.n0!r}")


def complex_normal(rng: np.random.Generator, size=None, variance: float = 1.0):
    """Circularly-symmetric complex Gaussian samples, ``variance/2`` per dimension."""
    re = rng.standard_normal(size)
    im = rng.standard_normal(size)
    return np.sqrt(variance / 2) * (re + 1j * im)


def draw_channel(stream: np.random.Generator, frames: int | None = None) -> ChannelRealization:
    """Independent CN(0, 1) gains for both links; one pair per frame."""
    h1 = complex_normal(stream, frames)
    h2 = complex_normal(stream, frames)
    return ChannelRealization(h1, h2)


def add_awgn(signal, noise: NoiseModel, stream: np.random.Generator) -> np.ndarray:
    x = np.asarray(signal)
    return x + complex_normal(stream, x.shape, noise.n0)


def experiment_key(name: str) -> int:
    return zlib.crc32(name.encode())


def substream(seed: int, experiment: str, group: int, chunk: int) -> np.random.Generator:
    """Generator for one block of frames, keyed by (seed, experiment, group, chunk).

    The key fully determines the draws, so results do not depend on which
    worker simulates the block or in what order.
    """
    if not 0 <= seed < 2**64:
        raise ConfigError("seed must be a 64-bit unsigned integer")
    ss = np.random.SeedSequence([seed & 0xFFFFFFFF, seed >> 32,
                                 experiment_key(experiment), group, chunk])
    return np.random.Generator(np.random.PCG64(ss))
