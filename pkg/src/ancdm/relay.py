"""Relay side: superposition at the relay, blind gain estimate, conjugate broadcast."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, NoiseModel, add_awgn
from .errors import ConfigError, DegenerateSignalError, FramingError


@dataclass(frozen=True)
class PowerProfile:
    """Transmit powers of S1, S2 and the relay.

    The analysis assumes ``p1 == p2 == p_s``; ``lam`` is then ``p_s / p_r``.
    """

    p1: float
    p2: float
    p_r: float

    def __post_init__(self):
        if min(self.p1, self.p2, self.p_r) <= 0:
            raise ConfigError("all transmit powers must be strictly positive")

    @classmethod
    def symmetric(cls, p_s: float, p_r: float) -> PowerProfile:
        return cls(p_s, p_s, p_r)

    @classmethod
    def equal(cls, p: float = 3.0) -> PowerProfile:
        return cls.symmetric(p / 3, p / 3)

    @classmethod
    def optimal(cls, p: float = 3.0) -> PowerProfile:
        from .analysis import optimal_power

        return cls.symmetric(*optimal_power(p))

    @classmethod
    def from_lambda(cls, lam: float, p: float = 3.0) -> PowerProfile:
        """Split ``p`` so that ``2 p_s + p_r = p`` and ``p_s = lam * p_r``."""
        if lam <= 0 or p <= 0:
            raise ConfigError("lambda and total power must be positive")
        p_r = p / (2 * lam + 1)
        return cls.symmetric(lam * p_r, p_r)

    @property
    def p_s(self) -> float:
        return self.p1

    @property
    def total(self) -> float:
        return self.p1 + self.p2 + self.p_r

    @property
    def lam(self) -> float:
        return self.p_s / self.p_r

    def psi_s(self, n0: float) -> float:
        return self.p_s / n0

    def psi_r(self, n0: float) -> float:
        return self.p_r / n0

    def psi_r_prime(self, n0: float) -> float:
        return (1 + self.lam) * self.psi_r(n0)


def true_beta(ch: ChannelRealization, pw: PowerProfile, noise: NoiseModel):
    """Exact normalization ``(p1|h1|^2 + p2|h2|^2 + N0)^(-1/2)``."""
    return 1 / np.sqrt(pw.p1 * np.abs(ch.h1) ** 2 + pw.p2 * np.abs(ch.h2) ** 2 + noise.n0)


def estimate_beta(y_r) -> np.ndarray | float:
    """Blind gain: reciprocal root of the average received power over the frame."""
    y = np.asarray(y_r)
    if y.shape[-1] < 1:
        raise FramingError("need at least one received sample")
    power = np.mean(np.abs(y) ** 2, axis=-1)
    if np.any(power == 0):
        raise DegenerateSignalError("received frame has zero energy")
    return 1 / np.sqrt(power)


def relay_broadcast(y_r, beta) -> np.ndarray:
    """Amplify and conjugate: ``x_r(t) = beta * conj(y_r(t))``."""
    return np.asarray(beta)[..., None] * np.conj(y_r)


@dataclass(frozen=True)
class RelayFrame:
    y_r: np.ndarray
    beta_true: np.ndarray | float
    beta_hat: np.ndarray | float

    @property
    def x_r(self) -> np.ndarray:
        return relay_broadcast(self.y_r, self.beta_hat)


def relay_receive(s1, s2, ch: ChannelRealization, pw: PowerProfile, noise: NoiseModel,
                  stream: np.random.Generator | None) -> RelayFrame:
    """Multiple-access phase; ``stream=None`` gives a noiseless frame."""
    s1 = np.asarray(s1)
    s2 = np.asarray(s2)
    if s1.shape != s2.shape:
        raise FramingError(f"source frames differ in shape: {s1.shape} vs {s2.shape}")
    h1 = np.asarray(ch.h1)[..., None]
    h2 = np.asarray(ch.h2)[..., None]
    y_r = np.sqrt(pw.p1) * h1 * s1 + np.sqrt(pw.p2) * h2 * s2
    if stream is not None:
        y_r = add_awgn(y_r, noise, stream)
    return RelayFrame(y_r, true_beta(ch, pw, noise), estimate_beta(y_r))
