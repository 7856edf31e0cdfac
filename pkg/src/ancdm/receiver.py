"""Source-side processing after the broadcast phase.

A source removes the copy of its own signal from the relay broadcast and then
detects the partner's data, either differentially (no CSI) or with one of the
two benchmark receivers. Everything here works on one frame or a batch of
frames stacked along the leading axis.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, NoiseModel, add_awgn
from .errors import ConfigError, FramingError
from .modem import Constellation, count_bit_errors, nearest_indices
from .relay import PowerProfile


@dataclass(frozen=True)
class CancellationEstimate:
    delta: np.ndarray | float
    mu_hat: np.ndarray | float
    nu_sq_hat: np.ndarray | float


@dataclass(frozen=True)
class DetectionReport:
    decoded_indices: np.ndarray
    bit_errors: int | None = None
    gamma_d: np.ndarray | float | None = None
    gamma_c: np.ndarray | float | None = None


def _links(ch: ChannelRealization, node: int):
    if node == 1:
        return np.asarray(ch.h1), np.asarray(ch.h2)
    if node == 2:
        return np.asarray(ch.h2), np.asarray(ch.h1)
    raise ValueError(f"node must be 1 or 2, got {node!r}")


def effective_gains(ch: ChannelRealization, pw: PowerProfile, beta, node: int = 1):
    """``(mu, nu)`` seen at ``node`` when the relay applied gain ``beta``.

    ``mu = beta sqrt(p_own p_r) |h_own|^2`` is real and positive because the
    relay broadcasts the conjugate of what it heard.
    """
    h_own, h_other = _links(ch, node)
    p_own, p_other = (pw.p1, pw.p2) if node == 1 else (pw.p2, pw.p1)
    mu = beta * np.sqrt(p_own * pw.p_r) * np.abs(h_own) ** 2
    nu = beta * np.sqrt(p_other * pw.p_r) * h_own * np.conj(h_other)
    return mu, nu


def source_receive(x_r, ch: ChannelRealization, pw: PowerProfile, noise: NoiseModel,
                   stream: np.random.Generator | None, node: int = 1) -> np.ndarray:
    """``y(t) = sqrt(p_r) h_own x_r(t) + n(t)``; ``stream=None`` skips the noise."""
    h_own, _ = _links(ch, node)
    y = np.sqrt(pw.p_r) * h_own[..., None] * np.asarray(x_r)
    if stream is not None:
        y = add_awgn(y, noise, stream)
    return y


def noise_variance(ch: ChannelRealization, pw: PowerProfile, noise: NoiseModel, beta, node: int = 1):
    """Variance of the effective noise ``beta sqrt(p_r) h_own n_r* + n_own``."""
    h_own, _ = _links(ch, node)
    return beta**2 * pw.p_r * noise.n0 * np.abs(h_own) ** 2 + noise.n0


def build_difference_sequence(y, own_c) -> np.ndarray:
    """``conj(c(t)) y(t-1) - y(t)`` for ``t = 2..L``; removes the own-signal term.

    ``own_c`` holds the ``L-1`` differential multipliers the node transmitted.
    """
    y = np.asarray(y)
    if y.shape[-1] < 2:
        raise FramingError("difference sequence needs a frame of at least 2 samples")
    own_c = np.asarray(own_c)
    if own_c.shape[-1] != y.shape[-1] - 1:
        raise FramingError(f"expected {y.shape[-1] - 1} multipliers, got {own_c.shape[-1]}")
    return np.conj(own_c) * y[..., :-1] - y[..., 1:]


def estimate_cancellation(y, y_tilde, diff_pw: float) -> CancellationEstimate:
    """Blind estimate of the self-interference gain from frame energies.

    ``diff_pw`` is ``E|s2|^2 * E|c1 - c2|^2``. The partner energy is averaged
    over the ``L-1`` difference samples.
    """
    if not diff_pw > 0:
        raise ConfigError(f"difference power must be positive, got {diff_pw!r}")
    y = np.asarray(y)
    y_tilde = np.asarray(y_tilde)
    nu_sq = np.mean(np.abs(y_tilde) ** 2, axis=-1) / diff_pw
    delta = np.mean(np.abs(y) ** 2, axis=-1) - nu_sq
    mu_hat = np.sqrt(np.maximum(delta, 0.0))
    return CancellationEstimate(delta, mu_hat, nu_sq)


def cancel_self(y, mu, own_s) -> np.ndarray:
    return np.asarray(y) - np.asarray(mu)[..., None] * np.conj(own_s)


def _report(decoded, truth, constellation):
    errors = None if truth is None else count_bit_errors(decoded, truth, constellation)
    return DetectionReport(decoded, errors)


def differential_detect(y, mu_hat, own_s, constellation: Constellation, truth=None) -> DetectionReport:
    """Subtract ``mu_hat * conj(own_s)`` and detect the partner's multipliers.

    Decision per symbol: the alphabet point ``c`` maximizing
    ``Re{y'(t) conj(y'(t-1)) c}``. ``constellation`` is the partner's alphabet,
    rotation included.
    """
    yp = cancel_self(y, mu_hat, own_s)
    z = yp[..., 1:] * np.conj(yp[..., :-1])
    decoded = nearest_indices(np.conj(z), constellation)
    return _report(decoded, truth, constellation)


def genie_detect(y, mu_true, own_s, constellation: Constellation, truth=None) -> DetectionReport:
    return differential_detect(y, mu_true, own_s, constellation, truth)


def coherent_detect(y, ch: ChannelRealization, pw: PowerProfile, beta, own_s, partner_s,
                    constellation: Constellation, truth=None, node: int = 1) -> DetectionReport:
    """Benchmark with full CSI and the partner's previous symbol known.

    The phase reference ``nu * conj(s_partner(t-1))`` is exact, so the only
    impairment left is the single noise sample ``w(t)``.
    """
    mu, nu = effective_gains(ch, pw, beta, node)
    yp = cancel_self(y, mu, own_s)
    ref = np.asarray(nu)[..., None] * np.conj(np.asarray(partner_s)[..., :-1])
    z = yp[..., 1:] * np.conj(ref)
    decoded = nearest_indices(np.conj(z), constellation)
    return _report(decoded, truth, constellation)


def instantaneous_snrs(ch: ChannelRealization, pw: PowerProfile, noise: NoiseModel, node: int = 1):
    """Post-cancellation SNRs ``(gamma_d, gamma_c)`` with ``gamma_d = gamma_c / 2``."""
    h_own, h_other = _links(ch, node)
    psi_own, psi_other = (pw.p1, pw.p2) if node == 1 else (pw.p2, pw.p1)
    psi_own, psi_other, psi_r = psi_own / noise.n0, psi_other / noise.n0, pw.p_r / noise.n0
    a = np.abs(h_own) ** 2
    b = np.abs(h_other) ** 2
    gamma_c = psi_other * psi_r * a * b / ((psi_own + psi_r) * a + psi_other * b + 1)
    return gamma_c / 2, gamma_c
