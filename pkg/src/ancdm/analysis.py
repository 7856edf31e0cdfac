"""BER theory for BPSK: SNR distribution, asymptotic and numeric BER, power split.

Notation follows the simulator: ``psi_s = p_s / N0`` per source,
``lam = p_s / p_r`` and ``psi_r' = (1 + lam) * psi_s / lam``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np
from scipy import integrate
from scipy.interpolate import PchipInterpolator
from scipy.special import erfc

from .errors import ConfigError, NumericFailure

EULER_GAMMA = 0.57721566490153286061

# --------------------------------------------------------------------------
# modified Bessel functions of the second kind, orders 0 and 1

_SERIES_MAX = 2.0
_SERIES_TERMS = 30
_TRAPZ_NODES = 64


def _check_positive(x):
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise ValueError("modified Bessel K is defined here for x > 0 only")
    return x


def _series_k0_k1(x):
    """Ascending series about 0, used for ``x <= 2``."""
    q = x * x / 4
    log_term = np.log(x / 2) + EULER_GAMMA
    term = np.ones_like(x)  # (x^2/4)^k / (k!)^2
    i0 = np.zeros_like(x)
    i1 = np.zeros_like(x)
    s0 = np.zeros_like(x)
    s1 = np.zeros_like(x)
    harmonic = 0.0
    for k in range(_SERIES_TERMS):
        if k:
            term = term * q / (k * k)
            harmonic += 1.0 / k
        i0 += term
        i1 += term / (k + 1)
        s0 += term * harmonic
        # psi(k+1) + psi(k+2) = 2 H_k + 1/(k+1) - 2 gamma
        s1 += term / (k + 1) * (2 * harmonic + 1.0 / (k + 1) - 2 * EULER_GAMMA)
    i1 *= x / 2
    k0 = -log_term * i0 + s0
    k1 = 1 / x + np.log(x / 2) * i1 - (x / 4) * s1
    return k0, k1


def _scaled_integral_k0_k1(x):
    """``exp(x) K_nu(x)`` from ``int_0^inf exp(-x (cosh t - 1)) cosh(nu t) dt``.

    The integrand is even and analytic, so the trapezoid rule converges
    geometrically. The grid is cut where the exponent reaches -40 and scales
    with the ``1/sqrt(x)`` width of the peak, so a fixed node count suffices.
    """
    t_max = np.arccosh(1 + 40.0 / x)
    u = np.linspace(0.0, 1.0, _TRAPZ_NODES)
    t = t_max[:, None] * u[None, :]
    h = t_max / (_TRAPZ_NODES - 1)
    f = np.exp(-x[:, None] * (np.cosh(t) - 1))
    w = np.ones(_TRAPZ_NODES)
    w[0] = w[-1] = 0.5
    k0e = h * (f @ w)
    k1e = h * ((f * np.cosh(t)) @ w)
    return k0e, k1e


def _bessel_k01e(x):
    x = _check_positive(x)
    flat = np.atleast_1d(x).ravel()
    k0e = np.empty_like(flat)
    k1e = np.empty_like(flat)
    small = flat <= _SERIES_MAX
    if small.any():
        xs = flat[small]
        k0, k1 = _series_k0_k1(xs)
        k0e[small] = k0 * np.exp(xs)
        k1e[small] = k1 * np.exp(xs)
    if (~small).any():
        k0e[~small], k1e[~small] = _scaled_integral_k0_k1(flat[~small])
    return k0e.reshape(x.shape), k1e.reshape(x.shape)


def bessel_k0e(x):
    """Exponentially scaled ``exp(x) * K0(x)``."""
    out = _bessel_k01e(x)[0]
    return out if out.ndim else float(out)


def bessel_k1e(x):
    out = _bessel_k01e(x)[1]
    return out if out.ndim else float(out)


def bessel_k0(x):
    """Modified Bessel function of the second kind, order 0, for ``x > 0``."""
    x = _check_positive(x)
    out = _bessel_k01e(x)[0] * np.exp(-x)
    return out if out.ndim else float(out)


def bessel_k1(x):
    """Modified Bessel function of the second kind, order 1, for ``x > 0``."""
    x = _check_positive(x)
    out = _bessel_k01e(x)[1] * np.exp(-x)
    return out if out.ndim else float(out)


def gaussian_q(x):
    """Gaussian tail probability ``Q(x) = 0.5 erfc(x / sqrt(2))``."""
    out = 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2))
    return out if out.ndim else float(out)


# --------------------------------------------------------------------------
# SNR distribution and BER


@dataclass(frozen=True)
class AsymptoticBerInput:
    lam: float
    psi_s: float

    def __post_init__(self):
        if not (self.lam > 0 and self.psi_s > 0):
            raise ConfigError("lambda and psi_s must be positive")

    @classmethod
    def from_db(cls, lam: float, psi_s_db: float) -> AsymptoticBerInput:
        return cls(lam, 10 ** (psi_s_db / 10))

    @property
    def psi_r(self) -> float:
        return self.psi_s / self.lam

    @property
    def psi_r_prime(self) -> float:
        return (1 + self.lam) * self.psi_r

    @property
    def decay_rate(self) -> float:
        """Exponential rate ``2(1+lam)(1/psi_s + 1/psi_r')`` shared by both PDF forms."""
        return 2 * (1 + self.lam) * (1 / self.psi_s + 1 / self.psi_r_prime)


def gamma_d_pdf(x, inp: AsymptoticBerInput):
    """Density of the differential-detection SNR (harmonic-mean form with K0/K1).

    At ``x = 0`` the value is the finite limit ``decay_rate``, since
    ``x K1(c x) -> 1/c`` and ``x K0(c x) -> 0``.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("SNR density is defined for x >= 0")
    ps, pr = inp.psi_s, inp.psi_r_prime
    root = math.sqrt(ps * pr)
    c = 4 * (1 + inp.lam) / root
    a = inp.decay_rate
    flat = np.atleast_1d(x).ravel()
    out = np.full(flat.shape, a)
    pos = flat > 0
    if pos.any():
        xp = flat[pos]
        k0e, k1e = _bessel_k01e(c * xp)
        pref = 8 * (1 + inp.lam) ** 2 * xp / (ps * pr)
        out[pos] = pref * np.exp(-(a + c) * xp) * ((ps + pr) / root * k1e + 2 * k0e)
    out = out.reshape(x.shape)
    return out if out.ndim else float(out)


def approx_pdf(x, inp: AsymptoticBerInput):
    """Small-argument exponential approximation of the SNR density."""
    a = inp.decay_rate
    return a * np.exp(-a * np.asarray(x, dtype=float))


def approx_cdf(x, inp: AsymptoticBerInput):
    return -np.expm1(-inp.decay_rate * np.asarray(x, dtype=float))


def _quad(f, a, b, what, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(f, a, b, limit=200, **kw)
        except integrate.IntegrationWarning as exc:
            raise NumericFailure(f"{what}: quadrature did not converge",
                                 {"interval": (a, b), "message": str(exc)}) from exc
    return val, err


# outer BER integral only sees x where exp(-x) is not negligible
_X_MAX = 60.0


@dataclass(frozen=True)
class SnrDistribution:
    """Density of ``gamma_d`` with a quadrature-built CDF cached on a grid."""

    params: AsymptoticBerInput
    grid_size: int = 300

    def pdf(self, x):
        return gamma_d_pdf(x, self.params)

    @cached_property
    def _cdf_table(self):
        scale = 1 / self.params.decay_rate
        lin = _X_MAX * np.linspace(0, 1, self.grid_size) ** 2
        # the geometric part follows the density out past its tail, wherever that lies
        geo = np.geomspace(scale * 1e-4, max(_X_MAX, 200 * scale), self.grid_size)
        nodes = np.unique(np.concatenate([lin, geo]))
        lo, width = nodes[:-1], np.diff(nodes)
        # all interval masses at once: each interval is mapped onto [0, 1]
        pieces, err, info = integrate.quad_vec(lambda t: width * self.pdf(lo + width * t), 0.0, 1.0,
                                               epsabs=1e-13, epsrel=1e-10, full_output=True)
        if not info.success:
            raise NumericFailure("SNR CDF: quadrature did not converge",
                                 {"error_estimate": err, "status": info.message})
        cdf = np.concatenate([[0.0], np.cumsum(pieces)])
        return nodes, np.minimum(cdf, 1.0)

    @cached_property
    def _cdf_interp(self):
        return PchipInterpolator(*self._cdf_table, extrapolate=False)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        nodes, values = self._cdf_table
        out = np.where(x >= nodes[-1], values[-1], self._cdf_interp(np.clip(x, 0, nodes[-1])))
        out = np.where(x <= 0, 0.0, out)
        return out if out.ndim else float(out)

    def mean(self) -> float:
        scale = 1 / self.params.decay_rate
        return _quad(lambda x: x * self.pdf(x), 0, np.inf, "SNR mean",
                     epsrel=1e-9)[0] if scale > 0 else 0.0


def ber_from_cdf(cdf: Callable[[float], float], epsrel: float = 1e-8) -> float:
    """``E[Q(sqrt(2X))]`` from the CDF of X.

    Integration by parts gives ``1/(2 sqrt(pi)) int_0^inf exp(-x) F(x) x^(-1/2) dx``;
    substituting ``x = u^2`` removes the endpoint singularity.
    """
    val, _ = _quad(lambda u: math.exp(-u * u) * float(cdf(u * u)), 0, math.sqrt(_X_MAX),
                   "BER integral", epsabs=0.0, epsrel=epsrel)
    return val / math.sqrt(math.pi)


def ber_numeric(inp: AsymptoticBerInput) -> float:
    """Exact BPSK BER under the ``gamma_d`` density, by nested quadrature."""
    return ber_from_cdf(SnrDistribution(inp).cdf, epsrel=1e-6)


def asymptotic_ber(inp: AsymptoticBerInput) -> float:
    """High-SNR BER ``(1 + lam)(1/psi_s + 1/psi_r') / 2``."""
    return (1 + inp.lam) * (1 / inp.psi_s + 1 / inp.psi_r_prime) / 2


def constrained_asymptotic_ber(lam, p: float, n0: float):
    """Asymptotic BER along ``2 p_s + p_r = p``: ``N0 (2 lam + 1)^2 / (2 p lam)``."""
    lam = np.asarray(lam, dtype=float)
    return n0 * (2 * lam + 1) ** 2 / (2 * p * lam)


def optimal_power(p: float) -> tuple[float, float]:
    """Minimizer of the asymptotic BER subject to ``2 p_s + p_r = p``.

    Setting the derivative of ``(2 lam + 1)^2 / lam`` to zero gives ``lam = 1/2``,
    i.e. the relay gets as much power as both sources together.
    """
    if not p > 0:
        raise ValueError(f"total power must be positive, got {p!r}")
    return p / 4, p / 2
