"""M-PSK alphabets, differential encoding/decoding and Gray bit mapping.

Symbol arrays may carry any number of leading batch axes; the time axis is
always the last one.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import FramingError, InvalidConstellationError, InvalidSymbolError


def _gray(n: np.ndarray) -> np.ndarray:
    return n ^ (n >> 1)


@dataclass(frozen=True)
class Constellation:
    """Unit-power M-PSK alphabet, point ``k`` is ``exp(j(2*pi*k/M - rotation))``.

    Index ``k`` carries the Gray label ``k ^ (k >> 1)`` so that neighbouring
    phases differ in a single bit.
    """

    order: int
    rotation: float = 0.0
    points: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        M = self.order
        if not isinstance(M, (int, np.integer)) or M < 2 or (M & (M - 1)):
            raise InvalidConstellationError(f"order must be a power of two >= 2, got {M!r}")
        k = np.arange(M)
        pts = np.exp(1j * (2 * np.pi * k / M - self.rotation))
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def bits_per_symbol(self) -> int:
        return int(self.order).bit_length() - 1

    @property
    def effective_rotation(self) -> float:
        """Rotation reduced modulo the PSK symmetry to ``[-pi/M, pi/M]``."""
        step = 2 * np.pi / self.order
        r = float(np.remainder(self.rotation + step / 2, step) - step / 2)
        return r

    @cached_property
    def labels(self) -> np.ndarray:
        return _gray(np.arange(self.order))

    @cached_property
    def label_to_index(self) -> np.ndarray:
        inv = np.empty(self.order, dtype=np.int64)
        inv[self.labels] = np.arange(self.order)
        return inv

    @cached_property
    def bit_distance(self) -> np.ndarray:
        """``(M, M)`` table of Hamming distances between index labels."""
        x = self.labels[:, None] ^ self.labels[None, :]
        out = np.zeros_like(x)
        for b in range(self.bits_per_symbol):
            out += (x >> b) & 1
        return out

    def __getitem__(self, idx):
        return self.points[idx]


def make_constellation(order: int, rotation: float = 0.0) -> Constellation:
    return Constellation(order, float(rotation))


def _check_indices(indices, constellation: Constellation) -> np.ndarray:
    idx = np.asarray(indices)
    if idx.size and (not np.issubdtype(idx.dtype, np.integer)
                     or idx.min() < 0 or idx.max() >= constellation.order):
        raise InvalidSymbolError(f"indices must be integers in [0, {constellation.order})")
    return idx.astype(np.int64, copy=False)


def diff_encode(info, constellation: Constellation, reference: complex | None = None) -> np.ndarray:
    """Differentially encode ``L-1`` alphabet indices into ``L`` transmit symbols.

    ``out[..., 0]`` is the reference symbol and ``out[..., t] = out[..., t-1] * c(t)``.
    The reference defaults to the alphabet's index-0 point.
    """
    idx = _check_indices(info, constellation)
    if reference is None:
        reference = constellation.points[0]
    if not np.isclose(abs(reference), 1.0, atol=1e-12):
        raise InvalidSymbolError("reference symbol must have unit modulus")
    c = constellation.points[idx]
    # cumulative product of unit phasors; summing angles keeps |s| == 1 exactly
    phase = np.cumsum(np.angle(c), axis=-1)
    head = np.full(idx.shape[:-1] + (1,), reference, dtype=complex)
    return np.concatenate([head, reference * np.exp(1j * phase)], axis=-1)


def diff_decode_noiseless(symbols) -> np.ndarray:
    """Recover the multipliers ``c(t) = s(t) * conj(s(t-1))`` for ``t >= 2``."""
    s = np.asarray(symbols)
    return s[..., 1:] * np.conj(s[..., :-1])


def nearest_indices(values, constellation: Constellation) -> np.ndarray:
    """Index of the alphabet point maximizing ``Re{v * conj(point)}``."""
    v = np.asarray(values)
    return np.argmax((v[..., None] * np.conj(constellation.points)).real, axis=-1)


def diff_power(const_a: Constellation, const_b: Constellation) -> float:
    """E|c1 - c2|^2 for independent uniform draws, by exhaustive enumeration."""
    d = const_a.points[:, None] - const_b.points[None, :]
    return float(np.mean(np.abs(d) ** 2))


def min_distance(const_a: Constellation, const_b: Constellation) -> float:
    return float(np.min(np.abs(const_a.points[:, None] - const_b.points[None, :])))


def bits_to_indices(bits, constellation: Constellation) -> np.ndarray:
    """Map a flat bit sequence (MSB first per symbol) to alphabet indices."""
    b = np.asarray(bits, dtype=np.int64).ravel()
    k = constellation.bits_per_symbol
    if b.size % k:
        raise FramingError(f"{b.size} bits is not a multiple of {k} bits per symbol")
    if b.size and (b.min() < 0 or b.max() > 1):
        raise FramingError("bits must be 0 or 1")
    words = b.reshape(-1, k) @ (1 << np.arange(k - 1, -1, -1))
    return constellation.label_to_index[words]


def indices_to_bits(indices, constellation: Constellation) -> np.ndarray:
    idx = _check_indices(indices, constellation).ravel()
    k = constellation.bits_per_symbol
    labels = constellation.labels[idx]
    shifts = np.arange(k - 1, -1, -1)
    return ((labels[:, None] >> shifts) & 1).ravel()


def count_bit_errors(decoded, truth, constellation: Constellation) -> int:
    d = np.asarray(decoded)
    t = np.asarray(truth)
    return int(constellation.bit_distance[d, t].sum())
