"""Monte Carlo experiments and analytic tables, all emitted as CSV rows.

Frames are simulated in chunks. Chunk ``i`` of a point draws from its own
generator keyed by (seed, experiment, group, i), and chunks are reduced in
index order, so every table is identical for any worker count.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np
import yaml

from . import analysis
from .channel import NoiseModel, draw_channel, substream
from .errors import ConfigError
from .modem import Constellation, diff_encode, diff_power, make_constellation
from .receiver import (build_difference_sequence, coherent_detect, differential_detect,
                       effective_gains, estimate_cancellation, genie_detect, source_receive)
from .relay import PowerProfile, relay_receive

EXPERIMENTS = ("ber-sweep", "lambda-sweep", "mse-mu", "analytic", "power-opt", "rotation")
DETECTORS = ("differential", "genie", "coherent")
POWER_MODES = ("equal", "optimal", "custom")
CSV_COLUMNS = ("experiment", "detector", "psi_s_db", "lambda", "n0", "p_s", "p_r",
               "bits", "errors", "ber", "ci95", "truncated")

# chunk k holds min(_CHUNK_BASE * 2**k, _CHUNK_CAP) frames
_CHUNK_BASE = 50
_CHUNK_CAP = 1600


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str = "ber-sweep"
    detectors: tuple[str, ...] = ("differential",)
    modulation_order: int = 2
    rotation: float = 0.0
    frame_length: int = 100
    power_mode: str = "equal"
    total_power: float = 3.0
    p_s: float | None = None
    p_r: float | None = None
    snr_grid_db: tuple[float, ...] = tuple(range(0, 45, 5))
    min_errors: int = 200
    max_bits: int = 20_000_000
    seed: int = 0
    lambda_grid: tuple[float, ...] = (0.125, 0.25, 0.5, 1.0, 2.0, 4.0)
    n0_list: tuple[float, ...] = (1e-2, 1e-3)
    frames: int = 10_000
    common_random_numbers: bool = False
    both_directions: bool = False

    def __post_init__(self):
        for name in ("detectors", "snr_grid_db", "lambda_grid", "n0_list"):
            value = getattr(self, name)
            if isinstance(value, (str, int, float)):
                value = (value,)
            object.__setattr__(self, name, tuple(value))
        self.validate()

    def validate(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}")
        bad = set(self.detectors) - set(DETECTORS)
        if bad or not self.detectors:
            raise ConfigError(f"detectors must be a nonempty subset of {DETECTORS}")
        if self.power_mode not in POWER_MODES:
            raise ConfigError(f"power_mode must be one of {POWER_MODES}")
        if self.frame_length < 2:
            raise ConfigError("frame_length must be at least 2")
        grid = np.asarray(self.snr_grid_db, dtype=float)
        if grid.size == 0 or np.any(np.diff(grid) <= 0):
            raise ConfigError("snr_grid_db must be nonempty and strictly increasing")
        if self.total_power <= 0 or self.min_errors < 0 or self.max_bits <= 0 or self.frames <= 0:
            raise ConfigError("total_power, max_bits and frames must be positive")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if any(lam <= 0 for lam in self.lambda_grid) or any(n0 <= 0 for n0 in self.n0_list):
            raise ConfigError("lambda_grid and n0_list entries must be positive")
        if self.power_mode == "custom":
            if self.p_s is None or self.p_r is None:
                raise ConfigError("custom power_mode needs p_s and p_r")
            if not math.isclose(2 * self.p_s + self.p_r, self.total_power, rel_tol=1e-9):
                raise ConfigError("custom powers violate 2*p_s + p_r = total_power")
        # constructing the alphabet validates the order
        try:
            make_constellation(self.modulation_order)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def power_profile(self) -> PowerProfile:
        p = self.total_power
        if self.power_mode == "equal":
            return PowerProfile.equal(p)
        if self.power_mode == "optimal":
            return PowerProfile.optimal(p)
        return PowerProfile.symmetric(self.p_s, self.p_r)


def load_config(path, **overrides) -> ExperimentConfig:
    """Read a flat YAML mapping; unknown keys are rejected."""
    try:
        data = yaml.safe_load(Path(path).read_text()) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return config_from_mapping(data, **overrides)


def config_from_mapping(data, **overrides) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a flat key-value mapping")
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key, value in data.items():
        if isinstance(value, dict):
            raise ConfigError(f"config key {key!r} must not be nested")
    merged = {**data, **{k: v for k, v in overrides.items() if v is not None}}
    try:
        return ExperimentConfig(**merged)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


@dataclass
class BerPoint:
    """One CSV row. Non-BER tables reuse the columns, see the README."""

    experiment: str
    detector: str
    psi_s_db: float
    lam: float
    n0: float
    p_s: float
    p_r: float
    bits: int = 0
    errors: int = 0
    ber: float = 0.0
    ci95_halfwidth: float = 0.0
    truncated: bool = False


def ci95(errors: int, bits: int) -> float:
    if bits == 0:
        return 0.0
    p = errors / bits
    return 1.96 * math.sqrt(p * (1 - p) / bits)


# --------------------------------------------------------------------------
# frame-level simulation


@dataclass(frozen=True)
class Link:
    """Everything that is fixed across the frames of one operating point."""

    const1: Constellation
    const2: Constellation
    power: PowerProfile
    n0: float
    frame_length: int
    detectors: tuple[str, ...]
    both_directions: bool = False

    @property
    def bits_per_frame(self) -> int:
        return (self.frame_length - 1) * self.const2.bits_per_symbol


def _detect(node, y, info_own, info_other, s_own, s_other, own_const, other_const,
            ch, pw, beta, detectors, dp):
    out = {}
    ytil = build_difference_sequence(y, own_const.points[info_own])
    est = estimate_cancellation(y, ytil, dp)
    mu, _ = effective_gains(ch, pw, beta, node)
    if "differential" in detectors:
        out["differential"] = differential_detect(y, est.mu_hat, s_own, other_const, info_other).bit_errors
    if "genie" in detectors:
        out["genie"] = genie_detect(y, mu, s_own, other_const, info_other).bit_errors
    if "coherent" in detectors:
        out["coherent"] = coherent_detect(y, ch, pw, beta, s_own, s_other, other_const,
                                          info_other, node).bit_errors
    return out, mu, est


def simulate_frames(link: Link, rng: np.random.Generator, frames: int) -> dict:
    """Run ``frames`` independent frames end to end.

    Returns bit-error counts keyed by detector (``"<det>-s2"`` for the S2 side),
    plus the true and estimated self-interference gains seen at S1.
    """
    L, c1, c2, pw = link.frame_length, link.const1, link.const2, link.power
    noise = NoiseModel(link.n0)
    info1 = rng.integers(c1.order, size=(frames, L - 1))
    info2 = rng.integers(c2.order, size=(frames, L - 1))
    s1 = diff_encode(info1, c1)
    s2 = diff_encode(info2, c2)
    ch = draw_channel(rng, frames)
    rf = relay_receive(s1, s2, ch, pw, noise, rng)
    x_r = rf.x_r
    dp = diff_power(c1, c2)
    y1 = source_receive(x_r, ch, pw, noise, rng, node=1)
    errors, mu, est = _detect(1, y1, info1, info2, s1, s2, c1, c2, ch, pw, rf.beta_hat,
                              link.detectors, dp)
    if link.both_directions:
        y2 = source_receive(x_r, ch, pw, noise, rng, node=2)
        e2, _, _ = _detect(2, y2, info2, info1, s2, s1, c2, c1, ch, pw, rf.beta_hat,
                           link.detectors, dp)
        errors.update({f"{k}-s2": v for k, v in e2.items()})
    return {"errors": errors, "mu": mu, "mu_hat": est.mu_hat}


def chunk_frames(k: int) -> int:
    return min(_CHUNK_BASE << min(k, 16), _CHUNK_CAP)


def _chunk_task(args):
    link, seed, experiment, group, k = args
    rng = substream(seed, experiment, group, k)
    frames = chunk_frames(k)
    return frames, simulate_frames(link, rng, frames)["errors"]


class _Runner:
    """Maps chunk tasks serially or onto a process pool."""

    def __init__(self, workers: int = 1):
        self.workers = max(1, int(workers))
        self._pool = ProcessPoolExecutor(self.workers) if self.workers > 1 else None

    def map(self, fn, tasks):
        if self._pool is None:
            return [fn(t) for t in tasks]
        return list(self._pool.map(fn, tasks))

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def simulate_point(link: Link, cfg: ExperimentConfig, group: int, runner: _Runner):
    """Simulate chunks until every detector has ``min_errors`` or ``max_bits`` is hit.

    Returns ``(bits, errors_by_detector, truncated)``.
    """
    bits = 0
    totals: dict[str, int] = {}
    k = 0
    while True:
        tasks = [(link, cfg.seed, cfg.experiment, group, k + i) for i in range(runner.workers)]
        for frames, errs in runner.map(_chunk_task, tasks):
            bits += frames * link.bits_per_frame
            for det, e in errs.items():
                totals[det] = totals.get(det, 0) + e
            k += 1
            if min(totals.values()) >= cfg.min_errors:
                return bits, totals, False
            if bits >= cfg.max_bits:
                return bits, totals, True


def _group(cfg: ExperimentConfig, index: int) -> int:
    return 0 if cfg.common_random_numbers else index


def _constellations(cfg: ExperimentConfig, rotation: float | None = None):
    rot = cfg.rotation if rotation is None else rotation
    return make_constellation(cfg.modulation_order), make_constellation(cfg.modulation_order, rot)


def _ber_rows(cfg, label_suffix, link, psi_s_db, lam, bits, totals):
    rows = []
    for det in sorted(totals, key=lambda d: (d.endswith("-s2"), DETECTORS.index(d.split("-")[0]))):
        e = totals[det]
        rows.append(BerPoint(cfg.experiment, det + label_suffix, psi_s_db, lam, link.n0,
                             link.power.p_s, link.power.p_r, bits, e, e / bits, ci95(e, bits),
                             e < cfg.min_errors))
    return rows


def _sweep(cfg: ExperimentConfig, power: PowerProfile, runner: _Runner, rotation=None,
           label_suffix: str = "") -> list[BerPoint]:
    c1, c2 = _constellations(cfg, rotation)
    rows = []
    for i, db in enumerate(cfg.snr_grid_db):
        n0 = power.p_s / 10 ** (db / 10)
        link = Link(c1, c2, power, n0, cfg.frame_length, cfg.detectors, cfg.both_directions)
        bits, totals, _ = simulate_point(link, cfg, _group(cfg, i), runner)
        rows += _ber_rows(cfg, label_suffix, link, float(db), power.lam, bits, totals)
    return rows


def run_ber_sweep(cfg: ExperimentConfig, workers: int = 1) -> list[BerPoint]:
    """BER against ``psi_s = p_s / N0`` (dB) for the configured detectors."""
    with _Runner(workers) as runner:
        return _sweep(cfg, cfg.power_profile(), runner)


def run_power_opt(cfg: ExperimentConfig, workers: int = 1) -> list[BerPoint]:
    """Differential BER under equal, optimal and source-heavy (0.4p, 0.2p) splits.

    All three allocations reuse the same random draws point by point.
    """
    p = cfg.total_power
    profiles = [PowerProfile.equal(p), PowerProfile.optimal(p), PowerProfile.symmetric(0.4 * p, 0.2 * p)]
    with _Runner(workers) as runner:
        return [row for pw in profiles for row in _sweep(cfg, pw, runner)]


def run_rotation_compare(cfg: ExperimentConfig, workers: int = 1) -> list[BerPoint]:
    """Same sweep with S2's alphabet unrotated and rotated.

    The rotation is ``cfg.rotation`` or ``pi / M`` when that is zero.
    """
    rot = cfg.rotation or math.pi / cfg.modulation_order
    with _Runner(workers) as runner:
        return _sweep(cfg, cfg.power_profile(), runner, 0.0) + \
            _sweep(cfg, cfg.power_profile(), runner, rot, "-rotated")


def run_lambda_sweep(cfg: ExperimentConfig, lambda_grid=None, n0_list=None,
                     workers: int = 1) -> list[BerPoint]:
    """Simulated and asymptotic BER over ``lam = p_s / p_r`` with ``2 p_s + p_r = p``.

    For each N0 every lambda shares the same random draws.
    """
    lambda_grid = cfg.lambda_grid if lambda_grid is None else tuple(lambda_grid)
    n0_list = cfg.n0_list if n0_list is None else tuple(n0_list)
    c1, c2 = _constellations(cfg)
    rows = []
    with _Runner(workers) as runner:
        for j, n0 in enumerate(n0_list):
            for lam in lambda_grid:
                pw = PowerProfile.from_lambda(lam, cfg.total_power)
                db = 10 * math.log10(pw.p_s / n0)
                link = Link(c1, c2, pw, n0, cfg.frame_length, cfg.detectors, cfg.both_directions)
                bits, totals, _ = simulate_point(link, cfg, _group(cfg, j), runner)
                rows += _ber_rows(cfg, "", link, db, lam, bits, totals)
                asym = float(analysis.constrained_asymptotic_ber(lam, cfg.total_power, n0))
                rows.append(BerPoint(cfg.experiment, "asymptotic", db, lam, n0, pw.p_s, pw.p_r,
                                     ber=asym))
    return rows


def measure_mu_mse(link: Link, cfg: ExperimentConfig, group: int, frames: int):
    """Normalized MSE ``mean((mu - mu_hat)^2) / mean(mu)`` over ``frames`` frames.

    Returns ``(nmse, ci95, zero_count)``; ``zero_count`` counts frames where the
    energy difference was not positive and the estimate was clamped to 0.
    """
    sq_err = []
    mus = []
    zeros = 0
    k = done = 0
    while done < frames:
        n = min(chunk_frames(k), frames - done)
        out = simulate_frames(link, substream(cfg.seed, cfg.experiment, group, k), n)
        sq_err.append((out["mu"] - out["mu_hat"]) ** 2)
        mus.append(out["mu"])
        zeros += int(np.sum(out["mu_hat"] == 0))
        done += n
        k += 1
    sq_err = np.concatenate(sq_err)
    mean_mu = np.mean(np.concatenate(mus))
    nmse = float(np.mean(sq_err) / mean_mu)
    half = float(1.96 * np.std(sq_err) / math.sqrt(sq_err.size) / mean_mu)
    return nmse, half, zeros


def run_mse_mu(cfg: ExperimentConfig, workers: int = 1) -> list[BerPoint]:
    """Per SNR point: normalized MSE of the blind self-interference estimate.

    Row layout: ``bits`` = frames, ``errors`` = frames clamped to zero,
    ``ber`` = normalized MSE, ``ci95`` = its 95% half-width.
    """
    pw = cfg.power_profile()
    c1, c2 = _constellations(cfg)
    rows = []
    for i, db in enumerate(cfg.snr_grid_db):
        n0 = pw.p_s / 10 ** (db / 10)
        link = Link(c1, c2, pw, n0, cfg.frame_length, ("differential",))
        nmse, half, zeros = measure_mu_mse(link, cfg, _group(cfg, i), cfg.frames)
        rows.append(BerPoint(cfg.experiment, "mu-nmse", float(db), pw.lam, n0, pw.p_s, pw.p_r,
                             cfg.frames, zeros, nmse, half, False))
    return rows


def emit_analytic(cfg: ExperimentConfig, workers: int = 1) -> list[BerPoint]:
    """Asymptotic and quadrature BER over the grid, plus the optimal split row."""
    pw = cfg.power_profile()
    rows = []
    for db in cfg.snr_grid_db:
        inp = analysis.AsymptoticBerInput.from_db(pw.lam, db)
        n0 = pw.p_s / inp.psi_s
        for tag, value in (("asymptotic", analysis.asymptotic_ber(inp)),
                           ("numeric", analysis.ber_numeric(inp))):
            rows.append(BerPoint(cfg.experiment, tag, float(db), pw.lam, n0, pw.p_s, pw.p_r,
                                 ber=value))
    p_s, p_r = analysis.optimal_power(cfg.total_power)
    rows.append(BerPoint(cfg.experiment, "optimal-power", math.nan, p_s / p_r, math.nan, p_s, p_r))
    return rows


RUNNERS = {
    "ber-sweep": run_ber_sweep,
    "lambda-sweep": run_lambda_sweep,
    "mse-mu": run_mse_mu,
    "analytic": emit_analytic,
    "power-opt": run_power_opt,
    "rotation": run_rotation_compare,
}


def run(cfg: ExperimentConfig, workers: int = 1) -> list[BerPoint]:
    return RUNNERS[cfg.experiment](cfg, workers=workers)


# --------------------------------------------------------------------------
# CSV


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.9g}"


def format_rows(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow([r.experiment, r.detector] + [_fmt(v) for v in (
            r.psi_s_db, r.lam, r.n0, r.p_s, r.p_r, r.bits, r.errors, r.ber,
            r.ci95_halfwidth, r.truncated)])
    return buf.getvalue()


def write_csv(rows, path=None) -> str:
    text = format_rows(rows)
    if path is not None:
        Path(path).write_text(text)
    return text


def read_csv(path_or_text) -> list[dict]:
    text = path_or_text
    if isinstance(path_or_text, Path) or "\n" not in str(path_or_text):
        text = Path(path_or_text).read_text()
    return list(csv.DictReader(io.StringIO(text)))
