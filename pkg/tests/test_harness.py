import math

import numpy as np
import pytest

from ancdm import analysis, cli
from ancdm.errors import ConfigError, NumericFailure
from ancdm.harness import (CSV_COLUMNS, BerPoint, ExperimentConfig, ci95, config_from_mapping,
                           format_rows, load_config, read_csv, run, run_ber_sweep,
                           run_lambda_sweep, run_mse_mu)

HEADER = "experiment,detector,psi_s_db,lambda,n0,p_s,p_r,bits,errors,ber,ci95,truncated"


def small(**kw):
    base = dict(snr_grid_db=(0, 10, 20), min_errors=50, max_bits=2_000_000)
    return ExperimentConfig(**{**base, **kw})


# ---------------------------------------------------------------- config

@pytest.mark.parametrize("bad", [
    dict(experiment="nope"),
    dict(detectors=("differential", "magic")),
    dict(detectors=()),
    dict(power_mode="heavy"),
    dict(frame_length=1),
    dict(snr_grid_db=(10, 5)),
    dict(snr_grid_db=()),
    dict(seed=-1),
    dict(seed=2**64),
    dict(modulation_order=3),
    dict(power_mode="custom", p_s=1.0),
    dict(power_mode="custom", p_s=1.0, p_r=2.0),
    dict(lambda_grid=(0.5, -1.0)),
])
def test_config_rejects_invalid(bad):
    with pytest.raises(ConfigError):
        ExperimentConfig(**bad)


def test_power_modes():
    assert ExperimentConfig(power_mode="optimal").power_profile().p_s == 0.75
    eq = ExperimentConfig().power_profile()
    assert (eq.p_s, eq.p_r) == (1.0, 1.0)
    cu = ExperimentConfig(power_mode="custom", p_s=1.2, p_r=0.6).power_profile()
    assert 2 * cu.p_s + cu.p_r == pytest.approx(3.0)


def test_config_mapping_rejects_unknown_and_nested():
    with pytest.raises(ConfigError):
        config_from_mapping({"frame_lenght": 100})
    with pytest.raises(ConfigError):
        config_from_mapping({"frame_length": {"value": 100}})
    with pytest.raises(ConfigError):
        config_from_mapping(["frame_length"])


def test_load_config_yaml(tmp_path):
    path = tmp_path / "cfg.yaml"
    path.write_text("experiment: mse-mu\nsnr_grid_db: [5, 10]\nframe_length: 40\nseed: 9\n")
    cfg = load_config(path, seed=11)
    assert cfg.experiment == "mse-mu"
    assert cfg.snr_grid_db == (5, 10)
    assert cfg.frame_length == 40
    assert cfg.seed == 11
    assert load_config(path).seed == 9
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.yaml")


# ---------------------------------------------------------------- CSV

def test_csv_header_and_precision():
    row = BerPoint("ber-sweep", "differential", 12.5, 1.0, 1 / 3, 1.0, 1.0, 990, 7, 7 / 990,
                   ci95(7, 990), True)
    text = format_rows([row])
    lines = text.splitlines()
    assert lines[0] == HEADER
    assert ",".join(CSV_COLUMNS) == HEADER
    fields = lines[1].split(",")
    assert fields[4] == "0.333333333"
    assert fields[7:9] == ["990", "7"]
    assert fields[9] == "0.00707070707"
    assert fields[-1] == "1"


def test_ci95_binomial():
    assert ci95(0, 0) == 0.0
    assert ci95(100, 10_000) == pytest.approx(1.96 * math.sqrt(0.01 * 0.99 / 1e4))


def test_read_csv_roundtrip(tmp_path):
    cfg = ExperimentConfig(experiment="analytic", snr_grid_db=(10, 20))
    path = tmp_path / "out.csv"
    cli.main(["analytic", "--out", str(path)])
    rows = read_csv(path)
    assert [r["detector"] for r in rows[:2]] == ["asymptotic", "numeric"]
    assert len(read_csv(format_rows(run(cfg)))) == 5


# ---------------------------------------------------------------- sweeps

def test_byte_identical_across_worker_counts():
    cfg = small(detectors=("differential", "coherent"), both_directions=True, seed=1234)
    a = format_rows(run_ber_sweep(cfg, workers=1))
    b = format_rows(run_ber_sweep(cfg, workers=2))
    c = format_rows(run_ber_sweep(cfg, workers=3))
    assert a == b == c
    assert format_rows(run_ber_sweep(small(seed=1235))) != format_rows(run_ber_sweep(small(seed=1234)))


def test_stop_rule_and_truncation():
    rows = run_ber_sweep(small(snr_grid_db=(0, 40), min_errors=2000, max_bits=400_000))
    low, high = rows
    assert not low.truncated and low.errors >= 2000
    assert high.truncated and high.errors < 2000 and high.bits >= 400_000
    for r in rows:
        assert 0 <= r.ber <= 1 and r.errors <= r.bits
        assert r.ber == r.errors / r.bits


def test_errors_counted_on_information_bits():
    rows = run_ber_sweep(small(snr_grid_db=(0,), modulation_order=4, frame_length=20))
    # QPSK: 19 information symbols per frame, 2 bits each; chunk sizes are 50, 100, 200, ...
    frames = rows[0].bits // 38
    assert rows[0].bits == frames * 38
    assert frames in {50 * (2 ** k - 1) for k in range(1, 7)}


def test_ber_monotone_in_snr():
    cfg = small(snr_grid_db=(0, 5, 10, 15, 20, 25), detectors=DETS, min_errors=200)
    rows = run_ber_sweep(cfg)
    for det in DETS:
        pts = [r for r in rows if r.detector == det]
        for a, b in zip(pts, pts[1:]):
            assert b.ber <= a.ber + a.ci95_halfwidth + b.ci95_halfwidth


DETS = ("differential", "genie", "coherent")


def test_source_symmetry():
    cfg = small(snr_grid_db=(5, 15), detectors=DETS, both_directions=True, min_errors=400)
    rows = {(r.detector, r.psi_s_db): r for r in run_ber_sweep(cfg)}
    for det in DETS:
        for db in (5.0, 15.0):
            a, b = rows[(det, db)], rows[(det + "-s2", db)]
            assert abs(a.ber - b.ber) <= a.ci95_halfwidth + b.ci95_halfwidth


def test_detector_ordering_at_high_snr():
    rows = run_ber_sweep(small(snr_grid_db=(20,), detectors=DETS, min_errors=300))
    ber = {r.detector: r.ber for r in rows}
    assert ber["coherent"] < ber["genie"]
    assert ber["coherent"] < ber["differential"]


def test_lambda_sweep_rows():
    cfg = small(experiment="lambda-sweep", min_errors=100)
    rows = run_lambda_sweep(cfg, lambda_grid=(0.5, 1.0), n0_list=(1e-2,))
    sim = [r for r in rows if r.detector == "differential"]
    asym = [r for r in rows if r.detector == "asymptotic"]
    assert len(sim) == len(asym) == 2
    for r in rows:
        assert 2 * r.p_s + r.p_r == pytest.approx(3.0)
        assert r.psi_s_db == pytest.approx(10 * math.log10(r.lam * 3 / ((2 * r.lam + 1) * 1e-2)))
    assert asym[0].ber == pytest.approx(1e-2 * 4 / (2 * 3 * 0.5))


def test_mse_rows_and_frame_length_effect():
    cfg = small(experiment="mse-mu", snr_grid_db=(20,), frames=2000, common_random_numbers=True)
    short = run_mse_mu(cfg)[0]
    long = run_mse_mu(ExperimentConfig(**{**cfg.__dict__, "frame_length": 1000}))[0]
    assert short.detector == "mu-nmse" and short.bits == 2000
    assert long.ber < short.ber
    assert short.ci95_halfwidth < short.ber


def test_analytic_rows():
    cfg = ExperimentConfig(experiment="analytic", snr_grid_db=(20, 30))
    rows = run(cfg)
    by = {(r.detector, r.psi_s_db): r for r in rows}
    assert by[("asymptotic", 20.0)].ber == pytest.approx(0.015)
    for db in (20.0, 30.0):
        assert by[("numeric", db)].ber >= by[("asymptotic", db)].ber
    opt = [r for r in rows if r.detector == "optimal-power"]
    assert len(opt) == 1 and (opt[0].p_s, opt[0].p_r) == (0.75, 1.5)


# ---------------------------------------------------------------- CLI

def test_cli_success_to_stdout(capsys):
    assert cli.main(["analytic"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == HEADER


def test_cli_config_errors(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("bogus_key: 1\n")
    assert cli.main(["ber-sweep", "--config", str(bad)]) == 2
    assert cli.main(["not-an-experiment"]) == 2
    assert cli.main(["analytic", "--seed", str(2**64)]) == 2
    assert cli.main(["analytic", "--workers", "0"]) == 2


def test_cli_numeric_failure(monkeypatch, capsys):
    def boom(inp):
        raise NumericFailure("forced", {"message": "test"})

    monkeypatch.setattr(analysis, "ber_numeric", boom)
    assert cli.main(["analytic"]) == 3
    assert "numeric failure" in capsys.readouterr().err


def test_cli_writes_file_with_seed(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("snr_grid_db: [10]\nmin_errors: 20\n")
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(["ber-sweep", "--config", str(cfg), "--seed", "5", "--out", str(out1)]) == 0
    assert cli.main(["ber-sweep", "--config", str(cfg), "--seed", "5", "--out", str(out2),
                     "--workers", "2"]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert np.isfinite(float(read_csv(out1)[0]["ber"]))
