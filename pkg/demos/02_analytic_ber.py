"""Exact and high-SNR bit error rate from the SNR distribution alone.

No simulation here: the exact curve integrates the Gaussian tail against the
distribution of the differential SNR, and the asymptotic curve is the one-line
high-SNR formula. A short Monte Carlo run is printed alongside for scale.
"""
import argparse

from ancdm.analysis import AsymptoticBerInput, asymptotic_ber, ber_numeric
from ancdm.harness import ExperimentConfig, run_ber_sweep


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--lam", type=float, default=1.0, help="p_s / p_r")
    parser.add_argument("--simulate", action="store_true", help="add a Monte Carlo column")
    args = parser.parse_args()

    grid = tuple(range(0, 45, 5))
    sim = {}
    if args.simulate:
        # 2 p_s + p_r = 3 with p_s / p_r = lam
        cfg = ExperimentConfig(snr_grid_db=grid, power_mode="custom",
                               p_s=3 * args.lam / (2 * args.lam + 1), p_r=3 / (2 * args.lam + 1),
                               min_errors=1000, common_random_numbers=True)
        sim = {r.psi_s_db: r.ber for r in run_ber_sweep(cfg)}

    print(f"{'psi_s dB':>8} {'exact':>11} {'asymptotic':>11}" + (f" {'simulated':>11}" if sim else ""))
    for db in grid:
        inp = AsymptoticBerInput.from_db(args.lam, db)
        line = f"{db:8.1f} {ber_numeric(inp):11.4e} {asymptotic_ber(inp):11.4e}"
        if sim:
            line += f" {sim[float(db)]:11.4e}"
        print(line)


if __name__ == "__main__":
    main()
