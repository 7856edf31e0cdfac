"""How to split a fixed power budget between the two sources and the relay.

With 2 p_s + p_r = p the high-SNR error rate is N0 (2 lam + 1)^2 / (2 p lam),
minimized at lam = p_s / p_r = 1/2: the relay should spend as much as both
sources together. This script prints the closed-form curve over lam and then
simulates equal, optimal and source-heavy splits on the same random draws.
"""
import argparse

import numpy as np

from ancdm.analysis import constrained_asymptotic_ber, optimal_power
from ancdm.harness import ExperimentConfig, run_power_opt


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--total-power", type=float, default=3.0)
    parser.add_argument("--n0", type=float, default=1e-3)
    parser.add_argument("--skip-sim", action="store_true")
    args = parser.parse_args()

    p = args.total_power
    print(f"optimal split for p={p:g}: p_s, p_r = {optimal_power(p)}")
    for lam in (0.125, 0.25, 0.5, 1, 2, 4):
        print(f"  lam={lam:<6g} asymptotic BER {constrained_asymptotic_ber(lam, p, args.n0):.3e}")
    if args.skip_sim:
        return

    cfg = ExperimentConfig(experiment="power-opt", total_power=p, snr_grid_db=(25, 30, 35, 40),
                           min_errors=500, common_random_numbers=True)
    rows = run_power_opt(cfg)
    names = {1.0: "equal", 0.5: "optimal", 2.0: "0.4p/0.2p"}
    print(f"\n{'psi_s dB':>8} " + " ".join(f"{n:>10}" for n in names.values()))
    for db in cfg.snr_grid_db:
        bers = [next(r.ber for r in rows if r.psi_s_db == db and np.isclose(r.lam, lam))
                for lam in names]
        print(f"{db:8.1f} " + " ".join(f"{b:10.3e}" for b in bers))


if __name__ == "__main__":
    main()
