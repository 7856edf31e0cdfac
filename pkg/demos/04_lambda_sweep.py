"""Simulated and asymptotic BER over the source/relay power ratio lambda.

For each noise level every lambda reuses the same channels and noise, so the
shape of the curve is not blurred by independent Monte Carlo error.
"""
import argparse

from ancdm.harness import ExperimentConfig, run_lambda_sweep


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--min-errors", type=int, default=1000)
    parser.add_argument("--n0", type=float, nargs="+", default=[1e-2, 1e-3])
    args = parser.parse_args()

    cfg = ExperimentConfig(experiment="lambda-sweep", min_errors=args.min_errors,
                           common_random_numbers=True, n0_list=tuple(args.n0))
    rows = run_lambda_sweep(cfg)
    for n0 in cfg.n0_list:
        print(f"N0 = {n0:g}")
        sim = [r for r in rows if r.n0 == n0 and r.detector == "differential"]
        asym = [r for r in rows if r.n0 == n0 and r.detector == "asymptotic"]
        for s, a in zip(sim, asym):
            print(f"  lam={s.lam:<6g} psi_s={s.psi_s_db:5.1f} dB  simulated {s.ber:.3e}  "
                  f"asymptotic {a.ber:.3e}")
        best = min(sim, key=lambda r: r.ber)
        print(f"  lowest simulated BER at lam = {best.lam:g}")


if __name__ == "__main__":
    main()
