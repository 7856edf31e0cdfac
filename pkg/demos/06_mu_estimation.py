"""Accuracy of the blind self-interference estimate.

The receiver learns the gain of its own echo from frame energy alone. Its
normalized MSE falls with SNR and then flattens, because the estimate averages
over only L symbols; longer frames lower that floor.
"""
import argparse

from ancdm.harness import ExperimentConfig, run_mse_mu


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--frames", type=int, default=10_000)
    parser.add_argument("--frame-lengths", type=int, nargs="+", default=[100, 1000])
    args = parser.parse_args()

    grid = (0, 5, 10, 15, 20, 25, 30)
    results = {}
    for L in args.frame_lengths:
        cfg = ExperimentConfig(experiment="mse-mu", frame_length=L, snr_grid_db=grid,
                               frames=args.frames, common_random_numbers=True)
        results[L] = run_mse_mu(cfg)
    print(f"{'psi_s dB':>8} " + " ".join(f"{'L=' + str(L):>12}" for L in results))
    for i, db in enumerate(grid):
        print(f"{db:8.1f} " + " ".join(f"{results[L][i].ber:12.4e}" for L in results))


if __name__ == "__main__":
    main()
