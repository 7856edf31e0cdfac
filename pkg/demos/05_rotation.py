"""Does rotating S2's alphabet help the blind receiver?

S2's BPSK points are turned by theta before differential encoding. The
self-interference estimate relies on the average of |c1 - c2|^2, which is 2
for any rotation, and the BER curves come out practically the same. Short
frames (try --frame-length 10) are where any difference would show first.
"""
import argparse
import math

from ancdm.harness import ExperimentConfig, run_rotation_compare
from ancdm.modem import diff_power, make_constellation


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rotation", type=float, default=math.pi / 2)
    parser.add_argument("--frame-length", type=int, default=100)
    parser.add_argument("--min-errors", type=int, default=500)
    args = parser.parse_args()

    print("E|c1 - c2|^2 with rotation:",
          diff_power(make_constellation(2), make_constellation(2, args.rotation)))
    cfg = ExperimentConfig(experiment="rotation", rotation=args.rotation,
                           frame_length=args.frame_length, snr_grid_db=tuple(range(5, 40, 5)),
                           min_errors=args.min_errors, common_random_numbers=True)
    rows = run_rotation_compare(cfg)
    plain = {r.psi_s_db: r.ber for r in rows if r.detector == "differential"}
    rotated = {r.psi_s_db: r.ber for r in rows if r.detector == "differential-rotated"}
    print(f"{'psi_s dB':>8} {'unrotated':>11} {'rotated':>11}")
    for db in plain:
        print(f"{db:8.1f} {plain[db]:11.4e} {rotated[db]:11.4e}")


if __name__ == "__main__":
    main()
