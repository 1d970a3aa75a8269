"""Sweep the synthetic noise model and report how often the expected precision
ordering holds (Wiener(180) < Kalman < raw, and 180 <= 135 <= 90 taps on shared
design data), together with the raw mean absolute error.

    python scripts/calibrate_noise.py --seeds 40
"""
import argparse
import itertools

import numpy as np

from gpsdenoise import kalman, wiener
from gpsdenoise.trajectory import NoiseSpec, error_stats, generate


def orderings(traj):
    raw = error_stats(traj.measured, traj.truth).mean_abs
    kal = error_stats(kalman.run(traj)[0], traj.truth).mean_abs
    fir = []
    for m in (180, 135, 90):
        f = wiener.design(wiener.correlations(traj, m), m)
        fir.append(error_stats(wiener.apply(f, traj.measured), traj.truth).mean_abs)
    ok = fir[0] < kal < raw and fir[0] <= fir[1] <= fir[2] and 8 <= raw <= 16
    return raw, kal, fir[0], ok


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=40)
    args = ap.parse_args()

    print(f"{'sigma':>6}{'ar':>6}{'bias':>6}{'raw':>9}{'kalman':>9}{'wiener':>9}{'ok':>7}")
    for sigma, ar, bias in itertools.product((10.0, 15.0, 20.0), (0.0, 0.2, 0.5), (0.0, 3.0)):
        rows = [orderings(generate(noise=NoiseSpec(sigma, ar, bias, seed)))
                for seed in range(args.seeds)]
        raw, kal, fir, ok = (np.mean([r[i] for r in rows]) for i in range(4))
        print(f"{sigma:>6g}{ar:>6g}{bias:>6g}{raw:>9.2f}{kal:>9.2f}{fir:>9.2f}{ok:>7.0%}")


if __name__ == "__main__":
    main()
