"""Estimate the captured pulse energy from the correlation samples alone.

A noncoherent receiver never sees the channel taps, but the detector still
needs the signal amplitude, which is proportional to the energy the gating
window captures.  Averaging the magnitudes of all autocorrelation samples
gives that energy for free, and taking more lags per symbol averages down
the noise.  This demo sweeps SNR and window size and prints the mean squared
error of the estimate against the true per-realization energy.

About twenty seconds at the default packet count.
"""

import argparse
from dataclasses import replace

from uwbsim import harness


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--packets", type=int, default=300,
                    help="channel realizations per point (default 300)")
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    cfg = replace(harness.default_config(2), n_packets=args.packets,
                  seed=args.seed)
    print(f"Estimating captured energy over {args.packets} dense-multipath "
          "channel realizations per point...\n")
    points = harness.run_testcase2(cfg)

    ms = sorted({p.m for p in points})
    snrs = sorted({p.snr_db for p in points})
    head = "SNR (dB)" + "".join(f"   MSE (M={m})" for m in ms)
    print(head)
    print("-" * len(head))
    table = {(p.snr_db, p.m): p for p in points}
    for s in snrs:
        row = f"{s:8.0f}"
        for m in ms:
            row += f"   {table[(s, m)].mse:9.3e}"
        print(row)

    print("\nEvery window size shares the same channels and noise, so the")
    print("columns are directly comparable: longer windows feed more samples")
    print("into the magnitude average and the MSE drops, fastest at high SNR")
    print("where the squared bias of |Y| no longer dominates.")


if __name__ == "__main__":
    main()
