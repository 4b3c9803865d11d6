"""Compare the three uncoded detectors on the same channel.

Differential detection (DD) decides each symbol from one lag-1 correlation
sample.  Block detection (B-MSDD) jointly decides M symbols from a triangle
of samples but throws away information at block edges.  The sliding-window
detector (M-MSDD) runs a forward/backward pass over a 2^M-state chain whose
windows overlap, so every sample informs every decision.  The demo sweeps
SNR and prints the resulting bit error rates side by side.

A couple of minutes at the default budget; shrink --target-errors to rush.
"""

import argparse
from dataclasses import replace

from uwbsim import harness


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--snr-db", default="9,10,11",
                    help="comma-separated grid (default 9,10,11)")
    ap.add_argument("--m", default="2,3", help="window sizes (default 2,3)")
    ap.add_argument("--target-errors", type=int, default=60)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    cfg = replace(harness.default_config(3),
                  snr_db=tuple(float(s) for s in args.snr_db.split(",")),
                  m_list=tuple(int(m) for m in args.m.split(",")),
                  target_errors=args.target_errors, max_bits=2_000_000,
                  eg_modes=("perfect",), seed=args.seed)
    print("Running DD, block, and sliding-window detectors on the "
          "discrete path...\n")
    points = harness.run_testcase3(cfg)

    by = {(p.scheme, p.m, p.snr_db): p for p in points}
    ms = sorted({p.m for p in points if p.scheme != "dd"})
    head = "SNR (dB)   DD         " + "".join(
        f"B-MSDD M={m}  " for m in ms) + "".join(f"M-MSDD M={m}  " for m in ms)
    print(head)
    print("-" * len(head))
    for s in cfg.snr_db:
        row = f"{s:8.0f}   {by[('dd', 1, s)].ber:.3e}"
        for m in ms:
            row += f"  {by[('bmsdd', m, s)].ber:.3e}"
        for m in ms:
            row += f"  {by[('mmsdd', m, s)].ber:.3e}"
        print(row)

    print("\nReading across a row: block detection already improves on DD,")
    print("and the overlapping-window chain beats both at the same M because")
    print("its decisions condition on the whole packet, not one block.")


if __name__ == "__main__":
    main()
