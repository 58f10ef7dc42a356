#!/usr/bin/env python3
"""Shot-noise study: tomograph one gate many times with fresh sampling seeds.

With noise off the only error source is finite sampling, so the per-seed
fidelities cluster just below 1 and tighten as --shots grows.  Rerunning with
the same arguments reproduces the numbers exactly.
"""

import argparse
import statistics

from qptkit import builtin_backend, run_qpt


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--backend", default="qx4", help="builtin backend name")
    ap.add_argument("--gate", default="h")
    ap.add_argument("--line", type=int, default=0, help="qubit line")
    ap.add_argument("--shots", type=int, default=8192)
    ap.add_argument("--seeds", type=int, default=20, help="run seeds 0..N-1")
    ap.add_argument("--noise", action="store_true", help="leave decoherence on")
    args = ap.parse_args()

    backend = builtin_backend(args.backend).with_noise(args.noise)
    fids = []
    for seed in range(args.seeds):
        result = run_qpt(args.gate, (args.line,), backend,
                         shots=args.shots, seed=seed)
        fids.append(result.fidelity)
        print(f"seed {seed:3d}  fidelity {result.fidelity:.6f}")

    print(f"\n{args.gate} q{args.line}, {args.shots} shots, {args.seeds} seeds:")
    print(f"mean {statistics.fmean(fids):.6f}  min {min(fids):.6f}  "
          f"max {max(fids):.6f}")


if __name__ == "__main__":
    main()
