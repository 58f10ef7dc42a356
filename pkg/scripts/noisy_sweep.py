#!/usr/bin/env python3
"""Tomography sweep with decoherence on: the full gate-by-line fidelity grid.

Runs the nine single-qubit gates on all five lines plus cx on every coupling
pair, against the backend's T1/T2 model.  Exact evolution by default;
``--shots`` switches to sampled counts, which adds shot noise on top of the
decoherence floor.
"""

import argparse

from qptkit import GATE_TABLE_ORDER, builtin_backend, run_qpt


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--backend", default="qx4", help="builtin backend name")
    ap.add_argument("--shots", type=int, help="sample counts instead of exact evolution")
    ap.add_argument("--seed", type=int, default=0, help="seed for sampled runs")
    args = ap.parse_args()

    backend = builtin_backend(args.backend)
    seed = args.seed if args.shots else None

    print(f"{'gate':8s}" + "".join(f"{f'q{q}':10s}" for q in range(5)))
    for gate in GATE_TABLE_ORDER:
        fids = [
            run_qpt(gate, (q,), backend, shots=args.shots, seed=seed).fidelity
            for q in range(5)
        ]
        print(f"{gate:8s}" + "".join(f"{f:<10.6f}" for f in fids))
    for control, target in sorted(backend.coupling.pairs):
        result = run_qpt("cx", (control, target), backend,
                         shots=args.shots, seed=seed)
        print(f"{f'cx {control}>{target}':8s}{result.fidelity:<10.6f}")


if __name__ == "__main__":
    main()
