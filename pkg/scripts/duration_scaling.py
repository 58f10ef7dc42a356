#!/usr/bin/env python3
"""Fidelity versus gate duration: stretch every pulse and watch decoherence bite.

For each gate the backend durations are scaled by the given factors (the
T1/T2 times stay put), so longer columns mean more amplitude damping and
dephasing per gate.  Fidelities should decrease monotonically left to right.
"""

import argparse

from qptkit import GATE_TABLE_ORDER, builtin_backend, run_qpt


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--backend", default="qx4", help="builtin backend name")
    ap.add_argument("--line", type=int, default=2, help="qubit line for single-qubit gates")
    ap.add_argument("--pair", default="3,2", help="control,target pair for cx")
    ap.add_argument("--scales", default="1,2,4", help="comma-separated duration factors")
    args = ap.parse_args()

    base = builtin_backend(args.backend)
    scales = [float(s) for s in args.scales.split(",")]
    backends = [base.scaled_durations(s) for s in scales]
    control, target = (int(v) for v in args.pair.split(","))

    print(f"{'gate':8s}" + "".join(f"{f'x{s:g}':10s}" for s in scales))
    for gate in GATE_TABLE_ORDER:
        fids = [run_qpt(gate, (args.line,), b).fidelity for b in backends]
        flag = "" if all(a > b for a, b in zip(fids, fids[1:])) else "  (not monotone)"
        print(f"{gate:8s}" + "".join(f"{f:<10.6f}" for f in fids) + flag)
    fids = [run_qpt("cx", (control, target), b).fidelity for b in backends]
    flag = "" if all(a > b for a, b in zip(fids, fids[1:])) else "  (not monotone)"
    print(f"{f'cx {control}>{target}':8s}" + "".join(f"{f:<10.6f}" for f in fids) + flag)


if __name__ == "__main__":
    main()
