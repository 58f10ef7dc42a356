"""Command-line front end.

Subcommands:

* ``qpt``       run process tomography for one or many gate placements
* ``qst``       run state tomography for a measurement-free QASM circuit
* ``table``     render fidelity grids (csv + aligned text) from qpt reports
* ``chi-plot``  dump a report's chi matrix as labelled real/imag TSV grids

``--backend`` takes either a config file path or a builtin name (``qx4``,
``qx2``).  Runs are exact unless ``--shots`` is given; sampled runs accept
``--seed`` and are bit-reproducible: the same invocation writes byte-identical
reports.  ``--seeds N`` repeats a sampled run with seeds seed..seed+N-1 and
writes a summary report with per-seed fidelities and their mean/min/max.

Exit status is 0 only if every requested item succeeded; failures are
reported on stderr and do not stop the remaining items.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .backend import BackendModel, builtin_backend, builtin_backend_names, read_backend
from .operators import GATE_ARITY
from .process_tomography import project_result, run_qpt
from .qasm import parse_qasm
from .reports import (
    GATE_TABLE_ORDER,
    chi_grids,
    chi_report_dict,
    dump_report,
    load_report,
    qst_report_dict,
    render_fidelity_tables,
    seed_summary_dict,
)
from .state_tomography import project_psd, run_qst, state_fidelity, write_dataset
from .backend import execute_exact

__all__ = ["main"]


def _resolve_backend(spec: str, noise: str | None, idle_decay: str | None) -> BackendModel:
    path = Path(spec)
    if path.exists():
        model = read_backend(path)
    else:
        try:
            model = builtin_backend(spec)
        except Exception:
            raise SystemExit(
                f"error: backend {spec!r} is neither a file nor a builtin "
                f"({', '.join(builtin_backend_names())})"
            ) from None
    if noise is not None:
        model = model.with_noise(noise == "on")
    if idle_decay is not None:
        model = model.with_idle_decay(idle_decay == "on")
    return model


def _parse_lines(spec: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in spec.split(","))
    except ValueError:
        raise SystemExit(f"error: bad --lines value {spec!r}") from None


def _placements(gate: str, args, backend: BackendModel) -> list[tuple[int, ...]]:
    arity = GATE_ARITY[gate]
    if args.all_lines:
        if arity == 1:
            return [(q,) for q in range(5)]
        return [pair for pair in sorted(backend.coupling.pairs)]
    if not args.lines:
        raise SystemExit("error: give --lines (repeatable) or --all-lines")
    chosen = []
    for spec in args.lines:
        lines = _parse_lines(spec)
        if len(lines) != arity:
            raise SystemExit(
                f"error: gate {gate!r} needs {arity} line(s), got {spec!r}"
            )
        chosen.append(lines)
    return chosen


def _report_name(gate: str, lines: tuple[int, ...], summary: bool) -> str:
    where = "-".join(str(q) for q in lines)
    tail = "_seeds" if summary else ""
    return f"qpt_{gate}_{where}{tail}.json"


def cmd_qpt(args) -> int:
    backend = _resolve_backend(args.backend, args.noise, args.idle_decay)
    if args.gate:
        gates = []
        for g in args.gate:
            if g not in GATE_ARITY:
                raise SystemExit(f"error: unknown gate {g!r}")
            gates.append(g)
    elif args.all_gates:
        gates = list(GATE_TABLE_ORDER)
    else:
        raise SystemExit("error: give --gate (repeatable) or --all-gates")

    shots = args.shots
    if shots is None and args.seed is not None:
        raise SystemExit("error: --seed requires --shots")
    if shots is None and args.seeds > 1:
        raise SystemExit("error: --seeds requires --shots")

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    failures = 0
    for gate in gates:
        for lines in _placements(gate, args, backend):
            label = f"{gate} {','.join(map(str, lines))}"
            try:
                if args.seeds > 1:
                    base = args.seed if args.seed is not None else 0
                    seeds = list(range(base, base + args.seeds))
                    results = [
                        run_qpt(gate, lines, backend, shots=shots, seed=s)
                        for s in seeds
                    ]
                    if args.project_psd:
                        results = [project_result(r) for r in results]
                    report = seed_summary_dict(results, seeds)
                    path = out_dir / _report_name(gate, lines, True)
                    dump_report(report, path)
                    print(
                        f"{label}: fidelity mean={report['fidelity_mean']:.6f} "
                        f"min={report['fidelity_min']:.6f} "
                        f"max={report['fidelity_max']:.6f} -> {path}"
                    )
                else:
                    result = run_qpt(gate, lines, backend, shots=shots, seed=args.seed)
                    if args.project_psd:
                        result = project_result(result)
                    path = out_dir / _report_name(gate, lines, False)
                    dump_report(chi_report_dict(result), path)
                    load_report(path)
                    print(
                        f"{label}: fidelity={result.fidelity:.6f} "
                        f"residual={result.residual:.2e} -> {path}"
                    )
            except Exception as exc:
                failures += 1
                print(f"error: {label}: {exc}", file=sys.stderr)
    return 1 if failures else 0


def cmd_qst(args) -> int:
    backend = _resolve_backend(args.backend, args.noise, args.idle_decay)
    source = Path(args.circuit)
    circuit = parse_qasm(source.read_text(encoding="utf-8"))
    if circuit.measurements:
        raise SystemExit(
            "error: the circuit must not measure; tomography appends its own "
            "measurements"
        )
    run = run_qst(circuit, backend, shots=args.shots, seed=args.seed)
    reference = execute_exact(circuit, backend).final_state
    fidelity = state_fidelity(reference, run.state)
    rho = project_psd(run.state) if args.project_psd else run.state

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    report = qst_report_dict(
        backend_name=backend.name,
        noise=backend.noise_enabled,
        shots=args.shots,
        seed=args.seed,
        executions=run.executions,
        qubit_count=circuit.qubit_count,
        rho=rho,
        fidelity=fidelity,
        psd_projected=args.project_psd,
    )
    report_path = out_dir / f"{source.stem}_qst.json"
    dump_report(report, report_path)
    dataset_path = out_dir / f"{source.stem}_qst_dataset.txt"
    dataset_path.write_text(write_dataset(run.dataset), encoding="utf-8")
    print(f"{source.name}: state fidelity={fidelity:.6f} -> {report_path}")
    return 0


def cmd_table(args) -> int:
    reports = []
    for path in sorted(Path(args.reports).glob("*.json")):
        report = load_report(path)
        if report.get("kind") == "qpt":
            reports.append(report)
    if not reports:
        raise SystemExit(f"error: no qpt reports under {args.reports!r}")
    csv_text, aligned = render_fidelity_tables(reports)
    if args.out:
        Path(f"{args.out}.csv").write_text(csv_text, encoding="utf-8")
        Path(f"{args.out}.txt").write_text(aligned, encoding="utf-8")
        print(f"wrote {args.out}.csv and {args.out}.txt")
    else:
        print(aligned, end="")
    return 0


def cmd_chi_plot(args) -> int:
    report = load_report(args.report)
    real_text, imag_text = chi_grids(report)
    Path(f"{args.out}_real.tsv").write_text(real_text, encoding="utf-8")
    Path(f"{args.out}_imag.tsv").write_text(imag_text, encoding="utf-8")
    print(f"wrote {args.out}_real.tsv and {args.out}_imag.tsv")
    return 0


def _add_backend_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--backend", required=True,
                   help="config file path or builtin name (qx4, qx2)")
    p.add_argument("--noise", choices=("on", "off"),
                   help="override the config's noise switch")
    p.add_argument("--idle-decay", choices=("on", "off"), dest="idle_decay",
                   help="override the config's idle_decay switch")


def _add_sampling_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--shots", type=int,
                   help="sample counts instead of using exact probabilities")
    p.add_argument("--exact", action="store_true",
                   help="exact probabilities (the default; excludes --shots)")
    p.add_argument("--seed", type=int, help="base RNG seed for sampled runs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qptkit",
        description="Process/state tomography against a noisy 5-qubit simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("qpt", help="run chi-matrix process tomography")
    p.add_argument("--gate", action="append",
                   help="gate name (repeatable); cx takes control,target lines")
    p.add_argument("--all-gates", action="store_true", dest="all_gates",
                   help="all nine single-qubit gates")
    p.add_argument("--lines", action="append",
                   help="qubit line(s), e.g. 2 or 3,2 (repeatable)")
    p.add_argument("--all-lines", action="store_true", dest="all_lines",
                   help="every line (single-qubit) or coupling pair (cx)")
    _add_backend_options(p)
    _add_sampling_options(p)
    p.add_argument("--seeds", type=int, default=1,
                   help="run N seeds (seed..seed+N-1) and write a summary")
    p.add_argument("--project-psd", action="store_true", dest="project_psd",
                   help="clip negative chi eigenvalues before reporting")
    p.add_argument("--out", default=".", help="directory for report files")
    p.set_defaults(func=cmd_qpt)

    p = sub.add_parser("qst", help="run state tomography for a QASM circuit")
    p.add_argument("--circuit", required=True, help="QASM file, no measurements")
    _add_backend_options(p)
    _add_sampling_options(p)
    p.add_argument("--project-psd", action="store_true", dest="project_psd",
                   help="clip negative rho eigenvalues before reporting")
    p.add_argument("--out", default=".", help="directory for report files")
    p.set_defaults(func=cmd_qst)

    p = sub.add_parser("table", help="render fidelity tables from reports")
    p.add_argument("--reports", required=True, help="directory of qpt reports")
    p.add_argument("--out", help="output prefix (writes .csv and .txt)")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("chi-plot", help="dump chi grids for plotting")
    p.add_argument("--report", required=True, help="a qpt report file")
    p.add_argument("--out", required=True, help="output prefix (_real/_imag.tsv)")
    p.set_defaults(func=cmd_chi_plot)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "exact", False) and getattr(args, "shots", None) is not None:
        parser.error("--exact and --shots are mutually exclusive")
    if getattr(args, "seeds", 1) < 1:
        parser.error("--seeds must be at least 1")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
