"""Report serialisation, renderings, and the command-line front end."""

import copy
import json

import numpy as np
import pytest

from qptkit import (
    chi_grids,
    chi_report_dict,
    dump_report,
    load_report,
    parse_report,
    read_dataset,
    render_fidelity_tables,
    result_from_report,
    run_qpt,
    seed_summary_dict,
)
from qptkit.cli import main


@pytest.fixture(scope="module")
def h_result(qx4_quiet):
    return run_qpt("h", (2,), qx4_quiet)


@pytest.fixture(scope="module")
def h_report(h_result):
    return chi_report_dict(h_result)


# --- reports -----------------------------------------------------------------


def test_report_roundtrip(h_result, h_report):
    text = dump_report(h_report)
    assert parse_report(text) == h_report
    chi, theory, fidelity = result_from_report(json.loads(text))
    assert np.abs(chi.matrix - h_result.chi.matrix).max() < 1e-12
    assert np.abs(theory.matrix - h_result.chi_theory.matrix).max() < 1e-12
    assert fidelity == h_result.fidelity
    assert chi.residual == h_result.residual


def test_report_fields(h_report):
    assert h_report["format"] == 1 and h_report["kind"] == "qpt"
    assert h_report["gate"] == "h" and h_report["lines"] == [2]
    assert h_report["backend"] == "ibmqx4-sim" and h_report["noise"] is False
    assert h_report["shots"] is None and h_report["executions"] == 12
    assert h_report["operator_labels"] == ["I", "X", "-iY", "Z"]
    assert len(h_report["chi_real"]) == 4 and len(h_report["chi_theory_imag"]) == 4


def test_report_bytes_deterministic(qx4_quiet):
    a = run_qpt("h", (0,), qx4_quiet, shots=256, seed=4)
    b = run_qpt("h", (0,), qx4_quiet, shots=256, seed=4)
    assert dump_report(chi_report_dict(a)) == dump_report(chi_report_dict(b))


@pytest.mark.parametrize(
    "mutate, message",
    [
        (lambda r: r.update(format=2), "unsupported format"),
        (lambda r: r.update(kind="mystery"), "unknown kind"),
        (lambda r: r.update(fidelity=2.0), "fidelity out of range"),
        (lambda r: r.update(residual=-1.0), "negative residual"),
        (lambda r: r.update(executions=13), "executions"),
        (lambda r: r["chi_real"][0].append(0.0), "not 4x4"),
        (lambda r: r["chi_real"][0].__setitem__(1, 9.0), "not Hermitian"),
    ],
)
def test_report_validation(h_report, mutate, message):
    bad = copy.deepcopy(h_report)
    mutate(bad)
    with pytest.raises(ValueError, match=message):
        parse_report(dump_report(bad))


def test_seed_summary(qx4_quiet):
    seeds = [0, 1, 2]
    results = [run_qpt("h", (0,), qx4_quiet, shots=256, seed=s) for s in seeds]
    summary = seed_summary_dict(results, seeds)
    assert summary["kind"] == "qpt-seeds"
    assert summary["seeds"] == seeds
    assert summary["fidelity_min"] == min(r.fidelity for r in results)
    assert summary["fidelity_max"] == max(r.fidelity for r in results)
    assert summary["fidelity_mean"] == pytest.approx(
        sum(r.fidelity for r in results) / 3.0
    )
    assert parse_report(dump_report(summary)) == summary
    broken = dict(summary, fidelity_mean=0.0)
    with pytest.raises(ValueError, match="mean is inconsistent"):
        parse_report(dump_report(broken))
    with pytest.raises(ValueError, match="no results"):
        seed_summary_dict([], [])


def test_render_fidelity_tables():
    def fake(gate, lines, fidelity):
        return {"kind": "qpt", "gate": gate, "lines": lines, "fidelity": fidelity}

    reports = [
        fake("h", [0], 0.9121),
        fake("h", [2], 0.9605),
        fake("x", [0], 0.9093),
        fake("cx", [1, 0], 0.7092),
        {"kind": "qpt-seeds", "gate": "h"},  # ignored
    ]
    csv_text, aligned = render_fidelity_tables(reports)
    assert csv_text.splitlines() == [
        "gate,q0,q2,1>0",
        "x,0.9093,,",
        "h,0.9121,0.9605,",
        "cx,,,0.7092",
    ]
    lines = aligned.splitlines()
    assert lines[0].split() == ["gate", "q0", "q2", "1>0"]
    assert lines[2].split() == ["h", "0.9121", "0.9605"]


def test_chi_grids(h_report):
    real_text, imag_text = chi_grids(h_report)
    header = "chi\tI\tX\t-iY\tZ"
    assert real_text.splitlines()[0] == header
    assert imag_text.splitlines()[0] == header
    x_row = real_text.splitlines()[2].split("\t")
    assert x_row[0] == "X" and float(x_row[1]) == pytest.approx(0.0, abs=1e-9)
    assert float(x_row[2]) == pytest.approx(0.5, abs=1e-9)
    with pytest.raises(ValueError, match="not a qpt report"):
        chi_grids({"kind": "qst"})


# --- CLI ---------------------------------------------------------------------

BELL = 'OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[2];\nh q[1];\ncx q[1], q[0];\n'


def test_cli_qpt_exact(tmp_path, capsys):
    code = main([
        "qpt", "--gate", "h", "--lines", "2",
        "--backend", "qx4", "--noise", "off", "--out", str(tmp_path),
    ])
    assert code == 0
    report = load_report(tmp_path / "qpt_h_2.json")
    assert report["fidelity"] == pytest.approx(1.0, abs=1e-9)
    out = capsys.readouterr().out
    assert "h 2: fidelity=1.000000" in out


def test_cli_qpt_all_lines(tmp_path):
    code = main([
        "qpt", "--gate", "t", "--all-lines",
        "--backend", "qx4", "--noise", "off", "--out", str(tmp_path),
    ])
    assert code == 0
    assert sorted(p.name for p in tmp_path.glob("*.json")) == [
        f"qpt_t_{q}.json" for q in range(5)
    ]


def test_cli_qpt_cx_all_lines_follows_coupling(tmp_path):
    code = main([
        "qpt", "--gate", "cx", "--all-lines",
        "--backend", "qx4", "--noise", "off", "--out", str(tmp_path),
    ])
    assert code == 0
    assert sorted(p.name for p in tmp_path.glob("*.json")) == [
        "qpt_cx_1-0.json", "qpt_cx_2-0.json", "qpt_cx_2-1.json",
        "qpt_cx_2-4.json", "qpt_cx_3-2.json", "qpt_cx_3-4.json",
    ]


def test_cli_qpt_sampled_bytes_identical(tmp_path):
    args = ["qpt", "--gate", "h", "--lines", "0", "--backend", "qx4",
            "--noise", "off", "--shots", "512", "--seed", "9"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert (a / "qpt_h_0.json").read_bytes() == (b / "qpt_h_0.json").read_bytes()


def test_cli_qpt_seeds_summary(tmp_path):
    code = main([
        "qpt", "--gate", "h", "--lines", "0", "--backend", "qx4",
        "--noise", "off", "--shots", "256", "--seed", "0", "--seeds", "3",
        "--out", str(tmp_path),
    ])
    assert code == 0
    report = load_report(tmp_path / "qpt_h_0_seeds.json")
    assert report["kind"] == "qpt-seeds"
    assert report["seeds"] == [0, 1, 2] and len(report["fidelities"]) == 3


def test_cli_qpt_project_psd(tmp_path):
    code = main([
        "qpt", "--gate", "h", "--lines", "0", "--backend", "qx4",
        "--noise", "off", "--shots", "256", "--seed", "1", "--project-psd",
        "--out", str(tmp_path),
    ])
    assert code == 0
    report = load_report(tmp_path / "qpt_h_0.json")
    assert report["psd_projected"] is True
    chi = np.array(report["chi_real"]) + 1j * np.array(report["chi_imag"])
    assert np.linalg.eigvalsh(chi).min() >= -1e-12


def test_cli_qpt_failure_exit_code(tmp_path, capsys):
    code = main([
        "qpt", "--gate", "cx", "--lines", "0,1",
        "--backend", "qx4", "--out", str(tmp_path),
    ])
    assert code == 1
    assert "coupling map" in capsys.readouterr().err


def test_cli_argument_validation(tmp_path):
    base = ["qpt", "--gate", "h", "--lines", "0", "--backend", "qx4",
            "--out", str(tmp_path)]
    with pytest.raises(SystemExit):
        main(base + ["--exact", "--shots", "16"])
    with pytest.raises(SystemExit, match="--seed requires --shots"):
        main(base + ["--seed", "1"])
    with pytest.raises(SystemExit, match="--seeds requires --shots"):
        main(base + ["--seeds", "2"])
    with pytest.raises(SystemExit, match="neither a file nor a builtin"):
        main(["qpt", "--gate", "h", "--lines", "0", "--backend", "qx9",
              "--out", str(tmp_path)])
    with pytest.raises(SystemExit, match="unknown gate"):
        main(base[:2] + ["rx"] + base[3:])


def test_cli_qst(tmp_path, capsys):
    circuit = tmp_path / "bell.qasm"
    circuit.write_text(BELL, encoding="utf-8")
    code = main([
        "qst", "--circuit", str(circuit), "--backend", "qx4", "--noise", "off",
        "--out", str(tmp_path),
    ])
    assert code == 0
    report = load_report(tmp_path / "bell_qst.json")
    assert report["kind"] == "qst" and report["qubits"] == 2
    assert report["fidelity"] == pytest.approx(1.0, abs=1e-9)
    dataset = read_dataset((tmp_path / "bell_qst_dataset.txt").read_text())
    assert dataset.qubit_count == 2 and len(dataset.records) == 9
    assert "state fidelity=1.000000" in capsys.readouterr().out


def test_cli_qst_sampled_is_deterministic(tmp_path):
    circuit = tmp_path / "hq0.qasm"
    circuit.write_text("OPENQASM 2.0;\nqreg q[1];\nh q[0];\n", encoding="utf-8")
    payloads = []
    for sub in ("a", "b"):
        out = tmp_path / sub
        assert main(["qst", "--circuit", str(circuit), "--backend", "qx4",
                     "--noise", "off", "--shots", "8192", "--seed", "11",
                     "--out", str(out)]) == 0
        payloads.append((out / "hq0_qst.json").read_bytes())
    assert payloads[0] == payloads[1]
    report = parse_report(payloads[0].decode("utf-8"))
    assert report["shots"] == 8192 and report["seed"] == 11
    assert report["fidelity"] >= 0.99


def test_cli_qst_rejects_measured_circuit(tmp_path):
    circuit = tmp_path / "measured.qasm"
    circuit.write_text(
        "OPENQASM 2.0;\nqreg q[1];\ncreg c[1];\nh q[0];\nmeasure q[0] -> c[0];\n",
        encoding="utf-8",
    )
    with pytest.raises(SystemExit, match="must not measure"):
        main(["qst", "--circuit", str(circuit), "--backend", "qx4",
              "--out", str(tmp_path)])


def test_cli_table(tmp_path, capsys):
    main(["qpt", "--gate", "h", "--lines", "2", "--backend", "qx4",
          "--noise", "off", "--out", str(tmp_path)])
    main(["qpt", "--gate", "x", "--lines", "0", "--backend", "qx4",
          "--noise", "off", "--out", str(tmp_path)])
    capsys.readouterr()
    assert main(["table", "--reports", str(tmp_path)]) == 0
    printed = capsys.readouterr().out
    assert printed.splitlines()[0].split() == ["gate", "q0", "q2"]
    prefix = tmp_path / "grid"
    assert main(["table", "--reports", str(tmp_path), "--out", str(prefix)]) == 0
    csv_text = (tmp_path / "grid.csv").read_text()
    assert csv_text.splitlines()[0] == "gate,q0,q2"
    assert "1.0000" in csv_text
    assert (tmp_path / "grid.txt").exists()
    with pytest.raises(SystemExit, match="no qpt reports"):
        main(["table", "--reports", str(tmp_path / "empty")])


def test_cli_chi_plot(tmp_path):
    main(["qpt", "--gate", "s", "--lines", "1", "--backend", "qx4",
          "--noise", "off", "--out", str(tmp_path)])
    prefix = tmp_path / "s_chi"
    assert main(["chi-plot", "--report", str(tmp_path / "qpt_s_1.json"),
                 "--out", str(prefix)]) == 0
    real_text = (tmp_path / "s_chi_real.tsv").read_text()
    assert real_text.startswith("chi\tI\tX\t-iY\tZ\n")
    imag_lines = (tmp_path / "s_chi_imag.tsv").read_text().splitlines()
    imag = {row[0]: [float(v) for v in row[1:]]
            for row in (line.split("\t") for line in imag_lines[1:])}
    assert imag["I"][3] == pytest.approx(0.5, abs=1e-9)
    assert imag["Z"][0] == pytest.approx(-0.5, abs=1e-9)
