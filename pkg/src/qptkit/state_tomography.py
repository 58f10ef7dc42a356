"""Pauli-basis state tomography from counts.

A measurement setting is a string over {Z, X, Y}, one letter per measured
qubit, first letter = most significant qubit (same string convention as
Pauli strings and counts keys, see ``operators``).  The circuit rotations
are the usual ones: X is measured after an H, Y after Sdg then H, Z
directly.  For ``n`` qubits all ``3**n`` settings are taken, enumerated with
the per-qubit order Z < X < Y, lexicographically:

    n=2:  ZZ ZX ZY XZ XX XY YZ YX YY

An expectation value for a Pauli string is estimated from the first
compatible setting in that enumeration (``I`` positions are marginalised by
summing outcomes); the reconstruction is the linear inversion

    rho = 2^-n  sum_P  <P> P

over all 4**n strings with the identity-string coefficient pinned to one,
followed by symmetrisation (rho + rho^dagger)/2.  The result can carry small
negative eigenvalues at finite shots; ``project_psd`` clips them for
reporting, the raw matrix is never silently altered.

Datasets serialise to line-oriented text (``format=1`` header, one record
per setting) so runs can be stored and re-analysed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .backend import BackendModel, execute, execute_exact
from .operators import pauli_string_matrix
from .qasm import Circuit, Gate, Measure

__all__ = [
    "BASIS_ORDER",
    "TomographyDataset",
    "qst_settings",
    "append_setting",
    "estimate_pauli",
    "all_expectations",
    "reconstruct_density",
    "reconstruct_from_dataset",
    "project_psd",
    "state_fidelity",
    "write_dataset",
    "read_dataset",
    "collect_dataset",
    "QstRun",
    "run_qst",
    "child_seeds",
]

BASIS_ORDER = "ZXY"


def qst_settings(qubit_count: int) -> list[str]:
    """All 3**n setting tags in canonical order."""
    if not 1 <= qubit_count <= 5:
        raise ValueError(f"qubit count must be 1..5, got {qubit_count}")
    return ["".join(p) for p in itertools.product(BASIS_ORDER, repeat=qubit_count)]


def append_setting(circuit: Circuit, setting: str,
                   qubits: list[int] | tuple[int, ...] | None = None) -> Circuit:
    """Append basis rotations and measurements for one setting.

    ``qubits`` lists the measured qubits most significant first and defaults
    to the whole register; ``setting[p]`` applies to ``qubits[p]``, which is
    measured into classical bit ``len(qubits)-1-p``.  The input circuit must
    not measure anything itself; its classical register is replaced.
    """
    if qubits is None:
        qubits = tuple(range(circuit.qubit_count - 1, -1, -1))
    qubits = tuple(qubits)
    if len(setting) != len(qubits):
        raise ValueError(
            f"setting {setting!r} has {len(setting)} letters for {len(qubits)} qubit(s)"
        )
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"duplicate qubits in {qubits}")
    if circuit.measurements:
        raise ValueError("circuit already contains measurements")
    extra: list[Gate | Measure] = []
    for p, q in enumerate(qubits):
        basis = setting[p]
        if basis == "X":
            extra.append(Gate("h", (q,)))
        elif basis == "Y":
            extra.append(Gate("sdg", (q,)))
            extra.append(Gate("h", (q,)))
        elif basis != "Z":
            raise ValueError(f"invalid basis letter {basis!r} in {setting!r}")
    k = len(qubits)
    for p, q in enumerate(qubits):
        extra.append(Measure(q, k - 1 - p))
    return circuit.extended(*extra, classical_count=k)


@dataclass(frozen=True)
class TomographyDataset:
    """Counts (or exact probability weights) per measurement setting.

    ``shots`` is the per-setting shot count, or None when the records hold
    exact probabilities from a density-matrix run.
    """

    qubit_count: int
    shots: int | None
    records: dict[str, dict[str, float]]

    def __post_init__(self) -> None:
        n = self.qubit_count
        if not 1 <= n <= 5:
            raise ValueError(f"qubit count must be 1..5, got {n}")
        if self.shots is not None and self.shots < 1:
            raise ValueError(f"shots must be positive, got {self.shots}")
        for tag, counts in self.records.items():
            if len(tag) != n or any(ch not in BASIS_ORDER for ch in tag):
                raise ValueError(f"bad setting tag {tag!r} for {n} qubit(s)")
            if not counts:
                raise ValueError(f"setting {tag!r} has no outcomes")
            total = 0.0
            for outcome, weight in counts.items():
                if len(outcome) != n or any(ch not in "01" for ch in outcome):
                    raise ValueError(f"bad outcome key {outcome!r} under {tag!r}")
                if weight < 0:
                    raise ValueError(f"negative weight for {outcome!r} under {tag!r}")
                total += weight
            expected = 1.0 if self.shots is None else float(self.shots)
            if abs(total - expected) > 1e-6 * max(1.0, expected):
                raise ValueError(
                    f"setting {tag!r}: weights sum to {total}, expected {expected}"
                )


def _first_compatible(dataset: TomographyDataset, pauli: str) -> str:
    for tag in qst_settings(dataset.qubit_count):
        if tag not in dataset.records:
            continue
        if all(p == "I" or p == s for p, s in zip(pauli, tag)):
            return tag
    raise ValueError(f"no recorded setting is compatible with {pauli!r}")


def estimate_pauli(dataset: TomographyDataset, pauli: str) -> float:
    """Estimate <P> for a Pauli string (letters I X Y Z, high qubit first)."""
    n = dataset.qubit_count
    if len(pauli) != n or any(ch not in "IXYZ" for ch in pauli):
        raise ValueError(f"bad Pauli string {pauli!r} for {n} qubit(s)")
    if pauli == "I" * n:
        return 1.0
    tag = _first_compatible(dataset, pauli)
    counts = dataset.records[tag]
    acc = 0.0
    total = 0.0
    support = [p for p, ch in enumerate(pauli) if ch != "I"]
    for outcome, weight in counts.items():
        sign = 1.0
        for p in support:
            if outcome[p] == "1":
                sign = -sign
        acc += sign * weight
        total += weight
    return acc / total


def all_expectations(dataset: TomographyDataset) -> dict[str, float]:
    """<P> for every one of the 4**n Pauli strings."""
    n = dataset.qubit_count
    return {
        "".join(p): estimate_pauli(dataset, "".join(p))
        for p in itertools.product("IXYZ", repeat=n)
    }


def reconstruct_density(expectations: dict[str, float], qubit_count: int) -> np.ndarray:
    """Linear inversion rho = 2^-n sum <P> P, symmetrised.

    All 4**n strings except the identity must be present; the identity
    coefficient is pinned to 1, which fixes the trace exactly.
    """
    n = qubit_count
    dim = 1 << n
    rho = np.eye(dim, dtype=complex)
    for letters in itertools.product("IXYZ", repeat=n):
        pauli = "".join(letters)
        if pauli == "I" * n:
            continue
        if pauli not in expectations:
            raise ValueError(f"missing expectation for {pauli!r}")
        rho += expectations[pauli] * pauli_string_matrix(pauli)
    rho /= dim
    return (rho + rho.conj().T) / 2.0


def reconstruct_from_dataset(dataset: TomographyDataset) -> np.ndarray:
    return reconstruct_density(all_expectations(dataset), dataset.qubit_count)


def project_psd(rho: np.ndarray) -> np.ndarray:
    """Clip negative eigenvalues and renormalise to the original trace."""
    rho = np.asarray(rho, dtype=complex)
    target = np.trace(rho).real
    vals, vecs = np.linalg.eigh((rho + rho.conj().T) / 2.0)
    vals = np.clip(vals, 0.0, None)
    s = vals.sum()
    if s <= 0:
        raise ValueError("matrix has no positive part to project onto")
    vals *= target / s
    return (vecs * vals) @ vecs.conj().T


def _sqrtm_psd(a: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(a)
    return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.conj().T


def state_fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """Uhlmann fidelity; tiny negative eigenvalues are clipped first."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    ra = _sqrtm_psd((a + a.conj().T) / 2.0)
    inner = ra @ ((b + b.conj().T) / 2.0) @ ra
    vals = np.linalg.eigvalsh((inner + inner.conj().T) / 2.0)
    root = np.sqrt(np.clip(vals, 0.0, None)).sum()
    return float(root * root)


# --- dataset (de)serialisation ------------------------------------------------


def write_dataset(dataset: TomographyDataset) -> str:
    lines = ["format=1", f"qubits={dataset.qubit_count}",
             f"shots={'exact' if dataset.shots is None else dataset.shots}"]
    for tag in sorted(dataset.records):
        parts = [tag]
        for outcome in sorted(dataset.records[tag]):
            weight = dataset.records[tag][outcome]
            parts.append(f"{outcome}:{weight!r}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def read_dataset(text: str) -> TomographyDataset:
    header: dict[str, str] = {}
    records: dict[str, dict[str, float]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) == 1 and "=" in parts[0]:
            key, _, value = parts[0].partition("=")
            if key in header:
                raise ValueError(f"line {lineno}: duplicate header key {key!r}")
            header[key] = value
            continue
        tag = parts[0]
        if tag in records:
            raise ValueError(f"line {lineno}: duplicate setting {tag!r}")
        counts: dict[str, float] = {}
        for item in parts[1:]:
            outcome, sep, weight = item.partition(":")
            if not sep:
                raise ValueError(f"line {lineno}: expected outcome:weight, got {item!r}")
            try:
                counts[outcome] = float(weight)
            except ValueError:
                raise ValueError(f"line {lineno}: bad weight {weight!r}") from None
        if not counts:
            raise ValueError(f"line {lineno}: setting {tag!r} has no outcomes")
        records[tag] = counts
    if header.get("format", "1") != "1":
        raise ValueError(f"unsupported dataset format {header.get('format')!r}")
    for key in ("qubits", "shots"):
        if key not in header:
            raise ValueError(f"missing dataset header {key!r}")
    qubit_count = int(header["qubits"])
    shots = None if header["shots"] == "exact" else int(header["shots"])
    return TomographyDataset(qubit_count=qubit_count, shots=shots, records=records)


# --- running tomography against a backend --------------------------------------


def child_seeds(seed: int | None, count: int) -> list[int | None]:
    """Per-circuit seeds derived from one master seed (all None when unseeded)."""
    if seed is None:
        return [None] * count
    state = np.random.SeedSequence(seed).generate_state(count, dtype=np.uint64)
    return [int(s) for s in state]


def collect_dataset(prep: Circuit, backend: BackendModel,
                    qubits: tuple[int, ...] | None = None,
                    shots: int | None = None,
                    seed: int | None = None) -> TomographyDataset:
    """Run every setting circuit for ``prep`` and bundle the outcomes."""
    if qubits is None:
        qubits = tuple(range(prep.qubit_count - 1, -1, -1))
    settings = qst_settings(len(qubits))
    seeds = child_seeds(seed, len(settings))
    records: dict[str, dict[str, float]] = {}
    for tag, s in zip(settings, seeds):
        circuit = append_setting(prep, tag, qubits)
        if shots is None:
            result = execute_exact(circuit, backend)
            records[tag] = dict(result.probabilities)
        else:
            result = execute(circuit, backend, shots, 0 if s is None else s)
            records[tag] = {k: float(v) for k, v in result.counts.items()}
    return TomographyDataset(qubit_count=len(qubits), shots=shots, records=records)


@dataclass(frozen=True)
class QstRun:
    state: np.ndarray
    dataset: TomographyDataset
    executions: int


def run_qst(circuit: Circuit, backend: BackendModel,
            shots: int | None = None, seed: int | None = None) -> QstRun:
    """Tomograph the state a measurement-free circuit prepares.

    ``shots=None`` uses exact outcome probabilities; otherwise each of the
    3**n settings is sampled with its own seed derived from ``seed``.
    """
    dataset = collect_dataset(circuit, backend, shots=shots, seed=seed)
    state = reconstruct_from_dataset(dataset)
    return QstRun(state=state, dataset=dataset, executions=len(dataset.records))
