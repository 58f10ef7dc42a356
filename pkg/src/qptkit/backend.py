"""Density-matrix execution of circuits against a 5-qubit device model.

A backend model carries per-qubit T1/T2 (microseconds), per-gate durations
(nanoseconds), a directed coupling map restricting cx placement, and two
switches: ``noise`` (decoherence on/off) and ``idle_decay`` (whether qubits
not touched by a gate decay during it; default off, i.e. gates on other
qubits are treated as instantaneous for spectators).

Evolution semantics, in order, per instruction:

* gate: ideal unitary, then, with noise on, amplitude damping followed by
  pure dephasing for the gate duration on each involved qubit (on every
  qubit when idle_decay is on);
* measure: with noise on, the measured qubit decays for the measure
  duration; the qubit-to-classical-bit assignment is recorded and read out
  from the final state's diagonal.

Sampling draws one uniform per shot for the outcome (inverse CDF over
classical outcomes in increasing integer order) followed by one uniform per
measured classical bit, in increasing classical-bit order, for the readout
flip; the matrix of uniforms is generated shot-major.  Identical
(circuit, backend, shots, seed) therefore reproduce identical counts.

Config files are flat ``key=value`` text, ``#`` comments allowed::

    format=1
    name=ibmqx4-sim
    q0.t1_us=48.70
    q0.t2_us=14.00
    q0.readout_flip=0.0
    ...
    dur.single_ns=60
    dur.cx_ns=300
    dur.measure_ns=300
    coupling=1>0,2>0,2>1,3>2,3>4,2>4
    noise=on
    idle_decay=off

Required: name, q0..q4 t1/t2, coupling.  Optional with defaults:
readout_flip 0.0, durations 60/300/300, noise on, idle_decay off, format 1.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .channels import NoiseParams, amplitude_damping, pure_dephasing
from .operators import GATE_ARITY, check_density_matrix, embed_gate, standard_gate
from .qasm import Circuit, CouplingMap, Gate, Measure, validate_topology

__all__ = [
    "BackendModel",
    "ExecutionResult",
    "ConfigError",
    "TopologyError",
    "QUBIT_COUNT",
    "DEFAULT_DURATIONS_NS",
    "load_backend",
    "read_backend",
    "builtin_backend",
    "builtin_backend_names",
    "execute_exact",
    "execute",
]

QUBIT_COUNT = 5

DEFAULT_DURATIONS_NS = {"single": 60.0, "cx": 300.0, "measure": 300.0}


class ConfigError(ValueError):
    """Backend config text is malformed or unphysical."""


class TopologyError(ValueError):
    """A cx instruction sits outside the backend coupling map."""


@dataclass(frozen=True)
class BackendModel:
    name: str
    qubits: tuple[NoiseParams, ...]
    gate_durations_ns: dict[str, float]
    measure_duration_ns: float
    coupling: CouplingMap
    noise_enabled: bool = True
    idle_decay: bool = False

    def __post_init__(self) -> None:
        if len(self.qubits) != QUBIT_COUNT:
            raise ConfigError(
                f"backend needs exactly {QUBIT_COUNT} qubits, got {len(self.qubits)}"
            )
        missing = sorted(set(GATE_ARITY) - set(self.gate_durations_ns))
        if missing:
            raise ConfigError(f"missing gate durations for {missing}")
        for g, d in self.gate_durations_ns.items():
            if d < 0:
                raise ConfigError(f"negative duration for gate {g!r}")
        if self.measure_duration_ns < 0:
            raise ConfigError("negative measure duration")

    def with_noise(self, enabled: bool) -> "BackendModel":
        return replace(self, noise_enabled=enabled)

    def with_idle_decay(self, enabled: bool) -> "BackendModel":
        return replace(self, idle_decay=enabled)

    def scaled_durations(self, factor: float) -> "BackendModel":
        """Copy with every gate and measure duration multiplied by factor."""
        if factor < 0:
            raise ValueError("duration scale factor must be non-negative")
        return replace(
            self,
            gate_durations_ns={g: d * factor for g, d in self.gate_durations_ns.items()},
            measure_duration_ns=self.measure_duration_ns * factor,
        )


@dataclass(frozen=True)
class ExecutionResult:
    """Counts (sampled mode) or final state plus exact probabilities."""

    counts: dict[str, int] | None = None
    shots: int | None = None
    final_state: np.ndarray | None = None
    probabilities: dict[str, float] | None = None


# --- config ------------------------------------------------------------------

_BOOL = {"on": True, "off": False}


def load_backend(text: str) -> BackendModel:
    """Build a BackendModel from config text (see module docstring)."""
    entries: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        for token in line.split():
            key, eq, value = token.partition("=")
            if not eq or not key:
                raise ConfigError(f"line {lineno}: expected key=value, got {token!r}")
            if key in entries:
                raise ConfigError(f"line {lineno}: duplicate key {key!r}")
            entries[key] = (value, lineno)

    known: set[str] = {"format", "name", "coupling", "noise", "idle_decay",
                       "dur.single_ns", "dur.cx_ns", "dur.measure_ns"}
    for i in range(QUBIT_COUNT):
        known |= {f"q{i}.t1_us", f"q{i}.t2_us", f"q{i}.readout_flip"}
    for key, (_, lineno) in entries.items():
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")

    def take(key: str, default: str | None = None) -> str:
        if key in entries:
            return entries[key][0]
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default

    def take_float(key: str, default: str | None = None) -> float:
        value = take(key, default)
        try:
            return float(value)
        except ValueError:
            raise ConfigError(f"key {key!r}: not a number: {value!r}") from None

    def take_bool(key: str, default: str) -> bool:
        value = take(key, default)
        if value not in _BOOL:
            raise ConfigError(f"key {key!r}: expected on/off, got {value!r}")
        return _BOOL[value]

    fmt = take("format", "1")
    if fmt != "1":
        raise ConfigError(f"unsupported config format {fmt!r}")

    name = take("name")

    qubits = []
    for i in range(QUBIT_COUNT):
        t1 = take_float(f"q{i}.t1_us")
        t2 = take_float(f"q{i}.t2_us")
        flip = take_float(f"q{i}.readout_flip", "0.0")
        try:
            qubits.append(NoiseParams(t1_us=t1, t2_us=t2, readout_flip_prob=flip))
        except ValueError as exc:
            raise ConfigError(f"qubit {i}: {exc}") from None

    single = take_float("dur.single_ns", str(DEFAULT_DURATIONS_NS["single"]))
    cx = take_float("dur.cx_ns", str(DEFAULT_DURATIONS_NS["cx"]))
    measure = take_float("dur.measure_ns", str(DEFAULT_DURATIONS_NS["measure"]))

    try:
        coupling = CouplingMap.from_text(take("coupling"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    durations = {g: (cx if g == "cx" else single) for g in GATE_ARITY}

    return BackendModel(
        name=name,
        qubits=tuple(qubits),
        gate_durations_ns=durations,
        measure_duration_ns=measure,
        coupling=coupling,
        noise_enabled=take_bool("noise", "on"),
        idle_decay=take_bool("idle_decay", "off"),
    )


def read_backend(path: str | Path) -> BackendModel:
    return load_backend(Path(path).read_text(encoding="utf-8"))


def builtin_backend_names() -> list[str]:
    root = resources.files("qptkit").joinpath("configs")
    return sorted(p.name[: -len(".cfg")] for p in root.iterdir() if p.name.endswith(".cfg"))


def builtin_backend(name: str) -> BackendModel:
    """Load one of the packaged device transcriptions (e.g. ``qx4``, ``qx2``)."""
    res = resources.files("qptkit").joinpath(f"configs/{name}.cfg")
    if not res.is_file():
        raise ConfigError(
            f"no builtin backend {name!r}; available: {builtin_backend_names()}"
        )
    return load_backend(res.read_text(encoding="utf-8"))


# --- execution ---------------------------------------------------------------


def _check_topology(circuit: Circuit, backend: BackendModel) -> None:
    bad = validate_topology(circuit, backend.coupling)
    if bad:
        pos, control, target = bad[0]
        raise TopologyError(
            f"instruction {pos}: cx {control}>{target} not in the "
            f"{backend.name} coupling map ({backend.coupling.to_text()})"
        )


def _decayed(rho: np.ndarray, qubit: int, n: int, duration_ns: float,
             params: NoiseParams) -> np.ndarray:
    if duration_ns == 0:
        return rho
    for ch in (
        amplitude_damping(duration_ns, params.t1_us),
        pure_dephasing(duration_ns, params.t1_us, params.t2_us),
    ):
        acc = np.zeros_like(rho)
        for op in ch.operators:
            e = embed_gate(op, [qubit], n)
            acc += e @ rho @ e.conj().T
        rho = acc
    return rho


def _evolve(circuit: Circuit, backend: BackendModel) -> tuple[np.ndarray, list[Measure]]:
    n = circuit.qubit_count
    dim = 1 << n
    rho = np.zeros((dim, dim), dtype=complex)
    rho[0, 0] = 1.0
    measures: list[Measure] = []
    for pos, inst in enumerate(circuit.instructions):
        if isinstance(inst, Gate):
            u = embed_gate(standard_gate(inst.name), inst.targets, n)
            rho = u @ rho @ u.conj().T
            if backend.noise_enabled:
                duration = backend.gate_durations_ns[inst.name]
                involved = range(n) if backend.idle_decay else inst.targets
                for q in involved:
                    rho = _decayed(rho, q, n, duration, backend.qubits[q])
        else:
            measures.append(inst)
            if backend.noise_enabled:
                rho = _decayed(rho, inst.qubit, n, backend.measure_duration_ns,
                               backend.qubits[inst.qubit])
        tr = np.trace(rho).real
        if abs(tr - 1.0) > 1e-9:
            raise ValueError(
                f"instruction {pos}: state trace drifted to {tr!r} during evolution"
            )
    check_density_matrix(rho, atol=1e-9)
    return rho, measures


def _distribution(rho: np.ndarray, measures: list[Measure],
                  classical_count: int) -> dict[str, float]:
    weights = np.clip(np.diag(rho).real, 0.0, None)
    probs: dict[str, float] = {}
    for idx, w in enumerate(weights):
        if w == 0.0:
            continue
        bits = ["0"] * classical_count
        for m in measures:
            bits[classical_count - 1 - m.clbit] = str((idx >> m.qubit) & 1)
        key = "".join(bits)
        probs[key] = probs.get(key, 0.0) + float(w)
    total = sum(probs.values())
    return {k: v / total for k, v in sorted(probs.items())}


def execute_exact(circuit: Circuit, backend: BackendModel) -> ExecutionResult:
    """Evolve the density matrix; no sampling.

    ``final_state`` is the register state after all instructions (including
    measure-duration decay when noise is on); ``probabilities`` maps classical
    bitstrings to exact outcome weights, or None when nothing is measured.
    """
    _check_topology(circuit, backend)
    rho, measures = _evolve(circuit, backend)
    probabilities = (
        _distribution(rho, measures, circuit.classical_count) if measures else None
    )
    return ExecutionResult(final_state=rho, probabilities=probabilities)


def execute(circuit: Circuit, backend: BackendModel, shots: int, seed: int) -> ExecutionResult:
    """Sample counts for a measured circuit; deterministic in the seed."""
    if shots < 1:
        raise ValueError(f"shots must be positive, got {shots}")
    exact = execute_exact(circuit, backend)
    if exact.probabilities is None:
        raise ValueError("circuit has no measurements to sample")

    m = circuit.classical_count
    outcome_probs = np.zeros(1 << m)
    for key, p in exact.probabilities.items():
        outcome_probs[int(key, 2)] = p
    cdf = np.cumsum(outcome_probs)
    cdf /= cdf[-1]

    measured = sorted(circuit.measurements, key=lambda mm: mm.clbit)
    rng = np.random.default_rng(seed)
    uniforms = rng.random((shots, 1 + len(measured)))
    outcomes = np.searchsorted(cdf, uniforms[:, 0], side="right")
    for col, meas in enumerate(measured, start=1):
        flip_prob = backend.qubits[meas.qubit].readout_flip_prob
        flipped = uniforms[:, col] < flip_prob
        outcomes = outcomes ^ (flipped.astype(np.int64) << meas.clbit)

    values, freq = np.unique(outcomes, return_counts=True)
    counts = {format(int(v), f"0{m}b"): int(c) for v, c in zip(values, freq)}
    return ExecutionResult(counts=counts, shots=shots)
