"""Chi-matrix process tomography by linear inversion.

The channel acting on a d-dimensional register (d = 2 or 4 here) is written
in a fixed operator set {E_m} as

    eps(rho) = sum_mn  chi_mn  E_m rho E_n^dagger .

The fixed set is I, X, -iY, Z for one qubit; for two qubits the sixteen
Kronecker products of those factors, ordered first factor slowest, are used,
so every operator carries a (-i) per Y factor and all sixteen matrices are
real.  The input basis is the d^2 matrix units |a><b| in row-major (a, b)
order.  Feeding each basis element through the channel and expanding the
outputs in the same units gives

    eps(rho_j) = sum_k lambda_jk rho_k ,
    E_m rho_j E_n^dagger = sum_k beta^{jk}_{mn} rho_k ,

and chi solves the linear system beta . vec(chi) = lambda, with (j, k) and
(m, n) both flattened row-major.  For matrix-unit bases beta and lambda are
exact coordinate read-offs (entry (a_k, b_k) of the matrix in question), no
fitting involved; beta is orthogonal up to scale, so the solve is
numerically trivial.

Matrix units are not states, so each one is assembled from at most four
physically preparable pure states

    |0>, |1>, |+> = H|0>, |r> = SH|0>   (per qubit),

e.g.  |0><1| = |+><+| + i |r><r| - (1+i)/2 (|0><0| + |1><1|).  The identity
is checked symbolically at import time; two-qubit recipes are the per-qubit
products (16 preparations overall).

``run_qpt`` drives the whole pipeline against a backend: 4 (or 16)
preparations x 3 (or 9) tomography settings = 12 (or 144) circuit
executions, state tomography per preparation, recipe combination, linear
inversion, then the overlap fidelity

    F = Tr(chi_exp chi_th^dagger) / sqrt(Tr(chi_th^dagger chi_th))
                                  / sqrt(Tr(chi_exp^dagger chi_exp))

against the ideal gate's chi.  ``qpt_channel`` runs the same mathematics
directly on a Kraus channel, which is how the pipeline is cross-checked
against channels whose chi is known.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from functools import lru_cache, reduce

import numpy as np

from .backend import QUBIT_COUNT, BackendModel, TopologyError
from .channels import KrausChannel, apply_channel
from .operators import (
    GATE_ARITY,
    dagger,
    kron,
    pauli_expectation,
    pauli_string_matrix,
    standard_gate,
)
from .qasm import Circuit, Gate
from .state_tomography import (
    child_seeds,
    collect_dataset,
    project_psd,
    qst_settings,
    reconstruct_density,
    reconstruct_from_dataset,
)

__all__ = [
    "FixedOperatorSet",
    "InputBasis",
    "PreparationRecipe",
    "BetaTensor",
    "LambdaVector",
    "ChiMatrix",
    "QptResult",
    "fixed_operator_set",
    "matrix_unit_basis",
    "preparation_recipes",
    "preparation_state",
    "preparation_circuit",
    "PREPARATION_GATES",
    "beta_tensor",
    "lambda_from_outputs",
    "solve_chi",
    "theoretical_chi",
    "chi_to_channel",
    "tp_deviation",
    "process_fidelity",
    "project_chi_psd",
    "qpt_channel",
    "run_qpt",
    "project_result",
]


# --- fixed operator set and input basis ---------------------------------------


@dataclass(frozen=True)
class FixedOperatorSet:
    """The expansion operators {E_m}, with printable labels."""

    qubit_count: int
    labels: tuple[str, ...]
    operators: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        ops = tuple(np.array(op, dtype=complex) for op in self.operators)
        for op in ops:
            op.setflags(write=False)
        object.__setattr__(self, "operators", ops)
        gram = np.array(
            [[np.trace(dagger(a) @ b) for b in ops] for a in ops]
        )
        if np.linalg.matrix_rank(gram) != len(ops):
            raise ValueError("fixed operator set has a singular Gram matrix")
        gram.setflags(write=False)
        object.__setattr__(self, "_gram", gram)

    @property
    def gram(self) -> np.ndarray:
        return self._gram


_SINGLE_FIXED = (
    ("I", np.eye(2, dtype=complex)),
    ("X", np.array([[0, 1], [1, 0]], dtype=complex)),
    ("-iY", np.array([[0, -1], [1, 0]], dtype=complex)),
    ("Z", np.array([[1, 0], [0, -1]], dtype=complex)),
)

_PHASE_PREFIX = {0: "", 1: "-i", 2: "-"}


@lru_cache(maxsize=None)
def fixed_operator_set(qubit_count: int) -> FixedOperatorSet:
    """I, X, -iY, Z for one qubit; their 16 ordered products for two."""
    if qubit_count == 1:
        labels, ops = zip(*_SINGLE_FIXED)
        return FixedOperatorSet(1, tuple(labels), tuple(ops))
    if qubit_count == 2:
        labels = []
        ops = []
        for (la, a), (lb, b) in itertools.product(_SINGLE_FIXED, repeat=2):
            ys = (la == "-iY") + (lb == "-iY")
            labels.append(_PHASE_PREFIX[ys] + la.replace("-i", "") + lb.replace("-i", ""))
            ops.append(kron(a, b))
        return FixedOperatorSet(2, tuple(labels), tuple(ops))
    raise ValueError(f"fixed operator sets cover 1 or 2 qubits, got {qubit_count}")


@dataclass(frozen=True)
class InputBasis:
    """Matrix units |a><b| in row-major (a, b) order."""

    qubit_count: int
    labels: tuple[str, ...]
    elements: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        elems = tuple(np.array(e, dtype=complex) for e in self.elements)
        for e in elems:
            e.setflags(write=False)
        object.__setattr__(self, "elements", elems)


@lru_cache(maxsize=None)
def matrix_unit_basis(qubit_count: int) -> InputBasis:
    if qubit_count not in (1, 2):
        raise ValueError(f"input bases cover 1 or 2 qubits, got {qubit_count}")
    d = 1 << qubit_count
    labels = []
    elements = []
    for a in range(d):
        for b in range(d):
            unit = np.zeros((d, d), dtype=complex)
            unit[a, b] = 1.0
            elements.append(unit)
            labels.append(f"|{a:0{qubit_count}b}><{b:0{qubit_count}b}|")
    return InputBasis(qubit_count, tuple(labels), tuple(elements))


# --- physical preparations ------------------------------------------------------

# per-qubit preparation alphabet: gates applied to |0>, listed in circuit order
PREPARATION_GATES: dict[str, tuple[str, ...]] = {
    "0": (),
    "1": ("x",),
    "p": ("h",),
    "r": ("h", "s"),
}

_PREP_KETS = {
    "0": np.array([1.0, 0.0], dtype=complex),
    "1": np.array([0.0, 1.0], dtype=complex),
    "p": np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0),
    "r": np.array([1.0, 1.0j], dtype=complex) / math.sqrt(2.0),
}


def preparation_state(label: str) -> np.ndarray:
    """Density matrix of a product preparation such as ``"p0"`` (high qubit first)."""
    if not label or any(ch not in _PREP_KETS for ch in label):
        raise ValueError(f"bad preparation label {label!r}")
    ket = reduce(np.kron, (_PREP_KETS[ch] for ch in label))
    return np.outer(ket, ket.conj())


def preparation_circuit(label: str, lines: tuple[int, ...], qubit_count: int = QUBIT_COUNT) -> Circuit:
    """Circuit preparing ``label`` on ``lines`` (label char 0 -> lines[0])."""
    if len(label) != len(lines):
        raise ValueError(f"label {label!r} does not match {len(lines)} line(s)")
    gates = []
    for ch, line in zip(label, lines):
        if ch not in PREPARATION_GATES:
            raise ValueError(f"bad preparation label {label!r}")
        gates.extend(Gate(g, (line,)) for g in PREPARATION_GATES[ch])
    return Circuit(qubit_count, 0, tuple(gates))


@dataclass(frozen=True)
class PreparationRecipe:
    """One matrix unit as a complex combination of physical preparations."""

    target_index: int
    terms: tuple[tuple[complex, str], ...]


_HALF_PLUS = (1.0 + 1.0j) / 2.0
_HALF_MINUS = (1.0 - 1.0j) / 2.0

_SINGLE_RECIPES: tuple[tuple[tuple[complex, str], ...], ...] = (
    ((1.0 + 0.0j, "0"),),
    ((1.0 + 0.0j, "p"), (1.0j, "r"), (-_HALF_PLUS, "0"), (-_HALF_PLUS, "1")),
    ((1.0 + 0.0j, "p"), (-1.0j, "r"), (-_HALF_MINUS, "0"), (-_HALF_MINUS, "1")),
    ((1.0 + 0.0j, "1"),),
)


@lru_cache(maxsize=None)
def preparation_recipes(qubit_count: int) -> tuple[PreparationRecipe, ...]:
    """Recipes for every matrix unit, in basis order; identities are verified."""
    basis = matrix_unit_basis(qubit_count)
    d = 1 << qubit_count
    recipes = []
    if qubit_count == 1:
        for j in range(4):
            recipes.append(PreparationRecipe(j, _SINGLE_RECIPES[j]))
    elif qubit_count == 2:
        for a in range(4):
            for b in range(4):
                hi = _SINGLE_RECIPES[(a >> 1) * 2 + (b >> 1)]
                lo = _SINGLE_RECIPES[(a & 1) * 2 + (b & 1)]
                terms = tuple(
                    (ch * cl, lh + ll) for ch, lh in hi for cl, ll in lo
                )
                recipes.append(PreparationRecipe(a * d + b, terms))
    else:
        raise ValueError(f"recipes cover 1 or 2 qubits, got {qubit_count}")

    for recipe in recipes:
        acc = np.zeros((d, d), dtype=complex)
        for coeff, label in recipe.terms:
            acc += coeff * preparation_state(label)
        dev = np.abs(acc - basis.elements[recipe.target_index]).max()
        if dev > 1e-12:
            raise AssertionError(
                f"recipe for basis element {recipe.target_index} is off by {dev:.3e}"
            )
    return tuple(recipes)


# --- the linear system ----------------------------------------------------------


@dataclass(frozen=True)
class BetaTensor:
    """beta[(j,k),(m,n)] with both index pairs flattened row-major."""

    qubit_count: int
    matrix: np.ndarray


@dataclass(frozen=True)
class LambdaVector:
    """lambda[(j,k)] flattened row-major."""

    qubit_count: int
    vector: np.ndarray


def beta_tensor(basis: InputBasis, ops: FixedOperatorSet) -> BetaTensor:
    """Expansion coefficients of E_m rho_j E_n^dagger in the matrix units.

    For matrix units the coefficient of rho_k is just entry (a_k, b_k), i.e.
    the row-major flattening of the conjugated matrix.
    """
    if basis.qubit_count != ops.qubit_count:
        raise ValueError("input basis and operator set disagree on qubit count")
    d2 = len(basis.elements)
    beta = np.zeros((d2 * d2, d2 * d2), dtype=complex)
    for m, em in enumerate(ops.operators):
        for n, en in enumerate(ops.operators):
            col = m * d2 + n
            en_dag = en.conj().T
            for j, rho_j in enumerate(basis.elements):
                beta[j * d2:(j + 1) * d2, col] = (em @ rho_j @ en_dag).reshape(-1)
    return BetaTensor(basis.qubit_count, beta)


@lru_cache(maxsize=None)
def _beta_for(qubit_count: int) -> BetaTensor:
    return beta_tensor(matrix_unit_basis(qubit_count), fixed_operator_set(qubit_count))


def lambda_from_outputs(outputs, basis: InputBasis) -> LambdaVector:
    """Stack the matrix-unit coefficients of the channel outputs eps(rho_j).

    Trace preservation fixes Tr(eps(rho_j)) = Tr(rho_j); that is checked here
    (it holds exactly for tomographic reconstructions because the identity
    coefficient is pinned).
    """
    d2 = len(basis.elements)
    d = 1 << basis.qubit_count
    outputs = [np.asarray(o, dtype=complex) for o in outputs]
    if len(outputs) != d2:
        raise ValueError(f"expected {d2} channel outputs, got {len(outputs)}")
    lam = np.zeros(d2 * d2, dtype=complex)
    for j, out in enumerate(outputs):
        if out.shape != (d, d):
            raise ValueError(f"output {j} has shape {out.shape}, expected {(d, d)}")
        expected = complex(np.trace(basis.elements[j]))
        got = complex(np.trace(out))
        if abs(got - expected) > 1e-8:
            raise ValueError(
                f"output {j}: trace {got:.6g} differs from Tr(rho_j) = {expected:.6g}"
            )
        lam[j * d2:(j + 1) * d2] = out.reshape(-1)
    return LambdaVector(basis.qubit_count, lam)


@dataclass(frozen=True)
class ChiMatrix:
    """Hermitised process matrix over a fixed operator set."""

    qubit_count: int
    matrix: np.ndarray
    residual: float = 0.0

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=complex)
        d2 = (1 << self.qubit_count) ** 2
        if m.shape != (d2, d2):
            raise ValueError(f"chi shape {m.shape} does not match {d2}x{d2}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


def solve_chi(beta: BetaTensor, lam: LambdaVector) -> ChiMatrix:
    """chi = beta^-1 lambda, reshaped row-major and symmetrised."""
    if beta.qubit_count != lam.qubit_count:
        raise ValueError("beta and lambda disagree on qubit count")
    x = np.linalg.solve(beta.matrix, lam.vector)
    residual = float(np.abs(beta.matrix @ x - lam.vector).max())
    d2 = 1 << (2 * beta.qubit_count)
    chi = x.reshape(d2, d2)
    chi = (chi + chi.conj().T) / 2.0
    return ChiMatrix(beta.qubit_count, chi, residual)


def theoretical_chi(gate, ops: FixedOperatorSet | None = None) -> ChiMatrix:
    """Rank-one chi of an ideal unitary (gate name or explicit matrix)."""
    u = standard_gate(gate) if isinstance(gate, str) else np.asarray(gate, dtype=complex)
    n = u.shape[0].bit_length() - 1
    if ops is None:
        ops = fixed_operator_set(n)
    if u.shape != ops.operators[0].shape:
        raise ValueError(
            f"unitary shape {u.shape} does not match the {ops.qubit_count}-qubit set"
        )
    rhs = np.array([np.trace(dagger(em) @ u) for em in ops.operators])
    coeffs = np.linalg.solve(ops.gram, rhs)
    rebuilt = sum(c * em for c, em in zip(coeffs, ops.operators))
    dev = np.abs(rebuilt - u).max()
    if dev > 1e-9:
        raise ValueError(f"matrix lies {dev:.3e} outside the operator set's span")
    chi = np.outer(coeffs, coeffs.conj())
    return ChiMatrix(ops.qubit_count, (chi + chi.conj().T) / 2.0, 0.0)


def chi_to_channel(chi: ChiMatrix, ops: FixedOperatorSet | None = None):
    """Return the linear map rho -> sum_mn chi_mn E_m rho E_n^dagger.

    The map is applied literally, so it accepts any matrix of the right
    dimension (basis elements included), not just density matrices.
    """
    if ops is None:
        ops = fixed_operator_set(chi.qubit_count)
    if ops.qubit_count != chi.qubit_count:
        raise ValueError("chi and operator set disagree on qubit count")
    pairs = [
        (chi.matrix[m, n], em, en.conj().T)
        for m, em in enumerate(ops.operators)
        for n, en in enumerate(ops.operators)
        if chi.matrix[m, n] != 0
    ]

    def apply(rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        out = np.zeros_like(rho)
        for c, em, en_dag in pairs:
            out += c * (em @ rho @ en_dag)
        return out

    return apply


def tp_deviation(chi: ChiMatrix, ops: FixedOperatorSet | None = None) -> float:
    """Max-norm deviation of sum_mn chi_mn E_n^dagger E_m from the identity.

    Zero exactly when the reconstructed channel is trace preserving.
    """
    if ops is None:
        ops = fixed_operator_set(chi.qubit_count)
    d = 1 << chi.qubit_count
    acc = np.zeros((d, d), dtype=complex)
    for m, em in enumerate(ops.operators):
        for n, en in enumerate(ops.operators):
            acc += chi.matrix[m, n] * (en.conj().T @ em)
    return float(np.abs(acc - np.eye(d)).max())


def _chi_array(chi) -> np.ndarray:
    return chi.matrix if isinstance(chi, ChiMatrix) else np.asarray(chi, dtype=complex)


def process_fidelity(chi_theory, chi_experiment) -> float:
    """Overlap fidelity Tr(chi_e chi_t^dag) / (||chi_t||_F ||chi_e||_F)."""
    a = _chi_array(chi_theory)
    b = _chi_array(chi_experiment)
    if a.shape != b.shape:
        raise ValueError(f"chi shape mismatch {a.shape} vs {b.shape}")
    na = math.sqrt(abs(np.trace(a.conj().T @ a)))
    nb = math.sqrt(abs(np.trace(b.conj().T @ b)))
    if na == 0.0 or nb == 0.0:
        raise ValueError("cannot compute fidelity against a zero chi matrix")
    value = np.trace(b @ a.conj().T) / (na * nb)
    if abs(value.imag) > 1e-9:
        raise ValueError(f"fidelity has a non-trivial imaginary part {value.imag:.3e}")
    return float(value.real)


def project_chi_psd(chi: ChiMatrix) -> ChiMatrix:
    """Clip negative eigenvalues, renormalising to the original trace."""
    return ChiMatrix(chi.qubit_count, project_psd(chi.matrix), chi.residual)


# --- pipelines -------------------------------------------------------------------


def _distinct_labels(recipes) -> list[str]:
    return sorted({label for r in recipes for _, label in r.terms})


def _chi_from_outputs(out_by_label: dict[str, np.ndarray], qubit_count: int) -> ChiMatrix:
    basis = matrix_unit_basis(qubit_count)
    recipes = preparation_recipes(qubit_count)
    outputs = []
    for recipe in recipes:
        d = 1 << qubit_count
        acc = np.zeros((d, d), dtype=complex)
        for coeff, label in recipe.terms:
            acc += coeff * out_by_label[label]
        outputs.append(acc)
    lam = lambda_from_outputs(outputs, basis)
    return solve_chi(_beta_for(qubit_count), lam)


def qpt_channel(channel: KrausChannel) -> ChiMatrix:
    """Tomograph a Kraus channel exactly (no circuits, no sampling).

    Mirrors the measurement pipeline: each preparation state is pushed
    through the channel, expanded in Pauli expectations, reconstructed, and
    the recipe combinations feed the same linear inversion as ``run_qpt``.
    """
    n = channel.qubit_count
    if n not in (1, 2):
        raise ValueError(f"process tomography covers 1 or 2 qubits, got {n}")
    labels = _distinct_labels(preparation_recipes(n))
    out_by_label = {}
    for label in labels:
        rho_out = apply_channel(channel, preparation_state(label))
        exps = {
            "".join(p): pauli_expectation(rho_out, pauli_string_matrix("".join(p)))
            for p in itertools.product("IXYZ", repeat=n)
        }
        out_by_label[label] = reconstruct_density(exps, n)
    return _chi_from_outputs(out_by_label, n)


@dataclass(frozen=True)
class QptResult:
    """Everything one tomography run produced."""

    gate: str
    lines: tuple[int, ...]
    backend_name: str
    noise: bool
    shots: int | None
    seed: int | None
    executions: int
    chi: ChiMatrix
    chi_theory: ChiMatrix
    fidelity: float
    tp_deviation: float
    psd_projected: bool = False

    @property
    def residual(self) -> float:
        return self.chi.residual


def project_result(result: QptResult) -> QptResult:
    """PSD-project the experimental chi and recompute the derived figures."""
    chi = project_chi_psd(result.chi)
    return replace(
        result,
        chi=chi,
        fidelity=process_fidelity(result.chi_theory, chi),
        tp_deviation=tp_deviation(chi),
        psd_projected=True,
    )


def run_qpt(
    gate: str,
    lines: tuple[int, ...] | list[int],
    backend: BackendModel,
    shots: int | None = None,
    seed: int | None = None,
) -> QptResult:
    """Full process tomography of one gate placement on a backend.

    ``lines`` lists the tomographed qubits most significant first; for cx
    that is (control, target) and the pair must sit on the backend's
    coupling map.  ``shots=None`` runs on exact outcome probabilities,
    otherwise every tomography circuit is sampled with ``shots`` shots using
    per-circuit seeds derived from ``seed``.
    """
    lines = tuple(int(x) for x in lines)
    arity = GATE_ARITY.get(gate)
    if arity is None:
        raise ValueError(f"unknown gate {gate!r}")
    if len(lines) != arity:
        raise ValueError(f"gate {gate!r} needs {arity} line(s), got {lines}")
    if len(set(lines)) != len(lines):
        raise ValueError(f"duplicate lines {lines}")
    for q in lines:
        if not 0 <= q < QUBIT_COUNT:
            raise ValueError(f"line {q} out of range for a {QUBIT_COUNT}-qubit backend")
    if gate == "cx" and not backend.coupling.allows(*lines):
        raise TopologyError(
            f"cx {lines[0]}>{lines[1]} not in the {backend.name} coupling map "
            f"({backend.coupling.to_text()})"
        )

    n = arity
    recipes = preparation_recipes(n)
    labels = _distinct_labels(recipes)
    settings_per_label = len(qst_settings(n))
    label_seeds = child_seeds(seed, len(labels))

    out_by_label = {}
    executions = 0
    for label, label_seed in zip(labels, label_seeds):
        prep = preparation_circuit(label, lines, QUBIT_COUNT)
        prep = prep.extended(Gate(gate, lines))
        dataset = collect_dataset(prep, backend, qubits=lines,
                                  shots=shots, seed=label_seed)
        executions += len(dataset.records)
        out_by_label[label] = reconstruct_from_dataset(dataset)
    assert executions == len(labels) * settings_per_label

    chi = _chi_from_outputs(out_by_label, n)
    theory = theoretical_chi(gate)
    fidelity = process_fidelity(theory, chi)
    return QptResult(
        gate=gate,
        lines=lines,
        backend_name=backend.name,
        noise=backend.noise_enabled,
        shots=shots,
        seed=seed,
        executions=executions,
        chi=chi,
        chi_theory=theory,
        fidelity=fidelity,
        tp_deviation=tp_deviation(chi),
    )
