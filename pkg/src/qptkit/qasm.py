"""Circuit container plus a small OpenQASM 2.0 reader/writer.

Supported language: the ``OPENQASM 2.0;`` header, an optional
``include "qelib1.inc";``, one quantum and at most one classical register
declaration, the gates id x y z h s sdg t tdg cx, and
``measure q[i] -> c[j];``.  ``//`` comments run to end of line.  Nothing
else parses; errors carry the 1-based line and column of the offending
token.

Semantic rules enforced on every Circuit (parsed or built in code):

* at most five qubits;
* gate names known, arity respected, cx control != target;
* all indices within the declared registers;
* once a qubit is measured nothing else may touch it;
* no two measurements share a classical bit (the counts key would be
  ill-defined).

``emit_qasm`` writes a canonical form (one statement per line, include line
always present, creg omitted when there are no classical bits) and
``parse_qasm(emit_qasm(c))`` returns a structurally equal circuit.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .operators import GATE_ARITY

__all__ = [
    "Gate",
    "Measure",
    "Circuit",
    "CouplingMap",
    "CircuitError",
    "QasmError",
    "parse_qasm",
    "emit_qasm",
    "validate_topology",
]

MAX_QUBITS = 5


class CircuitError(ValueError):
    """A circuit violates a structural rule."""


class QasmError(ValueError):
    """Source text failed to parse; carries 1-based line and column."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Gate:
    name: str
    targets: tuple[int, ...]


@dataclass(frozen=True)
class Measure:
    qubit: int
    clbit: int


@dataclass(frozen=True)
class Circuit:
    qubit_count: int
    classical_count: int
    instructions: tuple[Gate | Measure, ...] = ()
    qreg: str = "q"
    creg: str = "c"

    def __post_init__(self) -> None:
        object.__setattr__(self, "instructions", tuple(self.instructions))
        if not 1 <= self.qubit_count <= MAX_QUBITS:
            raise CircuitError(
                f"qubit count must be between 1 and {MAX_QUBITS}, got {self.qubit_count}"
            )
        if self.classical_count < 0:
            raise CircuitError(f"negative classical count {self.classical_count}")
        for name in (self.qreg, self.creg):
            if not re.fullmatch(r"[a-z][A-Za-z0-9_]*", name):
                raise CircuitError(f"invalid register name {name!r}")
        measured: set[int] = set()
        used_clbits: set[int] = set()
        for pos, inst in enumerate(self.instructions):
            if isinstance(inst, Gate):
                arity = GATE_ARITY.get(inst.name)
                if arity is None:
                    raise CircuitError(f"instruction {pos}: unknown gate {inst.name!r}")
                if len(inst.targets) != arity:
                    raise CircuitError(
                        f"instruction {pos}: gate {inst.name!r} takes {arity} "
                        f"qubit(s), got {len(inst.targets)}"
                    )
                if len(set(inst.targets)) != len(inst.targets):
                    raise CircuitError(
                        f"instruction {pos}: gate {inst.name!r} repeats a qubit"
                    )
                for t in inst.targets:
                    if not 0 <= t < self.qubit_count:
                        raise CircuitError(
                            f"instruction {pos}: qubit index {t} out of range"
                        )
                    if t in measured:
                        raise CircuitError(
                            f"instruction {pos}: qubit {t} already measured"
                        )
            elif isinstance(inst, Measure):
                if not 0 <= inst.qubit < self.qubit_count:
                    raise CircuitError(
                        f"instruction {pos}: qubit index {inst.qubit} out of range"
                    )
                if not 0 <= inst.clbit < self.classical_count:
                    raise CircuitError(
                        f"instruction {pos}: classical index {inst.clbit} out of range"
                    )
                if inst.qubit in measured:
                    raise CircuitError(
                        f"instruction {pos}: qubit {inst.qubit} already measured"
                    )
                if inst.clbit in used_clbits:
                    raise CircuitError(
                        f"instruction {pos}: classical bit {inst.clbit} written twice"
                    )
                measured.add(inst.qubit)
                used_clbits.add(inst.clbit)
            else:
                raise CircuitError(f"instruction {pos}: unsupported object {inst!r}")

    @property
    def measurements(self) -> tuple[Measure, ...]:
        return tuple(i for i in self.instructions if isinstance(i, Measure))

    def extended(self, *extra: Gate | Measure, classical_count: int | None = None) -> "Circuit":
        """Copy with instructions appended (and optionally a new creg size)."""
        m = self.classical_count if classical_count is None else classical_count
        return Circuit(self.qubit_count, m, self.instructions + tuple(extra),
                       self.qreg, self.creg)


@dataclass(frozen=True)
class CouplingMap:
    """Directed control->target pairs on which cx may be placed."""

    pairs: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        pairs = frozenset((int(c), int(t)) for c, t in self.pairs)
        for c, t in pairs:
            if c == t:
                raise ValueError(f"coupling pair {c}>{t} has equal endpoints")
            if not (0 <= c < MAX_QUBITS and 0 <= t < MAX_QUBITS):
                raise ValueError(f"coupling pair {c}>{t} out of range")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def from_text(cls, text: str) -> "CouplingMap":
        """Parse a list such as ``1>0,2>0,2>1``."""
        pairs = set()
        text = text.strip()
        if text:
            for item in text.split(","):
                m = re.fullmatch(r"\s*(\d+)\s*>\s*(\d+)\s*", item)
                if not m:
                    raise ValueError(f"bad coupling entry {item!r}")
                pairs.add((int(m.group(1)), int(m.group(2))))
        return cls(frozenset(pairs))

    def to_text(self) -> str:
        return ",".join(f"{c}>{t}" for c, t in sorted(self.pairs))

    def allows(self, control: int, target: int) -> bool:
        return (control, target) in self.pairs


def validate_topology(circuit: Circuit, coupling: CouplingMap) -> list[tuple[int, int, int]]:
    """Return (instruction index, control, target) for every cx off the map."""
    bad = []
    for pos, inst in enumerate(circuit.instructions):
        if isinstance(inst, Gate) and inst.name == "cx":
            control, target = inst.targets
            if not coupling.allows(control, target):
                bad.append((pos, control, target))
    return bad


# --- parsing ---------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""(?P<id>[A-Za-z_][A-Za-z0-9_]*)
      | (?P<num>\d+(?:\.\d+)?)
      | (?P<str>"[^"\n]*")
      | (?P<arrow>->)
      | (?P<sym>[\[\];,])
      | (?P<bad>\S)""",
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("//", 1)[0]
        for m in _TOKEN_RE.finditer(line):
            kind = m.lastgroup
            col = m.start() + 1
            if kind == "bad":
                raise QasmError(f"unexpected character {m.group()!r}", lineno, col)
            tokens.append(_Token(kind, m.group(), lineno, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], source_lines: int):
        self.tokens = tokens
        self.pos = 0
        self.end_line = source_lines

    def peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> _Token:
        tok = self.peek()
        if tok is None:
            raise QasmError("unexpected end of input", self.end_line, 1)
        self.pos += 1
        return tok

    def expect(self, text: str, what: str | None = None) -> _Token:
        tok = self.take()
        if tok.text != text:
            raise QasmError(
                f"expected {what or text!r}, got {tok.text!r}", tok.line, tok.col
            )
        return tok

    def expect_int(self) -> tuple[int, _Token]:
        tok = self.take()
        if tok.kind != "num" or "." in tok.text:
            raise QasmError(f"expected an integer, got {tok.text!r}", tok.line, tok.col)
        return int(tok.text), tok

    def indexed_ref(self) -> tuple[str, int, _Token]:
        """name [ int ] -- returns (name, index, token-of-name)."""
        name_tok = self.take()
        if name_tok.kind != "id":
            raise QasmError(
                f"expected a register reference, got {name_tok.text!r}",
                name_tok.line,
                name_tok.col,
            )
        self.expect("[")
        index, itok = self.expect_int()
        self.expect("]")
        return name_tok.text, index, itok


def parse_qasm(text: str) -> Circuit:
    """Parse source text into a Circuit, or raise QasmError with position."""
    lines = max(1, len(text.splitlines()))
    p = _Parser(_tokenize(text), lines)

    tok = p.take()
    if tok.text != "OPENQASM":
        raise QasmError(f"expected 'OPENQASM', got {tok.text!r}", tok.line, tok.col)
    ver = p.take()
    if ver.text != "2.0":
        raise QasmError(f"unsupported OPENQASM version {ver.text!r}", ver.line, ver.col)
    p.expect(";")

    nxt = p.peek()
    if nxt is not None and nxt.text == "include":
        p.take()
        fname = p.take()
        if fname.kind != "str" or fname.text != '"qelib1.inc"':
            raise QasmError(
                f'only include "qelib1.inc" is supported, got {fname.text}',
                fname.line,
                fname.col,
            )
        p.expect(";")

    def register_decl(keyword: str) -> tuple[str, int]:
        p.expect(keyword)
        name_tok = p.take()
        if name_tok.kind != "id":
            raise QasmError(
                f"expected a register name, got {name_tok.text!r}",
                name_tok.line,
                name_tok.col,
            )
        p.expect("[")
        size, stok = p.expect_int()
        p.expect("]")
        p.expect(";")
        if keyword == "qreg" and not 1 <= size <= MAX_QUBITS:
            raise QasmError(
                f"qreg size {size} outside supported range 1..{MAX_QUBITS}",
                stok.line,
                stok.col,
            )
        return name_tok.text, size

    head = p.peek()
    if head is None or head.text != "qreg":
        tok = p.take()
        raise QasmError(f"expected 'qreg', got {tok.text!r}", tok.line, tok.col)
    qreg_name, qubit_count = register_decl("qreg")

    creg_name, classical_count = "c", 0
    head = p.peek()
    if head is not None and head.text == "creg":
        creg_name, classical_count = register_decl("creg")

    instructions: list[Gate | Measure] = []

    def qubit_ref(stmt_tok: _Token) -> int:
        name, index, itok = p.indexed_ref()
        if name != qreg_name:
            raise QasmError(f"unknown register {name!r}", itok.line, itok.col)
        if not 0 <= index < qubit_count:
            raise QasmError(
                f"qubit index {index} out of range for {qreg_name}[{qubit_count}]",
                itok.line,
                itok.col,
            )
        return index

    while (tok := p.peek()) is not None:
        if tok.text in ("qreg", "creg"):
            raise QasmError(f"register redeclaration {tok.text!r}", tok.line, tok.col)
        stmt = p.take()
        if stmt.kind != "id":
            raise QasmError(f"expected a statement, got {stmt.text!r}", stmt.line, stmt.col)
        if stmt.text == "measure":
            qubit = qubit_ref(stmt)
            p.expect("->")
            name, clbit, itok = p.indexed_ref()
            if name != creg_name or classical_count == 0:
                raise QasmError(f"unknown register {name!r}", itok.line, itok.col)
            if not 0 <= clbit < classical_count:
                raise QasmError(
                    f"classical index {clbit} out of range for {creg_name}[{classical_count}]",
                    itok.line,
                    itok.col,
                )
            p.expect(";")
            instructions.append(Measure(qubit, clbit))
        elif stmt.text in GATE_ARITY:
            arity = GATE_ARITY[stmt.text]
            targets = [qubit_ref(stmt)]
            for _ in range(arity - 1):
                p.expect(",")
                targets.append(qubit_ref(stmt))
            p.expect(";")
            instructions.append(Gate(stmt.text, tuple(targets)))
        else:
            raise QasmError(f"unknown gate {stmt.text!r}", stmt.line, stmt.col)

        try:
            Circuit(qubit_count, classical_count, tuple(instructions),
                    qreg_name, creg_name)
        except CircuitError as exc:
            raise QasmError(str(exc), stmt.line, stmt.col) from None

    return Circuit(qubit_count, classical_count, tuple(instructions),
                   qreg_name, creg_name)


def emit_qasm(circuit: Circuit) -> str:
    """Canonical source text for a circuit."""
    out = ['OPENQASM 2.0;', 'include "qelib1.inc";',
           f"qreg {circuit.qreg}[{circuit.qubit_count}];"]
    if circuit.classical_count > 0:
        out.append(f"creg {circuit.creg}[{circuit.classical_count}];")
    q, c = circuit.qreg, circuit.creg
    for inst in circuit.instructions:
        if isinstance(inst, Gate):
            args = ", ".join(f"{q}[{t}]" for t in inst.targets)
            out.append(f"{inst.name} {args};")
        else:
            out.append(f"measure {q}[{inst.qubit}] -> {c}[{inst.clbit}];")
    return "\n".join(out) + "\n"
