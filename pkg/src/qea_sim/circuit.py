"""Circuit IR, text-format parser and transpiler.

The executable gate set is {H, S, Rx, Ry, Rz, CX}.  CP and SWAP are
composite: the transpiler rewrites them into the executable set, tracking
the global phase produced by the CP rewrite.  Qubit 0 is the most
significant bit of the state index throughout.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


class GateKind(enum.Enum):
    H = "h"
    S = "s"
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    CX = "cx"
    # composite kinds, removed by the transpiler
    CP = "cp"
    SWAP = "swap"


PARAMETERIZED = frozenset({GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.CP})
TWO_QUBIT = frozenset({GateKind.CX, GateKind.CP, GateKind.SWAP})
COMPOSITE = frozenset({GateKind.CP, GateKind.SWAP})

SPARSE = "sparse"
DENSE = "dense"
CX = "cx"

_CLASS = {
    GateKind.S: SPARSE,
    GateKind.RZ: SPARSE,
    GateKind.H: DENSE,
    GateKind.RX: DENSE,
    GateKind.RY: DENSE,
    GateKind.CX: CX,
}


class CircuitParseError(ValueError):
    """Parse or validation failure; carries 1-based line/column."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        prefix = ""
        if line is not None:
            prefix = f"line {line}: " if column is None else f"line {line}, col {column}: "
        super().__init__(prefix + message)


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self) -> None:
        arity = 2 if self.kind in TWO_QUBIT else 1
        if len(self.qubits) != arity:
            raise ValueError(f"{self.kind.value} takes {arity} qubit(s), got {len(self.qubits)}")
        if arity == 2 and self.qubits[0] == self.qubits[1]:
            raise ValueError(f"{self.kind.value} operands must be distinct")
        if (self.angle is not None) != (self.kind in PARAMETERIZED):
            raise ValueError(f"{self.kind.value}: angle {'required' if self.kind in PARAMETERIZED else 'not allowed'}")


@dataclass(frozen=True)
class Circuit:
    n: int
    gates: tuple[Gate, ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"qubit count must be >= 1, got {self.n}")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            for q in g.qubits:
                if not 0 <= q < self.n:
                    raise ValueError(f"qubit {q} out of range for n={self.n}")


@dataclass(frozen=True)
class TranspiledCircuit:
    """Executable-set gates plus the phase accumulated while rewriting."""

    n: int
    gates: tuple[Gate, ...]
    global_phase: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if g.kind in COMPOSITE:
                raise ValueError(f"composite gate {g.kind.value} in transpiled circuit")

    def as_circuit(self) -> Circuit:
        return Circuit(self.n, self.gates)


def classify(g: Gate) -> str:
    """Gate class for dispatch: diagonal -> sparse, full 2x2 -> dense, CX -> cx."""
    try:
        return _CLASS[g.kind]
    except KeyError:
        raise ValueError(f"composite gate {g.kind.value} has no execution class") from None


def gate_matrix(g: Gate) -> np.ndarray:
    """2x2 double-precision unitary of a single-qubit gate."""
    if g.kind in TWO_QUBIT:
        raise ValueError(f"{g.kind.value} has no 2x2 matrix")
    if g.kind is GateKind.H:
        s = 1.0 / math.sqrt(2.0)
        return np.array([[s, s], [s, -s]], dtype=np.complex128)
    if g.kind is GateKind.S:
        return np.array([[1.0, 0.0], [0.0, 1.0j]], dtype=np.complex128)
    half = g.angle / 2.0
    c, s = math.cos(half), math.sin(half)
    if g.kind is GateKind.RX:
        return np.array([[c, -1.0j * s], [-1.0j * s, c]], dtype=np.complex128)
    if g.kind is GateKind.RY:
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    # RZ
    return np.array([[complex(c, -s), 0.0], [0.0, complex(c, s)]], dtype=np.complex128)


def transpile(c: Circuit) -> TranspiledCircuit:
    """Rewrite CP and SWAP into the executable set.

    CP(theta) on (control, target) becomes
        Rz(theta/2) @ control, CX, Rz(-theta/2) @ target, CX, Rz(theta/2) @ target
    and contributes theta/4 of global phase (the five-gate product equals
    e^{-i theta/4} CP(theta)).  SWAP becomes the usual three CX gates.
    """
    out: list[Gate] = []
    phase = 0.0
    for g in c.gates:
        if g.kind is GateKind.CP:
            ctrl, tgt = g.qubits
            half = g.angle / 2.0
            out.append(Gate(GateKind.RZ, (ctrl,), half))
            out.append(Gate(GateKind.CX, (ctrl, tgt)))
            out.append(Gate(GateKind.RZ, (tgt,), -half))
            out.append(Gate(GateKind.CX, (ctrl, tgt)))
            out.append(Gate(GateKind.RZ, (tgt,), half))
            phase += g.angle / 4.0
        elif g.kind is GateKind.SWAP:
            a, b = g.qubits
            out.append(Gate(GateKind.CX, (a, b)))
            out.append(Gate(GateKind.CX, (b, a)))
            out.append(Gate(GateKind.CX, (a, b)))
        else:
            out.append(g)
    return TranspiledCircuit(c.n, tuple(out), phase)


# ---------------------------------------------------------------------------
# Text format: `qubits <n>` header, then one gate per line.
#   h/s <q> | rx/ry/rz <theta> <q> | cx <c> <t> | cp <theta> <c> <t> | swap <a> <b>
# '#' starts a comment; blank lines are ignored.
# ---------------------------------------------------------------------------

_ANGLED = {"rx": GateKind.RX, "ry": GateKind.RY, "rz": GateKind.RZ}


def _parse_qubit(tok: str, n: int, lineno: int, col: int) -> int:
    try:
        q = int(tok)
    except ValueError:
        raise CircuitParseError(f"expected qubit index, got {tok!r}", lineno, col) from None
    if not 0 <= q < n:
        raise CircuitParseError(f"qubit {q} out of range (n={n})", lineno, col)
    return q


def _parse_angle(tok: str, lineno: int, col: int) -> float:
    try:
        theta = float(tok)
    except ValueError:
        raise CircuitParseError(f"invalid angle {tok!r}", lineno, col) from None
    if not math.isfinite(theta):
        raise CircuitParseError(f"invalid angle {tok!r}", lineno, col)
    return theta


def parse_circuit(text: str) -> Circuit:
    n: int | None = None
    gates: list[Gate] = []
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0]
        toks = line.split()
        if not toks:
            continue
        cols = [line.index(t) + 1 for t in toks]  # best-effort column hints
        head = toks[0].lower()

        if n is None:
            if head != "qubits":
                raise CircuitParseError("expected 'qubits <n>' header", lineno, cols[0])
            if len(toks) != 2:
                raise CircuitParseError("'qubits' takes exactly one count", lineno, cols[0])
            try:
                n = int(toks[1])
            except ValueError:
                raise CircuitParseError(f"invalid qubit count {toks[1]!r}", lineno, cols[1]) from None
            if n < 1:
                raise CircuitParseError(f"qubit count must be >= 1, got {n}", lineno, cols[1])
            continue

        if head == "qubits":
            raise CircuitParseError("duplicate 'qubits' header", lineno, cols[0])

        args = toks[1:]
        acols = cols[1:]
        if head in ("h", "s"):
            if len(args) != 1:
                raise CircuitParseError(f"'{head}' takes 1 operand, got {len(args)}", lineno, cols[0])
            gates.append(Gate(GateKind(head), (_parse_qubit(args[0], n, lineno, acols[0]),)))
        elif head in _ANGLED:
            if len(args) != 2:
                raise CircuitParseError(f"'{head}' takes <angle> <qubit>, got {len(args)} token(s)", lineno, cols[0])
            theta = _parse_angle(args[0], lineno, acols[0])
            gates.append(Gate(_ANGLED[head], (_parse_qubit(args[1], n, lineno, acols[1]),), theta))
        elif head in ("cx", "swap"):
            if len(args) != 2:
                raise CircuitParseError(f"'{head}' takes 2 operands, got {len(args)}", lineno, cols[0])
            a = _parse_qubit(args[0], n, lineno, acols[0])
            b = _parse_qubit(args[1], n, lineno, acols[1])
            if a == b:
                raise CircuitParseError(f"'{head}' operands must be distinct", lineno, acols[1])
            gates.append(Gate(GateKind(head), (a, b)))
        elif head == "cp":
            if len(args) != 3:
                raise CircuitParseError(f"'cp' takes <angle> <control> <target>, got {len(args)} token(s)", lineno, cols[0])
            theta = _parse_angle(args[0], lineno, acols[0])
            a = _parse_qubit(args[1], n, lineno, acols[1])
            b = _parse_qubit(args[2], n, lineno, acols[2])
            if a == b:
                raise CircuitParseError("'cp' operands must be distinct", lineno, acols[2])
            gates.append(Gate(GateKind.CP, (a, b), theta))
        else:
            raise CircuitParseError(f"unknown gate {head!r}", lineno, cols[0])

    if n is None:
        raise CircuitParseError("missing 'qubits <n>' header")
    return Circuit(n, tuple(gates))


# Structured (JSON-friendly) serialization; same fields as the dataclasses.

def circuit_to_dict(c: Circuit | TranspiledCircuit) -> dict:
    d = {
        "n": c.n,
        "gates": [
            {"kind": g.kind.value, "qubits": list(g.qubits)}
            | ({"angle": g.angle} if g.angle is not None else {})
            for g in c.gates
        ],
    }
    if isinstance(c, TranspiledCircuit):
        d["global_phase"] = c.global_phase
    return d


def circuit_from_dict(d: dict) -> Circuit | TranspiledCircuit:
    gates = tuple(
        Gate(GateKind(g["kind"]), tuple(g["qubits"]), g.get("angle"))
        for g in d["gates"]
    )
    if "global_phase" in d:
        return TranspiledCircuit(d["n"], gates, d["global_phase"])
    return Circuit(d["n"], gates)
