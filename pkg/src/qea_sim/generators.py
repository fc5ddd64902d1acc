"""Benchmark circuit generators: QFT and parameterized topology templates."""
from __future__ import annotations

import math

import numpy as np

from .circuit import Circuit, Gate, GateKind

TOPOLOGIES = ("chain", "alternating", "all_to_all", "rotation")

_ROT = (GateKind.RX, GateKind.RY, GateKind.RZ)


def generate_qft(n: int) -> Circuit:
    """Standard QFT on n qubits (qubit 0 most significant).

    For each qubit q: H, then CP(pi/2^(k-q)) controlled by every later
    qubit k; finally floor(n/2) SWAPs reverse the qubit order.  Composite
    CP/SWAP kinds are kept; transpiling gives n + 5*n(n-1)/2 + 3*floor(n/2)
    gates.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    gates: list[Gate] = []
    for q in range(n):
        gates.append(Gate(GateKind.H, (q,)))
        for k in range(q + 1, n):
            gates.append(Gate(GateKind.CP, (k, q), math.pi / (1 << (k - q))))
    for q in range(n // 2):
        gates.append(Gate(GateKind.SWAP, (q, n - 1 - q)))
    return Circuit(n, tuple(gates))


def qft_transpiled_gate_count(n: int) -> int:
    return n + 5 * n * (n - 1) // 2 + 3 * (n // 2)


def generate_template(topology: str, n: int, layers: int = 1, seed: int = 0) -> Circuit:
    """Entangling/rotation layers in the style of the expressibility templates.

    Per layer:
      rotation    - one random-axis rotation with a random angle on each qubit
      chain       - CX(q, q+1) down the line
      alternating - CX on even pairs, then on odd pairs
      all_to_all  - CX(a, b) for every a < b
    Deterministic for a given seed.
    """
    if topology not in TOPOLOGIES:
        raise ValueError(f"unknown topology {topology!r}; pick one of {TOPOLOGIES}")
    if layers < 1:
        raise ValueError("layers must be >= 1")
    if topology == "rotation":
        if n < 1:
            raise ValueError("n must be >= 1")
    elif n < 2:
        raise ValueError(f"{topology} needs at least 2 qubits")

    rng = np.random.default_rng(seed)
    gates: list[Gate] = []
    for _ in range(layers):
        if topology == "rotation":
            for q in range(n):
                kind = _ROT[rng.integers(0, 3)]
                gates.append(Gate(kind, (q,), float(rng.uniform(0.0, 2.0 * math.pi))))
        elif topology == "chain":
            for q in range(n - 1):
                gates.append(Gate(GateKind.CX, (q, q + 1)))
        elif topology == "alternating":
            for q in range(0, n - 1, 2):
                gates.append(Gate(GateKind.CX, (q, q + 1)))
            for q in range(1, n - 1, 2):
                gates.append(Gate(GateKind.CX, (q, q + 1)))
        else:  # all_to_all
            for a in range(n):
                for b in range(a + 1, n):
                    gates.append(Gate(GateKind.CX, (a, b)))
    return Circuit(n, tuple(gates))
