"""Analytical cycle and memory model of the 4-PE accelerator core.

The state vector is split into equal contiguous blocks, one per PE, and
each PE carries two special units (SUs).  An SU holds two complex
multipliers and one complex adder, so per cycle it either finishes one
dense output amplitude (both multipliers plus the adder) or two sparse
output amplitudes (one multiplier each).  A dense amplitude pair therefore
costs an SU two cycles, and a sparse gate runs in exactly half the cycles
of a dense gate on the same register size.

Amplitude pairs whose two indices live in different PE blocks pay a
configurable cross-PE access penalty; a pair at stride g crosses blocks
iff g >= block_size.  These are throughput formulas, not a cycle-accurate
interconnect simulation.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

from .circuit import CX, SPARSE, TranspiledCircuit, classify

STATE_BYTES_PER_AMP = 8       # two 32-bit words
GATE_BYTES = 32               # four complex entries, real/imag only
CONTROLLER_BYTES = 1024       # fixed controller context
MATMUL_ELEM_BYTES = 8         # single-precision complex


@dataclass(frozen=True)
class PEConfig:
    num_pes: int = 4
    sus_per_pe: int = 2
    freq_hz: float = 2.5e8
    cross_pe_penalty_cycles: int = 1
    per_gate_overhead_cycles: float = 0.0
    dense_pair_cycles: int = 2   # SU cycles per dense amplitude pair

    def __post_init__(self) -> None:
        if self.num_pes < 1 or self.num_pes & (self.num_pes - 1):
            raise ValueError(f"num_pes must be a power of two, got {self.num_pes}")
        if self.sus_per_pe < 1:
            raise ValueError("sus_per_pe must be >= 1")
        if self.freq_hz <= 0:
            raise ValueError("freq_hz must be positive")
        if self.cross_pe_penalty_cycles < 0 or self.per_gate_overhead_cycles < 0:
            raise ValueError("cycle costs must be non-negative")
        if self.dense_pair_cycles < 1:
            raise ValueError("dense_pair_cycles must be >= 1")

    @property
    def total_sus(self) -> int:
        return self.num_pes * self.sus_per_pe


@dataclass(frozen=True)
class MemoryLayout:
    n: int
    num_pes: int

    @property
    def block_size(self) -> int:
        return (1 << self.n) // self.num_pes

    def owner(self, index: int) -> int:
        if not 0 <= index < (1 << self.n):
            raise ValueError(f"index {index} out of range for n={self.n}")
        return index // self.block_size


def partition_state(n: int, cfg: PEConfig = PEConfig()) -> MemoryLayout:
    """Equal contiguous blocks of the 2^n amplitudes, one per PE."""
    if (1 << n) < cfg.num_pes:
        raise ValueError(f"2^{n} amplitudes cannot cover {cfg.num_pes} PEs")
    return MemoryLayout(n, cfg.num_pes)


@dataclass
class CycleReport:
    n: int
    sparse_gates: int = 0
    dense_gates: int = 0
    cx_gates: int = 0
    sparse_cycles: int = 0
    dense_cycles: int = 0
    cx_cycles: int = 0
    cross_pe_accesses: int = 0
    cross_pe_cycles: int = 0
    overhead_cycles: float = 0.0
    freq_hz: float = 2.5e8

    @property
    def total_gates(self) -> int:
        return self.sparse_gates + self.dense_gates + self.cx_gates

    @property
    def total_cycles(self) -> float:
        return (self.sparse_cycles + self.dense_cycles + self.cx_cycles
                + self.cross_pe_cycles + self.overhead_cycles)

    @property
    def modeled_time_s(self) -> float:
        return self.total_cycles / self.freq_hz


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def sparse_gate_cycles(n: int, cfg: PEConfig = PEConfig()) -> int:
    """One multiplier per amplitude: each SU retires two amplitudes per cycle."""
    return _ceil_div(1 << n, 2 * cfg.total_sus) * max(1, cfg.dense_pair_cycles // 2)


def dense_gate_cycles(n: int, cfg: PEConfig = PEConfig()) -> int:
    """One pair (two output amplitudes) per SU per dense_pair_cycles."""
    return _ceil_div(1 << (n - 1), cfg.total_sus) * cfg.dense_pair_cycles


def cx_gate_cycles(n: int, cfg: PEConfig = PEConfig()) -> int:
    """2^(n-2) swapped pairs, one per SU per cycle."""
    return _ceil_div(1 << (n - 2), cfg.total_sus)


def estimate_cycles(tc: TranspiledCircuit, cfg: PEConfig = PEConfig()) -> CycleReport:
    n = tc.n
    layout = partition_state(n, cfg)
    block = layout.block_size
    rep = CycleReport(n=n, freq_hz=cfg.freq_hz)
    for g in tc.gates:
        cls = classify(g)
        if cls == CX:
            rep.cx_gates += 1
            rep.cx_cycles += cx_gate_cycles(n, cfg)
            stride = 1 << (n - 1 - g.qubits[1])
            pairs = 1 << (n - 2)
        else:
            stride = 1 << (n - 1 - g.qubits[0])
            pairs = 1 << (n - 1)
            if cls == SPARSE:
                rep.sparse_gates += 1
                rep.sparse_cycles += sparse_gate_cycles(n, cfg)
            else:
                rep.dense_gates += 1
                rep.dense_cycles += dense_gate_cycles(n, cfg)
        if stride >= block:
            rep.cross_pe_accesses += pairs
            rep.cross_pe_cycles += pairs * cfg.cross_pe_penalty_cycles
    rep.overhead_cycles = cfg.per_gate_overhead_cycles * rep.total_gates
    return rep


def modeled_time(report: CycleReport) -> float:
    return report.modeled_time_s


def calibrate_overhead(tc: TranspiledCircuit, cfg: PEConfig, target_time_s: float) -> float:
    """Per-gate overhead that makes the modeled time hit target_time_s.

    Returns the fitted scalar (clamped at zero if the raw model already
    exceeds the target); callers report it alongside the raw prediction.
    """
    base = estimate_cycles(tc, replace(cfg, per_gate_overhead_cycles=0.0))
    gates = base.total_gates
    if gates == 0:
        raise ValueError("cannot calibrate on an empty circuit")
    extra = target_time_s * cfg.freq_hz - base.total_cycles
    return max(0.0, extra / gates)


def estimate_memory_qea(n: int, num_gates: int) -> int:
    """Device footprint: packed state, per-gate 2x2 context, controller."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if num_gates < 0:
        raise ValueError("num_gates must be >= 0")
    return (1 << n) * STATE_BYTES_PER_AMP + num_gates * GATE_BYTES + CONTROLLER_BYTES


def estimate_memory_matmul(n: int) -> int:
    """Naive dense operator: one full 2^n x 2^n matrix plus in/out vectors."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return (1 << (2 * n)) * MATMUL_ELEM_BYTES + 2 * (1 << n) * MATMUL_ELEM_BYTES


def memory_ratio(n: int, num_gates: int = 0) -> float:
    return estimate_memory_matmul(n) / estimate_memory_qea(n, num_gates)
