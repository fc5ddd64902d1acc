"""State-vector execution of transpiled circuits.

Index convention is MSB-first: qubit q owns bit (n-1-q) of the amplitude
index, so a gate on qubit j pairs amplitudes at stride 2^(n-j-1).

Two arithmetic variants share the kernels:
  * "float": complex128, used as the accuracy reference,
  * "fixed": Q2.30 raw words (two int32 arrays), modelling the device.

Dense single-qubit updates are pair-atomic: both old amplitudes of a pair
are read before either new one is written.  CX is a pure index swap and
performs no arithmetic.  Pairs within one gate are disjoint, so the pair
space can be sharded across workers with bit-identical results.
"""
from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import fixedpoint as fx
from .circuit import CX, DENSE, SPARSE, Gate, TranspiledCircuit, classify, gate_matrix

FIXED = "fixed"
FLOAT = "float"

WORKER_ENV = "QEA_SIM_THREADS"


def max_workers() -> int:
    """Worker-count cap from the environment (>= 1)."""
    try:
        return max(1, int(os.environ.get(WORKER_ENV, "1")))
    except ValueError:
        return 1


class StateVector:
    """2^n amplitudes in one of the two arithmetic variants."""

    __slots__ = ("n", "arith", "amps", "raw_re", "raw_im")

    def __init__(self, n: int, arith: str = FLOAT):
        if n < 1:
            raise ValueError(f"qubit count must be >= 1, got {n}")
        if arith not in (FIXED, FLOAT):
            raise ValueError(f"unknown arithmetic variant {arith!r}")
        self.n = n
        self.arith = arith
        size = 1 << n
        if arith == FLOAT:
            self.amps = np.zeros(size, dtype=np.complex128)
            self.raw_re = self.raw_im = None
        else:
            self.amps = None
            self.raw_re = np.zeros(size, dtype=np.int32)
            self.raw_im = np.zeros(size, dtype=np.int32)

    @classmethod
    def zero(cls, n: int, arith: str = FLOAT) -> "StateVector":
        """|0...0>: amplitude 0 is exactly one, the rest exactly zero."""
        sv = cls(n, arith)
        if arith == FLOAT:
            sv.amps[0] = 1.0
        else:
            sv.raw_re[0] = fx.RAW_ONE
        return sv

    @classmethod
    def from_complex(cls, vec, arith: str = FLOAT) -> "StateVector":
        vec = np.asarray(vec, dtype=np.complex128)
        n = int(vec.size).bit_length() - 1
        if 1 << n != vec.size:
            raise ValueError(f"length {vec.size} is not a power of two")
        sv = cls(n, arith)
        if arith == FLOAT:
            sv.amps[:] = vec
        else:
            for i, z in enumerate(vec):
                c = fx.FixedComplex.from_complex(complex(z))
                sv.raw_re[i] = c.re.raw
                sv.raw_im[i] = c.im.raw
        return sv

    def copy(self) -> "StateVector":
        sv = StateVector(self.n, self.arith)
        if self.arith == FLOAT:
            sv.amps[:] = self.amps
        else:
            sv.raw_re[:] = self.raw_re
            sv.raw_im[:] = self.raw_im
        return sv

    def to_complex(self) -> np.ndarray:
        """Double-precision view of the amplitudes (exact for both variants)."""
        if self.arith == FLOAT:
            return self.amps.copy()
        return (self.raw_re.astype(np.float64) + 1j * self.raw_im.astype(np.float64)) / fx.RAW_ONE

    def norm_sq(self) -> float:
        v = self.to_complex()
        return float(np.sum(v.real * v.real + v.imag * v.imag))

    def __len__(self) -> int:
        return 1 << self.n


@dataclass(frozen=True)
class GateApplication:
    """One single-qubit update: 2x2 entries in the active arithmetic."""

    u00: object
    u01: object
    u10: object
    u11: object
    target: int
    mode: str  # SPARSE | DENSE

    def __post_init__(self) -> None:
        if self.mode not in (SPARSE, DENSE):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == SPARSE and not (_is_zero(self.u01) and _is_zero(self.u10)):
            raise ValueError("sparse mode requires zero off-diagonal entries")


def _is_zero(u) -> bool:
    if isinstance(u, fx.FixedComplex):
        return u.re.raw == 0 and u.im.raw == 0
    return u == 0


def make_application(gate: Gate, arith: str) -> GateApplication:
    """Convert a gate to engine arithmetic once, before the amplitude sweep."""
    mode = classify(gate)
    if mode == CX:
        raise ValueError("CX is handled by the swapper, not as a matrix")
    u = gate_matrix(gate)
    if arith == FIXED:
        ent = [fx.FixedComplex.from_complex(complex(z)) for z in u.reshape(4)]
    else:
        ent = [complex(z) for z in u.reshape(4)]
    if mode == SPARSE:
        # exact diagonal in both arithmetics
        ent[1] = fx.CZERO if arith == FIXED else 0j
        ent[2] = fx.CZERO if arith == FIXED else 0j
    return GateApplication(ent[0], ent[1], ent[2], ent[3], gate.qubits[0], mode)


def _chunks(total: int, workers: int):
    """Split range(total) into <= workers contiguous slices."""
    workers = max(1, min(workers, total)) if total else 1
    step = -(-total // workers)
    return [slice(i, min(i + step, total)) for i in range(0, total, step)]


def _run_sharded(kernel, nblocks: int, workers: int) -> None:
    parts = _chunks(nblocks, workers)
    if len(parts) == 1:
        kernel(parts[0])
        return
    with ThreadPoolExecutor(max_workers=len(parts)) as pool:
        list(pool.map(kernel, parts))


def apply_1q(state: StateVector, app: GateApplication, workers: int = 1) -> StateVector:
    """In-place single-qubit update at stride 2^(n-target-1)."""
    n = state.n
    if not 0 <= app.target < n:
        raise ValueError(f"target {app.target} out of range for n={n}")
    stride = 1 << (n - app.target - 1)
    nblocks = (1 << n) >> (n - app.target)  # == 2^target

    if state.arith == FLOAT:
        # Complex arithmetic is decomposed into separately rounded real
        # ufuncs: numpy's fused complex multiply may contract with FMA,
        # which would break bit-identity with the scalar flag-loop kernel.
        view = state.amps.reshape(nblocks, 2, stride)
        if app.mode == SPARSE:
            def kernel(sl):
                for half, u in ((0, app.u00), (1, app.u11)):
                    re = view[sl, half, :].real.copy()
                    im = view[sl, half, :].imag.copy()
                    view[sl, half, :].real = u.real * re - u.imag * im
                    view[sl, half, :].imag = u.real * im + u.imag * re
        else:
            def kernel(sl):
                lo_re = view[sl, 0, :].real.copy()
                lo_im = view[sl, 0, :].imag.copy()
                hi_re = view[sl, 1, :].real.copy()
                hi_im = view[sl, 1, :].imag.copy()
                u00, u01, u10, u11 = app.u00, app.u01, app.u10, app.u11
                view[sl, 0, :].real = ((u00.real * lo_re - u00.imag * lo_im)
                                       + (u01.real * hi_re - u01.imag * hi_im))
                view[sl, 0, :].imag = ((u00.real * lo_im + u00.imag * lo_re)
                                       + (u01.real * hi_im + u01.imag * hi_re))
                view[sl, 1, :].real = ((u10.real * lo_re - u10.imag * lo_im)
                                       + (u11.real * hi_re - u11.imag * hi_im))
                view[sl, 1, :].imag = ((u10.real * lo_im + u10.imag * lo_re)
                                       + (u11.real * hi_im + u11.imag * hi_re))
    else:
        vre = state.raw_re.reshape(nblocks, 2, stride)
        vim = state.raw_im.reshape(nblocks, 2, stride)
        if app.mode == SPARSE:
            def kernel(sl):
                for half, u in ((0, app.u00), (1, app.u11)):
                    re = vre[sl, half, :].astype(np.int64)
                    im = vim[sl, half, :].astype(np.int64)
                    re, im = fx.cmul_arrays(u, re, im)
                    vre[sl, half, :] = re.astype(np.int32)
                    vim[sl, half, :] = im.astype(np.int32)
        else:
            def kernel(sl):
                lo_re = vre[sl, 0, :].astype(np.int64)
                lo_im = vim[sl, 0, :].astype(np.int64)
                hi_re = vre[sl, 1, :].astype(np.int64)
                hi_im = vim[sl, 1, :].astype(np.int64)
                # one SU op per output amplitude: two multiplies, one add
                a_re, a_im = fx.cmul_arrays(app.u00, lo_re, lo_im)
                b_re, b_im = fx.cmul_arrays(app.u01, hi_re, hi_im)
                new_lo = fx.cadd_arrays(a_re, a_im, b_re, b_im)
                c_re, c_im = fx.cmul_arrays(app.u10, lo_re, lo_im)
                d_re, d_im = fx.cmul_arrays(app.u11, hi_re, hi_im)
                new_hi = fx.cadd_arrays(c_re, c_im, d_re, d_im)
                vre[sl, 0, :] = new_lo[0].astype(np.int32)
                vim[sl, 0, :] = new_lo[1].astype(np.int32)
                vre[sl, 1, :] = new_hi[0].astype(np.int32)
                vim[sl, 1, :] = new_hi[1].astype(np.int32)

    _run_sharded(kernel, nblocks, workers)
    return state


def apply_cx(state: StateVector, control: int, target: int, workers: int = 1) -> StateVector:
    """In-place CX: swap amplitude pairs with control bit 1 across the target bit."""
    n = state.n
    if control == target:
        raise ValueError("control and target must differ")
    for q in (control, target):
        if not 0 <= q < n:
            raise ValueError(f"qubit {q} out of range for n={n}")

    bc = n - 1 - control
    bt = n - 1 - target
    hi, lo = max(bc, bt), min(bc, bt)
    pre = (1 << n) >> (hi + 1)
    mid = (1 << hi) >> (lo + 1)
    post = 1 << lo
    # axis layout: (pre, bit hi, mid, bit lo, post)
    if bc > bt:
        csel, ta = 1, 3    # control on axis 1, target on axis 3
    else:
        csel, ta = 3, 1

    arrays = (state.amps,) if state.arith == FLOAT else (state.raw_re, state.raw_im)

    def kernel(sl):
        for arr in arrays:
            v = arr.reshape(pre, 2, mid, 2, post)
            if csel == 1:
                a = v[sl, 1, :, 0, :].copy()
                v[sl, 1, :, 0, :] = v[sl, 1, :, 1, :]
                v[sl, 1, :, 1, :] = a
            else:
                a = v[sl, 0, :, 1, :].copy()
                v[sl, 0, :, 1, :] = v[sl, 1, :, 1, :]
                v[sl, 1, :, 1, :] = a

    _run_sharded(kernel, pre, workers)
    return state


@dataclass
class RunStats:
    sparse_gates: int = 0
    dense_gates: int = 0
    cx_gates: int = 0
    wall_time_s: float = 0.0

    @property
    def total_gates(self) -> int:
        return self.sparse_gates + self.dense_gates + self.cx_gates


def run_circuit(tc: TranspiledCircuit, state: StateVector, workers: int = 1):
    """Apply the transpiled gates in order (in place); returns (state, stats)."""
    if tc.n != state.n:
        raise ValueError(f"circuit has {tc.n} qubits, state has {state.n}")
    stats = RunStats()
    t0 = time.perf_counter()
    for g in tc.gates:
        cls = classify(g)
        if cls == CX:
            apply_cx(state, g.qubits[0], g.qubits[1], workers)
            stats.cx_gates += 1
        else:
            apply_1q(state, make_application(g, state.arith), workers)
            if cls == SPARSE:
                stats.sparse_gates += 1
            else:
                stats.dense_gates += 1
    stats.wall_time_s = time.perf_counter() - t0
    return state, stats


def reference_run(tc: TranspiledCircuit, state: StateVector, workers: int = 1) -> StateVector:
    """Double-precision run used as the accuracy reference.

    Same contract as run_circuit; the input state is copied (and converted
    to the float variant if needed), never mutated.
    """
    ref = state.copy() if state.arith == FLOAT else StateVector.from_complex(state.to_complex(), FLOAT)
    out, _ = run_circuit(tc, ref, workers)
    return out


# ---------------------------------------------------------------------------
# Literal flag-toggling sweep, kept as a cross-check for the kernels above.
# The printed loop updates psi[i] only at index i; run as written, the
# dense branch would read a partner that was already overwritten.  A
# buffer holding the previous sub-group (one slot per offset) restores
# pair atomicity while preserving the loop's exact visit order.
# ---------------------------------------------------------------------------

def apply_1q_flagloop(state: StateVector, app: GateApplication) -> StateVector:
    n = state.n
    stride = 1 << (n - app.target - 1)
    size = 1 << n
    fixed = state.arith == FIXED
    sparse = app.mode == SPARSE

    if fixed:
        def read(i):
            return fx.FixedComplex(fx.Fixed(int(state.raw_re[i])), fx.Fixed(int(state.raw_im[i])))

        def write(i, v):
            state.raw_re[i] = v.re.raw
            state.raw_im[i] = v.im.raw

        mul, add = fx.cmul, fx.cadd
    else:
        def read(i):
            return complex(state.amps[i])

        def write(i, v):
            state.amps[i] = v

        def mul(a, b):
            # same rounding sequence as the vectorized kernel
            return complex(a.real * b.real - a.imag * b.imag,
                           a.real * b.imag + a.imag * b.real)

        def add(a, b):
            return complex(a.real + b.real, a.imag + b.imag)

    buf = [None] * stride
    flag = 1
    for i in range(size):
        if flag:
            if sparse:
                write(i, mul(app.u00, read(i)))
            else:
                buf[i % stride] = read(i)
                write(i, add(mul(app.u00, read(i)), mul(app.u01, read(i + stride))))
        else:
            if sparse:
                write(i, mul(app.u11, read(i)))
            else:
                write(i, add(mul(app.u10, buf[i % stride]), mul(app.u11, read(i))))
        if i % stride == stride - 1:
            flag ^= 1
    return state


# ---------------------------------------------------------------------------
# State dump: header `n=<n> arith=<variant>`, then one line per amplitude:
#   <index> <re_hex> <im_hex> <re_float> <im_float>
# Hex columns are the Q2.30 storage words (quantized for the float variant).
# ---------------------------------------------------------------------------

def format_dump(state: StateVector) -> str:
    lines = [f"n={state.n} arith={state.arith}"]
    if state.arith == FIXED:
        for i in range(len(state)):
            re = fx.Fixed(int(state.raw_re[i]))
            im = fx.Fixed(int(state.raw_im[i]))
            lines.append(f"{i} {re.hex()} {im.hex()} {fx.to_float(re)!r} {fx.to_float(im)!r}")
    else:
        for i, z in enumerate(state.amps):
            re = fx.to_fixed(float(z.real))
            im = fx.to_fixed(float(z.imag))
            lines.append(f"{i} {re.hex()} {im.hex()} {float(z.real)!r} {float(z.imag)!r}")
    return "\n".join(lines) + "\n"


def parse_dump(text: str) -> StateVector:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = dict(part.split("=", 1) for part in lines[0].split())
    n, arith = int(head["n"]), head["arith"]
    sv = StateVector(n, arith)
    if len(lines) - 1 != len(sv):
        raise ValueError(f"expected {len(sv)} amplitude lines, got {len(lines) - 1}")
    for ln in lines[1:]:
        idx_s, re_hex, im_hex, re_f, im_f = ln.split()
        i = int(idx_s)
        if arith == FIXED:
            sv.raw_re[i] = fx.Fixed.from_hex(re_hex).raw
            sv.raw_im[i] = fx.Fixed.from_hex(im_hex).raw
        else:
            sv.amps[i] = complex(float(re_f), float(im_f))
    return sv
