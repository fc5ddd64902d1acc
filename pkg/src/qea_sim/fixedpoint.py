# Signed Q2.30 fixed-point arithmetic: 32-bit words, 2 integer bits,
# 30 fractional bits.  This is the number format of the accelerator's
# state memory, so every operation here is defined bit-exactly:
#   * round-to-nearest-even when narrowing,
#   * saturation (never wraparound) on overflow,
#   * complex multiply accumulates both cross terms at 64 bits and
#     rounds once per component (wide-accumulator MAC behaviour).
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

FRAC_BITS = 30
RAW_ONE = 1 << FRAC_BITS
RAW_MAX = (1 << 31) - 1          # +2 - 2^-30
RAW_MIN = -(1 << 31)             # -2
_FRAC_MASK = RAW_ONE - 1
_HALF = 1 << (FRAC_BITS - 1)


def saturate(raw: int) -> int:
    """Clamp an integer to the representable raw range."""
    if raw > RAW_MAX:
        return RAW_MAX
    if raw < RAW_MIN:
        return RAW_MIN
    return raw


def round_q60(wide: int) -> int:
    """Round a Q4.60 integer down to Q2.30: nearest, ties to even.

    Works on plain Python ints, so there is no intermediate overflow
    regardless of operand magnitude.
    """
    q = wide >> FRAC_BITS
    r = wide & _FRAC_MASK
    if r > _HALF or (r == _HALF and q & 1):
        q += 1
    return q


@dataclass(frozen=True)
class Fixed:
    """One Q2.30 scalar; ``raw`` is the signed 32-bit storage word."""

    raw: int

    def __post_init__(self) -> None:
        if not RAW_MIN <= self.raw <= RAW_MAX:
            raise ValueError(f"raw {self.raw} outside signed 32-bit range")

    def hex(self) -> str:
        """Two's-complement storage word as 8 hex digits."""
        return format(self.raw & 0xFFFFFFFF, "08x")

    @classmethod
    def from_hex(cls, text: str) -> "Fixed":
        raw = int(text, 16)
        if raw >= 1 << 31:
            raw -= 1 << 32
        return cls(raw)


ZERO = Fixed(0)
ONE = Fixed(RAW_ONE)


def to_fixed(x: float) -> Fixed:
    """Quantize a real number: round-to-nearest-even of x*2^30, saturated."""
    if not math.isfinite(x):
        raise ValueError(f"cannot quantize non-finite value {x!r}")
    # x * 2^30 is exact in double precision, so round() performs true
    # nearest-even rounding of the real product.
    return Fixed(saturate(round(x * RAW_ONE)))


def to_float(a: Fixed) -> float:
    """Exact value raw / 2^30 (always representable in a double)."""
    return a.raw / RAW_ONE


@dataclass(frozen=True)
class FixedComplex:
    """Complex amplitude stored as exactly two Q2.30 words (no metadata)."""

    re: Fixed
    im: Fixed

    @classmethod
    def from_complex(cls, z: complex) -> "FixedComplex":
        return cls(to_fixed(z.real), to_fixed(z.imag))

    def to_complex(self) -> complex:
        return complex(to_float(self.re), to_float(self.im))


CZERO = FixedComplex(ZERO, ZERO)


def cadd(a: FixedComplex, b: FixedComplex) -> FixedComplex:
    """Component-wise saturating addition."""
    return FixedComplex(
        Fixed(saturate(a.re.raw + b.re.raw)),
        Fixed(saturate(a.im.raw + b.im.raw)),
    )


def cmul(a: FixedComplex, b: FixedComplex) -> FixedComplex:
    """Complex product with 64-bit intermediates and one rounding per component.

    Both cross terms are exact Q4.60 products; their sum/difference is
    rounded to nearest-even and saturated in a single step, so the result
    is independent of term order.
    """
    ar, ai = a.re.raw, a.im.raw
    br, bi = b.re.raw, b.im.raw
    re = saturate(round_q60(ar * br - ai * bi))
    im = saturate(round_q60(ar * bi + ai * br))
    return FixedComplex(Fixed(re), Fixed(im))


# ---------------------------------------------------------------------------
# Vectorized raw-word helpers for the state-vector kernels.
#
# These operate on int64 arrays of raw words.  Precondition for the
# multiply helpers: one operand side must be a unitary gate entry
# (|raw| <= 2^30), which bounds each cross term by 2^61 and the two-term
# sum by 2^62, safely inside int64.
# ---------------------------------------------------------------------------

def round_q60_array(wide: np.ndarray) -> np.ndarray:
    """Vectorized nearest-even rounding of Q4.60 words to Q2.30."""
    q = wide >> FRAC_BITS
    r = wide & _FRAC_MASK
    bump = (r > _HALF) | ((r == _HALF) & ((q & 1) == 1))
    return q + bump


def saturate_array(raw: np.ndarray) -> np.ndarray:
    return np.clip(raw, RAW_MIN, RAW_MAX)


def cmul_arrays(u: FixedComplex, re: np.ndarray, im: np.ndarray):
    """(u) * (re + i*im) over int64 raw arrays; returns rounded raw pair."""
    ur, ui = u.re.raw, u.im.raw
    out_re = saturate_array(round_q60_array(ur * re - ui * im))
    out_im = saturate_array(round_q60_array(ur * im + ui * re))
    return out_re, out_im


def cadd_arrays(a_re: np.ndarray, a_im: np.ndarray, b_re: np.ndarray, b_im: np.ndarray):
    return saturate_array(a_re + b_re), saturate_array(a_im + b_im)
