"""Exact output alphabet: zero or a root of unity exp(2*pi*i*k/m).

Values are kept as reduced fractions of a turn so equality is decidable.
Vectorised helpers work on integer *codes* so that long value prefixes can be
stored in numpy arrays and compared byte-for-byte.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

ORDER_LIMIT = 360

ZERO_CODE = -1


class OrderLimitExceeded(ValueError):
    """Root of unity order larger than the configured limit."""


@dataclass(frozen=True, order=True)
class UnitValue:
    """Zero (``m == 0``) or the root of unity ``exp(2*pi*i*k/m)``.

    Use :func:`root` or :data:`ZERO`; the constructor expects canonical input.
    """

    k: int
    m: int

    def __post_init__(self):
        if self.m == 0:
            if self.k != 0:
                raise ValueError("zero must be UnitValue(0, 0)")
            return
        if self.m < 0 or not 0 <= self.k < self.m or gcd(self.k, self.m) != 1:
            raise ValueError(f"non-canonical root {self.k}/{self.m}")

    @property
    def is_zero(self) -> bool:
        return self.m == 0

    @property
    def order(self) -> int:
        """Multiplicative order; 0 for zero."""
        return self.m

    @property
    def exponent(self) -> Fraction:
        if self.is_zero:
            raise ValueError("zero has no exponent")
        return Fraction(self.k, self.m)

    def __mul__(self, other: UnitValue) -> UnitValue:
        return mul(self, other)

    def __pow__(self, e: int) -> UnitValue:
        return power(self, e)

    def __abs__(self) -> UnitValue:
        return absolute(self)

    def inverse(self) -> UnitValue:
        if self.is_zero:
            raise ZeroDivisionError("zero has no inverse")
        return root(-self.k, self.m)

    def to_complex(self) -> complex:
        if self.is_zero:
            return 0j
        return cmath.exp(2j * cmath.pi * self.k / self.m)

    @property
    def code(self) -> int:
        if self.is_zero:
            return ZERO_CODE
        return self.m * (self.m - 1) // 2 + self.k

    def token(self) -> str:
        return "Z" if self.is_zero else f"W:{self.k}/{self.m}"

    def __str__(self):
        return self.token()

    def __repr__(self):
        return f"UnitValue({self.token()})"


ZERO = UnitValue(0, 0)
ONE = UnitValue(0, 1)
MINUS_ONE = UnitValue(1, 2)


def root(k: int, m: int, limit: int | None = None) -> UnitValue:
    """Canonical ``exp(2*pi*i*k/m)`` for any integer k and m >= 1."""
    if m <= 0:
        raise ValueError("order must be positive")
    k %= m
    g = gcd(k, m)
    k, m = k // g, m // g
    if m > (ORDER_LIMIT if limit is None else limit):
        raise OrderLimitExceeded(f"order {m} exceeds limit")
    return UnitValue(k, m)


def from_exponent(x: Fraction, limit: int | None = None) -> UnitValue:
    return root(x.numerator, x.denominator, limit)


def mul(a: UnitValue, b: UnitValue) -> UnitValue:
    if a.is_zero or b.is_zero:
        return ZERO
    return root(a.k * b.m + b.k * a.m, a.m * b.m)


def power(a: UnitValue, e: int) -> UnitValue:
    if e < 0:
        raise ValueError("exponent must be nonnegative")
    if e == 0:
        return ONE
    if a.is_zero:
        return ZERO
    return root(a.k * e, a.m)


def absolute(a: UnitValue) -> UnitValue:
    return ZERO if a.is_zero else ONE


def parse_token(text: str, strict: bool = True) -> UnitValue:
    """Parse ``Z``, ``W:k/m``, ``1`` or ``-1``.

    With ``strict`` a ``W:`` token must already be canonical.
    """
    s = text.strip()
    if s == "Z":
        return ZERO
    if s == "1":
        return ONE
    if s == "-1":
        return MINUS_ONE
    if not s.startswith("W:") or "/" not in s:
        raise ValueError(f"bad value token {text!r}")
    num, _, den = s[2:].partition("/")
    try:
        k, m = int(num), int(den)
    except ValueError:
        raise ValueError(f"bad value token {text!r}") from None
    if m <= 0:
        raise ValueError(f"bad value token {text!r}")
    v = root(k, m)
    if strict and (v.k, v.m) != (k, m):
        raise ValueError(f"non-canonical value token {text!r}")
    return v


def from_code(code: int) -> UnitValue:
    code = int(code)
    if code == ZERO_CODE:
        return ZERO
    m = _order_of_code(code)
    return UnitValue(code - m * (m - 1) // 2, m)


def _order_of_code(code: int) -> int:
    # m(m-1)/2 <= code < m(m+1)/2
    m = int((1 + (1 + 8 * code) ** 0.5) / 2)
    while m * (m - 1) // 2 > code:
        m -= 1
    while m * (m + 1) // 2 <= code:
        m += 1
    return m


def decode_codes(codes: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split codes into (zero mask, k, m); zeros get k=0, m=1."""
    codes = np.asarray(codes, dtype=np.int64)
    zero = codes == ZERO_CODE
    c = np.where(zero, 0, codes)
    m = np.floor((1 + np.sqrt(1 + 8 * c.astype(np.float64))) / 2).astype(np.int64)
    m -= (m * (m - 1) // 2 > c).astype(np.int64)
    m += (m * (m + 1) // 2 <= c).astype(np.int64)
    k = c - m * (m - 1) // 2
    return zero, k, m


def encode_exponents(zero: np.ndarray, num: np.ndarray, den) -> np.ndarray:
    """Codes for exponents ``num/den`` (not necessarily reduced), zero where masked."""
    num = np.asarray(num, dtype=np.int64)
    den = np.broadcast_to(np.asarray(den, dtype=np.int64), num.shape)
    num = np.mod(num, den)
    g = np.gcd(num, den)
    k, m = num // g, den // g
    if m.size and int(m.max(initial=1)) > ORDER_LIMIT:
        raise OrderLimitExceeded(f"order {int(m.max())} exceeds limit")
    out = m * (m - 1) // 2 + k
    return np.where(zero, ZERO_CODE, out).astype(np.int64)


def mul_codes(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    za, ka, ma = decode_codes(a)
    zb, kb, mb = decode_codes(b)
    return encode_exponents(za | zb, ka * mb + kb * ma, ma * mb)


def abs_codes(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    return np.where(a == ZERO_CODE, ZERO_CODE, ONE.code).astype(np.int64)
