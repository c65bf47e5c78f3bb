"""Integer machinery: CRT over arbitrary moduli, sieves, factorisation,
Jacobi symbols, multiplicative orders, primitive roots and discrete logs.

Overflow contract: Python integers never overflow, but the algorithms here
are only specified for operands below 2**64 (intermediates below 2**128).
Functions that rely on that bound (primality, factorisation, orders, dlog)
raise ``OverflowError`` beyond it instead of silently slowing down.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from math import gcd, isqrt

import numpy as np

WIDTH_LIMIT = 1 << 64

Factorization = list[tuple[int, int]]


class Incompatible(ValueError):
    """A system of congruences has no solution."""


class NotCoprime(ValueError):
    pass


class NotInSubgroup(ValueError):
    pass


def _check_width(*xs: int) -> None:
    for x in xs:
        if abs(x) >= WIDTH_LIMIT:
            raise OverflowError(f"{x} exceeds the 64-bit operand contract")


@dataclass(frozen=True)
class Congruence:
    residue: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be positive")
        if not 0 <= self.residue < self.modulus:
            raise ValueError(f"residue {self.residue} not reduced mod {self.modulus}")

    @classmethod
    def of(cls, residue: int, modulus: int) -> Congruence:
        return cls(residue % modulus, modulus)

    def __contains__(self, x: int) -> bool:
        return x % self.modulus == self.residue

    def __str__(self):
        return f"{self.residue} mod {self.modulus}"


def egcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b)."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        qt, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - qt * x1
        y0, y1 = y1, y0 - qt * y1
    return a, x0, y0


def crt(congruences) -> Congruence:
    """Solve a list of congruences, moduli need not be coprime.

    Raises:
        Incompatible: two congruences disagree modulo the gcd of their moduli.
    """
    congruences = list(congruences)
    if not congruences:
        raise ValueError("need at least one congruence")
    r, m = 0, 1
    for c in congruences:
        g, x, _ = egcd(m, c.modulus)
        diff = c.residue - r
        if diff % g:
            raise Incompatible(f"{r} mod {m} conflicts with {c}")
        lcm = m // g * c.modulus
        r = (r + m * (diff // g * x % (c.modulus // g))) % lcm
        m = lcm
    _check_width(m)
    return Congruence(r, m)


def jacobi(a: int, n: int) -> int:
    if n <= 0 or n % 2 == 0:
        raise ValueError("Jacobi symbol needs an odd positive modulus")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


# Deterministic for n < 3.3e24, which covers the 64-bit contract.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    _check_width(n)
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class _Sieve:
    """Prime table grown on demand and shared read-only."""

    def __init__(self):
        self.limit = 1
        self.flags = np.zeros(2, dtype=bool)
        self.primes = np.zeros(0, dtype=np.int64)

    def ensure(self, n: int) -> None:
        if n <= self.limit:
            return
        limit = max(n, 2 * self.limit, 1 << 16)
        flags = np.ones(limit + 1, dtype=bool)
        flags[:2] = False
        flags[4::2] = False
        for p in range(3, isqrt(limit) + 1, 2):
            if flags[p]:
                flags[p * p :: 2 * p] = False
        self.flags = flags
        self.primes = np.flatnonzero(flags).astype(np.int64)
        self.limit = limit


_SIEVE = _Sieve()


def primes_up_to(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    _SIEVE.ensure(n)
    return _SIEVE.primes[: np.searchsorted(_SIEVE.primes, n, side="right")]


def primes_in_progression(u: int, v: int, limit: int) -> list[int]:
    if not 0 <= u < v:
        raise ValueError("need 0 <= u < v")
    ps = primes_up_to(limit)
    return [int(p) for p in ps[ps % v == u]]


_SMALL_PRIMES = [int(p) for p in primes_up_to(1000)]


def _pollard_brent(n: int) -> int:
    """Nontrivial factor of an odd composite n; deterministic sequence of seeds."""
    for c in range(1, n):
        y, m, g, r, qq = 2, 128, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    qq = qq * abs(x - y) % n
                g = gcd(qq, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"rho failed on {n}")


def factorize(n: int) -> Factorization:
    """Complete factorisation as increasing (prime, exponent) pairs; 1 -> []."""
    if n < 1:
        raise ValueError("factorize needs n >= 1")
    _check_width(n)
    out: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m < 1_000_000 or is_prime(m):
            # leftovers below 1000**2 with no factor < 1000 are prime
            out[m] = out.get(m, 0) + 1
            continue
        d = _pollard_brent(m)
        stack += [d, m // d]
    return sorted(out.items())


def euler_phi(n: int) -> int:
    result = n
    for p, _ in factorize(n):
        result = result // p * (p - 1)
    return result


def prime_factors(n: int) -> list[int]:
    return [p for p, _ in factorize(n)]


def multiplicative_order(a: int, n: int) -> int:
    """Least e >= 1 with a**e == 1 mod n, found by stripping factors of phi(n)."""
    if n < 2:
        raise ValueError("modulus must be >= 2")
    _check_width(a, n)
    a %= n
    if gcd(a, n) != 1:
        raise NotCoprime(f"gcd({a}, {n}) != 1")
    order = euler_phi(n)
    for p, e in factorize(order):
        for _ in range(e):
            if pow(a, order // p, n) != 1:
                break
            order //= p
    return order


def is_primitive_root(t: int, p: int) -> bool:
    if p == 2:
        return t % 2 == 1
    t %= p
    if t == 0:
        return False
    return all(pow(t, (p - 1) // ell, p) != 1 for ell in prime_factors(p - 1))


def smallest_primitive_root(p: int) -> int:
    return next(g for g in range(1, p) if is_primitive_root(g, p))


def discrete_log(t: int, target: int, p: int) -> int:
    """Least gamma >= 0 with t**gamma == target mod p (baby-step giant-step)."""
    _check_width(t, target, p)
    t, target = t % p, target % p
    if target == 1:
        return 0
    order = multiplicative_order(t, p)
    m = isqrt(order - 1) + 1
    baby: dict[int, int] = {}
    x = 1
    for j in range(m):
        baby.setdefault(x, j)
        x = x * t % p
    giant = pow(t, -m, p)
    y = target
    for i in range(m):
        j = baby.get(y)
        if j is not None:
            return i * m + j
        y = y * giant % p
    raise NotInSubgroup(f"{target} is not a power of {t} mod {p}")


def lcm(*xs: int) -> int:
    return reduce(lambda a, b: a // gcd(a, b) * b, xs, 1)


def divisors(n: int) -> list[int]:
    ds = [1]
    for p, e in factorize(n):
        ds = [d * p**k for d in ds for k in range(e + 1)]
    return sorted(ds)
