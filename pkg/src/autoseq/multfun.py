"""Completely multiplicative functions and black-box kernel inference."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Mapping, Sequence, Union

import numpy as np

from . import numtheory as nt
from .dfao import Dfao, KernelReport, evaluate_codes
from .values import (
    MINUS_ONE,
    ONE,
    ZERO,
    ZERO_CODE,
    UnitValue,
    encode_exponents,
    from_code,
    mul_codes,
    parse_token,
    power,
)

# Largest index range evaluated through a sieve table instead of per-element factorisation.
TABLE_LIMIT = 1 << 23


@dataclass(frozen=True, eq=False)
class CMFunction:
    """Completely multiplicative f given by its values on primes.

    Primes up to ``table_bound`` take ``prime_values`` (missing entries fall
    back to ``default``), larger primes take ``default``. A periodic
    built-in (a character) sets ``residues`` instead, which overrides the
    table. By convention f(0) = Z and f(1) = 1.
    """

    prime_values: Mapping[int, UnitValue] = field(default_factory=dict)
    table_bound: int = 1
    default: UnitValue = ONE
    name: str | None = None
    residues: tuple[UnitValue, ...] | None = None

    def __post_init__(self):
        for p in self.prime_values:
            if p > self.table_bound or not nt.is_prime(p):
                raise ValueError(f"table entry {p} is not a prime <= {self.table_bound}")

    def prime_value(self, p: int) -> UnitValue:
        if self.residues is not None:
            return self.residues[p % len(self.residues)]
        if p <= self.table_bound:
            return self.prime_values.get(p, self.default)
        return self.default

    def __call__(self, n: int) -> UnitValue:
        return cm_evaluate(self, n)

    def describe(self) -> str:
        return self.name or f"table(bound={self.table_bound}, default={self.default.token()})"


def liouville() -> CMFunction:
    return CMFunction(default=MINUS_ONE, name="liouville")


def periodic(residues: Sequence[UnitValue], name: str | None = None) -> CMFunction:
    """Built-in whose values depend on n mod len(residues), e.g. a character."""
    return CMFunction(residues=tuple(residues), name=name)


def legendre(p: int) -> CMFunction:
    if p < 3 or not nt.is_prime(p):
        raise ValueError("legendre needs an odd prime")
    sym = {1: ONE, -1: MINUS_ONE, 0: ZERO}
    return periodic([sym[nt.jacobi(a, p)] for a in range(p)], name=f"legendre:{p}")


def builtin(name: str) -> CMFunction:
    """``liouville``, ``char:Q:index`` or ``legendre:p``."""
    if name == "liouville":
        return liouville()
    kind, _, rest = name.partition(":")
    try:
        if kind == "legendre":
            return legendre(int(rest))
        if kind == "char":
            from .characters import build_unit_group, enumerate_characters

            modulus, _, index = rest.partition(":")
            chars = enumerate_characters(build_unit_group(int(modulus)))
            chi = chars[int(index)]
            return periodic([chi(a) for a in range(chi.modulus)], name=f"char:{modulus}:{index}")
    except (ValueError, IndexError) as e:
        raise ValueError(f"bad built-in {name!r}: {e}") from None
    raise ValueError(f"unknown built-in {name!r}")


def cm_evaluate(f: CMFunction, n: int) -> UnitValue:
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return ZERO
    if f.residues is not None:
        return f.residues[n % len(f.residues)]
    out = ONE
    for p, e in nt.factorize(n):
        out = out * power(f.prime_value(p), e)
        if out.is_zero:
            break
    return out


def cm_table_codes(f: CMFunction, n: int) -> np.ndarray:
    """Value codes of f(0), ..., f(n-1) via a sieve over prime powers."""
    if f.residues is not None:
        res = np.array([v.code for v in f.residues], dtype=np.int64)
        out = res[np.arange(n) % len(res)]
        if n:
            out[0] = ZERO_CODE
        return out
    zero = np.zeros(n, dtype=bool)
    primes = nt.primes_up_to(n - 1)
    special = [(int(p), f.prime_values[int(p)]) for p in primes[primes <= f.table_bound]
               if int(p) in f.prime_values]
    den = nt.lcm(*(v.m for _, v in special if not v.is_zero), f.default.m or 1)
    num = np.zeros(n, dtype=np.int64)

    def apply(p: int, v: UnitValue) -> None:
        pk = p
        while pk < n:
            if v.is_zero:
                zero[pk::pk] = True
            else:
                num[pk::pk] += v.k * (den // v.m)
            pk *= p

    tabled = {p for p, _ in special}
    for p, v in special:
        if v != ONE:
            apply(p, v)
    if f.default != ONE:
        for p in primes:
            p = int(p)
            if p not in tabled:
                apply(p, f.default)
    zero[:1] = True
    return encode_exponents(zero, num % den, den)


# -- generic sequence sources --------------------------------------------------

Source = Union[CMFunction, Dfao, Callable[[int], UnitValue], Sequence[UnitValue]]


def source_codes(src: Source, ns) -> np.ndarray:
    """Value codes of ``src`` at the integers ``ns``."""
    ns = np.asarray(ns, dtype=np.int64)
    if ns.size == 0:
        return np.zeros(ns.shape, dtype=np.int64)
    if isinstance(src, Dfao):
        return evaluate_codes(src, ns)
    if isinstance(src, CMFunction):
        if src.residues is not None:
            res = np.array([v.code for v in src.residues], dtype=np.int64)
            return np.where(ns == 0, ZERO_CODE, res[ns % len(res)])
        top = int(ns.max())
        if top < TABLE_LIMIT:
            return cm_table_codes(src, top + 1)[ns]
        return np.array([cm_evaluate(src, int(n)).code for n in ns.ravel()],
                        dtype=np.int64).reshape(ns.shape)
    if isinstance(src, (list, tuple)):
        return np.array([v.code for v in src], dtype=np.int64)[ns]
    return np.array([src(int(n)).code for n in ns.ravel()], dtype=np.int64).reshape(ns.shape)


def source_value(src: Source, n: int) -> UnitValue:
    return from_code(int(source_codes(src, [n])[0]))


@dataclass(frozen=True)
class CounterExample:
    m: int
    n: int
    product_value: UnitValue
    expected: UnitValue

    def __str__(self):
        return (f"s({self.m}*{self.n}) = {self.product_value.token()} but "
                f"s({self.m})*s({self.n}) = {self.expected.token()}")


def check_completely_multiplicative(src: Source, N: int) -> CounterExample | None:
    """First (m, n), 2 <= m <= n, m*n <= N, with s(mn) != s(m)s(n); None if none.

    A wrong s(1) is reported as the pair (1, 1).
    """
    if N < 4:
        raise ValueError("N must be at least 4")
    codes = source_codes(src, np.arange(N + 1))
    if codes[1] != ONE.code:
        return CounterExample(1, 1, from_code(codes[1]), ONE)
    m = 2
    while m * m <= N:
        ns = np.arange(m, N // m + 1)
        expected = mul_codes(np.full(ns.shape, codes[m]), codes[ns])
        bad = np.flatnonzero(codes[m * ns] != expected)
        if bad.size:
            n = int(ns[bad[0]])
            return CounterExample(m, n, from_code(codes[m * n]), from_code(expected[bad[0]]))
        m += 1
    return None


@dataclass(frozen=True)
class Mismatch:
    n: int
    expected: UnitValue
    got: UnitValue


def validate_candidate(src: Source, a: Dfao, N: int, start: int = 1) -> Mismatch | None:
    """First n in [start, N] where the automaton disagrees with the source.

    ``start`` defaults to 1 because f(0) is a convention for CM functions.
    """
    block = 1 << 16
    for lo in range(start, N + 1, block):
        ns = np.arange(lo, min(lo + block, N + 1))
        want = source_codes(src, ns)
        got = evaluate_codes(a, ns)
        bad = np.flatnonzero(want != got)
        if bad.size:
            i = bad[0]
            return Mismatch(int(ns[i]), from_code(want[i]), from_code(got[i]))
    return None


def kernel_empirical(src: Source, q: int, depth: int, prefix: int) -> KernelReport:
    """Kernel classes of a black-box sequence up to ``depth``, keyed by exact prefixes.

    Coordinates (i, r) are explored breadth first from (0, 0); the child of
    (i, r) under digit d is (i + 1, r + d*q**i). Only coordinates opening a
    new class are expanded. The report is closed when a whole level adds no
    class, in which case the classes form a candidate automaton.
    """
    if depth < 1 or prefix < 1:
        raise ValueError("depth and prefix must be positive")
    base = np.arange(prefix, dtype=np.int64)
    top = q**depth * prefix
    if isinstance(src, CMFunction) and src.residues is None and top <= TABLE_LIMIT:
        lookup = cm_table_codes(src, top).__getitem__  # one sieve for every coordinate
    else:
        lookup = partial(source_codes, src)
    keys: dict[bytes, int] = {}
    reps: list[tuple[int, int]] = []
    first_value: list[int] = []
    trans: list[list[int]] = []
    positive: set[int] = set()

    def classify(i: int, r: int) -> tuple[int, bool]:
        codes = lookup(q**i * base + r)
        key = codes.tobytes()
        if key in keys:
            return keys[key], False
        keys[key] = len(reps)
        reps.append((i, r))
        first_value.append(int(codes[0]))
        trans.append([])
        return keys[key], True

    classify(0, 0)
    frontier = [0]
    level_counts = [1]
    level = 0
    closed = False
    while level < depth:
        nxt = []
        for c in frontier:
            i, r = reps[c]
            for d in range(q):
                child, new = classify(i + 1, r + d * q**i)
                trans[c].append(child)
                positive.add(child)
                if new:
                    nxt.append(child)
        level += 1
        level_counts.append(len(reps))
        frontier = nxt
        if not frontier:
            closed = True
            break
    candidate = None
    if closed:
        candidate = Dfao(q, trans, [from_code(v) for v in first_value])
    return KernelReport(
        mode="empirical",
        representatives=tuple(reps),
        size_lower_bound=len(reps),
        closed=closed,
        depth=level,
        level_counts=tuple(level_counts),
        positive_depth_size=len(positive),
        prefix_length=prefix,
        candidate=candidate,
    )


# -- text format ---------------------------------------------------------------

def dumps(f: CMFunction) -> str:
    if f.residues is not None:
        raise ValueError("periodic built-ins have no table form")
    lines = ["cm", f"table-bound {f.table_bound}", f"default {f.default.token()}"]
    lines += [f"p {p} {v.token()}" for p, v in sorted(f.prime_values.items())]
    return "\n".join(lines) + "\n"


def loads(text: str) -> CMFunction:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0] != "cm":
        raise ValueError("CM spec must start with 'cm'")
    bound, default, values = None, None, {}
    for line in lines[1:]:
        parts = line.split()
        if parts[0] == "table-bound" and len(parts) == 2:
            bound = int(parts[1])
        elif parts[0] == "default" and len(parts) == 2:
            default = parse_token(parts[1])
        elif parts[0] == "p" and len(parts) == 3:
            p = int(parts[1])
            if p in values:
                raise ValueError(f"duplicate prime {p}")
            values[p] = parse_token(parts[2])
        else:
            raise ValueError(f"unrecognised line {line!r}")
    if bound is None or default is None:
        raise ValueError("CM spec needs table-bound and default")
    return CMFunction(values, bound, default)


def from_prime_values(src: Source, bound: int, default: UnitValue = ONE) -> CMFunction:
    """Table CM function taking the values of ``src`` on primes up to ``bound``."""
    ps = nt.primes_up_to(bound)
    codes = source_codes(src, ps)
    return CMFunction({int(p): from_code(c) for p, c in zip(ps, codes)}, bound, default)

