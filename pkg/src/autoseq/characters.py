"""Dirichlet characters and the classification of completely multiplicative
automatic sequences as a character or eventually zero on primes."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd

import numpy as np

from . import numtheory as nt
from .dfao import Dfao, minimize, residue_tracker
from .multfun import (
    CounterExample,
    Source,
    check_completely_multiplicative,
    source_codes,
)
from .values import ONE, ZERO, UnitValue, from_code, from_exponent


class NotCompletelyMultiplicative(ValueError):
    def __init__(self, counterexample: CounterExample):
        super().__init__(str(counterexample))
        self.counterexample = counterexample


@dataclass(frozen=True)
class UnitGroup:
    """(Z/QZ)* as a product of cyclic groups with explicit generators.

    ``generators`` are residues mod Q (CRT lifts, 1 on the other prime
    powers) and ``orders`` their orders; ``logs`` maps every unit residue to
    its exponent vector.
    """

    modulus: int
    generators: tuple[int, ...]
    orders: tuple[int, ...]
    components: tuple[int, ...]
    logs: dict = field(repr=False, compare=False)

    @property
    def size(self) -> int:
        return len(self.logs)

    def log(self, n: int) -> tuple[int, ...]:
        return self.logs[n % self.modulus]


def _lift(residue: int, pe: int, Q: int) -> int:
    """Element that is ``residue`` mod pe and 1 mod Q/pe."""
    return nt.crt([nt.Congruence.of(residue, pe), nt.Congruence.of(1, Q // pe)]).residue


@lru_cache(maxsize=None)
def build_unit_group(Q: int) -> UnitGroup:
    if Q < 1:
        raise ValueError("modulus must be positive")
    gens: list[int] = []
    orders: list[int] = []
    comps: list[int] = []
    for p, e in nt.factorize(Q):
        pe = p**e
        if p == 2:
            if e == 1:
                continue
            gens.append(_lift(pe - 1, pe, Q))
            orders.append(2)
            comps.append(pe)
            if e >= 3:
                gens.append(_lift(5, pe, Q))
                orders.append(2 ** (e - 2))
                comps.append(pe)
            continue
        phi = pe // p * (p - 1)
        g = next(g for g in range(2, pe) if g % p and nt.multiplicative_order(g, pe) == phi)
        gens.append(_lift(g, pe, Q))
        orders.append(phi)
        comps.append(pe)
    for g, d in zip(gens, orders):
        assert nt.multiplicative_order(g, Q) == d
    logs = {}
    for exps in itertools.product(*(range(d) for d in orders)):
        x = 1
        for g, k in zip(gens, exps):
            x = x * pow(g, k, Q) % Q
        logs[x % Q] = exps
    assert len(logs) == (nt.euler_phi(Q) if Q > 1 else 1)
    return UnitGroup(Q, tuple(gens), tuple(orders), tuple(comps), logs)


@dataclass(frozen=True)
class DirichletCharacter:
    """Character mod Q with chi(g_j) = exp(2*pi*i*e_j/d_j) on the group generators."""

    modulus: int
    exponents: tuple[int, ...]

    def __post_init__(self):
        G = self.group
        if len(self.exponents) != len(G.orders):
            raise ValueError("one exponent per generator")
        object.__setattr__(self, "exponents",
                           tuple(e % d for e, d in zip(self.exponents, G.orders)))

    @property
    def group(self) -> UnitGroup:
        return build_unit_group(self.modulus)

    def __call__(self, n: int) -> UnitValue:
        if gcd(n, self.modulus) != 1:
            return ZERO
        G = self.group
        x = sum(Fraction(e * l, d) for e, l, d in zip(self.exponents, G.log(n), G.orders))
        return from_exponent(x) if x else ONE

    @property
    def order(self) -> int:
        return nt.lcm(*(d // gcd(e, d) for e, d in zip(self.exponents, self.group.orders)))

    @property
    def is_principal(self) -> bool:
        return not any(self.exponents)

    def table(self) -> list[UnitValue]:
        return [self(a) for a in range(self.modulus)]

    @cached_property
    def table_codes(self) -> np.ndarray:
        return np.array([v.code for v in self.table()], dtype=np.int64)

    def name(self) -> str:
        return f"char Q={self.modulus} e=[{','.join(map(str, self.exponents))}]"

    def __str__(self):
        return self.name()


def enumerate_characters(G: UnitGroup) -> list[DirichletCharacter]:
    """All characters, exponent vectors in lexicographic order (principal first)."""
    return [DirichletCharacter(G.modulus, exps)
            for exps in itertools.product(*(range(d) for d in G.orders))]


def conductor(chi: DirichletCharacter) -> int:
    Q = chi.modulus
    units = [n for n in range(1, Q + 1) if gcd(n, Q) == 1]
    for d in nt.divisors(Q):
        if all(chi(n) == ONE for n in units if n % d == 1 % d):
            return d
    raise AssertionError("unreachable: d = Q always qualifies")


def is_primitive(chi: DirichletCharacter) -> bool:
    return conductor(chi) == chi.modulus


def from_unit_values(Q: int, value) -> DirichletCharacter:
    """Character mod Q agreeing with ``value`` on the generators (no further check)."""
    G = build_unit_group(Q)
    exps = []
    for g, d in zip(G.generators, G.orders):
        v = value(g)
        x = v.exponent * d
        if v.is_zero or x.denominator != 1:
            raise ValueError(f"value {v} at generator {g} is not a {d}-th root of unity")
        exps.append(int(x))
    return DirichletCharacter(Q, tuple(exps))


def primitive_character(chi: DirichletCharacter) -> DirichletCharacter:
    """The primitive character inducing ``chi``."""
    d = conductor(chi)
    Q = chi.modulus

    def lifted(g: int) -> UnitValue:
        n = g % d if d > 1 else 1
        while gcd(n, Q) != 1:
            n += d
        return chi(n)

    prim = from_unit_values(d, lifted)
    for n in range(1, Q + 1):
        if gcd(n, Q) == 1 and prim(n) != chi(n):
            raise AssertionError(f"{prim} does not induce {chi}")
    return prim


def induce(chi: DirichletCharacter, Q: int) -> DirichletCharacter:
    """The character mod Q (a multiple of chi's modulus) induced by chi."""
    if Q % chi.modulus:
        raise ValueError("target modulus must be a multiple")
    return from_unit_values(Q, chi)


def compile_character(chi: DirichletCharacter, q: int) -> Dfao:
    """Minimal lsd automaton for n -> chi(n), tracking (n mod Q, q**j mod Q)."""
    return minimize(residue_tracker(q, chi.modulus, chi.table()))


# -- classification --------------------------------------------------------------

@dataclass(frozen=True)
class Classification:
    """Outcome of :func:`classify`, valid only relative to its parameters.

    ``verdict`` is ``CharacterMatch``, ``EventuallyZero`` or ``NotClassified``.
    For a character match, ``character`` is primitive of conductor
    ``conductor`` and f(n) = chi(n) was verified for n <= N with
    gcd(n, ``modulus``) = 1.
    """

    verdict: str
    params: dict
    zero_primes: tuple[int, ...]
    character: DirichletCharacter | None = None
    conductor: int | None = None
    modulus: int | None = None
    bound: int | None = None
    witnesses: tuple[tuple[int, int, int], ...] = ()

    @property
    def positive(self) -> bool:
        return self.verdict != "NotClassified"

    def lines(self) -> list[tuple[str, str]]:
        p = self.params
        rows = [("verdict", self.verdict),
                ("params", f"q={p['q']} N={p['N']} Qmax={p['Qmax']} P={p['P']}"),
                ("zero_primes", " ".join(map(str, self.zero_primes[:20]))
                 + (" ..." if len(self.zero_primes) > 20 else ""))]
        if self.verdict == "CharacterMatch":
            rows += [("character", self.character.name()),
                     ("conductor", str(self.conductor)),
                     ("modulus", str(self.modulus)),
                     ("scope", f"f(n) = chi(n) verified for n <= {p['N']} with gcd(n, {self.modulus}) = 1")]
        elif self.verdict == "EventuallyZero":
            rows += [("bound", str(self.bound)),
                     ("scope", f"f(p) = 0 for every prime {self.bound} < p <= {p['P']}; nothing is claimed beyond P")]
        else:
            rows += [("scope", f"no modulus Q <= {p['Qmax']} fits f on n <= {p['N']}"),
                     ("witnesses", " ".join(f"Q={Q}:{a}~{b}" for Q, a, b in self.witnesses))]
        return rows


def _rad(primes) -> int:
    out = 1
    for p in primes:
        out *= p
    return out


def _periodic_table(codes: np.ndarray, Q: int, N: int):
    """Residue table of f on units mod Q, or a witness pair (n1, n2)."""
    table: dict[int, int] = {}
    first: dict[int, int] = {}
    for n in range(1, N + 1):
        if gcd(n, Q) != 1:
            continue
        a = n % Q
        c = int(codes[n])
        if a not in table:
            table[a], first[a] = c, n
        elif table[a] != c:
            return None, (first[a], n)
    return table, None


def classify(f: Source, q: int = 2, N: int = 10_000, Qmax: int = 100, P: int = 1000) -> Classification:
    """Decide which branch of the character / eventually-zero dichotomy f follows.

    Every verdict is relative to (N, Qmax, P): the zero branch only speaks
    about primes up to P and the character branch only about n <= N.

    Raises:
        NotCompletelyMultiplicative: f fails multiplicativity on [1, N].
    """
    params = {"q": q, "N": N, "Qmax": Qmax, "P": P}
    bad = check_completely_multiplicative(f, N)
    if bad is not None:
        raise NotCompletelyMultiplicative(bad)
    top = max(N, P)
    codes = source_codes(f, np.arange(top + 1))
    primes = [int(p) for p in nt.primes_up_to(P)]
    zero_primes = tuple(p for p in primes if codes[p] == ZERO.code)
    nonzero = [p for p in primes if codes[p] != ZERO.code]
    B = nonzero[-1] if nonzero else 1
    if B <= P // 2:
        return Classification("EventuallyZero", params, zero_primes, bound=B)

    support = [p for p in zero_primes if p <= Qmax]
    rad = _rad(support)
    witnesses = []
    for Q in range(rad, Qmax + 1, rad):
        table, witness = _periodic_table(codes, Q, N)
        if table is None:
            witnesses.append((Q, *witness))
            continue
        G = build_unit_group(Q)
        if len(table) != G.size:
            continue  # N too small to see every unit residue
        if not all(table[a * b % Q] == _mul_code(table[a], table[b]) for a in table for b in table):
            continue
        try:
            chi = from_unit_values(Q, lambda n: from_code(table[n % Q]))
        except ValueError:
            continue
        if any(chi(a).code != c for a, c in table.items()):
            continue
        prim = primitive_character(chi)
        ns = np.arange(1, N + 1)
        ns = ns[np.gcd(ns, Q) == 1]
        if np.array_equal(codes[ns], prim.table_codes[ns % prim.modulus]):
            return Classification("CharacterMatch", params, zero_primes, prim,
                                  prim.modulus, Q)
    return Classification("NotClassified", params, zero_primes, witnesses=tuple(witnesses))


@lru_cache(maxsize=None)
def _mul_code(a: int, b: int) -> int:
    return (from_code(a) * from_code(b)).code
