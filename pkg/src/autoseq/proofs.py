"""Desk-scale versions of the constructions behind the classification.

Every construction returns a certificate whose ``verify()`` re-derives the
claimed congruences, orders, Jacobi symbols and powers from scratch and
returns the list of failed conditions (empty when the certificate holds).
Certificates serialise to a line-oriented ``key: value`` block.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import ceil, gcd, log, prod

import numpy as np

from . import dfao as dfao_mod
from . import numtheory as nt
from .dfao import Dfao, evaluate_codes, minimize, states_witness, to_lsd
from .multfun import CMFunction, cm_evaluate
from .values import ONE, UnitValue, parse_token, power


class SideConditionFailed(ValueError):
    pass


class IncompatibleCongruences(ValueError):
    pass


class NoValidResidue(ValueError):
    def __init__(self, p: int):
        super().__init__(f"no residue mod {p} is a nonzero square with u - 1 a unit")
        self.p = p


class SearchExhausted(RuntimeError):
    def __init__(self, found: list[int], needed: int, limit: int):
        super().__init__(f"only {len(found)} of {needed} qualifying primes below {limit}")
        self.found = found


class ParityMismatch(ValueError):
    pass


class NoUnitPrime(ValueError):
    pass


def _ints(s: str) -> list[int]:
    return [int(x) for x in s.replace(",", " ").split()]


def _fmt(xs) -> str:
    return " ".join(str(x) for x in xs)


# -- kernel collision ----------------------------------------------------------

@dataclass(frozen=True)
class CollisionCertificate:
    """Coordinates (i1, r) and (i2, r) with the same minimal residual state."""

    i1: int
    i2: int
    r: int
    states: tuple[int, int]
    bound: int
    automaton: Dfao

    kind = "key1"

    def verify(self) -> list[str]:
        a = self.automaton
        fails = []
        if not 1 <= self.i1 < self.i2:
            fails.append("need 1 <= i1 < i2")
            return fails
        s1, s2 = a.residual_state(self.i1, self.r), a.residual_state(self.i2, self.r)
        if (s1, s2) != tuple(self.states):
            fails.append(f"residual states are {(s1, s2)}, not {self.states}")
        if states_witness(a, s1, s2) is not None:
            fails.append("residual sequences differ (product automaton witness)")
        ns = np.arange(1, self.bound)
        lhs = evaluate_codes(a, a.q**self.i1 * ns + self.r)
        rhs = evaluate_codes(a, a.q**self.i2 * ns + self.r)
        if not np.array_equal(lhs, rhs):
            fails.append("f(q^i1 n + r) != f(q^i2 n + r) for some n < bound")
        return fails

    def fields(self) -> list[tuple[str, str]]:
        return [("i1", str(self.i1)), ("i2", str(self.i2)), ("r", str(self.r)),
                ("states", _fmt(self.states)), ("bound", str(self.bound))]


def find_kernel_collision(a: Dfao, r_fixed: int = 1, bound: int = 1 << 12) -> CollisionCertificate:
    """First i1 < i2 whose coordinates (i, r_fixed) share a residual state."""
    m = minimize(to_lsd(a))
    i = 1
    while m.q**i <= r_fixed:
        i += 1
    seen: dict[int, int] = {}
    s = m.residual_state(i, r_fixed)
    while s not in seen:
        seen[s] = i
        s = m.transitions[s][0]
        i += 1
    cert = CollisionCertificate(seen[s], i, r_fixed, (s, s), bound, m)
    assert not cert.verify(), cert.verify()
    return cert


# -- the residue r_A --------------------------------------------------------------

@dataclass(frozen=True)
class RAConstruction:
    """r with r = -s*q^(2A) mod p_s for each s and r = 3 mod 16.

    ``congruence`` is the class mod 16*prod(p_s); ``r`` its least member
    coprime to q. ``a_meets_bound`` records whether q^A >= max(p_s).
    """

    q: int
    A: int
    primes: tuple[int, ...]
    congruence: nt.Congruence
    r: int
    a_meets_bound: bool

    kind = "key"

    def verify(self) -> list[str]:
        fails = []
        q, A, ps, r = self.q, self.A, self.primes, self.r
        if self.congruence.modulus != 16 * prod(ps):
            fails.append("modulus is not 16 * prod(p)")
        if r % self.congruence.modulus != self.congruence.residue:
            fails.append("r is not in the stated class")
        for s, p in enumerate(ps, 1):
            if (r + s * pow(q, 2 * A, p)) % p:
                fails.append(f"r != -{s}*q^(2A) mod {p}")
            if gcd(r, q * p) != 1:
                fails.append(f"gcd(r, q*{p}) != 1")
        if r % 16 != 3:
            fails.append("r != 3 mod 16")
        if gcd(r - 1, prod(ps)) != 1:
            fails.append("gcd(r - 1, prod(p)) != 1")
        if self.a_meets_bound != (q**A >= max(ps)):
            fails.append("bound flag is wrong")
        return fails

    def fields(self) -> list[tuple[str, str]]:
        return [("q", str(self.q)), ("A", str(self.A)), ("primes", _fmt(self.primes)),
                ("congruence", f"{self.congruence.residue} {self.congruence.modulus}"),
                ("r", str(self.r)), ("a_meets_bound", "yes" if self.a_meets_bound else "no")]


def construct_rA(q: int, A: int, primes) -> RAConstruction:
    """Chinese-remainder residue r_A for the zero-forcing argument.

    ``A`` below log_q(max prime) is allowed but flagged in the result.

    Raises:
        ValueError: primes not distinct odd primes coprime to q.
        SideConditionFailed: a gcd side condition cannot hold.
    """
    primes = tuple(int(p) for p in primes)
    if q < 2 or A < 1 or not primes:
        raise ValueError("need q >= 2, A >= 1 and at least one prime")
    if len(set(primes)) != len(primes):
        raise ValueError("primes must be distinct")
    for p in primes:
        if p == 2 or not nt.is_prime(p):
            raise ValueError(f"{p} is not an odd prime")
        if q % p == 0:
            raise ValueError(f"{p} divides q")
    congs = [nt.Congruence.of(-s * pow(q, 2 * A, p), p) for s, p in enumerate(primes, 1)]
    try:
        c = nt.crt(congs + [nt.Congruence(3, 16)])
    except nt.Incompatible as e:
        raise IncompatibleCongruences(str(e)) from None
    for s, p in enumerate(primes, 1):
        if c.residue % p == 0:
            raise SideConditionFailed(f"gcd(r, {p}) != 1: {p} divides the index {s}")
        if c.residue % p == 1:
            raise SideConditionFailed(f"gcd(r - 1, {p}) != 1 for index {s}")
    r = c.residue
    while gcd(r, q) != 1:
        r += c.modulus
    return RAConstruction(q, A, primes, c, r, q**A >= max(primes))


def least_valid_A(q: int, primes) -> int:
    """Smallest A with q^A >= max(primes)."""
    A = max(1, ceil(log(max(primes), q)) - 1)
    while q**A < max(primes):
        A += 1
    return A


def build_uv(r: nt.Congruence | int, k0: int, primes) -> tuple[int, int]:
    """Progression u mod v for the prime search.

    v = 16 * prod(p_i) * prod(odd primes p <= k0). u = 3 mod 16, u = r mod
    prod(p_i), and for each odd prime p <= k0, (u/p) = 1 with gcd(u-1, p) = 1.
    The least such u in [0, v) is returned.

    Raises:
        NoValidResidue: some p <= k0 admits no residue (always the case for p = 3).
    """
    primes = tuple(int(p) for p in primes)
    if any(p <= k0 for p in primes):
        raise ValueError("the primes must exceed k0")
    r = r.residue if isinstance(r, nt.Congruence) else int(r)
    P = prod(primes)
    small = [int(p) for p in nt.primes_up_to(k0) if p > 2]
    v = 16 * P * prod(small)
    for p in small:
        if not any(nt.jacobi(x, p) == 1 and gcd(x - 1, p) == 1 for x in range(p)):
            raise NoValidResidue(p)
    base = nt.crt([nt.Congruence(3, 16), nt.Congruence.of(r, P)])
    for u in range(base.residue, v, base.modulus):
        if all(nt.jacobi(u, p) == 1 and gcd(u - 1, p) == 1 for p in small):
            return u, v
    raise AssertionError("unreachable: residues exist for every small prime")


# -- prime search replacing the analytic input ------------------------------------

@dataclass(frozen=True)
class HBCertificate:
    """Primes q_i = u mod v, each with one of t, t', t'' as a primitive root."""

    ts: tuple[int, ...]
    u: int
    v: int
    k0: int
    limit: int
    primes: tuple[int, ...]
    roots: tuple[tuple[int, ...], ...]
    jacobi: tuple[tuple[int, ...], ...]
    require_jacobi: bool = False

    kind = "hb"

    def verify(self) -> list[str]:
        fails = []
        if len(self.roots) != len(self.primes) or len(self.jacobi) != len(self.primes):
            return ["field lengths disagree"]
        for p, roots, jac in zip(self.primes, self.roots, self.jacobi):
            if not nt.is_prime(p):
                fails.append(f"{p} is not prime")
                continue
            if p % self.v != self.u:
                fails.append(f"{p} != {self.u} mod {self.v}")
            if p > self.limit:
                fails.append(f"{p} exceeds the limit")
            actual = tuple(t for t in self.ts if t % p and nt.multiplicative_order(t, p) == p - 1)
            if not actual or tuple(roots) != actual:
                fails.append(f"primitive roots mod {p} are {actual}, not {tuple(roots)}")
            want = tuple(nt.jacobi(ell, p) for ell in range(1, self.k0 + 1))
            if tuple(jac) != want:
                fails.append(f"Jacobi symbols mod {p} are {want}")
            elif self.require_jacobi and any(j != 1 for j in want):
                fails.append(f"some (l/{p}) != 1 for l <= {self.k0}")
        for a, b in combinations(self.primes, 2):
            if gcd(a - 1, b - 1) != 2:
                fails.append(f"gcd({a}-1, {b}-1) != 2")
        if list(self.primes) != sorted(set(self.primes)):
            fails.append("primes not strictly increasing")
        return fails

    def fields(self) -> list[tuple[str, str]]:
        return [("t", _fmt(self.ts)), ("u", str(self.u)), ("v", str(self.v)),
                ("k0", str(self.k0)), ("limit", str(self.limit)),
                ("require_jacobi", "yes" if self.require_jacobi else "no"),
                ("primes", _fmt(self.primes)),
                ("roots", " ; ".join(_fmt(r) for r in self.roots)),
                ("jacobi", " ; ".join(_fmt(j) for j in self.jacobi))]


def hb_search(ts, u: int, v: int, count: int, limit: int, k0: int = 1,
              require_jacobi: bool = False, above: int = 0) -> HBCertificate:
    """Scan primes u mod v up to ``limit`` for ``count`` usable primes.

    A prime is usable when one of ``ts`` is a primitive root modulo it (and,
    with ``require_jacobi``, every l <= k0 is a square modulo it). Primes are
    retained greedily in ascending order while gcd(q_i - 1, q_j - 1) = 2.

    Raises:
        SearchExhausted: fewer than ``count`` primes found; ``found`` holds progress.
    """
    ts = tuple(int(t) for t in ts)
    if len(set(ts)) != len(ts) or not all(nt.is_prime(t) for t in ts):
        raise ValueError("the t's must be distinct primes")
    if gcd(u, v) != 1:
        raise ValueError("u and v must be coprime")
    kept: list[int] = []
    roots, jacs = [], []
    if count > 0:
        for p in nt.primes_in_progression(u % v, v, limit):
            if p <= above:
                continue
            rs = tuple(t for t in ts if nt.is_primitive_root(t, p))
            if not rs:
                continue
            jac = tuple(nt.jacobi(ell, p) for ell in range(1, k0 + 1)) if p > 2 else (1,) * k0
            if require_jacobi and any(j != 1 for j in jac):
                continue
            if all(gcd(p - 1, k - 1) == 2 for k in kept):
                kept.append(p)
                roots.append(rs)
                jacs.append(jac)
                if len(kept) == count:
                    break
        else:
            raise SearchExhausted(kept, count, limit)
    return HBCertificate(ts, u % v, v, k0, limit, tuple(kept), tuple(roots), tuple(jacs),
                         require_jacobi)


# -- discrete-log parity pipeline ---------------------------------------------------

@dataclass(frozen=True)
class ParityPipelineResult:
    t: int
    r_A: int
    primes: tuple[int, ...]
    gammas: tuple[int, ...]
    parity: int
    gamma: int
    gamma_modulus: int
    power: int
    jacobi: tuple[int, ...]

    kind = "key2"

    def verify(self) -> list[str]:
        fails = []
        M = prod(self.primes)
        for p, g in zip(self.primes, self.gammas):
            if nt.multiplicative_order(self.t, p) != p - 1:
                fails.append(f"{self.t} is not a primitive root mod {p}")
            if pow(self.t, g, p) != self.r_A % p:
                fails.append(f"t^gamma_j != r_A mod {p}")
            if not 0 <= g < p - 1:
                fails.append(f"gamma_j for {p} not reduced")
            if (self.gamma - g) % (p - 1):
                fails.append(f"gamma != gamma_j mod {p}-1")
        if len({g % 2 for g in self.gammas}) > 1 or any(g % 2 != self.parity for g in self.gammas):
            fails.append("gamma_j parities differ")
        if tuple(nt.jacobi(self.r_A, p) for p in self.primes) != tuple(self.jacobi):
            fails.append("recorded Jacobi symbols are wrong")
        if self.gamma_modulus != nt.lcm(*(p - 1 for p in self.primes)):
            fails.append("gamma modulus is not lcm(q_j - 1)")
        if pow(self.t, self.gamma, M) != self.power or self.power != self.r_A % M:
            fails.append("t^gamma != r_A mod prod(q_j)")
        return fails

    def fields(self) -> list[tuple[str, str]]:
        return [("t", str(self.t)), ("r_A", str(self.r_A)), ("primes", _fmt(self.primes)),
                ("gammas", _fmt(self.gammas)), ("parity", str(self.parity)),
                ("gamma", str(self.gamma)), ("gamma_modulus", str(self.gamma_modulus)),
                ("power", str(self.power)), ("jacobi", _fmt(self.jacobi))]


def parity_pipeline(t: int, r_A: int, qs, check_jacobi: bool = True) -> ParityPipelineResult:
    """Solve t^gamma = r_A modulo prod(qs) through per-prime discrete logs.

    With ``check_jacobi`` every (r_A/q_j) must be -1, which forces all the
    logs to be odd so the CRT over the moduli q_j - 1 is solvable.

    Raises:
        ParityMismatch: a Jacobi symbol is not -1 (when checked) or the logs'
            parities differ.
    """
    qs = tuple(int(p) for p in qs)
    if not qs:
        raise ValueError("need at least one prime")
    for p in qs:
        if not nt.is_primitive_root(t, p):
            raise ValueError(f"{t} is not a primitive root mod {p}")
    if gcd(r_A, prod(qs)) != 1:
        raise ValueError("r_A must be coprime to every q_j")
    jac = tuple(nt.jacobi(r_A, p) for p in qs)
    if check_jacobi and any(j != -1 for j in jac):
        raise ParityMismatch(f"Jacobi symbols (r_A/q_j) = {jac}, expected all -1")
    gammas = tuple(nt.discrete_log(t, r_A, p) for p in qs)
    parities = {g % 2 for g in gammas}
    if len(parities) > 1:
        raise ParityMismatch(f"discrete logs {gammas} have mixed parity")
    try:
        sol = nt.crt(nt.Congruence(g, p - 1) for g, p in zip(gammas, qs))
    except nt.Incompatible as e:
        raise AssertionError(f"CRT failed despite equal parities: {e}") from None
    M = prod(qs)
    result = ParityPipelineResult(t, r_A, qs, gammas, parities.pop(), sol.residue,
                                  sol.modulus, pow(t, sol.residue, M), jac)
    assert result.power == r_A % M
    return result


def least_common_nonresidue(qs) -> int:
    """Least r > 1 with (r/q_j) = -1 for every q_j."""
    r = 2
    while any(nt.jacobi(r, p) != -1 for p in qs):
        r += 1
    return r


@dataclass
class Key2Chain:
    """End-to-end run: r_A, (u, v), prime search, and the parity pipeline."""

    ra: RAConstruction
    u: int
    v: int
    search: HBCertificate
    t: int
    primes: tuple[int, ...]
    ra_primes: RAConstruction | None
    r_source: str
    parity: ParityPipelineResult
    notes: list[str] = field(default_factory=list)


def run_key2_chain(q: int, A: int, primes, k0: int, ts, count: int, limit: int) -> Key2Chain:
    """Chain the constructions on one instance.

    The search asks for enough primes that, by pigeonhole, one of the t's is a
    primitive root for ``count`` of them. r_A is then rebuilt on those primes;
    if its Jacobi symbols are not all -1 (the index-2 congruence gives +1
    whenever q_j = 3 mod 8) the least common quadratic non-residue is used.
    """
    ra = construct_rA(q, A, primes)
    u, v = build_uv(ra.congruence, k0, primes)
    search = hb_search(ts, u, v, len(ts) * (count - 1) + 1, limit, k0=k0, above=max(k0, q))
    best = max(ts, key=lambda t: sum(t in rs for rs in search.roots))
    chosen = tuple(p for p, rs in zip(search.primes, search.roots) if best in rs)[:count]
    notes = []
    ra_primes = None
    try:
        ra_primes = construct_rA(q, least_valid_A(q, chosen), chosen)
    except (SideConditionFailed, ValueError) as e:
        notes.append(f"r_A on the found primes unavailable: {e}")
    if ra_primes is not None and all(nt.jacobi(ra_primes.r, p) == -1 for p in chosen):
        r_A, source = ra_primes.r, "construct_rA"
    else:
        if ra_primes is not None:
            jac = [nt.jacobi(ra_primes.r, p) for p in chosen]
            notes.append(f"r_A from construct_rA has Jacobi symbols {jac}; using a common non-residue")
        r_A, source = least_common_nonresidue(chosen), "nonresidue"
    parity = parity_pipeline(best, r_A, chosen)
    return Key2Chain(ra, u, v, search, best, chosen, ra_primes, source, parity, notes)


# -- zero propagation ---------------------------------------------------------------

@dataclass(frozen=True)
class ZeroPropagationReport:
    """m = p^phi(q^2A) * r_A is r_A mod q^2A and f(m) = f(p)^phi * f(r_A) = f(r_A)."""

    q: int
    A: int
    r_A: int
    p: int
    phi: int
    m: int
    f_p: UnitValue
    f_r: UnitValue
    f_m: UnitValue
    residual_values: tuple[UnitValue, ...]

    kind = "zero-prop"

    def verify(self) -> list[str]:
        fails = []
        mod = self.q ** (2 * self.A)
        if self.phi != nt.euler_phi(mod):
            fails.append("phi is not phi(q^(2A))")
        if self.m != self.p**self.phi * self.r_A:
            fails.append("m != p^phi * r_A")
        if self.m % mod != self.r_A % mod:
            fails.append("m != r_A mod q^(2A)")
        if self.f_p != ONE:
            fails.append("f(p) != 1")
        if self.f_m != power(self.f_p, self.phi) * self.f_r:
            fails.append("f(m) != f(p)^phi * f(r_A)")
        if self.f_m != self.f_r:
            fails.append("f(m) != f(r_A)")
        return fails

    def fields(self) -> list[tuple[str, str]]:
        return [("q", str(self.q)), ("A", str(self.A)), ("r_A", str(self.r_A)),
                ("p", str(self.p)), ("phi", str(self.phi)), ("m", str(self.m)),
                ("f_p", self.f_p.token()), ("f_r", self.f_r.token()), ("f_m", self.f_m.token()),
                ("residual_values", _fmt(v.token() for v in self.residual_values))]


def zero_propagation_demo(f: CMFunction, q: int, A: int, r_A: int, k0: int,
                          search_limit: int = 10_000) -> ZeroPropagationReport:
    """Exhibit the congruence and multiplicativity steps of the f(r_A) = 0 argument.

    This checks arithmetic only; it says nothing about whether f is automatic.

    Raises:
        NoUnitPrime: no prime p coprime to q with f(p) = 1 below ``search_limit``.
    """
    p = next((int(p) for p in nt.primes_up_to(search_limit)
              if q % p and f.prime_value(int(p)) == ONE), None)
    if p is None:
        raise NoUnitPrime(f"no prime p <= {search_limit} coprime to {q} with f(p) = 1")
    mod = q ** (2 * A)
    phi = nt.euler_phi(mod)
    m = p**phi * r_A
    if m < nt.WIDTH_LIMIT:
        f_m = cm_evaluate(f, m)
    else:
        # beyond the factorisation contract: the factorisation of m is known
        f_m = power(f.prime_value(p), phi) * cm_evaluate(f, r_A)
    residual = tuple(cm_evaluate(f, mod * n + r_A) for n in range(1, k0 + 1))
    return ZeroPropagationReport(q, A, r_A, p, phi, m, f.prime_value(p), cm_evaluate(f, r_A),
                                 f_m, residual)


# -- certificate text ----------------------------------------------------------------

def dumps(cert) -> str:
    lines = [f"certificate: {cert.kind}"]
    lines += [f"{k}: {v}" for k, v in cert.fields()]
    if isinstance(cert, CollisionCertificate):
        lines.append("automaton:")
        lines += ["  " + ln for ln in dfao_mod.dumps(cert.automaton).splitlines()]
    lines.append("end")
    return "\n".join(lines) + "\n"


def loads(text: str) -> list:
    """Parse every certificate block in ``text``."""
    certs = []
    block: dict[str, str] | None = None
    auto: list[str] | None = None
    for raw in text.splitlines():
        line = raw.rstrip()
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if auto is not None and line.startswith("  "):
            auto.append(line[2:])
            continue
        if line.startswith("certificate:"):
            block, auto = {"kind": line.split(":", 1)[1].strip()}, None
            continue
        if block is None:
            raise ValueError(f"text outside a certificate block: {line!r}")
        if line == "end":
            certs.append(_build(block, auto))
            block, auto = None, None
            continue
        if line == "automaton:":
            auto = []
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise ValueError(f"bad certificate line {line!r}")
        block[key.strip()] = value.strip()
    if block is not None:
        raise ValueError("unterminated certificate block")
    return certs


def _build(b: dict[str, str], auto: list[str] | None):
    kind = b["kind"]
    try:
        if kind == "key1":
            if auto is None:
                raise ValueError("collision certificate needs its automaton")
            return CollisionCertificate(int(b["i1"]), int(b["i2"]), int(b["r"]),
                                        tuple(_ints(b["states"])), int(b["bound"]),
                                        dfao_mod.loads("\n".join(auto)))
        if kind == "key":
            res, mod = _ints(b["congruence"])
            return RAConstruction(int(b["q"]), int(b["A"]), tuple(_ints(b["primes"])),
                                  nt.Congruence(res, mod), int(b["r"]), b["a_meets_bound"] == "yes")
        if kind == "hb":
            groups = lambda s: tuple(tuple(_ints(g)) for g in s.split(";")) if s else ()
            return HBCertificate(tuple(_ints(b["t"])), int(b["u"]), int(b["v"]), int(b["k0"]),
                                 int(b["limit"]), tuple(_ints(b["primes"])), groups(b["roots"]),
                                 groups(b["jacobi"]), b.get("require_jacobi") == "yes")
        if kind == "key2":
            return ParityPipelineResult(int(b["t"]), int(b["r_A"]), tuple(_ints(b["primes"])),
                                        tuple(_ints(b["gammas"])), int(b["parity"]),
                                        int(b["gamma"]), int(b["gamma_modulus"]),
                                        int(b["power"]), tuple(_ints(b["jacobi"])))
        if kind == "zero-prop":
            return ZeroPropagationReport(int(b["q"]), int(b["A"]), int(b["r_A"]), int(b["p"]),
                                         int(b["phi"]), int(b["m"]), parse_token(b["f_p"]),
                                         parse_token(b["f_r"]), parse_token(b["f_m"]),
                                         tuple(parse_token(x) for x in b["residual_values"].split()))
    except KeyError as e:
        raise ValueError(f"{kind} certificate is missing {e}") from None
    raise ValueError(f"unknown certificate kind {kind!r}")
