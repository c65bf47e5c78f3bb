from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from autoseq import characters as C
from autoseq import dfao as D
from autoseq import multfun as M
from autoseq import numtheory as nt
from autoseq.values import MINUS_ONE, ONE, ZERO


def chars(Q):
    return C.enumerate_characters(C.build_unit_group(Q))


def brute_conductor(chi):
    """Oracle: least d | Q such that some character mod d agrees with chi on units mod Q."""
    Q = chi.modulus
    units = [n for n in range(1, Q + 1) if gcd(n, Q) == 1]
    for d in nt.divisors(Q):
        for psi in chars(d):
            if all(psi(n) == chi(n) for n in units):
                return d
    raise AssertionError


def preperiod_period(q, Q):
    seen, x, j = {}, 1 % Q, 0
    while x not in seen:
        seen[x] = j
        x, j = x * q % Q, j + 1
    return seen[x], j - seen[x]


def test_unit_group_examples():
    assert C.build_unit_group(1).generators == ()
    G = C.build_unit_group(5)
    assert G.generators == (2,) and G.orders == (4,)
    G = C.build_unit_group(8)
    assert G.generators == (7, 5) and G.orders == (2, 2)
    assert sorted(G.logs) == [1, 3, 5, 7]


@pytest.mark.parametrize("Q", [1, 2, 3, 4, 8, 9, 12, 15, 16, 24, 35, 48, 63, 100])
def test_characters_are_distinct_homomorphisms(Q):
    cs = chars(Q)
    assert len(cs) == (nt.euler_phi(Q) if Q > 1 else 1)
    tables = {tuple(c.table()) for c in cs}
    assert len(tables) == len(cs)
    for c in cs:
        for a in range(Q):
            if gcd(a, Q) != 1:
                assert c(a) == ZERO
                continue
            for b in range(Q):
                assert c(a * b) == c(a) * c(b)
            assert c(a + Q) == c(a)


def test_enumerate_examples():
    assert [c.table() for c in chars(1)] == [[ONE]]
    c4 = chars(4)
    assert len(c4) == 2 and c4[0].is_principal and c4[1](3) == MINUS_ONE
    assert [c.order for c in chars(5)] == [1, 4, 2, 4]


def test_conductor_examples():
    assert C.conductor(chars(12)[0]) == 1
    chi4 = chars(4)[1]
    assert C.conductor(chi4) == 4
    assert C.conductor(C.induce(chi4, 8)) == 4


@pytest.mark.parametrize("Q", [1, 4, 8, 9, 12, 16, 20, 21, 24, 25, 27, 32, 36, 40])
def test_conductor_matches_oracle(Q):
    for chi in chars(Q):
        assert C.conductor(chi) == brute_conductor(chi)
        prim = C.primitive_character(chi)
        assert C.is_primitive(prim) and prim.modulus == C.conductor(chi)


primitive = st.sampled_from([c for Q in range(1, 31) for c in chars(Q) if C.is_primitive(c)])


@settings(max_examples=40)
@given(primitive, st.integers(1, 6))
def test_conductor_monotone_under_induction(chi, k):
    d = chi.modulus
    ind = C.induce(chi, d * k)
    assert C.conductor(ind) == d
    assert C.primitive_character(ind) == chi


def test_compile_examples():
    a = C.compile_character(chars(1)[0], 5)
    assert a.state_count == 1 and a.outputs == (ONE,)
    chi4 = chars(4)[1]
    a = C.compile_character(chi4, 2)
    assert a.state_count == 5
    assert all(a(n) == chi4(n) for n in range(1 << 14))
    chi3 = chars(3)[1]
    a = C.compile_character(chi3, 3)
    assert all(a(n) == chi3(n % 3) for n in range(3**9))


@settings(max_examples=30)
@given(primitive, st.sampled_from([2, 3, 10]))
def test_compiled_character_properties(chi, q):
    a = C.compile_character(chi, q)
    assert M.check_completely_multiplicative(a, 10**4) is None
    pre, per = preperiod_period(q, chi.modulus)
    size = D.kernel_exact(a).size
    assert size <= chi.modulus * (pre + per)
    assert M.validate_candidate(M.periodic(chi.table()), a, 5000) is None
    assert a(0) == chi(0)


def test_classify_examples():
    chi4 = chars(4)[1]
    res = C.classify(M.from_prime_values(M.builtin("char:4:1"), 10**4), 2)
    assert res.verdict == "CharacterMatch" and res.character == chi4 and res.conductor == 4

    f = M.CMFunction({2: ONE, 3: ONE}, 3, ZERO)
    res = C.classify(f, 2)
    assert res.verdict == "EventuallyZero" and res.bound == 3


def test_classify_liouville_witnesses():
    res = C.classify(M.liouville(), 2, N=10_000, Qmax=100, P=1000)
    assert res.verdict == "NotClassified"
    assert [Q for Q, _, _ in res.witnesses] == list(range(1, 101))
    lam = M.liouville()
    for Q, n1, n2 in res.witnesses:
        assert n1 % Q == n2 % Q and gcd(n1, Q) == gcd(n2, Q) == 1
        assert lam(n1) != lam(n2)


def test_classify_odd_part_character():
    # chi_4 of the odd part: f(2) = 1, so no prime vanishes yet the modulus is 4
    chi4 = chars(4)[1]
    f = M.CMFunction({int(p): (ONE if p == 2 else chi4(int(p))) for p in nt.primes_up_to(2000)},
                     2000, ONE)
    res = C.classify(f, 2, N=2000, Qmax=100, P=1000)
    assert res.zero_primes == ()
    assert res.verdict == "CharacterMatch" and res.character == chi4 and res.modulus == 4


def test_classify_rejects_non_multiplicative():
    seq = D.Dfao(2, [[0, 1], [1, 0]], [ONE, MINUS_ONE])  # Thue-Morse
    with pytest.raises(C.NotCompletelyMultiplicative):
        C.classify(seq, 2, N=100)


@pytest.mark.parametrize("Q,q", [(3, 2), (5, 10), (8, 3), (12, 2), (13, 2), (21, 10), (25, 3)])
def test_round_trip_sample(Q, q):
    for chi in chars(Q):
        if not C.is_primitive(chi):
            continue
        a = C.compile_character(chi, q)
        res = C.classify(a, q)
        assert res.verdict == "CharacterMatch"
        assert (res.character, res.conductor) == (chi, Q)


def test_report_lines_are_bound_relative():
    res = C.classify(M.builtin("char:4:1"), 2, N=500, Qmax=20, P=100)
    text = "\n".join(f"{k}: {v}" for k, v in res.lines())
    assert "N=500" in text and "Qmax=20" in text and "P=100" in text
    assert "char Q=4 e=[1]" in text
