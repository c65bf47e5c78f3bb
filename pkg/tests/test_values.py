import cmath

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from autoseq.values import (
    MINUS_ONE,
    ONE,
    ZERO,
    OrderLimitExceeded,
    UnitValue,
    abs_codes,
    absolute,
    from_code,
    mul,
    mul_codes,
    parse_token,
    power,
    root,
)

# orders dividing 360 are closed under products, so no limit errors
values = st.one_of(
    st.just(ZERO),
    st.builds(root, st.integers(-400, 400), st.sampled_from([d for d in range(1, 361) if 360 % d == 0])),
)


def test_mul_examples():
    assert mul(ZERO, root(1, 2)) == ZERO
    assert mul(root(1, 2), root(1, 2)) == root(0, 1)
    assert mul(root(1, 3), root(1, 6)) == root(1, 2)


def test_mul_against_complex_arithmetic():
    z = root(1, 3).to_complex() * root(1, 6).to_complex()
    assert abs(z - cmath.exp(1j * cmath.pi)) < 1e-12
    assert abs(z - root(1, 2).to_complex()) < 1e-12


def test_pow_examples():
    assert power(root(1, 4), 2) == root(1, 2)
    assert power(ZERO, 5) == ZERO
    acc = ONE
    for _ in range(100):
        acc = mul(acc, root(1, 3))
    assert acc == power(root(1, 3), 100) == root(1, 3)
    assert power(ZERO, 0) == ONE


def test_abs_examples():
    assert absolute(ZERO) == ZERO
    assert absolute(root(1, 2)) == ONE
    assert absolute(root(3, 7)) == ONE


def test_canonical_form():
    assert root(2, 4) == UnitValue(1, 2)
    assert root(-1, 3) == UnitValue(2, 3)
    assert root(5, 5) == ONE == UnitValue(0, 1)
    with pytest.raises(ValueError):
        UnitValue(2, 4)
    with pytest.raises(ValueError):
        UnitValue(0, 2)


def test_tokens():
    assert parse_token("Z") == ZERO
    assert parse_token("1") == ONE
    assert parse_token("-1") == MINUS_ONE
    assert parse_token("W:3/7") == root(3, 7)
    assert MINUS_ONE.token() == "W:1/2"
    assert ONE.token() == "W:0/1"
    for bad in ["W:2/4", "W:0/2", "W:7/7", "W:1/0", "W:x/3", "2", ""]:
        with pytest.raises(ValueError):
            parse_token(bad)


def test_order_limit():
    root(1, 360)
    with pytest.raises(OrderLimitExceeded):
        root(1, 361)
    with pytest.raises(OrderLimitExceeded):
        mul(root(1, 359), root(1, 358))


@given(values, values)
def test_commutative(a, b):
    assert a * b == b * a


@given(values, values, values)
def test_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


@given(values)
def test_identity_and_inverse(a):
    assert a * ONE == a
    if not a.is_zero:
        assert a * a.inverse() == ONE


@given(values, values)
def test_abs_is_multiplicative(a, b):
    assert abs(a * b) == abs(a) * abs(b)


@given(values)
def test_token_round_trip(a):
    assert parse_token(a.token()) == a
    assert root(a.k, a.m) == a if not a.is_zero else True


@given(values)
def test_code_round_trip(a):
    assert from_code(a.code) == a


@given(st.lists(st.tuples(values, values), min_size=1, max_size=30))
def test_vector_codes_agree_with_scalar(pairs):
    a = np.array([x.code for x, _ in pairs])
    b = np.array([y.code for _, y in pairs])
    got = mul_codes(a, b)
    assert [from_code(c) for c in got] == [x * y for x, y in pairs]
    assert [from_code(c) for c in abs_codes(a)] == [abs(x) for x, _ in pairs]
