import random

import pytest
from hypothesis import given, settings, strategies as st

from tppverify.scalars import GaussRational, QQ
from tppverify.series import EpsLaurent, InsufficientOrderError, series


def hand_mul(a: dict, b: dict) -> dict:
    """Independent oracle: plain convolution of coefficient dicts."""
    out = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            out[e1 + e2] = out.get(e1 + e2, QQ(0)) + c1 * c2
    return {e: c for e, c in out.items() if c != 0}


def test_mul_polynomial_identity():
    # (1 + eps)(1 - eps) = 1 - eps^2 on windows [0,3]
    a = series({0: 1, 1: 1}, hi=3)
    b = series({0: 1, 1: -1}, hi=3)
    p = a * b
    assert p.coeff(0) == GaussRational(1)
    assert p.coeff(1).is_zero()
    assert p.coeff(2) == GaussRational(-1)
    assert p.coeff(3).is_zero()
    assert (p.lo, p.hi) == (0, 3)


def test_mul_exponent_arithmetic():
    p = EpsLaurent.eps(-1) * EpsLaurent.eps(1)
    assert p.constant_term() == GaussRational(1)
    assert p.valuation() == 0


def test_mul_truncated_hand_oracle():
    # (1 + eps + eps^2)(1 + eps) truncated at hi=2: oracle by hand multiplication
    a = {0: QQ(1), 1: QQ(1), 2: QQ(1)}
    b = {0: QQ(1), 1: QQ(1)}
    expect = hand_mul(a, b)  # 1 + 2eps + 2eps^2 + eps^3
    p = series(a, hi=2) * series(b, hi=2)
    assert p.hi == 2
    for k in range(3):
        assert p.coeff(k) == GaussRational(expect.get(k, QQ(0)))
    with pytest.raises(InsufficientOrderError):
        p.coeff(3)


def test_window_product_rule():
    a = series({1: 1}, lo=1, hi=4)
    b = series({2: 1}, lo=2, hi=3)
    p = a * b
    assert (p.lo, p.hi) == (3, min(1 + 3, 2 + 4))


def test_empty_window_construction_errors():
    with pytest.raises(InsufficientOrderError):
        EpsLaurent({}, lo=3, hi=1)


def test_insufficient_order_for_inverse():
    # inverting eps*(...) known only to eps^1 leaves no certified coefficients
    a = series({1: 1}, lo=1, hi=1)
    inv = a.inverse()
    assert (inv.lo, inv.hi) == (-1, -1)
    with pytest.raises(InsufficientOrderError):
        inv.coeff(0)


def test_inv_geometric():
    a = series({0: 1, 1: 1}, hi=2)
    inv = a.inverse()
    assert [inv.coeff(k) for k in range(3)] == [
        GaussRational(1),
        GaussRational(-1),
        GaussRational(1),
    ]


def test_inv_constant():
    assert EpsLaurent.const(2).inverse().constant_term() == GaussRational(QQ(1, 2))


def test_inv_shifted_multiply_back():
    a = series({1: 1, 2: 1}, lo=1, hi=4)  # eps(1+eps), window [1,4]
    inv = a.inverse()
    assert inv.valuation() == -1
    assert inv.coeff(-1) == GaussRational(1)
    assert inv.coeff(0) == GaussRational(-1)
    prod = a * inv
    assert prod.constant_term() == GaussRational(1)
    assert all(c.is_zero() for e, c in prod.coeffs.items() if e != 0)


def test_inv_zero_errors():
    with pytest.raises(InsufficientOrderError):
        series({}, lo=0, hi=3).inverse()


def test_inv_multiply_back_random():
    rng = random.Random(7)
    for _ in range(100):
        lo = rng.randint(-2, 2)
        hi = lo + rng.randint(2, 5)
        coeffs = {lo: QQ(rng.choice([1, -1, 2, 3]), rng.randint(1, 4))}
        for e in range(lo + 1, hi + 1):
            if rng.random() < 0.6:
                coeffs[e] = QQ(rng.randint(-5, 5), rng.randint(1, 5))
        a = series(coeffs, lo=lo, hi=hi)
        prod = a * a.inverse()
        assert prod.constant_term() == GaussRational(1)
        assert all(c.is_zero() for e, c in prod.coeffs.items() if e != 0), (a, prod)


@settings(max_examples=60)
@given(st.integers(0, 4), st.integers(0, 4), st.integers(0, 4), st.data())
def test_ring_axioms_on_windows(_, __, ___, data):
    def rand_series():
        lo = data.draw(st.integers(-2, 1))
        hi = lo + data.draw(st.integers(1, 4))
        n_terms = data.draw(st.integers(0, 4))
        coeffs = {}
        for _ in range(n_terms):
            e = data.draw(st.integers(lo, hi))
            coeffs[e] = QQ(data.draw(st.integers(-4, 4)))
        return series(coeffs, lo=lo, hi=hi)

    a, b, c = rand_series(), rand_series(), rand_series()
    left = (a + b) * c
    right = a * c + b * c
    assert left.eq_on_window(right)
    assert ((a * b) * c).eq_on_window(a * (b * c))


def test_shift_and_reparametrize():
    a = series({0: 1, 1: 2}, hi=3)
    d = a.shift(-2)
    assert (d.lo, d.hi) == (-2, 1)
    assert d.coeff(-2) == GaussRational(1)
    r = a.reparametrize(3)
    assert r.coeff(0) == GaussRational(1)
    assert r.coeff(3) == GaussRational(2)
    # reparametrized window covers the gap exponents, which are known zero
    assert r.hi == 3 * 3 + 2
    assert r.coeff(2).is_zero()


def test_conjugate_coefficientwise():
    a = series({0: GaussRational(1, 2), 1: GaussRational(0, 1)}, hi=2)
    c = a.conjugate()
    assert c.coeff(0) == GaussRational(1, -2)
    assert c.coeff(1) == GaussRational(0, -1)


def test_coeff_outside_window_fails_loudly():
    a = series({0: 1}, hi=2)
    with pytest.raises(InsufficientOrderError):
        a.coeff(3)
    assert a.coeff(-5).is_zero()  # below lo: known zero


def test_json_roundtrip():
    a = series({-1: GaussRational(1, 2), 2: 3}, lo=-1, hi=4)
    b = EpsLaurent.from_json(a.to_json())
    assert a == b
