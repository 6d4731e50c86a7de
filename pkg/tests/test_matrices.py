import random

import pytest

from tppverify.scalars import GaussRational, QQ
from tppverify.matrices import (
    Mat,
    lpm,
    mat_det,
    mat_exp_trunc,
    mat_inv_exact,
    mat_inv_series,
    mat_minor,
    mat_rank,
    solve_linear,
    _det_expansion,
)

def rand_qq_mat(n, rng, lo=-5, hi=5):
    return Mat.from_rows([[QQ(rng.randint(lo, hi)) for _ in range(n)] for _ in range(n)])


def test_det_2x2():
    m = Mat.from_rows([[1, 2], [3, 4]])
    assert mat_det(m) == -2


def test_lpm_identity():
    m = Mat.identity(5)
    for j in range(6):
        assert lpm(m, j) == 1


def test_det_multiplicativity_random():
    rng = random.Random(3)
    for _ in range(20):
        a = rand_qq_mat(4, rng)
        b = rand_qq_mat(4, rng)
        assert mat_det(a.matmul(b)) == mat_det(a) * mat_det(b)


def test_bareiss_vs_cofactor_cross_oracle():
    rng = random.Random(5)
    for _ in range(15):
        m = rand_qq_mat(4, rng)
        assert mat_det(m) == _det_expansion(m)


def test_lpm_unitriangular_sandwich():
    # lpm of (lower unitriangular) * M * (upper unitriangular) equals lpm of M
    rng = random.Random(11)
    for _ in range(10):
        n = 4
        m = rand_qq_mat(n, rng)
        low = Mat.identity(n, one=QQ(1), zero=QQ(0))
        up = Mat.identity(n, one=QQ(1), zero=QQ(0))
        for i in range(n):
            for j in range(i):
                low[i, j] = QQ(rng.randint(-3, 3))
                up[j, i] = QQ(rng.randint(-3, 3))
        prod = low.matmul(m).matmul(up)
        for j in range(n + 1):
            assert lpm(prod, j) == lpm(m, j)


def test_minor_selection():
    m = Mat.from_rows([[1, 2, 3], [4, 5, 6], [7, 8, 10]])
    assert mat_minor(m, drop_rows=[0], drop_cols=[0]) == 5 * 10 - 6 * 8
    assert mat_minor(m, keep_rows=[0, 1], keep_cols=[1, 2]) == 2 * 6 - 3 * 5
    with pytest.raises(Exception):
        mat_minor(m, keep_rows=[0], keep_cols=[0, 1])


def test_exp_trunc_zero_matrix():
    z = Mat.zeros(3, 3)
    e = mat_exp_trunc(z, 4)
    for i in range(3):
        for j in range(3):
            expect = GaussRational(1 if i == j else 0)
            assert e[i, j].constant_term() == expect
            assert all(c.is_zero() for k, c in e[i, j].coeffs.items() if k > 0)


def test_exp_trunc_order2_definition():
    a = Mat.from_rows([[0, 1], [2, 0]])
    e = mat_exp_trunc(a, 2)
    a2 = a.matmul(a)
    for i in range(2):
        for j in range(2):
            assert e[i, j].coeff(1) == GaussRational(a[i, j])
            assert e[i, j].coeff(2) == GaussRational(QQ(a2[i, j], 2))
    assert (e[0, 0].lo, e[0, 0].hi) == (0, 2)


def test_exp_trunc_skew_conj_transpose_cancellation():
    # for skew-symmetric real A: exp(eps A) * exp(eps A)^* = I + O(eps^3)
    a = Mat.from_rows([[0, 2, -1], [-2, 0, 3], [1, -3, 0]])
    e = mat_exp_trunc(a, 2)
    prod = e.matmul(e.conj_transpose())
    for i in range(3):
        for j in range(3):
            s = prod[i, j]
            assert s.coeff(0) == GaussRational(1 if i == j else 0)
            assert s.coeff(1).is_zero()
            assert s.coeff(2).is_zero()


def test_exp_trunc_order_consistency():
    rng = random.Random(2)
    a = rand_qq_mat(3, rng, -2, 2)
    e3 = mat_exp_trunc(a, 3)
    e2 = mat_exp_trunc(a, 2)
    for i in range(3):
        for j in range(3):
            assert e3[i, j].truncate(2) == e2[i, j]


def test_conj_transpose_laws():
    m = Mat.from_rows([[GaussRational(1, 2), GaussRational(0, 1)],
                       [GaussRational(3), GaussRational(2, -1)]])
    n = Mat.from_rows([[GaussRational(0, 1), GaussRational(1)],
                       [GaussRational(1, 1), GaussRational(0)]])
    assert m.conj_transpose().conj_transpose() == m
    assert m.matmul(n).conj_transpose() == n.conj_transpose().matmul(m.conj_transpose())
    # (iI)^* = -iI
    ii = Mat.identity(2, one=GaussRational(0, 1), zero=GaussRational(0))
    assert ii.conj_transpose() == Mat.identity(2, one=GaussRational(0, -1), zero=GaussRational(0))


def test_exp_conj_transpose_skew_hermitian():
    # conj_transpose(exp_trunc(eps A, 2)) = exp_trunc(-eps A, 2) for skew-Hermitian A
    a = Mat.from_rows([
        [GaussRational(0, 1), GaussRational(2, 3)],
        [GaussRational(-2, 3), GaussRational(0, -1)],
    ])
    assert a.conj_transpose() == -a
    left = mat_exp_trunc(a, 2).conj_transpose()
    right = mat_exp_trunc(-a, 2)
    assert left == right


def test_series_matrix_inverse_roundtrip():
    a = Mat.from_rows([[0, 1, 0], [-1, 0, 2], [0, -2, 0]])
    e = mat_exp_trunc(a, 3)
    inv = mat_inv_series(e)
    prod = e.matmul(inv)
    for i in range(3):
        for j in range(3):
            s = prod[i, j]
            assert s.constant_term() == GaussRational(1 if i == j else 0)
            assert all(c.is_zero() for k, c in s.coeffs.items() if k != 0)


def test_exact_inverse():
    m = Mat.from_rows([[QQ(1), QQ(2)], [QQ(3), QQ(4)]])
    inv = mat_inv_exact(m)
    assert m.matmul(inv) == Mat.identity(2, one=QQ(1), zero=QQ(0))


def test_solve_linear_and_rank():
    a = [[QQ(1), QQ(2)], [QQ(2), QQ(4)]]
    assert mat_rank(a) == 1
    sol, reason = solve_linear(a, [[QQ(1)], [QQ(2)]])
    assert reason is None
    assert sol[0][0] + 2 * sol[1][0] == QQ(1)
    sol, reason = solve_linear(a, [[QQ(1)], [QQ(3)]])
    assert sol is None and "inconsistent" in reason
