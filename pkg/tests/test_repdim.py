import itertools
import math
import random

import pytest

from tppverify.repdim import (
    NoNontrivialBoundError,
    OmegaInputs,
    corollary_bound,
    max_dim,
    omega_bound,
    partitions_of,
    repdim_table,
    staircase_partition,
    sum_dim_squares,
    tighter_dim_bound,
    weyl_dim,
)


def brute_partitions(s, max_parts):
    """Oracle: filter weakly-decreasing tuples enumerated directly."""
    if s == 0:
        return {()}
    found = set()
    for k in range(1, max_parts + 1):
        for combo in itertools.product(range(1, s + 1), repeat=k):
            if sum(combo) == s and all(a >= b for a, b in zip(combo, combo[1:])):
                found.add(combo)
    return found


def test_partitions_examples():
    assert partitions_of(0, 3) == [()]
    assert set(partitions_of(3, 2)) == {(3,), (2, 1)}
    assert len(partitions_of(6, 3)) == len(brute_partitions(6, 3)) == 7


def test_partitions_match_oracle():
    for s in range(8):
        for mparts in range(1, 5):
            assert set(partitions_of(s, mparts)) == brute_partitions(s, mparts)


def test_weyl_dim_examples():
    assert weyl_dim((), 4) == 1
    # n=2, lambda=(1,0): product over the single pair = (1-0+1)/1 = 2
    assert weyl_dim((1,), 2) == 2
    # staircase d=1, n=3 gives 2^C(3,2) = 8
    assert weyl_dim((2, 1, 0), 3) == 8


def test_staircase_exact():
    for d in (1, 2, 3):
        for n in (2, 3, 4):
            lam = staircase_partition(d, n)
            assert sum(lam) == d * math.comb(n, 2)
            assert weyl_dim(lam, n) == (d + 1) ** math.comb(n, 2)


def test_sum_dim_squares_small():
    assert sum_dim_squares(0, 3) == 1
    assert sum_dim_squares(1, 2) == 5  # 1^2 + 2^2
    assert sum_dim_squares(2, 2) == 15  # 1 + 4 + (3^2 + 1^2)


def test_sum_dim_squares_binomial_identity():
    for n in range(1, 5):
        for s in range(7):
            assert sum_dim_squares(s, n) == math.comb(s + n * n, n * n)


def test_max_dim_bound_holds():
    for n in (3, 4, 5):
        for s in range(2, 11):
            _, dim = max_dim(s, n)
            assert dim <= s ** math.comb(n, 2)
    for s in range(2, 11):
        _, dim = max_dim(s, 2)
        assert dim <= (1 + s) ** math.comb(2, 2)


def test_max_dim_examples():
    _, dim = max_dim(2, 3)
    assert dim <= 8
    lam, dim = max_dim(3, 3)
    assert dim <= 27
    assert weyl_dim((2, 1), 3) == 8  # the d=1 staircase is a partition of 3
    lam0, dim0 = max_dim(0, 5)
    assert lam0 == () and dim0 == 1


def test_max_dim_tie_break_lexicographic():
    # n=1: every partition of s has dimension 1; argmax must be lex-greatest (s,)
    lam, dim = max_dim(4, 1)
    assert lam == (4,) and dim == 1


def test_tighter_bound_dominates_staircase():
    # the informational tighter bound should upper-bound the staircase value
    for d in (1, 2, 3):
        for n in (3, 4):
            s = d * math.comb(n, 2)
            assert tighter_dim_bound(s, n) >= (d + 1) ** math.comb(n, 2) - 1e-6


def test_omega_bound_closed_form():
    # V = 8, D = 64, dmax = 2 -> (log 64 - 2 log 2)/(log 8 - log 2) = 4/2 = 2
    val = omega_bound(OmegaInputs(8, 8, 8, 64, 2))
    assert abs(val - 2.0) <= 1e-12


def test_omega_bound_degenerate_errors():
    with pytest.raises(NoNontrivialBoundError):
        omega_bound(OmegaInputs(2, 2, 2, 4, 2))
    # finite-group-style saturation: V^3 = |G|^{3/2}, D = |G|, dmax = sqrt(|G|)
    g = 4096
    v = g ** 0.5
    with pytest.raises(NoNontrivialBoundError):
        omega_bound(OmegaInputs(v, v, v, g, g ** 0.5))


def test_omega_inputs_validation():
    with pytest.raises(ValueError):
        omega_bound(OmegaInputs(8, 8, 8, 3, 2))  # dmax^2 > D


def test_omega_accepts_logs():
    import math as m

    plain = omega_bound(OmegaInputs(8, 8, 8, 64, 2))
    logs = omega_bound(OmegaInputs(m.log(8), m.log(8), m.log(8), m.log(64), m.log(2), as_logs=True))
    assert abs(plain - logs) < 1e-12


def test_corollary_bound_identity_case():
    # choose inputs making numerator exactly 2x the denominator
    n, s = 3, 100
    c2 = math.comb(n, 2)
    num = math.log(math.comb(s + n * n, n * n)) / math.log(s) - 2 * c2
    target_log_xyz = 3 * (num / 2 + c2)
    assert abs(corollary_bound(target_log_xyz, s, n) - 2.0) < 1e-9


def test_corollary_vs_omega_cross_check():
    n, s = 3, 10 ** 6
    c2 = math.comb(n, 2)
    log_size = (n * n / 2) * math.log(s)  # |X| = s^{n^2/2}
    via_corollary = corollary_bound(3 * log_size / math.log(s), s, n)
    via_omega = omega_bound(OmegaInputs(
        log_size, log_size, log_size,
        math.log(math.comb(s + n * n, n * n)),
        c2 * math.log(s),
        as_logs=True,
    ))
    assert abs(via_corollary - via_omega) < 1e-6


def test_corollary_bound_below_threshold_errors():
    with pytest.raises(NoNontrivialBoundError):
        corollary_bound(3 * 3.0, 4, 3)  # log_s |XYZ| = 9 -> denominator 3 - C(3,2) = 0


def test_omega_monotone_in_v():
    rng = random.Random(0)
    for _ in range(50):
        d = rng.uniform(10, 1e6)
        dmax = d ** rng.uniform(0.1, 0.49)
        v1 = dmax * rng.uniform(1.01, 10)
        v2 = v1 * rng.uniform(1.0, 10)
        w1 = omega_bound(OmegaInputs(v1, v1, v1, d, dmax))
        w2 = omega_bound(OmegaInputs(v2, v2, v2, d, dmax))
        assert w2 <= w1 + 1e-9


def test_repdim_table_shape():
    rows = repdim_table(3, 4)
    assert [r["s"] for r in rows] == [0, 1, 2, 3, 4]
    assert all(r["binom_check"] for r in rows)
    assert rows[2]["bound_s_pow"] == 2 ** 3
