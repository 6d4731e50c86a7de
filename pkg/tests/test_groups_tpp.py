import itertools

import pytest

from tppverify.groups import GroupFormatError, MatrixGroupOps, TableGroup
from tppverify.matrices import Mat, mat_exp_trunc
from tppverify.series import EpsLaurent
from tppverify.tpp import (
    InstanceError,
    TppInstance,
    quotient_product_set,
    recheck_tpp_witness,
    verify_dpp,
    verify_tpp,
    verify_tpp_series,
)


def brute_force_tpp(group, xs, ys, zs):
    """Oracle: first violating tuple in lexicographic index order, or None."""
    for ix, ix2, iy, iy2, iz, iz2 in itertools.product(
        range(len(xs)), range(len(xs)), range(len(ys)), range(len(ys)),
        range(len(zs)), range(len(zs))
    ):
        p = group.mul(xs[ix], group.inv(xs[ix2]))
        p = group.mul(p, group.mul(ys[iy], group.inv(ys[iy2])))
        p = group.mul(p, group.mul(zs[iz], group.inv(zs[iz2])))
        all_eq = ix == ix2 and iy == iy2 and iz == iz2
        if (p == group.identity) != all_eq:
            return (ix, ix2, iy, iy2, iz, iz2)
    return None


def test_table_group_validation():
    TableGroup.cyclic(6)  # fine
    with pytest.raises(GroupFormatError):
        TableGroup([[0, 1], [0, 1]], identity=0)  # broken identity axiom


def test_trivial_construction_passes():
    g = TableGroup.cyclic(5)
    inst = TppInstance(g, list(range(5)), [0], [0], "table")
    rep = verify_tpp(inst)
    assert rep.verdict == "pass"
    assert rep.tuples_checked == 25


def test_z2_failure_with_witness():
    g = TableGroup.cyclic(2)
    inst = TppInstance(g, [0, 1], [0, 1], [0], "table")
    rep = verify_tpp(inst)
    assert rep.verdict == "fail"
    # oracle: first lexicographic violation
    expected = brute_force_tpp(g, [0, 1], [0, 1], [0])
    assert rep.witness.indices == expected == (0, 1, 0, 1, 0, 0)
    assert recheck_tpp_witness(inst, rep.witness)


def test_witness_recheck_invariant():
    g = TableGroup.cyclic(4)
    inst = TppInstance(g, [0, 2], [0, 1], [0], "table")
    rep = verify_tpp(inst)
    if rep.verdict == "fail":
        assert recheck_tpp_witness(inst, rep.witness)


def test_abelian_translation_symmetry():
    g = TableGroup.cyclic(7)
    xs, ys, zs = [0, 1, 3], [0, 2], [0]
    base = verify_tpp(TppInstance(g, xs, ys, zs, "table")).verdict
    for a in range(7):
        for b in range(7):
            xs2 = [g.mul(a, x) for x in xs]
            zs2 = [g.mul(z, b) for z in zs]
            got = verify_tpp(TppInstance(g, xs2, ys, zs2, "table")).verdict
            assert got == base


def test_duplicate_elements_rejected():
    g = TableGroup.cyclic(5)
    with pytest.raises(InstanceError):
        TppInstance(g, [0, 0], [0], [0], "table")


def test_quotient_set_examples():
    g = TableGroup.cyclic(5)
    triv = TppInstance(g, [0], [0], [0], "table")
    qs = quotient_product_set(triv)
    assert [q for q, _ in qs] == [0]

    inst = TppInstance(g, list(range(5)), [0], [0], "table")
    qs = quotient_product_set(inst)
    assert sorted(q for q, _ in qs) == list(range(5))

    # counting bound
    inst2 = TppInstance(g, [0, 1], [0, 2], [0, 1], "table")
    qs2 = quotient_product_set(inst2)
    assert len(qs2) <= 2 * 2 * 2 * 2


def test_dpp_examples():
    g = TableGroup.cyclic(5)
    assert verify_dpp([0], [0], g, "table").verdict == "pass"
    g2 = TableGroup.cyclic(2)
    rep = verify_dpp([0, 1], [0, 1], g2, "table")
    assert rep.verdict == "fail"


def test_sampled_mode_records_seed():
    g = TableGroup.cyclic(5)
    inst = TppInstance(g, list(range(5)), [0], [0], "table")
    rep = verify_tpp(inst, mode="sampled", sample_budget=10, seed=42)
    assert rep.sampled and rep.seed == 42 and rep.tuples_checked == 10


def test_float_elements_rejected():
    ops = MatrixGroupOps(2)
    m = Mat.from_rows([[1.0, 0.0], [0.0, 1.0]])
    inst = TppInstance(ops, [m], [m.copy()], [m.copy()], "exact")
    with pytest.raises(InstanceError):
        verify_tpp(inst)


# -- series mode -------------------------------------------------------------

def basis_mat(n, i, j):
    m = Mat.zeros(n, n)
    m[i, j] = 1
    return m


def test_series_distinctness_certified_at_order_one():
    ops = MatrixGroupOps(2)
    a = basis_mat(2, 1, 0)
    c = basis_mat(2, 0, 1)
    x = [mat_exp_trunc(a, 2)]
    z = [mat_exp_trunc(c, 2)]
    ident = Mat.identity(2, one=EpsLaurent.const(1), zero=EpsLaurent.zero())
    inst = TppInstance(ops, x, [ident], z, "family")
    rep = verify_tpp_series(inst, order=1)
    assert rep.verdict == "pass"


def test_series_identity_families_pass():
    ops = MatrixGroupOps(2)
    ident = Mat.identity(2, one=EpsLaurent.const(1), zero=EpsLaurent.zero())
    inst = TppInstance(ops, [ident], [ident.copy()], [ident.copy()], "family")
    assert verify_tpp_series(inst, order=2).verdict == "pass"


def test_series_duplicate_family_rejected():
    ops = MatrixGroupOps(2)
    a = basis_mat(2, 1, 0)
    fam = mat_exp_trunc(a, 2)
    with pytest.raises(InstanceError):
        ident = Mat.identity(2, one=EpsLaurent.const(1), zero=EpsLaurent.zero())
        TppInstance(ops, [fam, fam.copy()], [ident], [ident.copy()], "family")


def test_series_inconclusive_when_window_exhausted():
    # families that agree to the stored window except at eps^3, verified at order 2
    ops = MatrixGroupOps(2)
    a = basis_mat(2, 1, 0)
    x1 = mat_exp_trunc(a, 3)
    x2 = mat_exp_trunc(a, 3)
    x2[0, 1] = x2[0, 1] + EpsLaurent({3: 1}, lo=0, hi=3)
    ident = Mat.identity(2, one=EpsLaurent.const(1), zero=EpsLaurent.zero())
    inst = TppInstance(ops, [x1, x2], [ident], [ident.copy()], "family")
    rep = verify_tpp_series(inst, order=2)
    assert rep.verdict == "inconclusive"
    assert rep.inconclusive_count > 0
    rep3 = verify_tpp_series(inst, order=3)
    assert rep3.verdict == "pass"
