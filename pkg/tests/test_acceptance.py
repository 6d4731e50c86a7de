"""Acceptance suite: one check per release criterion, printed pass/fail.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines.  Every tolerance is pinned here.  Criterion A7b asserts the nominal
trace-deficit integrality constant 2*(n!)^2 exactly as stated; exact
arithmetic refutes that constant (the correct one, 2*(n!/(n/2)!)^4, is
asserted green in A7c), so A7b fails by design rather than being silently
weakened.  See the corrected-constant note in the su module and the reports'
deviations field.
"""

import json
import math
import random
import time

import pytest

from tppverify.cli import main as cli_main
from tppverify.embedding import cyclic_characters, realize_algorithm
from tppverify.groups import TableGroup
from tppverify.matrices import Mat, mat_det, mat_exp_trunc
from tppverify.repdim import (
    NoNontrivialBoundError,
    OmegaInputs,
    corollary_bound,
    max_dim,
    omega_bound,
    staircase_partition,
    sum_dim_squares,
    weyl_dim,
)
from tppverify.running_example import (
    SIGN_CORRECTION_NOTE,
    build_orthogonal_family,
    build_unitriangular_sets,
    lpm_expansion_check,
    running_border_p0,
    verify_tpp_numeric,
)
from tppverify.scalars import QQ
from tppverify.sepverify import verify_indicator_border
from tppverify.su import (
    su_achievable_c_nodes,
    su_build,
    su_c_value,
    su_eps2_check,
    su_s_matrix,
    su_trace_invariant,
    su_y_lattice,
    kvn_inequality_check,
)
from tppverify.tpp import TppInstance


def _line(tag, ok, desc, t0):
    status = "PASS" if ok else "FAIL"
    print(f"[{tag}] {status} {desc} ({time.time() - t0:.2f}s)")
    return ok


# -- A1: representation identity ---------------------------------------------

def test_a1_representation_identity():
    t0 = time.time()
    ok = all(
        sum_dim_squares(s, n) == math.comb(s + n * n, n * n)
        for n in range(1, 5) for s in range(7)
    )
    elapsed = time.time() - t0
    assert _line("A1", ok and elapsed < 10,
                 "sum of squared irrep dimensions = C(s+n^2, n^2), n<=4, s<=6", t0)
    assert elapsed < 10


# -- A2: dimension bound and staircase ----------------------------------------

def test_a2_dimension_bound_and_staircase():
    t0 = time.time()
    ok = True
    for n in (3, 4, 5):
        for s in range(2, 11):
            _, dim = max_dim(s, n)
            ok = ok and dim <= s ** math.comb(n, 2)
    for d in (1, 2, 3):
        for n in (2, 3, 4):
            lam = staircase_partition(d, n)
            ok = ok and weyl_dim(lam, n) == (d + 1) ** math.comb(n, 2)
    assert _line("A2", ok, "max irrep dim <= s^C(n,2); staircase = (d+1)^C(n,2)", t0)


# -- A3: exponent calculators --------------------------------------------------

def test_a3_omega_calculators():
    t0 = time.time()
    val = omega_bound(OmegaInputs(8, 8, 8, 64, 2))
    ok = abs(val - 2.0) <= 1e-12
    try:
        omega_bound(OmegaInputs(2, 2, 2, 4, 2))
        ok = False
    except NoNontrivialBoundError:
        pass
    n, s = 3, 10 ** 6
    c2 = math.comb(n, 2)
    log_size = (n * n / 2) * math.log(s)
    via_cor = corollary_bound(3 * log_size / math.log(s), s, n)
    via_omega = omega_bound(OmegaInputs(
        log_size, log_size, log_size,
        math.log(math.comb(s + n * n, n * n)), c2 * math.log(s), as_logs=True))
    ok = ok and abs(via_cor - via_omega) <= 1e-6
    assert _line("A3", ok, "omega calculator closed form, degenerate error, "
                 "cross-agreement <= 1e-6", t0)


# -- A4: finite-group end-to-end ----------------------------------------------

def test_a4_finite_group_pipeline():
    t0 = time.time()
    g = TableGroup.cyclic(5)
    inst = TppInstance(g, list(range(5)), [0], [0], "table")
    field, reps = cyclic_characters(5)
    rep = realize_algorithm(inst, reps, field, trials=20, seed=2024)
    elapsed = time.time() - t0
    ok = rep.verdict == "pass" and elapsed < 5
    assert _line("A4", ok, "Z5 trivial construction, all 5 characters: exact "
                 "recovery of AB for 20 random pairs", t0)


# -- A5: running-example TPP ---------------------------------------------------

def test_a5_running_example_tpp():
    t0 = time.time()
    xq, zq, _ = build_unitriangular_sets(3, 2)
    fam = build_orthogonal_family(3, 2, count=4, seed=0)
    rep = verify_tpp_numeric(xq, [m for _, m in fam.members], zq, tol=1e-9)
    ok = rep.verdict == "pass" and len(xq) == 8 and len(zq) == 8
    ys = [m for _, m in fam.members]
    ys.append(ys[0])  # planted violation: duplicate orthogonal factor
    rep_bad = verify_tpp_numeric(xq, ys, zq, tol=1e-9)
    ok = ok and rep_bad.verdict == "fail" and rep_bad.witness is not None
    assert _line("A5", ok, "exhaustive TPP at n=3 (|X|=|Z|=8, 4 orthogonal), "
                 "planted violation detected with witness", t0)


# -- A6: lpm expansion ----------------------------------------------------------

def test_a6_lpm_expansion_exact():
    t0 = time.time()
    rng = random.Random(6)
    ok = True
    for trial in range(20):
        n = (2, 3, 4, 5)[trial % 4]
        def rand_skew():
            m = Mat.zeros(n, n)
            for i in range(n):
                for j in range(i + 1, n):
                    v = rng.randint(-5, 5)
                    m[i, j] = v
                    m[j, i] = -v
            return m
        rep = lpm_expansion_check(n, rand_skew(), rand_skew())
        ok = ok and rep.ok
    elapsed = time.time() - t0
    ok = ok and elapsed < 10
    assert _line("A6", ok, "lpm-sum coefficients exact for 20 random skew pairs, "
                 "n <= 5", t0)


# -- A7: exact identities of the split-form construction -----------------------

@pytest.fixture(scope="module")
def constr4():
    return su_build(4)


@pytest.fixture(scope="module")
def lattice_pairs(constr4):
    rng = random.Random(7)
    coords, _ = su_y_lattice(constr4, 4, cap=64, seed=7)
    pairs = []
    for _ in range(100):
        pairs.append((coords[rng.randrange(len(coords))],
                      coords[rng.randrange(len(coords))]))
    return pairs


def test_a7a_exact_identities(constr4, lattice_pairs):
    t0 = time.time()
    c = constr4
    # D*QD = Q and det D = 1 are asserted inside su_build; recheck det here
    ok = mat_det(c.d_mat.map(QQ)) == QQ(1)
    for ca, cb in lattice_pairs[:20]:
        a, b = su_s_matrix(c, ca), su_s_matrix(c, cb)
        ok = ok and su_eps2_check(c, a, b).ok
    # dual-path conjugation agreement on construction elements
    for ca, _ in lattice_pairs[:5]:
        m = mat_exp_trunc(su_s_matrix(c, ca), 3)
        direct = su_trace_invariant(m, c, "direct")
        both = su_trace_invariant(m, c, "both")
        ok = ok and direct.eq_on_window(both)
    assert _line("A7a", ok, "D*QD=Q, det D=1, eps^2 identity on 20 pairs, "
                 "conjugate-as-minor dual path exact", t0)


def test_a7b_trace_deficit_integrality_as_stated(constr4, lattice_pairs):
    """Nominal claim: 2*(n!)^2 * c is a nonnegative integer on every pair.

    Exact arithmetic refutes this constant (see the decisions record and
    test_a7c); the check is kept as stated and is expected to fail honestly.
    """
    t0 = time.time()
    c = constr4
    failures = 0
    zero_iff_ok = True
    for ca, cb in lattice_pairs:
        rep = su_c_value(c, su_s_matrix(c, ca), su_s_matrix(c, cb))
        if not rep.nominal_integral:
            failures += 1
        zero_iff_ok = zero_iff_ok and (rep.is_zero == (ca == cb))
    ok = failures == 0 and zero_iff_ok
    _line("A7b", ok, f"2*(n!)^2*c integral on 100-pair sample "
          f"({failures} non-integral; zero-iff-equal {'holds' if zero_iff_ok else 'fails'})", t0)
    assert zero_iff_ok, "c = 0 iff A = B must hold"
    assert failures == 0, (
        f"2*(n!)^2*c non-integral on {failures}/100 pairs: the stated constant "
        "2*(n!)^2 = 1152 does not clear the denominators (counterexample: "
        "c = 3953713/41472 for a unit lattice difference; 41472 = 2*(4!/2!)^4). "
        "The corrected constant is asserted in test_a7c; see the deviations "
        "field of su reports and the project decisions record."
    )


def test_a7c_trace_deficit_integrality_corrected(constr4, lattice_pairs):
    t0 = time.time()
    c = constr4
    ok = True
    for ca, cb in lattice_pairs:
        rep = su_c_value(c, su_s_matrix(c, ca), su_s_matrix(c, cb))
        ok = ok and isinstance(rep.c_times_clear_const, int) and rep.c_times_clear_const >= 0
        ok = ok and (rep.is_zero == (ca == cb))
    assert _line("A7c", ok, "corrected constant 2*(n!/(n/2)!)^4 * c integral and "
                 "zero iff A=B on the same 100-pair sample", t0)


# -- A8: trace inequality Monte Carlo ------------------------------------------

def test_a8_kvn_monte_carlo():
    t0 = time.time()
    rep = kvn_inequality_check(4, trials=1000, tol=1e-9, seed=8)
    ok = (rep.verdict == "pass" and rep.max_violation <= 1e-9
          and rep.planted_equality_gap <= 1e-9)
    assert _line("A8", ok, "1000 random 4x4 unitaries satisfy the trace "
                 "inequality within 1e-9; planted diagonal achieves equality", t0)


# -- A9 + A11: end-to-end split assembly, determinism --------------------------

SPLIT_ARGS = ["split-assemble", "--n", "4", "--q", "2", "--sample-budget", "10000",
              "--seed", "1234", "--no-timestamp", "--format", "json"]


@pytest.fixture(scope="module")
def split_reports(tmp_path_factory):
    t0 = time.time()
    base = tmp_path_factory.mktemp("acceptance")
    outs = []
    per_run = []
    for i in range(2):
        path = base / f"report{i}.json"
        t1 = time.time()
        code = cli_main(SPLIT_ARGS + ["--output", str(path)])
        per_run.append(time.time() - t1)
        outs.append((code, path.read_text()))
    print(f"[setup] two split-assemble runs at budget 10^4 "
          f"({time.time() - t0:.2f}s total)")
    return outs, per_run


def test_a9_end_to_end_split(split_reports):
    t0 = time.time()
    (outs, per_run) = split_reports
    code, text = outs[0]
    rep = json.loads(text)
    details = rep["details"]
    ok = code == 0 and rep["verdict"] == "pass"
    ok = ok and details["tpp"]["verdict"] == "pass"
    ok = ok and details["separating"]["verdict"] == "pass"
    ok = ok and details["tpp"]["tuples_checked"] == 10000
    ok = ok and details["separating"]["checked"] == 10000
    degs = {k: int(v) for k, v in details["degrees"].items()}
    ok = ok and degs["deg_total"] == degs["deg_p0"] + degs["deg_r"]
    ok = ok and details["order"] == details["t"] + 2

    # degree-vs-q scaling of the indicator: the certified grid bound
    # 2*(n!/(n/2)!)^4 * c_max is linear in the lattice box (q=2 and q=4 share
    # the box; q=8 quadruples it), in contrast to the quadratic growth of the
    # plain-construction indicator in A10.
    constr = su_build(4)
    bounds = {}
    for q in (2, 4, 8):
        nodes, _ = su_achievable_c_nodes(constr, q)
        bounds[q] = nodes[-1] * constr.clear_constant
    ok = ok and bounds[4] == bounds[2] and bounds[8] == 4 * bounds[2]
    ok = ok and max(bounds[q] / q for q in bounds) <= 2 * min(bounds[q] / q for q in bounds)
    ok = ok and max(per_run) < 300  # each end-to-end run within 5 minutes
    assert _line("A9", ok, "split assembly at n=4, q=2: TPP + border separation "
                 f"pass on 10^4 seeded tuples in {max(per_run):.0f}s; degree "
                 "ledger exact; indicator degree bound linear in q across {2,4,8}", t0)


def test_a10_running_border_p0():
    t0 = time.time()
    p0, yfams, rep = running_border_p0(3, 4, yfam_cap=40, seed=10, check_pairs=0)
    invs = {}
    contract = verify_indicator_border(p0, yfams, sample_budget=1100, seed=10,
                                       invs=invs)
    ok = contract.verdict == "pass" and contract.unequal_pairs >= 1000
    ok = ok and contract.equal_pairs >= 1  # the 1 + O(eps) side exercised too
    ok = ok and SIGN_CORRECTION_NOTE in rep.deviations
    degs = {}
    for q in (2, 4, 8):
        _, _, r = running_border_p0(3, q, yfam_cap=4, seed=0, check_pairs=0)
        degs[q] = r.deg_r
    r1, r2 = degs[4] / degs[2], degs[8] / degs[4]
    ok = ok and 3 <= r1 <= 5 and 3 <= r2 <= 5
    assert _line("A10", ok, "border indicator 1+O(eps)/0+O(eps) on 10^3 sampled "
                 "pairs at n=3, q=4; sign correction recorded; degree grows ~q^2 "
                 f"(ratios {r1:.1f}, {r2:.1f})", t0)


def test_a11_determinism(split_reports):
    t0 = time.time()
    (_, text1), (_, text2) = split_reports[0]
    ok = text1 == text2
    assert _line("A11", ok, "repeating the A9 command with the same seed yields "
                 "a byte-identical report", t0)
