"""Verification of separating and border-separating function families."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .scalars import GaussRational, approx_eq
from .sepfun import EvalContext, SepFunction
from .series import EpsLaurent, InsufficientOrderError
from .tpp import TppInstance, quotient_product_set


@dataclass
class SepReport:
    verdict: str                 # "pass" | "fail" | "inconclusive"
    checked: int = 0
    failures: list = field(default_factory=list)
    inconclusive: list = field(default_factory=list)
    order_used: int | None = None
    seed: int | None = None
    sampled: bool = False
    notes: list = field(default_factory=list)
    equal_pairs: int = 0
    unequal_pairs: int = 0

    MAX_RECORDED = 10

    def to_json(self):
        out = {"verdict": self.verdict, "checked": self.checked, "sampled": self.sampled}
        if self.failures:
            out["failures"] = self.failures[: self.MAX_RECORDED]
        if self.inconclusive:
            out["inconclusive"] = self.inconclusive[: self.MAX_RECORDED]
        if self.order_used is not None:
            out["order_used"] = self.order_used
        if self.seed is not None:
            out["seed"] = self.seed
        if self.notes:
            out["notes"] = self.notes
        return out


def _eval_family_fn(fn, g, ctx=None):
    if isinstance(fn, SepFunction):
        return fn.eval(g, ctx or EvalContext())
    return fn(g)


def verify_separating(family, inst: TppInstance, tol: float | None = None) -> SepReport:
    """Exact-mode check: f_{x,z} is 1 at x z^-1 and 0 on the rest of the quotient.

    family maps (ix, iz) index pairs to SepFunctions or callables.  With tol
    set, values are compared numerically (for float-valued constructions);
    otherwise comparison is exact.
    """
    quotient = quotient_product_set(inst)
    g = inst.group
    report = SepReport("pass")
    for (ix, iz), fn in family.items():
        if inst.mode == "table":
            key = g.mul(inst.x[ix], g.inv(inst.z[iz]))
        else:
            key = inst.element("x", ix).matmul(inst.inv_element("z", iz))
        for q_elt, provenance in quotient:
            expected = 1 if q_elt == key else 0
            val = _eval_family_fn(fn, q_elt)
            report.checked += 1
            if tol is None:
                ok = val == expected or val == GaussRational(expected)
            else:
                ok = approx_eq(val, expected, tol)
            if not ok:
                report.failures.append({
                    "xz": (ix, iz),
                    "quotient_provenance": provenance[0],
                    "expected": expected,
                    "got": repr(val),
                })
    if report.failures:
        report.verdict = "fail"
    return report


def check_border_value(val, expected: int):
    """Classify one border evaluation: 'ok' | 'fail' | 'inconclusive'.

    The value must have no nonzero coefficient at negative exponents within
    its window and constant term exactly `expected`.
    """
    if not isinstance(val, EpsLaurent):
        val = EpsLaurent.const(val)
    for e, c in val.coeffs.items():
        if e < 0 and not c.is_zero():
            return "fail", f"surviving negative power eps^{e}"
    if not val.known(0):
        return "inconclusive", "constant term beyond valid window"
    if val.coeff(0) != GaussRational(expected):
        return "fail", f"constant term {val.coeff(0)!r} != {expected}"
    return "ok", None


def verify_separating_border(family, inst: TppInstance, order: int,
                             sample_budget: int = 10 ** 4, seed: int = 0,
                             ctx: EvalContext | None = None) -> SepReport:
    """Border-mode check over quotient tuples of a family instance.

    Tuples are (ix, iz, ix', iy, iy', iz'): f_{x,z} evaluated at
    x' y^-1 y' z'^-1 must be 1 + O(eps) exactly when (x', z') = (x, z) and
    y = y', and 0 + O(eps) otherwise.  When the full grid exceeds the budget
    a seeded sample is drawn, stratified so that expected-1 tuples (which
    form a vanishing fraction of the grid) are exercised too.
    """
    nx, ny, nz = inst.sizes()
    total = nx * nz * nx * ny * ny * nz
    report = SepReport("pass", order_used=order)
    pair_keys = sorted(family.keys())

    def tuples():
        if total <= sample_budget:
            for ix, iz in pair_keys:
                for ix2 in range(nx):
                    for iy in range(ny):
                        for iy2 in range(ny):
                            for iz2 in range(nz):
                                yield ix, iz, ix2, iy, iy2, iz2
            return
        rng = random.Random(seed)
        report.sampled = True
        report.seed = seed
        half = sample_budget // 2
        for i in range(sample_budget):
            ix, iz = pair_keys[rng.randrange(len(pair_keys))]
            if i < half:
                # positive stratum: the expected-1 diagonal
                iy = rng.randrange(ny)
                yield ix, iz, ix, iy, iy, iz
            else:
                yield (ix, iz, rng.randrange(nx), rng.randrange(ny),
                       rng.randrange(ny), rng.randrange(nz))

    prod_cache = {}
    for ix, iz, ix2, iy, iy2, iz2 in tuples():
        key = (ix2, iy, iy2, iz2)
        m = prod_cache.get(key)
        if m is None:
            m = inst.element("x", ix2)
            m = m.matmul(inst.inv_element("y", iy))
            m = m.matmul(inst.element("y", iy2))
            m = m.matmul(inst.inv_element("z", iz2))
            if len(prod_cache) < 4096:
                prod_cache[key] = m
        expected = 1 if (ix2 == ix and iz2 == iz and iy == iy2) else 0
        try:
            val = _eval_family_fn(family[(ix, iz)], m, ctx)
            status, detail = check_border_value(val, expected)
        except InsufficientOrderError as exc:
            status, detail = "inconclusive", str(exc)
        report.checked += 1
        entry = {"tuple": (ix, iz, ix2, iy, iy2, iz2), "expected": expected,
                 "detail": detail}
        if status == "fail":
            report.failures.append(entry)
        elif status == "inconclusive":
            report.inconclusive.append(entry)
    if report.failures:
        report.verdict = "fail"
    elif report.inconclusive:
        report.verdict = "inconclusive"
    return report


def verify_indicator_border(fn, yfams, pairs=None, sample_budget: int = 2000,
                            seed: int = 0, ctx: EvalContext | None = None,
                            invs=None) -> SepReport:
    """Check fn = 1 + O(eps) at I and 0 + O(eps) on y^-1 y' for y != y'."""
    from .matrices import mat_inv_series

    n = len(yfams)
    report = SepReport("pass")
    if pairs is None:
        all_pairs = n * n
        if all_pairs <= sample_budget:
            pairs = [(i, j) for i in range(n) for j in range(n)]
        else:
            rng = random.Random(seed)
            report.sampled = True
            report.seed = seed
            pairs = [(rng.randrange(n), rng.randrange(n)) for _ in range(sample_budget)]
            pairs += [(i, i) for i in {rng.randrange(n) for _ in range(8)}]
    if invs is None:
        invs = {}
    equal_pairs = 0
    unequal_pairs = 0
    for i, j in pairs:
        if i not in invs:
            invs[i] = mat_inv_series(yfams[i])
        m = invs[i].matmul(yfams[j])
        expected = 1 if i == j else 0
        if expected:
            equal_pairs += 1
        else:
            unequal_pairs += 1
        try:
            val = _eval_family_fn(fn, m, ctx)
            status, detail = check_border_value(val, expected)
        except InsufficientOrderError as exc:
            status, detail = "inconclusive", str(exc)
        report.checked += 1
        if status == "fail":
            report.failures.append({"pair": (i, j), "expected": expected, "detail": detail})
        elif status == "inconclusive":
            report.inconclusive.append({"pair": (i, j), "detail": detail})
    report.notes.append(f"pairs: {equal_pairs} equal, {unequal_pairs} unequal")
    report.equal_pairs = equal_pairs
    report.unequal_pairs = unequal_pairs
    if report.failures:
        report.verdict = "fail"
    elif report.inconclusive:
        report.verdict = "inconclusive"
    return report
