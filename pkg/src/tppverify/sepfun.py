"""Evaluable polynomial expressions on matrices with tracked total degree.

A SepFunction is an expression tree over a small set of primitives: matrix
entry access, leading principal minors, traces, the minor-based invariants
p_k, matrix-argument transforms (sandwich by constants, shift by a multiple
of the identity, multiply by a power of eps), real-linear coordinate forms,
univariate polynomial application, products, sums, scalar affine maps,
division by eps^k, and reparametrization eps -> eps^t.

Evaluation is generic over the argument's scalar kind: exact rationals,
Gaussian rationals, truncated Laurent series, or float complex.  tracked
degree is an upper bound on the true total degree in the matrix entries
(eps excluded), exact for products and sums of the primitives used here.

Univariate polynomials are applied to series via their exact Taylor
expansion around the argument's constant term, so an indicator polynomial
with hundreds of roots costs only a handful of series multiplications per
evaluation (the Taylor coefficients are cached per expansion point).
"""

from __future__ import annotations

from .matrices import Mat, lpm as mat_lpm, mat_det, mat_minor
from .scalars import GaussRational, QQ, as_qq
from .series import EpsLaurent


class SepFunctionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Univariate polynomials (product form around exact roots, or coefficients)
# ---------------------------------------------------------------------------

class UniPoly:
    """A univariate polynomial, either scale * prod (x - root_i) or by coeffs."""

    def __init__(self, roots=None, scale=None, coeffs=None):
        if (roots is None) == (coeffs is None):
            raise SepFunctionError("give either roots+scale or coeffs")
        self.roots = [GaussRational.from_any(r) for r in roots] if roots is not None else None
        self.scale = GaussRational.from_any(scale if scale is not None else 1) if roots is not None else None
        self.coeff_list = [GaussRational.from_any(c) for c in coeffs] if coeffs is not None else None
        self._taylor_cache: dict = {}

    @property
    def degree(self) -> int:
        if self.roots is not None:
            return len(self.roots)
        d = 0
        for k, c in enumerate(self.coeff_list):
            if not c.is_zero():
                d = k
        return d

    def coeffs(self):
        """Expanded low-first coefficient list (intended for small degrees)."""
        if self.coeff_list is not None:
            return list(self.coeff_list)
        out = [self.scale]
        for r in self.roots:
            out = [GaussRational(0)] + out  # multiply by x
            for k in range(len(out) - 1):
                out[k] = out[k] - r * out[k + 1]
        return out

    # -- evaluation ---------------------------------------------------------
    def eval_exact(self, x):
        x = GaussRational.from_any(x)
        if self.roots is not None:
            acc = self.scale
            for r in self.roots:
                acc = acc * (x - r)
            return acc
        acc = GaussRational(0)
        for c in reversed(self.coeff_list):
            acc = acc * x + c
        return acc

    def eval_float(self, x: complex) -> complex:
        if self.roots is not None:
            acc = complex(self.scale)
            for r in self.roots:
                acc *= x - complex(r)
            return acc
        acc = 0j
        for c in reversed(self.coeff_list):
            acc = acc * x + complex(c)
        return acc

    def taylor(self, c: GaussRational, order: int):
        """Exact Taylor coefficients of p(c + h) in h, up to h^order."""
        key = c
        cached = self._taylor_cache.get(key)
        if cached is not None and len(cached) > order:
            return cached[: order + 1]
        order_full = min(order, self.degree)
        if self.roots is not None:
            t = [GaussRational(1)] + [GaussRational(0)] * order_full
            deg_so_far = 0
            for r in self.roots:
                base = c - r
                deg_so_far = min(deg_so_far + 1, order_full)
                for k in range(deg_so_far, 0, -1):
                    t[k] = t[k] * base + t[k - 1]
                t[0] = t[0] * base
            t = [self.scale * x for x in t]
        else:
            # binomial shift of the coefficient list
            t = [GaussRational(0)] * (order_full + 1)
            for k, a in enumerate(self.coeff_list):
                if a.is_zero():
                    continue
                for i in range(0, min(k, order_full) + 1):
                    # contribution of a*(c+h)^k to h^i: a * C(k,i) * c^(k-i)
                    t[i] = t[i] + a * GaussRational(QQ(_comb(k, i))) * _gauss_pow(c, k - i)
        t = t + [GaussRational(0)] * (order + 1 - len(t))
        self._taylor_cache[key] = t
        return t[: order + 1]

    def eval_series(self, x: EpsLaurent) -> EpsLaurent:
        c = x.coeff(0)  # raises loudly if the constant term is unknown
        h = x - EpsLaurent.const(c)
        neg = any(e < 0 for e in h.coeffs)
        if neg:
            needed = self.degree
        else:
            needed = min(self.degree, max(x.hi, 0) if x.hi < 10 ** 8 else self.degree)
        t = self.taylor(c, needed)
        acc = EpsLaurent.const(t[0])
        if needed >= 1:
            hpow = h
            acc = acc + t[1] * hpow
            for i in range(2, needed + 1):
                hpow = hpow * h
                acc = acc + t[i] * hpow
        # a nonconstant polynomial of x is never known beyond x's own window
        if self.degree >= 1:
            acc = acc.truncate(min(acc.hi, x.hi))
        return acc

    def __call__(self, x):
        if isinstance(x, EpsLaurent):
            return self.eval_series(x)
        if isinstance(x, complex):
            return self.eval_float(x)
        return self.eval_exact(x)

    def to_json(self):
        if self.roots is not None:
            return {"form": "roots",
                    "roots": [r.to_json() for r in self.roots],
                    "scale": self.scale.to_json()}
        return {"form": "coeffs", "coeffs": [c.to_json() for c in self.coeff_list]}

    @classmethod
    def from_json(cls, obj):
        if obj["form"] == "roots":
            return cls(roots=[GaussRational.from_json(r) for r in obj["roots"]],
                       scale=GaussRational.from_json(obj["scale"]))
        return cls(coeffs=[GaussRational.from_json(c) for c in obj["coeffs"]])


def _comb(n, k):
    import math

    return math.comb(n, k)


def _gauss_pow(c: GaussRational, k: int) -> GaussRational:
    out = GaussRational(1)
    for _ in range(k):
        out = out * c
    return out


def lagrange_indicator(point, points) -> UniPoly:
    """The unique degree-(len(points)-1) polynomial 1 at point, 0 elsewhere.

    points must be pairwise distinct and contain point.
    """
    point = GaussRational.from_any(point)
    pts = [GaussRational.from_any(p) for p in points]
    if len({(p.re, p.im) for p in pts}) != len(pts):
        raise SepFunctionError("interpolation points must be pairwise distinct")
    if all(p != point for p in pts):
        raise SepFunctionError("point must be among the interpolation points")
    roots = [p for p in pts if p != point]
    denom = GaussRational(1)
    for r in roots:
        denom = denom * (point - r)
    return UniPoly(roots=roots, scale=denom.inverse())


# ---------------------------------------------------------------------------
# Scalar-kind helpers for mixed evaluation
# ---------------------------------------------------------------------------

def _re_part(x):
    if isinstance(x, EpsLaurent):
        out = EpsLaurent.zero()
        out.coeffs = {e: GaussRational(c.re) for e, c in x.coeffs.items() if c.re != 0}
        out.lo, out.hi = x.lo, x.hi
        return out
    if isinstance(x, GaussRational):
        return GaussRational(x.re)
    if isinstance(x, complex):
        return x.real
    return x


def _im_part(x):
    if isinstance(x, EpsLaurent):
        out = EpsLaurent.zero()
        out.coeffs = {e: GaussRational(c.im) for e, c in x.coeffs.items() if c.im != 0}
        out.lo, out.hi = x.lo, x.hi
        return out
    if isinstance(x, GaussRational):
        return GaussRational(x.im)
    if isinstance(x, complex):
        return x.imag
    return 0


def _to_series_scalar(x):
    return x if isinstance(x, EpsLaurent) else EpsLaurent.const(x)


# ---------------------------------------------------------------------------
# Expression tree
# ---------------------------------------------------------------------------

class EvalContext:
    """Evaluation context: eps scaling (from reparametrization) and p_k mode."""

    __slots__ = ("eps_scale", "conj_mode")

    def __init__(self, eps_scale: int = 1, conj_mode: str = "direct"):
        self.eps_scale = eps_scale
        self.conj_mode = conj_mode

    def scaled(self, t: int) -> "EvalContext":
        return EvalContext(self.eps_scale * t, self.conj_mode)


class SepFunction:
    """Base class; subclasses implement eval(M, ctx) and degree."""

    kind = "abstract"

    @property
    def degree(self) -> int:
        raise NotImplementedError

    def eval(self, m: Mat, ctx: EvalContext | None = None):
        raise NotImplementedError

    def __call__(self, m: Mat, ctx: EvalContext | None = None):
        return self.eval(m, ctx or EvalContext())

    def to_json(self):
        raise NotImplementedError

    @staticmethod
    def from_json(obj) -> "SepFunction":
        return _NODE_KINDS[obj["kind"]]._from_json(obj)


class Const(SepFunction):
    kind = "const"

    def __init__(self, value):
        if isinstance(value, EpsLaurent):
            self.value = value
        else:
            self.value = GaussRational.from_any(value)

    @property
    def degree(self):
        return 0

    def eval(self, m, ctx=None):
        ctx = ctx or EvalContext()
        if isinstance(self.value, EpsLaurent):
            return self.value.reparametrize(ctx.eps_scale)
        if _is_float_mat(m):
            return complex(self.value)
        return self.value

    def to_json(self):
        if isinstance(self.value, EpsLaurent):
            return {"kind": self.kind, "series": self.value.to_json()}
        return {"kind": self.kind, "value": self.value.to_json()}

    @classmethod
    def _from_json(cls, obj):
        if "series" in obj:
            return cls(EpsLaurent.from_json(obj["series"]))
        return cls(GaussRational.from_json(obj["value"]))


class Entry(SepFunction):
    kind = "entry"

    def __init__(self, i: int, j: int):
        self.i = i
        self.j = j

    @property
    def degree(self):
        return 1

    def eval(self, m, ctx=None):
        return m[self.i, self.j]

    def to_json(self):
        return {"kind": self.kind, "i": self.i, "j": self.j}

    @classmethod
    def _from_json(cls, obj):
        return cls(obj["i"], obj["j"])


class LeadingMinor(SepFunction):
    kind = "lpm"

    def __init__(self, j: int):
        self.j = j

    @property
    def degree(self):
        return self.j

    def eval(self, m, ctx=None):
        return mat_lpm(m, self.j)

    def to_json(self):
        return {"kind": self.kind, "j": self.j}

    @classmethod
    def _from_json(cls, obj):
        return cls(obj["j"])


class TraceNode(SepFunction):
    kind = "trace"

    @property
    def degree(self):
        return 1

    def eval(self, m, ctx=None):
        return m.trace()

    def to_json(self):
        return {"kind": self.kind}

    @classmethod
    def _from_json(cls, obj):
        return cls()


class MinorInvariant(SepFunction):
    """p_k(M) = sum over k-subsets S,T of |det((D M D)_{S,T})|^2.

    Entries of the conjugated factor come either from direct coefficientwise
    conjugation or from the determinant-minor route through Q (valid exactly
    on the group the invariant belongs to); "both" evaluates the two and
    raises on disagreement, flagging arguments outside the group.
    """

    kind = "pk"

    def __init__(self, k: int, d_mat: Mat, q_mat: Mat | None = None):
        self.k = k
        self.d_mat = d_mat
        self.q_mat = q_mat
        self._d_conj = d_mat.conj()
        self._d_real = self._d_conj == d_mat

    @property
    def degree(self):
        # each |det_k|^2 is degree k in the entries and k in their conjugates;
        # conjugates of group elements are degree-(n-1) minor polynomials
        n = self.d_mat.rows
        return self.k * n

    def _conj_matrix_minor(self, m: Mat) -> Mat:
        q = self.q_mat
        if q is None:
            raise SepFunctionError("minor-mode conjugation needs the form matrix Q")
        qmq = q.matmul(m).matmul(q)
        n = m.rows
        out = Mat.zeros(n, n)
        for i in range(n):
            for j in range(n):
                minor = mat_minor(qmq, drop_rows=[i], drop_cols=[j])
                out[i, j] = minor if (i + j) % 2 == 0 else -minor
        return out

    def _value(self, dmd: Mat, dmbard: Mat):
        from itertools import combinations

        n = dmd.rows
        acc = None
        for s_rows in combinations(range(n), self.k):
            for t_cols in combinations(range(n), self.k):
                det1 = mat_det(dmd.submatrix(s_rows, t_cols))
                det2 = mat_det(dmbard.submatrix(s_rows, t_cols))
                term = det1 * det2
                acc = term if acc is None else acc + term
        return acc

    def eval(self, m, ctx=None):
        ctx = ctx or EvalContext()
        mode = ctx.conj_mode
        d = self.d_mat
        dmd = _sandwich(d, m, d)
        if mode in ("direct", "both"):
            if self._d_real:
                dmbard = dmd.conj()  # real D: conj(D M D) = D conj(M) D
            else:
                dmbard = _sandwich(self._d_conj, m.conj(), self._d_conj)
            direct = self._value(dmd, dmbard)
        if mode in ("minor", "both"):
            viaminor = self._value(dmd, _sandwich(d, self._conj_matrix_minor(m), d))
        if mode == "direct":
            return direct
        if mode == "minor":
            return viaminor
        same = (direct.eq_on_window(viaminor) if isinstance(direct, EpsLaurent)
                else direct == viaminor)
        if not same:
            raise SepFunctionError(
                "dual-path conjugation mismatch: argument is not in the group"
            )
        return direct

    def to_json(self):
        return {
            "kind": self.kind,
            "k": self.k,
            "d": _mat_json(self.d_mat),
            "q": _mat_json(self.q_mat) if self.q_mat is not None else None,
        }

    @classmethod
    def _from_json(cls, obj):
        return cls(obj["k"], _mat_unjson(obj["d"]),
                   _mat_unjson(obj["q"]) if obj.get("q") else None)


def _sandwich(l_mat, m, r_mat):
    lm = _coerce_const_mat(l_mat, m)
    rm = _coerce_const_mat(r_mat, m)
    return lm.matmul(m).matmul(rm)


def _is_float_mat(m: Mat) -> bool:
    return any(isinstance(x, (float, complex)) for x in m.data)


def _coerce_const_mat(c: Mat, like: Mat) -> Mat:
    if _is_float_mat(like):
        return c.map(lambda x: complex(x) if not isinstance(x, (float, complex)) else x)
    return c


class Sandwich(SepFunction):
    """Evaluate the child at L @ M @ R for constant exact matrices L, R."""

    kind = "sandwich"

    def __init__(self, l_mat: Mat, r_mat: Mat, child: SepFunction):
        self.l_mat = l_mat
        self.r_mat = r_mat
        self.child = child

    @property
    def degree(self):
        return self.child.degree

    def eval(self, m, ctx=None):
        return self.child.eval(_sandwich(self.l_mat, m, self.r_mat), ctx)

    def to_json(self):
        return {"kind": self.kind, "l": _mat_json(self.l_mat),
                "r": _mat_json(self.r_mat), "child": self.child.to_json()}

    @classmethod
    def _from_json(cls, obj):
        return cls(_mat_unjson(obj["l"]), _mat_unjson(obj["r"]),
                   SepFunction.from_json(obj["child"]))


class ShiftIdentity(SepFunction):
    """Evaluate the child at M + c*I."""

    kind = "shift_identity"

    def __init__(self, c, child: SepFunction):
        self.c = GaussRational.from_any(c)
        self.child = child

    @property
    def degree(self):
        return self.child.degree

    def eval(self, m, ctx=None):
        n = m.rows
        shifted = m.copy()
        for i in range(n):
            x = shifted[i, i]
            if isinstance(x, EpsLaurent):
                shifted[i, i] = x + EpsLaurent.const(self.c)
            elif isinstance(x, (float, complex)):
                shifted[i, i] = x + complex(self.c)
            else:
                shifted[i, i] = x + self.c
        return self.child.eval(shifted, ctx)

    def to_json(self):
        return {"kind": self.kind, "c": self.c.to_json(), "child": self.child.to_json()}

    @classmethod
    def _from_json(cls, obj):
        return cls(GaussRational.from_json(obj["c"]), SepFunction.from_json(obj["child"]))


class MatEpsShift(SepFunction):
    """Evaluate the child at eps^k * M (series arguments only; k scales)."""

    kind = "mat_eps_shift"

    def __init__(self, k: int, child: SepFunction):
        self.k = k
        self.child = child

    @property
    def degree(self):
        return self.child.degree

    def eval(self, m, ctx=None):
        ctx = ctx or EvalContext()
        shift = self.k * ctx.eps_scale
        shifted = m.map(lambda x: _to_series_scalar(x).shift(shift))
        return self.child.eval(shifted, ctx)

    def to_json(self):
        return {"kind": self.kind, "k": self.k, "child": self.child.to_json()}

    @classmethod
    def _from_json(cls, obj):
        return cls(obj["k"], SepFunction.from_json(obj["child"]))


class LinearForm(SepFunction):
    """A real-linear scalar-valued form in the matrix entries.

    value(M) = sum_jk [ rr[j,k] Re M[j,k] + ri[j,k] Im M[j,k] ]
             + i * sum_jk [ ir[j,k] Re M[j,k] + ii[j,k] Im M[j,k] ]
    with exact rational coefficient matrices.  Complex-linear forms have
    ri = -ir' ... in practice they are built by the callers; this node just
    evaluates coefficientwise (eps is real, so Re/Im act on coefficients).
    """

    kind = "linear_form"

    def __init__(self, rr, ri, ir, ii):
        self.rr = rr
        self.ri = ri
        self.ir = ir
        self.ii = ii

    @property
    def degree(self):
        return 1

    def eval(self, m, ctx=None):
        if _is_float_mat(m):
            re_acc = 0.0
            im_acc = 0.0
            for j in range(m.rows):
                for k in range(m.cols):
                    x = complex(m[j, k])
                    re_acc += float(self.rr[j, k]) * x.real + float(self.ri[j, k]) * x.imag
                    im_acc += float(self.ir[j, k]) * x.real + float(self.ii[j, k]) * x.imag
            return complex(re_acc, im_acc)
        if m.has_series_entries():
            acc = EpsLaurent.const(0)
            for j in range(m.rows):
                for k in range(m.cols):
                    x = _to_series_scalar(m[j, k])
                    re = _re_part(x)
                    im = _im_part(x)
                    coef_r = GaussRational(self.rr[j, k], self.ir[j, k])
                    coef_i = GaussRational(self.ri[j, k], self.ii[j, k])
                    if not coef_r.is_zero():
                        acc = acc + coef_r * re
                    if not coef_i.is_zero():
                        acc = acc + coef_i * im
            return acc
        acc = GaussRational(0)
        for j in range(m.rows):
            for k in range(m.cols):
                x = GaussRational.from_any(m[j, k])
                acc = acc + GaussRational(self.rr[j, k], self.ir[j, k]) * GaussRational(x.re)
                acc = acc + GaussRational(self.ri[j, k], self.ii[j, k]) * GaussRational(x.im)
        return acc

    def to_json(self):
        def ser(mat):
            return [[qq_str_cell(x) for x in mat.row(i)] for i in range(mat.rows)]
        return {"kind": self.kind, "rr": ser(self.rr), "ri": ser(self.ri),
                "ir": ser(self.ir), "ii": ser(self.ii)}

    @classmethod
    def _from_json(cls, obj):
        def de(rows):
            return Mat.from_rows([[as_qq(x) for x in r] for r in rows])
        return cls(de(obj["rr"]), de(obj["ri"]), de(obj["ir"]), de(obj["ii"]))


def qq_str_cell(x):
    from .scalars import qq_str

    return qq_str(x)


class PolyApply(SepFunction):
    kind = "poly"

    def __init__(self, poly: UniPoly, child: SepFunction):
        self.poly = poly
        self.child = child

    @property
    def degree(self):
        return self.poly.degree * self.child.degree

    def eval(self, m, ctx=None):
        return self.poly(self.child.eval(m, ctx))

    def to_json(self):
        return {"kind": self.kind, "poly": self.poly.to_json(), "child": self.child.to_json()}

    @classmethod
    def _from_json(cls, obj):
        return cls(UniPoly.from_json(obj["poly"]), SepFunction.from_json(obj["child"]))


class Product(SepFunction):
    kind = "product"

    def __init__(self, children):
        self.children = list(children)

    @property
    def degree(self):
        return sum(c.degree for c in self.children)

    def eval(self, m, ctx=None):
        acc = None
        for c in self.children:
            v = c.eval(m, ctx)
            acc = v if acc is None else acc * v
        return acc if acc is not None else GaussRational(1)

    def to_json(self):
        return {"kind": self.kind, "children": [c.to_json() for c in self.children]}

    @classmethod
    def _from_json(cls, obj):
        return cls([SepFunction.from_json(c) for c in obj["children"]])


class SumNode(SepFunction):
    kind = "sum"

    def __init__(self, children):
        self.children = list(children)

    @property
    def degree(self):
        return max((c.degree for c in self.children), default=0)

    def eval(self, m, ctx=None):
        acc = None
        for c in self.children:
            v = c.eval(m, ctx)
            acc = v if acc is None else acc + v
        return acc if acc is not None else GaussRational(0)

    def to_json(self):
        return {"kind": self.kind, "children": [c.to_json() for c in self.children]}

    @classmethod
    def _from_json(cls, obj):
        return cls([SepFunction.from_json(c) for c in obj["children"]])


class Affine(SepFunction):
    """a * child + b (exact scalar shift/scale)."""

    kind = "affine"

    def __init__(self, a, b, child: SepFunction):
        self.a = GaussRational.from_any(a)
        self.b = GaussRational.from_any(b)
        self.child = child

    @property
    def degree(self):
        return self.child.degree

    def eval(self, m, ctx=None):
        v = self.child.eval(m, ctx)
        if isinstance(v, (float, complex)):
            return complex(self.a) * v + complex(self.b)
        if isinstance(v, EpsLaurent):
            return self.a * v + EpsLaurent.const(self.b)
        return self.a * GaussRational.from_any(v) + self.b

    def to_json(self):
        return {"kind": self.kind, "a": self.a.to_json(), "b": self.b.to_json(),
                "child": self.child.to_json()}

    @classmethod
    def _from_json(cls, obj):
        return cls(GaussRational.from_json(obj["a"]), GaussRational.from_json(obj["b"]),
                   SepFunction.from_json(obj["child"]))


class DivEps(SepFunction):
    """Divide the (series) child value by eps^k; scales under reparametrization."""

    kind = "div_eps"

    def __init__(self, k: int, child: SepFunction):
        self.k = k
        self.child = child

    @property
    def degree(self):
        return self.child.degree

    def eval(self, m, ctx=None):
        ctx = ctx or EvalContext()
        v = self.child.eval(m, ctx)
        if not isinstance(v, EpsLaurent):
            raise SepFunctionError("division by eps needs a series argument")
        return v.shift(-self.k * ctx.eps_scale)

    def to_json(self):
        return {"kind": self.kind, "k": self.k, "child": self.child.to_json()}

    @classmethod
    def _from_json(cls, obj):
        return cls(obj["k"], SepFunction.from_json(obj["child"]))


class Reparam(SepFunction):
    """Evaluate the child with its own eps replaced by eps^t.

    The matrix argument is expected to be supplied already in the new
    parameter; this node only rescales the expression's internal eps usage
    (divisions by eps and series-valued constants).
    """

    kind = "reparam"

    def __init__(self, t: int, child: SepFunction):
        if t < 1:
            raise SepFunctionError("reparametrization exponent must be >= 1")
        self.t = t
        self.child = child

    @property
    def degree(self):
        return self.child.degree

    def eval(self, m, ctx=None):
        ctx = ctx or EvalContext()
        return self.child.eval(m, ctx.scaled(self.t))

    def to_json(self):
        return {"kind": self.kind, "t": self.t, "child": self.child.to_json()}

    @classmethod
    def _from_json(cls, obj):
        return cls(obj["t"], SepFunction.from_json(obj["child"]))


def _mat_json(m: Mat):
    return {
        "rows": m.rows,
        "cols": m.cols,
        "entries": [[GaussRational.from_any(x).to_json() for x in m.row(i)]
                    for i in range(m.rows)],
    }


def _mat_unjson(obj) -> Mat:
    return Mat.from_rows([[GaussRational.from_json(x) for x in row]
                          for row in obj["entries"]])


_NODE_KINDS = {
    cls.kind: cls
    for cls in (Const, Entry, LeadingMinor, TraceNode, MinorInvariant, Sandwich,
                ShiftIdentity, MatEpsShift, LinearForm, PolyApply, Product,
                SumNode, Affine, DivEps, Reparam)
}
