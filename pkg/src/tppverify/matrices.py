"""Dense matrices generic over the package's scalar kinds.

Entries may be ints, rationals, GaussRational, EpsLaurent, CycloNum, or
float complex.  Determinants use fraction-free (Bareiss) elimination for
exact division-friendly scalars and a subset-DP cofactor expansion for
series entries (sizes here stay small, n <= 8).
"""

from __future__ import annotations

from .scalars import (
    ExactArithmeticError,
    GaussRational,
    QQ,
    conj_scalar,
    is_zero_scalar,
    one_like,
    zero_like,
)
from .series import EpsLaurent, INF_ORDER


class Mat:
    """Row-major dense matrix."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: list):
        if rows <= 0 or cols <= 0:
            raise ValueError("matrix dimensions must be positive")
        if len(data) != rows * cols:
            raise ValueError("data length does not match dimensions")
        self.rows = rows
        self.cols = cols
        self.data = data

    # -- constructors ------------------------------------------------------
    @classmethod
    def from_rows(cls, rows) -> "Mat":
        rows = [list(r) for r in rows]
        n = len(rows)
        m = len(rows[0])
        if any(len(r) != m for r in rows):
            raise ValueError("ragged rows")
        return cls(n, m, [x for r in rows for x in r])

    @classmethod
    def identity(cls, n: int, one=1, zero=0) -> "Mat":
        data = [zero] * (n * n)
        for i in range(n):
            data[i * n + i] = one
        return cls(n, n, data)

    @classmethod
    def zeros(cls, rows: int, cols: int, zero=0) -> "Mat":
        return cls(rows, cols, [zero] * (rows * cols))

    @classmethod
    def diag(cls, entries) -> "Mat":
        entries = list(entries)
        n = len(entries)
        m = cls.zeros(n, n)
        for i, x in enumerate(entries):
            m.data[i * n + i] = x
        return m

    # -- access ------------------------------------------------------------
    def __getitem__(self, ij):
        i, j = ij
        return self.data[i * self.cols + j]

    def __setitem__(self, ij, val):
        i, j = ij
        self.data[i * self.cols + j] = val

    def row(self, i):
        return self.data[i * self.cols : (i + 1) * self.cols]

    def to_rows(self):
        return [self.row(i) for i in range(self.rows)]

    def copy(self) -> "Mat":
        return Mat(self.rows, self.cols, list(self.data))

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other: "Mat") -> "Mat":
        self._check_same_shape(other)
        return Mat(self.rows, self.cols, [a + b for a, b in zip(self.data, other.data)])

    def __sub__(self, other: "Mat") -> "Mat":
        self._check_same_shape(other)
        return Mat(self.rows, self.cols, [a - b for a, b in zip(self.data, other.data)])

    def __neg__(self) -> "Mat":
        return Mat(self.rows, self.cols, [-a for a in self.data])

    def __mul__(self, other):
        if isinstance(other, Mat):
            return self.matmul(other)
        return self.scale(other)

    def __rmul__(self, other):
        if isinstance(other, Mat):
            return NotImplemented
        return self.scale(other)

    def scale(self, s) -> "Mat":
        return Mat(self.rows, self.cols, [s * a for a in self.data])

    def matmul(self, other: "Mat") -> "Mat":
        if self.cols != other.rows:
            raise ExactArithmeticError(
                f"dimension mismatch: {self.rows}x{self.cols} * {other.rows}x{other.cols}"
            )
        n, k, m = self.rows, self.cols, other.cols
        a, b = self.data, other.data
        out = []
        for i in range(n):
            arow = a[i * k : (i + 1) * k]
            for j in range(m):
                acc = arow[0] * b[j]
                for t in range(1, k):
                    acc = acc + arow[t] * b[t * m + j]
                out.append(acc)
        return Mat(n, m, out)

    def transpose(self) -> "Mat":
        return Mat(self.cols, self.rows,
                   [self.data[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)])

    def conj_transpose(self) -> "Mat":
        return Mat(
            self.cols,
            self.rows,
            [conj_scalar(self.data[i * self.cols + j]) for j in range(self.cols) for i in range(self.rows)],
        )

    def conj(self) -> "Mat":
        return Mat(self.rows, self.cols, [conj_scalar(a) for a in self.data])

    def trace(self):
        if not self.is_square:
            raise ExactArithmeticError("trace of non-square matrix")
        acc = self.data[0]
        n = self.cols
        for i in range(1, n):
            acc = acc + self.data[i * n + i]
        return acc

    # -- comparisons -------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        if self.rows != other.rows or self.cols != other.cols:
            return False
        return all(a == b for a, b in zip(self.data, other.data))

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(self.data)))

    def key(self):
        """Hashable exact-identity key."""
        return (self.rows, self.cols, tuple(self.data))

    def __repr__(self):
        body = "; ".join(" ".join(repr(x) for x in self.row(i)) for i in range(self.rows))
        return f"Mat[{body}]"

    def _check_same_shape(self, other):
        if not isinstance(other, Mat) or self.rows != other.rows or self.cols != other.cols:
            raise ExactArithmeticError("matrix shape mismatch")

    def submatrix(self, keep_rows, keep_cols) -> "Mat":
        keep_rows = list(keep_rows)
        keep_cols = list(keep_cols)
        return Mat(
            len(keep_rows),
            len(keep_cols),
            [self.data[i * self.cols + j] for i in keep_rows for j in keep_cols],
        )

    def has_series_entries(self) -> bool:
        return any(isinstance(x, EpsLaurent) for x in self.data)

    def map(self, f) -> "Mat":
        return Mat(self.rows, self.cols, [f(x) for x in self.data])


# ---------------------------------------------------------------------------
# Determinants, minors, leading principal minors
# ---------------------------------------------------------------------------

_COFACTOR_LIMIT = 10


def mat_det(m: Mat):
    """Exact determinant (Bareiss for exact scalars, cofactor DP for series)."""
    if not m.is_square:
        raise ExactArithmeticError("determinant of non-square matrix")
    if m.has_series_entries() or any(isinstance(x, complex) for x in m.data):
        return _det_expansion(m)
    return _det_bareiss(m)


def _det_bareiss(m: Mat):
    n = m.rows
    if n == 1:
        return m.data[0]
    a = [[x for x in m.row(i)] for i in range(n)]
    sign = 1
    prev = None
    for k in range(n - 1):
        if is_zero_scalar(a[k][k]):
            for r in range(k + 1, n):
                if not is_zero_scalar(a[r][k]):
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return zero_like(a[k][k])
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                a[i][j] = num if prev is None else _exact_div(num, prev)
        prev = a[k][k]
    det = a[n - 1][n - 1]
    return -det if sign < 0 else det


def _exact_div(a, b):
    if isinstance(a, int) and isinstance(b, int):
        q, r = divmod(a, b)
        if r:
            raise ExactArithmeticError("non-exact integer division in Bareiss")
        return q
    return a / b


def _det_expansion(m: Mat):
    """Cofactor determinant via DP over column subsets (works over any ring)."""
    n = m.rows
    if n > _COFACTOR_LIMIT:
        raise ExactArithmeticError(f"cofactor determinant limited to n <= {_COFACTOR_LIMIT}")
    # state: dict mapping column-bitmask -> determinant of the submatrix built
    # from the first popcount(mask) rows and the columns in the mask.
    states = {0: None}  # None marks the empty product (multiplicative identity)
    for i in range(n):
        nxt = {}
        for mask, sub in states.items():
            seen = 0  # used columns with index < j; cofactor sign is (-1)^(i+seen)
            for j in range(n):
                bit = 1 << j
                if mask & bit:
                    seen += 1
                    continue
                entry = m[i, j]
                term = entry if sub is None else sub * entry
                if (i + seen) & 1:
                    term = -term
                key = mask | bit
                if key in nxt:
                    nxt[key] = nxt[key] + term
                else:
                    nxt[key] = term
        states = nxt
    full = (1 << n) - 1
    return states[full]


def mat_minor(m: Mat, keep_rows=None, keep_cols=None, drop_rows=None, drop_cols=None):
    """Determinant of the submatrix selected by kept or dropped index sets."""
    if keep_rows is None:
        drop = set(drop_rows or [])
        keep_rows = [i for i in range(m.rows) if i not in drop]
    if keep_cols is None:
        drop = set(drop_cols or [])
        keep_cols = [j for j in range(m.cols) if j not in drop]
    if len(keep_rows) != len(keep_cols):
        raise ExactArithmeticError("minor must be square")
    if not keep_rows:
        return 1
    return mat_det(m.submatrix(keep_rows, keep_cols))


def lpm(m: Mat, j: int):
    """j-th leading principal minor: det of the upper-left j x j block."""
    if j < 0 or j > min(m.rows, m.cols):
        raise ExactArithmeticError(f"lpm index {j} out of range")
    if j == 0:
        return 1
    return mat_det(m.submatrix(range(j), range(j)))


# ---------------------------------------------------------------------------
# Exact inverses and series machinery
# ---------------------------------------------------------------------------

def mat_inv_exact(m: Mat) -> "Mat":
    """Inverse of a matrix with exact field entries (Gauss-Jordan)."""
    if not m.is_square:
        raise ExactArithmeticError("inverse of non-square matrix")
    n = m.rows
    a = [list(m.row(i)) for i in range(n)]
    one = one_like(m.data[0])
    zero = zero_like(m.data[0])
    inv = [[one if i == j else zero for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if not is_zero_scalar(a[r][col]):
                piv = r
                break
        if piv is None:
            raise ExactArithmeticError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        inv[col], inv[piv] = inv[piv], inv[col]
        d = a[col][col]
        a[col] = [x / d for x in a[col]]
        inv[col] = [x / d for x in inv[col]]
        for r in range(n):
            if r != col and not is_zero_scalar(a[r][col]):
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                inv[r] = [x - f * y for x, y in zip(inv[r], inv[col])]
    return Mat.from_rows(inv)


def mat_to_series(m: Mat) -> "Mat":
    """Lift exact entries to constant series (no-op on series entries)."""
    def lift(x):
        if isinstance(x, EpsLaurent):
            return x
        return EpsLaurent.const(x)
    return m.map(lift)


def series_window(m: Mat) -> tuple:
    """Common guaranteed window of a series matrix."""
    lo = max(x.lo for x in m.data if isinstance(x, EpsLaurent))
    hi = min(x.hi for x in m.data if isinstance(x, EpsLaurent))
    return lo, hi


def mat_exp_trunc(a: Mat, order: int) -> "Mat":
    """Truncated exponential sum_{k<=order} eps^k a^k / k!, window [0, order].

    The argument must be square with exact scalar entries.
    """
    if not a.is_square:
        raise ExactArithmeticError("exponential of non-square matrix")
    if order < 0:
        raise ExactArithmeticError("order must be >= 0")
    if a.has_series_entries():
        raise ExactArithmeticError("mat_exp_trunc expects exact (non-series) entries")
    n = a.rows
    coeff_mats = [Mat.identity(n, one=GaussRational(1), zero=GaussRational(0))]
    power = coeff_mats[0]
    fact = QQ(1)
    for k in range(1, order + 1):
        power = power.matmul(a)
        fact = fact * k
        coeff_mats.append(power.map(lambda x, f=fact: GaussRational.from_any(x) * GaussRational(1 / f)))
    out = Mat.zeros(n, n)
    for i in range(n):
        for j in range(n):
            coeffs = {}
            for k, cm in enumerate(coeff_mats):
                c = cm[i, j]
                if not c.is_zero():
                    coeffs[k] = c
            out[i, j] = EpsLaurent(coeffs, lo=0, hi=order)
    return out


def mat_inv_series(m: Mat) -> "Mat":
    """Inverse of a series matrix with invertible constant term (Neumann)."""
    n = m.rows
    if not m.is_square:
        raise ExactArithmeticError("inverse of non-square matrix")
    m = mat_to_series(m)
    lo, hi = series_window(m)
    if lo > 0:
        raise ExactArithmeticError("series matrix inverse needs valuation-0 entries")
    c0 = m.map(lambda x: x.coeff(0))
    c0_inv = mat_inv_exact(c0)
    c0_inv_s = mat_to_series(c0_inv)
    ident = Mat.identity(n, one=EpsLaurent.const(1), zero=EpsLaurent.zero())
    nmat = c0_inv_s.matmul(m) - ident  # valuation >= 1 on the window
    width = min(hi, INF_ORDER)
    if width >= INF_ORDER and any(x.is_certified_nonzero() for x in nmat.data):
        raise ExactArithmeticError("series matrix inverse needs a finite window")
    acc = ident
    term = ident
    for _ in range(width):
        term = term.matmul(nmat).map(lambda x: -x)
        if all(x.is_zero_on_window() for x in term.data):
            break
        acc = acc + term
    out = acc.matmul(c0_inv_s)
    # the Neumann bound guarantees validity to the window edge
    return out.map(lambda x: x.truncate(hi))


# ---------------------------------------------------------------------------
# Generic exact linear algebra over a field
# ---------------------------------------------------------------------------

def solve_linear(a_rows: list, b_rows: list):
    """Solve A x = b exactly over a field; A given as rows, b as row vectors.

    Returns (solution_rows, None) on success where the solution has one row
    per column of A, or (None, reason) if the system is infeasible.  Free
    variables are set to zero.
    """
    nrows = len(a_rows)
    ncols = len(a_rows[0]) if nrows else 0
    nrhs = len(b_rows[0]) if b_rows else 0
    a = [list(r) for r in a_rows]
    b = [list(r) for r in b_rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for rr in range(r, nrows):
            if not is_zero_scalar(a[rr][c]):
                piv = rr
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        b[r], b[piv] = b[piv], b[r]
        d = a[r][c]
        a[r] = [x / d for x in a[r]]
        b[r] = [x / d for x in b[r]]
        for rr in range(nrows):
            if rr != r and not is_zero_scalar(a[rr][c]):
                f = a[rr][c]
                a[rr] = [x - f * y for x, y in zip(a[rr], a[r])]
                b[rr] = [x - f * y for x, y in zip(b[rr], b[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    # check consistency of zero rows
    for rr in range(r, nrows):
        if any(not is_zero_scalar(x) for x in b[rr]):
            return None, f"inconsistent system (row {rr})"
    zero = zero_like(a_rows[0][0])
    sol = [[zero] * nrhs for _ in range(ncols)]
    for k, c in enumerate(pivots):
        sol[c] = b[k]
    return sol, None


def mat_rank(a_rows: list) -> int:
    """Exact rank over a field."""
    nrows = len(a_rows)
    if nrows == 0:
        return 0
    ncols = len(a_rows[0])
    a = [list(r) for r in a_rows]
    r = 0
    for c in range(ncols):
        piv = None
        for rr in range(r, nrows):
            if not is_zero_scalar(a[rr][c]):
                piv = rr
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        d = a[r][c]
        a[r] = [x / d for x in a[r]]
        for rr in range(nrows):
            if rr != r and not is_zero_scalar(a[rr][c]):
                f = a[rr][c]
                a[rr] = [x - f * y for x, y in zip(a[rr], a[r])]
        r += 1
        if r == nrows:
            break
    return r
