"""Partitions, GL_n irreducible-representation dimensions, and exponent bounds.

Dimensions come from the Weyl product formula
    dim V_lambda = prod_{1 <= i < j <= n} (lambda_i - lambda_j + j - i) / (j - i)
evaluated in exact integer arithmetic.  The module also provides the two
matrix-multiplication-exponent calculators used by the CLI: a generic one in
terms of (sizes, D, d_max) and a degree-parameterized one, which agree on
matched inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .scalars import QQ

EULER_GAMMA = 0.5772156649015328606


class NoNontrivialBoundError(ValueError):
    """The inputs cannot produce an exponent bound below the trivial one."""


def partitions_of(s: int, max_parts: int):
    """All partitions of s into at most max_parts parts, each exactly once.

    Partitions are tuples of weakly decreasing positive integers; the empty
    partition is () for s = 0.
    """
    if s < 0 or max_parts < 1:
        raise ValueError("need s >= 0 and max_parts >= 1")
    out = []

    def rec(remaining, max_part, prefix, slots):
        if remaining == 0:
            out.append(tuple(prefix))
            return
        if slots == 0:
            return
        for part in range(min(remaining, max_part), 0, -1):
            prefix.append(part)
            rec(remaining - part, part, prefix, slots - 1)
            prefix.pop()

    rec(s, s if s else 0, [], max_parts)
    return out


def weyl_dim(lam, n: int) -> int:
    """Dimension of the GL_n irreducible indexed by the partition lam.

    lam is padded with zeros to length n; exact integer result.
    """
    lam = tuple(lam)
    if len(lam) > n:
        raise ValueError(f"partition has more than n={n} parts")
    padded = list(lam) + [0] * (n - len(lam))
    num = 1
    den = 1
    for i in range(n):
        for j in range(i + 1, n):
            num *= padded[i] - padded[j] + j - i
            den *= j - i
    q = QQ(num, den)
    assert q.denominator == 1, "Weyl product must be integral"
    return int(q.numerator)


def staircase_partition(d: int, n: int) -> tuple:
    """The partition lambda_i = d*(n-i) (a partition of d*C(n,2))."""
    return tuple(d * (n - i) for i in range(1, n + 1) if d * (n - i) > 0)


def sum_dim_squares(s: int, n: int) -> int:
    """sum_{i<=s} sum_{lam |- i, <= n parts} dim(V_lam)^2.

    Equals C(s + n^2, n^2): the dimension of the space of polynomials of
    degree at most s in the n^2 matrix entries.
    """
    if s < 0 or n < 1:
        raise ValueError("need s >= 0 and n >= 1")
    total = 0
    for i in range(s + 1):
        for lam in partitions_of(i, n):
            total += weyl_dim(lam, n) ** 2
    return total


def max_dim(s: int, n: int):
    """(argmax partition, max dimension) over partitions of s into <= n parts.

    Ties break toward the lexicographically greatest partition.
    """
    best_lam = None
    best = -1
    for lam in sorted(partitions_of(s, n), reverse=True):
        d = weyl_dim(lam, n)
        if d > best:
            best = d
            best_lam = lam
    return best_lam, best


def max_dim_bound(s: int, n: int) -> int:
    """The bound s^C(n,2), valid for s >= 2, n >= 3 (for n = 2: (1+s)^C(n,2))."""
    c = math.comb(n, 2)
    return (s if n >= 3 else 1 + s) ** c


def tighter_dim_bound(s: int, n: int) -> float:
    """(1 + s*(ln n + gamma)/C(n,2))^C(n,2), informational column only."""
    c = math.comb(n, 2)
    if c == 0:
        return 1.0
    return (1.0 + s * (math.log(n) + EULER_GAMMA) / c) ** c


@dataclass
class OmegaInputs:
    """Inputs for the generic exponent calculator.

    size_x/y/z and d_sum (sum of squared representation dimensions) and d_max
    may be given as plain values, or as natural logs when as_logs is True
    (for astronomically large hypothetical sizes).
    """

    size_x: float
    size_y: float
    size_z: float
    d_sum: float
    d_max: float
    as_logs: bool = False

    def log_values(self):
        if self.as_logs:
            return (self.size_x, self.size_y, self.size_z,
                    self.d_sum, self.d_max)
        if min(self.size_x, self.size_y, self.size_z, self.d_sum, self.d_max) <= 0:
            raise ValueError("sizes must be positive")
        return (math.log(self.size_x), math.log(self.size_y), math.log(self.size_z),
                math.log(self.d_sum), math.log(self.d_max))

    def validate(self):
        _, _, _, log_d, log_dmax = self.log_values()
        if 2 * log_dmax > log_d + 1e-12:
            raise ValueError("invalid inputs: d_max^2 must be <= sum of dim squares")


def omega_bound(inputs: OmegaInputs) -> float:
    """Exponent bound: the omega solving V^omega = D * d_max^(omega - 2).

    V is the geometric mean of the three set sizes.  Requires V > d_max;
    otherwise no bound below the trivial one exists.
    """
    inputs.validate()
    lx, ly, lz, ld, ldm = inputs.log_values()
    log_v = (lx + ly + lz) / 3.0
    den = log_v - ldm
    if den <= 0:
        raise NoNontrivialBoundError(
            "no nontrivial bound: the geometric mean of the sizes must exceed d_max"
        )
    return (ld - 2.0 * ldm) / den


def corollary_bound(size_xyz_log_s: float, s: int, n: int) -> float:
    """Degree-parameterized exponent bound.

    Evaluates
        (log_s C(s + n^2, n^2) - 2 C(n,2)) / ((1/3) log_s |X||Y||Z| - C(n,2))
    where size_xyz_log_s is log base s of |X| |Y| |Z|.
    """
    if s < 2:
        raise ValueError("need s >= 2 for base-s logarithms")
    c2 = math.comb(n, 2)
    log_s = math.log(s)
    num = math.log(math.comb(s + n * n, n * n)) / log_s - 2.0 * c2
    den = size_xyz_log_s / 3.0 - c2
    if den <= 0:
        raise NoNontrivialBoundError("no nontrivial bound: nonpositive denominator")
    return num / den


def repdim_table(n: int, s_max: int):
    """Rows for the repdim CSV: per-degree max dimension and the dimension sum."""
    rows = []
    for s in range(s_max + 1):
        lam, dim = max_dim(s, n)
        total = sum_dim_squares(s, n)
        binom = math.comb(s + n * n, n * n)
        rows.append({
            "s": s,
            "n": n,
            "max_partition": "+".join(str(p) for p in lam) if lam else "0",
            "max_dim": dim,
            "bound_s_pow": max_dim_bound(s, n) if s >= 2 else None,
            "tighter_bound": round(tighter_dim_bound(s, n), 3),
            "sum_sq": total,
            "binom_check": binom == total,
        })
    return rows
