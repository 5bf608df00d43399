"""Mixed strict/non-strict linear systems over the rationals.

The system is  M x <= a,  N x << b,  x >= 0  (``<<`` is componentwise
strict).  Either it has a solution, or there are nonnegative lambda, mu with

    lambda^T M + mu^T N >= 0,   lambda^T a + mu^T b <= 0,

and additionally lambda^T a + mu^T b < 0 or some mu_i > 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

ZERO = Fraction(0)


def _vec(xs) -> list:
    return [Fraction(x) for x in xs]


def _mat(rows) -> list:
    return [_vec(r) for r in rows]


@dataclass
class FarkasInstance:
    M: list
    a: list
    N: list
    b: list
    n: int = -1

    def __post_init__(self):
        self.M = _mat(self.M)
        self.N = _mat(self.N)
        self.a = _vec(self.a)
        self.b = _vec(self.b)
        if self.n < 0:
            rows = self.M + self.N
            if not rows:
                raise ValueError("cannot infer the number of variables from an empty system")
            self.n = len(rows[0])
        if len(self.M) != len(self.a) or len(self.N) != len(self.b):
            raise ValueError("row count and right-hand side length differ")
        for r in self.M + self.N:
            if len(r) != self.n:
                raise ValueError(f"row of length {len(r)} in a system with {self.n} variables")


@dataclass
class Feasible:
    x: list


@dataclass
class Certificate:
    lam: list
    mu: list


class LPBudgetExceeded(RuntimeError):
    pass


def _dot(u, v):
    return sum((p * q for p, q in zip(u, v)), ZERO)


def _combo(weights, rows, n):
    out = [ZERO] * n
    for w, r in zip(weights, rows):
        if w:
            for j in range(n):
                out[j] += w * r[j]
    return out


def verify(inst: FarkasInstance, outcome) -> bool:
    """Exact re-check of whichever alternative ``outcome`` claims."""
    if isinstance(outcome, Feasible):
        x = outcome.x
        if len(x) != inst.n or any(v < 0 for v in x):
            return False
        if any(_dot(r, x) > ai for r, ai in zip(inst.M, inst.a)):
            return False
        return all(_dot(r, x) < bi for r, bi in zip(inst.N, inst.b))
    if isinstance(outcome, Certificate):
        lam, mu = _vec(outcome.lam), _vec(outcome.mu)
        if len(lam) != len(inst.M) or len(mu) != len(inst.N):
            return False
        if any(v < 0 for v in lam) or any(v < 0 for v in mu):
            return False
        lhs = [p + q for p, q in zip(_combo(lam, inst.M, inst.n), _combo(mu, inst.N, inst.n))]
        if any(v < 0 for v in lhs):
            return False
        rhs = _dot(lam, inst.a) + _dot(mu, inst.b)
        if rhs > 0:
            return False
        return rhs < 0 or any(v > 0 for v in mu)
    return False


def integerize(lam: Sequence, mu: Sequence):
    """Scale a rational certificate to coprime nonnegative integers."""
    vals = _vec(lam) + _vec(mu)
    if any(v < 0 for v in vals):
        raise ValueError("certificate entries must be nonnegative")
    if not any(vals):
        raise ValueError("certificate is identically zero")
    den = 1
    for v in vals:
        den = den * v.denominator // math.gcd(den, v.denominator)
    ints = [int(v * den) for v in vals]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    ints = [v // g for v in ints]
    return ints[:len(lam)], ints[len(lam):]


# ---------------------------------------------------------------------------
# simplex


class _Tableau:
    """Dense tableau for  max c.z  s.t.  A z <= r,  z >= 0."""

    def __init__(self, A, r, c, pivot_limit):
        m = len(A)
        nz = len(c)
        self.m, self.nz = m, nz
        self.pivot_limit = pivot_limit
        self.pivots = 0
        # columns: z (nz), slacks (m), artificials (as needed)
        self.sign = [1 if ri >= 0 else -1 for ri in r]
        self.art_of = {}
        ncols = nz + m
        for i in range(m):
            if self.sign[i] < 0:
                self.art_of[i] = ncols
                ncols += 1
        self.ncols = ncols
        self.rows = []
        self.rhs = []
        self.basis = []
        self.unit_col = []
        for i in range(m):
            s = self.sign[i]
            row = [ZERO] * ncols
            for j in range(nz):
                row[j] = s * A[i][j]
            row[nz + i] = Fraction(s)
            if s < 0:
                row[self.art_of[i]] = Fraction(1)
                self.basis.append(self.art_of[i])
                self.unit_col.append(self.art_of[i])
            else:
                self.basis.append(nz + i)
                self.unit_col.append(nz + i)
            self.rows.append(row)
            self.rhs.append(s * r[i])
        self.artificial = set(self.art_of.values())
        self.c = list(c)

    def _pivot(self, r, j):
        self.pivots += 1
        if self.pivot_limit is not None and self.pivots > self.pivot_limit:
            raise LPBudgetExceeded("pivot limit reached")
        row = self.rows[r]
        piv = row[j]
        if piv != 1:
            self.rows[r] = row = [v / piv for v in row]
            self.rhs[r] /= piv
        for i in range(self.m):
            if i != r:
                f = self.rows[i][j]
                if f:
                    other = self.rows[i]
                    self.rows[i] = [u - f * v for u, v in zip(other, row)]
                    self.rhs[i] -= f * self.rhs[r]
        self.basis[r] = j

    def _run(self, cost, allowed):
        # maximize cost over the current basis using Bland's rule
        while True:
            cb = [cost[b] for b in self.basis]
            enter = None
            for j in range(self.ncols):
                if j not in allowed or j in self.basis:
                    continue
                red = cost[j] - sum((cb[i] * self.rows[i][j] for i in range(self.m) if cb[i]), ZERO)
                if red > 0:
                    enter = j
                    break
            if enter is None:
                return
            best = None
            for i in range(self.m):
                coef = self.rows[i][enter]
                if coef > 0:
                    ratio = self.rhs[i] / coef
                    if best is None or ratio < best[0] or (ratio == best[0] and self.basis[i] < self.basis[best[1]]):
                        best = (ratio, i)
            if best is None:
                raise ArithmeticError("unbounded objective")
            self._pivot(best[1], enter)

    def duals(self, cost):
        cb = [cost[b] for b in self.basis]
        return [sum((cb[r] * self.rows[r][self.unit_col[i]] for r in range(self.m) if cb[r]), ZERO)
                for i in range(self.m)]

    def value(self, cost):
        return sum((cost[b] * self.rhs[i] for i, b in enumerate(self.basis)), ZERO)

    def point(self):
        z = [ZERO] * self.nz
        for i, b in enumerate(self.basis):
            if b < self.nz:
                z[b] = self.rhs[i]
        return z

    def phase1(self):
        """Returns None when feasible, otherwise a Farkas vector y >= 0 for
        the original rows with y^T A >= 0 and y^T r < 0."""
        if not self.artificial:
            return None
        cost = [ZERO] * self.ncols
        for j in self.artificial:
            cost[j] = Fraction(-1)
        self._run(cost, set(range(self.ncols)))
        if self.value(cost) < 0:
            w = self.duals(cost)
            # dual of the phase-1 problem read back through the row flips
            return [self.sign[i] * w[i] for i in range(self.m)]
        for i, b in enumerate(self.basis):
            if b in self.artificial:
                for j in range(self.nz + self.m):
                    if self.rows[i][j] != 0 and j not in self.basis:
                        self._pivot(i, j)
                        break
        return None

    def phase2(self):
        cost = [ZERO] * self.ncols
        for j, cj in enumerate(self.c):
            cost[j] = Fraction(cj)
        self._run(cost, set(range(self.nz + self.m)))
        w = self.duals(cost)
        return self.value(cost), [self.sign[i] * w[i] for i in range(self.m)]


def solve(inst: FarkasInstance, pivot_limit=None):
    """Return a verified Feasible point or an integer Certificate."""
    n, m1, m2 = inst.n, len(inst.M), len(inst.N)
    A = [list(r) + ([ZERO] if m2 else []) for r in inst.M]
    A += [list(r) + [Fraction(1)] for r in inst.N]
    r = list(inst.a) + list(inst.b)
    if m2:
        A.append([ZERO] * n + [Fraction(1)])
        r.append(Fraction(1))
    nz = n + (1 if m2 else 0)
    c = [ZERO] * n + ([Fraction(1)] if m2 else [])
    if not A:
        out = Feasible([ZERO] * n)
        assert verify(inst, out)
        return out
    tab = _Tableau(A, r, c, pivot_limit)
    y = tab.phase1()
    if y is None:
        if not m2:
            out = Feasible(tab.point()[:n])
            assert verify(inst, out), "simplex produced an infeasible point"
            return out
        best, y = tab.phase2()
        if best > 0:
            out = Feasible(tab.point()[:n])
            assert verify(inst, out), "simplex produced an infeasible point"
            return out
    lam, mu = integerize(y[:m1], y[m1:m1 + m2])
    out = Certificate(lam, mu)
    assert verify(inst, out), "simplex produced an invalid certificate"
    return out


# ---------------------------------------------------------------------------
# Fourier-Motzkin cross-check


class DimensionOverflow(RuntimeError):
    pass


def _normalize(coeffs, rhs, strict):
    scale = None
    for v in coeffs:
        if v:
            scale = abs(v)
            break
    if scale is None:
        return tuple(coeffs), rhs, strict
    return tuple(v / scale for v in coeffs), rhs / scale, strict


def fm_feasible(inst: FarkasInstance, max_rows: int = 50_000) -> bool:
    """Decide feasibility by Fourier-Motzkin elimination, tracking strictness."""
    n = inst.n
    rows = set()
    for r, ai in zip(inst.M, inst.a):
        rows.add(_normalize(r, ai, False))
    for r, bi in zip(inst.N, inst.b):
        rows.add(_normalize(r, bi, True))
    for j in range(n):
        e = [ZERO] * n
        e[j] = Fraction(-1)
        rows.add((tuple(e), ZERO, False))
    for j in range(n):
        pos, neg, rest = [], [], []
        for row in rows:
            cj = row[0][j]
            (pos if cj > 0 else neg if cj < 0 else rest).append(row)
        new = set(rest)
        for p in pos:
            for q in neg:
                wp, wq = 1 / p[0][j], -1 / q[0][j]
                coeffs = [wp * u + wq * v for u, v in zip(p[0], q[0])]
                coeffs[j] = ZERO
                new.add(_normalize(coeffs, wp * p[1] + wq * q[1], p[2] or q[2]))
                if len(new) > max_rows:
                    raise DimensionOverflow(f"more than {max_rows} rows while eliminating x{j}")
        rows = new
    for coeffs, rhs, strict in rows:
        if strict and not rhs > 0:
            return False
        if not strict and rhs < 0:
            return False
    return True
