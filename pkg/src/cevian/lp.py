"""Exact linear programming over the rationals.

``maximize`` is a dense two-phase tableau simplex with Bland's anti-cycling rule.
``section_point`` specializes it to the homogeneous systems used for cone
emptiness.  ``fm_feasible`` is a Fourier-Motzkin elimination kept independent
of the simplex path; it is only used to cross-check it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Optional[Fraction] = None
    x: Optional[tuple] = None


def _lcm_scale(values) -> int:
    den = 1
    for v in values:
        den = den * v.denominator // gcd(den, v.denominator)
    return den


def _pivot(tab, basis, r, c, det):
    """Fraction-free pivot: every entry stays the integer ``det * (true entry)``."""
    row = tab[r]
    p = row[c]
    for i, other in enumerate(tab):
        if i == r:
            continue
        f = other[c]
        if f:
            tab[i] = [(p * v - f * w) // det for v, w in zip(other, row)]
        else:
            tab[i] = [(p * v) // det for v in other]
    basis[r] = c
    return p


def _run(tab, basis, ncols, det):
    """Maximize the objective stored (negated) in the last row; Bland's rule."""
    while True:
        obj = tab[-1]
        enter = -1
        for j in range(ncols):
            if obj[j] < 0:
                enter = j
                break
        if enter < 0:
            return "optimal", det
        leave = -1
        for i in range(len(tab) - 1):
            a = tab[i][enter]
            if a > 0:
                if leave < 0:
                    leave = i
                    continue
                # compare rhs_i / a with rhs_leave / a_leave without division
                lhs = tab[i][-1] * tab[leave][enter]
                rhs = tab[leave][-1] * a
                if lhs < rhs or (lhs == rhs and basis[i] < basis[leave]):
                    leave = i
        if leave < 0:
            return "unbounded", det
        det = _pivot(tab, basis, leave, enter, det)


def maximize(c: Sequence, A: Sequence[Sequence], b: Sequence) -> LPResult:
    """Maximize ``c.x`` subject to ``A x = b`` and ``x >= 0``, exactly.

    The tableau is kept in integers (rows scaled to clear denominators, then
    fraction-free pivoting), so no rational normalization happens inside the
    loop.
    """
    m, n = len(A), len(c)
    rows = []
    for i in range(m):
        vals = list(A[i]) + [b[i]]
        if all(isinstance(v, int) or v.denominator == 1 for v in vals):
            row = [int(v) for v in vals]
        else:
            vals = [Fraction(v) for v in vals]
            k = _lcm_scale(vals)
            row = [int(v * k) for v in vals]
        if row[-1] < 0:
            row = [-v for v in row]
        rhs = row.pop()
        art = [0] * m
        art[i] = 1
        rows.append(row + art + [rhs])
    # phase I: maximize -(sum of artificials)
    obj = [0] * (n + m + 1)
    for row in rows:
        for j in range(n):
            obj[j] -= row[j]
        obj[-1] -= row[-1]
    tab = rows + [obj]
    basis = [n + i for i in range(m)]
    _, det = _run(tab, basis, n + m, 1)
    if tab[-1][-1] != 0:
        return LPResult("infeasible")
    # drive zero-level artificials out of the basis where possible
    for r in range(m):
        if basis[r] >= n:
            col = next((j for j in range(n) if tab[r][j] != 0), None)
            if col is None:
                continue  # redundant row; its artificial stays basic at 0
            if tab[r][col] < 0:
                tab[r] = [-v for v in tab[r]]
            det = _pivot(tab, basis, r, col, det)
    cf = [Fraction(v) for v in c]
    k = _lcm_scale(cf)
    ci = [int(v * k) for v in cf]
    obj = [-v * det for v in ci] + [0] * m + [0]
    for i, bj in enumerate(basis):
        f = ci[bj] if bj < n else 0
        if f:
            row = tab[i]
            obj = [o + f * w for o, w in zip(obj, row)]
    tab[-1] = obj
    status, det = _run(tab, basis, n, det)
    if status == "unbounded":
        return LPResult("unbounded")
    x = [ZERO] * n
    for i, bj in enumerate(basis):
        if bj < n:
            x[bj] = Fraction(tab[i][-1], det)
    return LPResult("optimal", Fraction(tab[-1][-1], det * k), tuple(x))


def section_point(n: int, strict=(), weak=(), eq=()) -> Optional[tuple]:
    """A point of the simplex section satisfying a homogeneous system, or None.

    The system is ``f.x > 0`` for f in ``strict``, ``f.x >= 0`` for ``weak``,
    ``f.x = 0`` for ``eq``, with ``x >= 0`` implicit.  We maximize a common
    slack ``delta`` (bounded by 1) of the strict constraints on ``sum(x) = 1``;
    the system is solvable iff the optimum is positive.  The returned point has
    the largest slack found, which keeps it away from the cell walls.
    """
    k_s, k_w = len(strict), len(weak)
    # columns: x (n) | delta | slack strict (k_s) | slack weak (k_w) | t
    ncols = n + 1 + k_s + k_w + 1
    d = n
    A, b = [], []

    def row():
        return [0] * ncols

    r = row()
    for j in range(n):
        r[j] = 1
    A.append(r)
    b.append(1)
    for i, f in enumerate(strict):
        r = row()
        r[:n] = f
        r[d] = -1
        r[n + 1 + i] = -1
        A.append(r)
        b.append(0)
    for i, f in enumerate(weak):
        r = row()
        r[:n] = f
        r[n + 1 + k_s + i] = -1
        A.append(r)
        b.append(0)
    for f in eq:
        r = row()
        r[:n] = f
        A.append(r)
        b.append(0)
    r = row()
    r[d] = 1
    r[-1] = 1
    A.append(r)
    b.append(1)
    c = [0] * ncols
    if strict:
        c[d] = 1
    res = maximize(c, A, b)
    if res.status != "optimal":
        return None
    if strict and res.value <= 0:
        return None
    return res.x[:n]


def _normalize_row(coeffs, strict):
    nums = [v for v in coeffs if v]
    if not nums:
        return tuple(coeffs), strict
    den = 1
    for v in coeffs:
        den = den * v.denominator // gcd(den, v.denominator)
    ints = [int(v * den) for v in coeffs]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    return tuple(Fraction(v // g) for v in ints), strict


def fm_feasible(n: int, strict=(), weak=(), eq=()) -> bool:
    """Decide solvability of a homogeneous strict/weak system by Fourier-Motzkin.

    Same semantics as :func:`section_point` (``x >= 0`` implicit); exponential in
    the worst case and only meant as an independent oracle on small systems.
    """
    rows = set()
    for f in strict:
        rows.add(_normalize_row([Fraction(v) for v in f], True))
    for f in weak:
        rows.add(_normalize_row([Fraction(v) for v in f], False))
    for f in eq:
        rows.add(_normalize_row([Fraction(v) for v in f], False))
        rows.add(_normalize_row([-Fraction(v) for v in f], False))
    for i in range(n):
        e = [ZERO] * n
        e[i] = ONE
        rows.add((tuple(e), False))
    for k in range(n):
        pos, neg, rest = [], [], []
        for coeffs, s in rows:
            if coeffs[k] > 0:
                pos.append((coeffs, s))
            elif coeffs[k] < 0:
                neg.append((coeffs, s))
            else:
                rest.append((coeffs, s))
        new = set(rest)
        for cp, sp in pos:
            for cn, sn in neg:
                a, bq = cp[k], -cn[k]
                comb = [bq * u + a * v for u, v in zip(cp, cn)]
                new.add(_normalize_row(comb, sp or sn))
        rows = new
    return not any(s for coeffs, s in rows if not any(coeffs))
