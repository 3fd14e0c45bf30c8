"""Exact rank, kernel and Smith normal form for rational and integer matrices.

Ranks and row reduction are delegated to FLINT (``python-flint``), which
works over arbitrary-precision integers.  Rational inputs are scaled row by
row to integers first; that never changes rank or kernel.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

import flint


def _integral_rows(rows):
    out = []
    for row in rows:
        d = 1
        for x in row:
            if isinstance(x, Fraction) and x.denominator != 1:
                d = lcm(d, x.denominator)
        if d == 1:
            out.append([int(x) for x in row])
        else:
            out.append([int(x * d) for x in row])
    return out


def _fmpz(rows):
    if not rows:
        return None
    return flint.fmpz_mat(_integral_rows(rows))


def rank(rows, ncols=None):
    """Exact rank of a dense matrix given as a list of rows."""
    if not rows or not rows[0]:
        return 0
    return _fmpz(rows).rank()


def sparse_rank(entries, nrows, ncols):
    """Exact rank of a sparse matrix ``{(i, j): value}``."""
    if nrows == 0 or ncols == 0 or not entries:
        return 0
    dense = [[0] * ncols for _ in range(nrows)]
    for (i, j), v in entries.items():
        dense[i][j] = v
    # drop empty rows and columns; they do not affect the rank
    used_rows = sorted({i for i, _ in entries})
    used_cols = sorted({j for _, j in entries})
    if len(used_cols) < ncols or len(used_rows) < nrows:
        dense = [[dense[i][j] for j in used_cols] for i in used_rows]
    return rank(dense)


def kernel(rows, ncols):
    """Basis of the right kernel {x : M x = 0} as integral primitive vectors.

    Vectors come from the reduced row echelon form, one per free column, in
    increasing free-column order, so the output is deterministic.
    """
    if not rows:
        return [[1 if i == j else 0 for i in range(ncols)] for j in range(ncols)]
    R, den, r = _fmpz(rows).rref()
    pivots = []
    for i in range(r):
        for j in range(ncols):
            if R[i, j] != 0:
                pivots.append(j)
                break
    pivset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        # R / den is the reduced echelon form, so x_f = den gives x_p = -R[i, f]
        v = [0] * ncols
        v[f] = int(den)
        for i, p in enumerate(pivots):
            v[p] = -int(R[i, f])
        basis.append(primitive(v))
    return basis


def primitive(v):
    """Scale an integer vector so its entries are coprime and the first is positive."""
    g = 0
    for x in v:
        g = gcd(g, x)
    if g == 0:
        return list(v)
    lead = next(x for x in v if x)
    if lead < 0:
        g = -g
    return [x // g for x in v]


def mat_vec(rows, v):
    return [sum(a * b for a, b in zip(row, v)) for row in rows]


def smith_normal_form(rows):
    """Nonzero invariant factors d_1 | d_2 | ... of an integer matrix.

    Plain elimination with a smallest-pivot rule; adequate for the small
    augmented complexes where it is used.
    """
    A = [list(map(int, r)) for r in rows]
    m = len(A)
    n = len(A[0]) if m else 0
    diag = []
    t = 0
    while t < m and t < n:
        # smallest nonzero entry in the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        A[t], A[i] = A[i], A[t]
        for row in A:
            row[t], row[j] = row[j], row[t]
        while True:
            done = True
            p = A[t][t]
            for i in range(t + 1, m):
                q = A[i][t] // p
                if q:
                    A[i] = [a - q * b for a, b in zip(A[i], A[t])]
                if A[i][t]:
                    done = False
            for j in range(t + 1, n):
                q = A[t][j] // p
                if q:
                    for row in A:
                        row[j] -= q * row[t]
                if A[t][j]:
                    done = False
            if not done:
                # move a smaller remainder into the pivot position
                best = (t, t)
                for i in range(t, m):
                    if A[i][t] and abs(A[i][t]) < abs(A[best[0]][best[1]]):
                        best = (i, t)
                for j in range(t, n):
                    if A[t][j] and abs(A[t][j]) < abs(A[best[0]][best[1]]):
                        best = (t, j)
                i, j = best
                A[t], A[i] = A[i], A[t]
                for row in A:
                    row[t], row[j] = row[j], row[t]
                continue
            # pivot must divide the rest of the block
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if A[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            A[t] = [a + b for a, b in zip(A[t], A[bad])]
        diag.append(abs(A[t][t]))
        t += 1
    return diag


def homology_from_boundaries(ranks, boundaries):
    """Integral homology of a chain complex of free abelian groups.

    ``boundaries[k]`` is the integer matrix of ``d_k : C_k -> C_{k-1}`` with
    ``ranks[k - 1]`` rows and ``ranks[k]`` columns (``boundaries[0]`` unused).
    Returns ``[(free_rank, [torsion coefficients]), ...]`` per degree.
    """
    N = len(ranks) - 1
    rk = [0] * (N + 2)
    snf = [[] for _ in range(N + 2)]
    for k in range(1, N + 1):
        if ranks[k] and ranks[k - 1]:
            snf[k] = smith_normal_form(boundaries[k])
            rk[k] = len(snf[k])
    out = []
    for k in range(N + 1):
        free = ranks[k] - rk[k] - rk[k + 1]
        torsion = [d for d in snf[k + 1] if d > 1]
        out.append((free, torsion))
    return out
