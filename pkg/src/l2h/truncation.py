"""Compressions of group-ring operators to balls, with exact Rayleigh quotients.

The compression of ``D`` to ``span{d_w e_i : |w| <= R}`` is a finite symmetric
matrix.  Its extreme eigenvalues are found numerically, but the reported
numbers are exact Rayleigh quotients of the (rationalized) eigenvectors, so

* ``lambda_min_upper`` is a rigorous upper bound for inf spec(D), and
* ``lambda_max_lower`` is a rigorous lower bound for sup spec(D).

Residual norms are attached for information only; they are floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import rounding
from .groups import ball_within, enumerate_ball
from .grouprings import as_matrix

DENSE_LIMIT = 1500
SCALE_BITS = 40
OUT_DEN = 1 << 40


@dataclass
class TruncationResult:
    R: int
    size: int
    lambda_min_upper: Fraction
    lambda_max_lower: Fraction
    lambda_min_approx: float
    lambda_max_approx: float
    residual_min: float
    residual_max: float

    def to_json(self):
        return {
            "R": self.R,
            "size": self.size,
            "lambda_min_upper": rounding.to_json(self.lambda_min_upper),
            "lambda_max_lower": rounding.to_json(self.lambda_max_lower),
            "approx": {
                "lambda_min": float(f"{self.lambda_min_approx:.10g}"),
                "lambda_max": float(f"{self.lambda_max_approx:.10g}"),
                "residual_min": float(f"{self.residual_min:.3g}"),
                "residual_max": float(f"{self.residual_max:.3g}"),
            },
        }


def compression(D, ball):
    """Sparse triplets (rows, cols, exact values) of D compressed to ``ball``.

    Entry ((i, u), (j, w)) is the coefficient of w^-1 u in D[i, j]; the basis
    vector (i, u) has index ``i * len(ball) + position of u``.
    """
    M = as_matrix(D)
    g = M.group
    nb = len(ball)
    index = {w: k for k, w in enumerate(ball)}
    rows, cols, vals = [], [], []
    mult = g.multiply
    for (i, j), x in sorted(M.entries.items()):
        terms = sorted(x.terms.items(), key=lambda t: g.sort_key(t[0]))
        for wi, w in enumerate(ball):
            for h, c in terms:
                ui = index.get(mult(w, h))
                if ui is not None:
                    rows.append(i * nb + ui)
                    cols.append(j * nb + wi)
                    vals.append(c)
    return rows, cols, vals, M.rows * nb


def _float_matrix(rows, cols, vals, n):
    data = np.array([float(v) for v in vals], dtype=float)
    return sp.csr_matrix((data, (np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64))), shape=(n, n))


def _extreme_pairs(A):
    n = A.shape[0]
    if n <= DENSE_LIMIT:
        w, V = np.linalg.eigh(A.toarray())
        return (w[0], V[:, 0]), (w[-1], V[:, -1])
    v0 = np.ones(n) / np.sqrt(n)
    hi_w, hi_v = spla.eigsh(A, k=1, which="LA", v0=v0, tol=1e-10)
    try:
        lo_w, lo_v = spla.eigsh(A, k=1, sigma=-1e-3, which="LM", v0=v0, tol=1e-10)
    except (RuntimeError, spla.ArpackNoConvergence):
        lo_w, lo_v = spla.eigsh(A, k=1, which="SA", v0=v0, tol=1e-10, maxiter=20 * n)
    return (lo_w[0], lo_v[:, 0]), (hi_w[0], hi_v[:, 0])


def exact_rayleigh(rows, cols, vals, v):
    """Exact Rayleigh quotient of the integer-scaled version of the float vector v."""
    top = float(np.max(np.abs(v))) if len(v) else 0.0
    if top == 0.0:
        raise ValueError("zero vector")
    scale = (1 << SCALE_BITS) / top
    x = [int(round(t * scale)) for t in v]
    den = 1
    for c in vals:
        if isinstance(c, Fraction):
            den = lcm(den, c.denominator)
    num = 0
    for r, c, a in zip(rows, cols, vals):
        xr = x[r]
        if xr:
            xc = x[c]
            if xc:
                num += int(a * den) * xr * xc
    norm = sum(t * t for t in x)
    return Fraction(num, den * norm)


def _residual(A, lam, v):
    r = A @ v - lam * v
    return float(np.linalg.norm(r) / np.linalg.norm(v))


def _extremes(D, R, ball):
    rows, cols, vals, n = compression(D, ball)
    A = _float_matrix(rows, cols, vals, n)
    (lo, vlo), (hi, vhi) = _extreme_pairs(A)
    lam_min = rounding.ceil_to(exact_rayleigh(rows, cols, vals, vlo), OUT_DEN)
    lam_max = rounding.floor_to(exact_rayleigh(rows, cols, vals, vhi), OUT_DEN)
    return TruncationResult(
        R, n, lam_min, lam_max, float(lo), float(hi), _residual(A, lo, vlo), _residual(A, hi, vhi)
    )


def truncation_extremes(D, R, cap=None):
    """Extreme eigenvalues of the compression of D to the ball of radius R."""
    M = as_matrix(D)
    ball = enumerate_ball(M.group, R, cap)
    return _extremes(M, R, ball)


def adaptive_truncation(D, max_radius, size_cap):
    """Compression to the largest ball with at most ``size_cap`` basis vectors."""
    M = as_matrix(D)
    per = max(1, size_cap // max(1, M.rows))
    R, ball = ball_within(M.group, max_radius, per)
    return _extremes(M, R, ball)
