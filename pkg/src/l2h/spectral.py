"""Certified norm bounds and invertibility certificates for group-ring Laplacians.

Operators act on ``l2(G)^n`` by right convolution, ``(T x)_i = sum_j x_j * S_ij``,
the Hilbert-space completion of the module maps in :mod:`grouprings`.  For a
self-adjoint ``S`` the norm satisfies ``||S|| = ||S^(2n)||^(1/2n)``, which is
what every bound below exploits:

* a lower bound from the return coefficient ``<d_e, S^(2n) d_e>``,
* an upper bound from the l1 norm of ``S^(2n)``,
* an upper bound from Haagerup's inequality on free groups (and the
  multiplied-weight variant on products of free groups, flagged empirical).

A positive operator ``D`` is invertible as soon as ``||c - D|| < c`` for some
``c``; then ``D >= c - ||c - D||``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

import numpy as np

from . import rounding
from .errors import ProfileNotApplicable, SupportCapExceeded
from .groups import DirectProduct, FreeGroup, RDProfile
from .grouprings import GroupRingElement, GroupRingMatrix, as_matrix, mat_mul, mat_star
from .truncation import truncation_extremes, adaptive_truncation

CERTIFIED = "CertifiedInvertible"
ZERO_EVIDENCE = "ZeroEvidence"
INCONCLUSIVE = "Inconclusive"

GAP_DEN = 1 << 32


@dataclass
class Budget:
    max_power: int = 256
    max_radius: int = 300
    truncation_size: int = 20000
    epsilon_zero: Fraction = Fraction(1, 100)
    support_cap: int | None = None
    work_cap: int = 3_000_000
    timing: bool = False

    def to_json(self):
        return {
            "max_power": self.max_power,
            "max_radius": self.max_radius,
            "truncation_size": self.truncation_size,
            "epsilon_zero": rounding.to_json(self.epsilon_zero),
            "work_cap": self.work_cap,
        }


def check_self_adjoint(S):
    M = as_matrix(S)
    if M.rows != M.cols or mat_star(M) != M:
        raise ValueError("operator is not self-adjoint")
    return M


def mat_power(M, n, cap=None):
    """n-fold composition of a square matrix with itself."""
    result = None
    base = M
    while n:
        if n & 1:
            result = base if result is None else mat_mul(result, base, cap)
        n >>= 1
        if n:
            base = mat_mul(base, base, cap)
    return result if result is not None else GroupRingMatrix.identity(M.group, M.rows)


# -- radial elements on free groups -------------------------------------------


def sphere_size(rank, k):
    if k == 0:
        return 1
    return 2 * rank * (2 * rank - 1) ** (k - 1)


def radial_profile(x, group=None):
    """Level values of a radial element of a free group, else None.

    ``x`` may be a 1x1 matrix.  The element must be constant on every sphere
    and its support must fill the spheres it meets.
    """
    if isinstance(x, GroupRingMatrix):
        if x.shape != (1, 1):
            return None
        x = x[(0, 0)]
    g = x.group if group is None else group
    if not isinstance(g, FreeGroup) or g.rank == 0:
        return None
    levels = {}
    counts = {}
    for w, c in x.terms.items():
        k = len(w)
        if levels.setdefault(k, c) != c:
            return None
        counts[k] = counts.get(k, 0) + 1
    for k, cnt in counts.items():
        if cnt != sphere_size(g.rank, k):
            return None
    top = max(levels, default=-1)
    return [levels.get(k, 0) for k in range(top + 1)]


def _apply_adjacency(u, rank):
    q = 2 * rank - 1
    n = len(u)
    out = [0] * (n + 1)
    if n > 1:
        out[0] = 2 * rank * u[1]
    for k in range(1, n + 1):
        v = u[k - 1]
        if k + 1 < n:
            v += q * u[k + 1]
        out[k] = v
    return out


def _trim(u):
    while len(u) > 1 and u[-1] == 0:
        u.pop()
    return u


def radial_multiply(f, u, rank):
    """Product of two radial functions given by level values."""
    q = 2 * rank - 1
    acc = [0] * (len(f) + len(u))
    prev = None
    cur = list(u)
    for k, fk in enumerate(f):
        if k == 0:
            nxt = cur
        elif k == 1:
            nxt = _apply_adjacency(cur, rank)
        else:
            a = _apply_adjacency(cur, rank)
            coef = 2 * rank if k == 2 else q
            nxt = [a[i] - coef * (prev[i] if i < len(prev) else 0) for i in range(len(a))]
        if fk:
            for i, v in enumerate(nxt):
                acc[i] += fk * v
        prev, cur = cur, nxt
    return _trim(acc)


def radial_power(g, n_power, f=None):
    """Level values of f^n_power (default: the adjacency element)."""
    rank = g.rank
    f = [0, 1] if f is None else list(f)
    u = [1]
    for _ in range(n_power):
        u = radial_multiply(f, u, rank)
    return u


def _radial_l2sq(h, rank):
    return sum(Fraction(v) ** 2 * sphere_size(rank, k) for k, v in enumerate(h))


def _radial_l1(h, rank):
    return sum(abs(Fraction(v)) * sphere_size(rank, k) for k, v in enumerate(h))


def _radial_haagerup(h, rank, bits):
    total = Fraction(0)
    for k, v in enumerate(h):
        if v:
            total += (k + 1) * rounding.sqrt_up(Fraction(v) ** 2 * sphere_size(rank, k), bits)
    return total


# -- the three norm bounds ----------------------------------------------------


def power_trace_lower_bound(S, n, bits=rounding.DEFAULT_BITS, cap=None):
    """Lower bound max_k <d_e e_k, S^(2n) d_e e_k>^(1/2n) on ||S||, rounded down."""
    M = check_self_adjoint(S)
    if n < 1:
        raise ValueError("power must be positive")
    prof = radial_profile(M)
    if prof is not None:
        h = radial_power(M.group, n, prof)
        return rounding.root_down(_radial_l2sq(h, M.group.rank), 2 * n, bits)
    P = mat_power(M, n, cap)
    best = Fraction(0)
    for k in range(M.cols):
        t = sum(Fraction(P[(i, k)].l2_norm_squared()) for i in range(M.rows))
        best = max(best, t)
    return rounding.root_down(best, 2 * n, bits)


def _row_sum_bound(P, entry_bound):
    rows = {}
    for (i, j), x in P.entries.items():
        rows[i] = rows.get(i, 0) + entry_bound(x)
    return max(rows.values(), default=Fraction(0))


def _l1_from_power(P, n, bits):
    total = _row_sum_bound(P, lambda x: Fraction(x.l1_norm()))
    return rounding.root_up(total, 2 * n, bits)


def l1_upper_bound(S, n, bits=rounding.DEFAULT_BITS, cap=None):
    """Upper bound (max row sum of l1 norms of S^(2n))^(1/2n), rounded up."""
    M = check_self_adjoint(S)
    if n < 1:
        raise ValueError("power must be positive")
    prof = radial_profile(M)
    if prof is not None:
        h = radial_power(M.group, 2 * n, prof)
        return rounding.root_up(_radial_l1(h, M.group.rank), 2 * n, bits)
    return _l1_from_power(mat_power(M, 2 * n, cap), n, bits)


def _haagerup_entry(group, kind, bits):
    if kind == "free":

        def level(w):
            return (len(w),)

    else:

        def level(w):
            return tuple(len(a) for a in w)

    def bound(x):
        buckets = {}
        for w, c in x.terms.items():
            key = level(w)
            buckets[key] = buckets.get(key, 0) + Fraction(c) ** 2
        total = Fraction(0)
        for key, sq in buckets.items():
            weight = 1
            for k in key:
                weight *= k + 1
            total += weight * rounding.sqrt_up(sq, bits)
        return total

    return bound


def profile_applies(profile, group):
    if profile.kind == "free":
        return isinstance(group, FreeGroup)
    if profile.kind == "product_of_free":
        return isinstance(group, DirectProduct) and all(isinstance(f, FreeGroup) for f in group.factors)
    return False


def rd_upper_bound(S, n, profile=None, bits=rounding.DEFAULT_BITS, cap=None):
    """Rapid-decay upper bound on ||S|| through S^(2n), rounded up."""
    M = check_self_adjoint(S)
    g = M.group
    profile = g.rd_profile if profile is None else profile
    if isinstance(profile, str):
        profile = RDProfile(profile)
    if not profile_applies(profile, g):
        raise ProfileNotApplicable(f"profile {profile.kind!r} does not apply to {g.describe()}")
    prof = radial_profile(M) if profile.kind == "free" else None
    if prof is not None:
        h = radial_power(g, 2 * n, prof)
        return rounding.root_up(_radial_haagerup(h, g.rank, bits), 2 * n, bits)
    return _rd_from_power(mat_power(M, 2 * n, cap), n, profile.kind, bits)


def _rd_from_power(P, n, kind, bits):
    total = _row_sum_bound(P, _haagerup_entry(P.group, kind, bits))
    return rounding.root_up(total, 2 * n, bits)


# -- schedules ------------------------------------------------------------------


def _powers(max_power):
    n = 1
    while n <= max_power:
        yield n
        n *= 2


def radial_bound_schedule(f, rank, max_power, kind, bits=rounding.DEFAULT_BITS):
    """Best bound over n = 1, 2, 4, ... <= max_power for a radial element.

    Stops once doubling n improves the bound by less than one percent.
    Returns (bound, n).
    """
    best = None
    best_n = None
    h = [1]
    done = 0
    for n in _powers(max_power):
        while done < 2 * n:
            h = radial_multiply(f, h, rank)
            done += 1
        if kind == "rd":
            b = rounding.root_up(_radial_haagerup(h, rank, bits), 2 * n, bits)
        else:
            b = rounding.root_up(_radial_l1(h, rank), 2 * n, bits)
        if best is not None and b > best * Fraction(99, 100):
            if b < best:
                best, best_n = b, n
            break
        if best is None or b < best:
            best, best_n = b, n
    return best, best_n


def norm_upper_bound(S, method, budget):
    """Certified upper bound on ||S|| by ``method`` in {"l1", "rd"}.

    Returns (bound, n, profile kind).
    """
    M = as_matrix(S)
    g = M.group
    if M.is_zero():
        return Fraction(0), 1, "none"
    prof = radial_profile(M)
    if prof is not None:
        kind = "free" if method == "rd" else "none"
        b, n = radial_bound_schedule(prof, g.rank, budget.max_power, method)
        return b, n, kind
    if method == "rd" and not profile_applies(g.rd_profile, g):
        raise ProfileNotApplicable(f"no rapid-decay profile for {g.describe()}")
    kind = g.rd_profile.kind if method == "rd" else "none"
    bits = rounding.DEFAULT_BITS
    # work with integers: ||M|| = ||den M|| / den
    den = 1
    for x in M.entries.values():
        den = lcm(den, x.denominator())
    if den > 1:
        M = M.scale(den)

    def bound(P, n):
        if method == "rd":
            return _rd_from_power(P, n, kind, bits) / den
        return _l1_from_power(P, n, bits) / den

    # P holds S^(2n); squaring it doubles n
    P = mat_mul(M, M, budget.support_cap)
    n = 1
    best, best_n = bound(P, n), n
    while 2 * n <= budget.max_power and composition_work(P) <= budget.work_cap:
        try:
            P = mat_mul(P, P, budget.support_cap)
        except SupportCapExceeded:
            break
        n *= 2
        b = bound(P, n)
        improved = b < best * Fraction(99, 100)
        if b < best:
            best, best_n = b, n
        if not improved:
            break
    return best, best_n, kind


def composition_work(P):
    """Number of term products needed to compose P with itself."""
    col = {}
    row = {}
    for (i, j), x in P.entries.items():
        s = x.support_size()
        col[j] = col.get(j, 0) + s
        row[i] = row.get(i, 0) + s
    return sum(col.get(k, 0) * row.get(k, 0) for k in set(col) | set(row))


# -- decompositions ---------------------------------------------------------------


def _project_factor(M, k):
    g = M.group
    f = g.factors[k]
    ent = {ij: GroupRingElement(f, {w[k]: c for w, c in x.terms.items()}) for ij, x in M.entries.items()}
    return GroupRingMatrix(f, M.rows, M.cols, ent)


def split_by_factor(M):
    """Split a matrix over a direct product into identity, per-factor and mixed parts."""
    g = M.group
    nf = len(g.factors)
    ident = {}
    per = [dict() for _ in range(nf)]
    mixed = {}
    for ij, x in M.entries.items():
        for w, c in x.terms.items():
            sup = g.factor_support(w)
            if not sup:
                target = ident
            elif len(sup) == 1:
                target = per[sup[0]]
            else:
                target = mixed
            target.setdefault(ij, {})[w] = c

    def build(d):
        return GroupRingMatrix(g, M.rows, M.cols, {ij: GroupRingElement(g, t) for ij, t in d.items()})

    return build(ident), [build(d) for d in per], build(mixed)


def subadditive_bound(T, budget):
    """Bound ||T|| by the sum of per-factor norms plus an l1 bound on mixed terms.

    The identity part is shared equally among the factors.  Per-factor terms
    live in a single factor, where the factor's own bounds apply.
    """
    g = T.group
    if not isinstance(g, DirectProduct):
        raise ProfileNotApplicable("subadditive splitting needs a direct product")
    ident, per, mixed = split_by_factor(T)
    nf = len(per)
    share = ident.scale(Fraction(1, nf))
    total = Fraction(0)
    parts = []
    for k in range(nf):
        piece = _project_factor(share + per[k], k)
        method = "rd" if profile_applies(piece.group.rd_profile, piece.group) else "l1"
        b, n, kind = norm_upper_bound(piece, method, budget)
        parts.append({"factor": k, "method": method, "bound": b, "n": n})
        total += b
    if not mixed.is_zero():
        b, n, _ = norm_upper_bound(mixed, "l1", budget)
        parts.append({"factor": "mixed", "method": "l1", "bound": b, "n": n})
        total += b
    return total, parts


# -- certificates -------------------------------------------------------------------


@dataclass
class SpectralCertificate:
    degree: int | None
    status: str
    gap_lower: Fraction | None = None
    lambda_min_upper: Fraction | None = None
    lambda_max_lower: Fraction | None = None
    method: str = ""
    profile: str = "none"
    c: Fraction | None = None
    n: int | None = None
    R: int | None = None
    runtime_ms: int | None = None
    notes: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def certified(self):
        return self.status == CERTIFIED

    def to_json(self):
        return {
            "degree": self.degree,
            "status": self.status,
            "gap_lower": rounding.to_json(self.gap_lower),
            "lambda_min_upper": rounding.to_json(self.lambda_min_upper),
            "lambda_max_lower": rounding.to_json(self.lambda_max_lower),
            "method": self.method,
            "profile": self.profile,
            "profile_validity": RDProfile(self.profile).validity if self.profile != "none" else None,
            "c": rounding.to_json(self.c),
            "n": self.n,
            "R": self.R,
            "runtime_ms": self.runtime_ms,
            "notes": list(self.notes),
            "details": self.details,
        }


def resolve_strategy(group, strategy):
    if strategy != "auto":
        return strategy
    if isinstance(group, DirectProduct) and profile_applies(RDProfile("product_of_free"), group):
        return "subadditive"
    if isinstance(group, FreeGroup):
        return "rd"
    return "l1"


def _shifted_bound(M, c, strategy, budget):
    T = GroupRingMatrix.identity(M.group, M.rows).scale(c) - M
    if strategy == "subadditive":
        u, parts = subadditive_bound(T, budget)
        kinds = sorted({p["method"] for p in parts})
        n = max(p["n"] for p in parts)
        return u, n, "free" if "rd" in kinds else "none", {"parts": [_part_json(p) for p in parts]}
    u, n, kind = norm_upper_bound(T, strategy, budget)
    if kind == "product_of_free":
        # multiplied weights are not a theorem here; keep checking them
        low = power_trace_lower_bound(T, 1, cap=budget.support_cap)
        if u < low:
            raise AssertionError("product rapid-decay bound fell below a lower bound")
    return u, n, kind, {}


def _part_json(p):
    return {"factor": p["factor"], "method": p["method"], "bound": rounding.to_json(p["bound"]), "n": p["n"]}


def _sweep(lam_min, lam_max):
    c0 = (lam_max + lam_min) / 2
    span = lam_max - lam_min
    out = []
    for t in (0, -1, 1):
        c = rounding.floor_to(c0 + t * span / 16, 64)
        if c > 0 and c not in out:
            out.append(c)
    return out


def certify_gap(D, strategy="auto", budget=None, degree=None):
    """Try to prove that the self-adjoint operator D is invertible.

    Returns a :class:`SpectralCertificate`.  ``CertifiedInvertible`` carries
    a rigorous lower bound on the spectrum; ``ZeroEvidence`` only reports that
    a ball compression has a tiny eigenvalue, which never proves anything.
    """
    budget = budget or Budget()
    start = time.perf_counter()
    M = check_self_adjoint(D)
    if M.rows == 0:
        # the zero module: the empty spectrum, trivially invertible
        cert = SpectralCertificate(degree, CERTIFIED, Fraction(1), method="empty")
        cert.notes.append("no cells in this degree")
        return cert
    trunc = adaptive_truncation(M, budget.max_radius, budget.truncation_size)
    lam_min = trunc.lambda_min_upper
    strategy = resolve_strategy(M.group, strategy)
    quick = l1_upper_bound(M, 1, cap=budget.support_cap)
    best = None
    notes = []
    sweep = _sweep(lam_min, quick)
    if lam_min < budget.epsilon_zero:
        # a certified gap could not exceed lam_min, so do not search for one
        notes.append("norm-bound search skipped: compression eigenvalue below epsilon_zero")
        sweep = []
    for c in sweep:
        try:
            u, n, kind, extra = _shifted_bound(M, c, strategy, budget)
        except (ProfileNotApplicable, SupportCapExceeded) as exc:
            notes.append(f"{strategy} bound unavailable: {exc}")
            break
        gap = c - u
        if best is None or gap > best[0]:
            best = (gap, c, u, n, kind, extra)
    cert = SpectralCertificate(
        degree,
        INCONCLUSIVE,
        lambda_min_upper=lam_min,
        lambda_max_lower=trunc.lambda_max_lower,
        method=strategy,
        R=trunc.R,
        notes=notes,
    )
    cert.details["truncation"] = trunc.to_json()
    if best is not None:
        gap, c, u, n, kind, extra = best
        cert.c, cert.n, cert.profile = c, n, kind
        cert.details["norm_upper"] = rounding.to_json(u)
        cert.details.update(extra)
        if gap > 0:
            gap_lower = rounding.floor_to(gap, GAP_DEN)
            if gap_lower > lam_min:
                raise AssertionError("certified gap exceeds a compression eigenvalue")
            cert.status = CERTIFIED
            cert.gap_lower = gap_lower
    if cert.status != CERTIFIED and lam_min < budget.epsilon_zero:
        cert.status = ZERO_EVIDENCE
        cert.notes.append(
            f"ball compression of radius {trunc.R} has an eigenvalue below {float(budget.epsilon_zero):g}"
        )
    if budget.timing:
        cert.runtime_ms = int((time.perf_counter() - start) * 1000)
    return cert


def _language(cert, k):
    if cert.status == CERTIFIED:
        return {
            "l2": f"H_{k}(l2 G) = 0 (certified: Laplacian invertible)",
            "cstar": f"H_{k}(C*_r G) = 0 (certified: Laplacian invertible)",
        }
    if cert.status == ZERO_EVIDENCE:
        return {
            "l2": f"H_{k}(l2 G) appears nonzero (evidence: spectrum reaches near 0)",
            "cstar": f"H_{k}(C*_r G) appears nonzero (evidence: Laplacian not shown invertible)",
        }
    return {
        "l2": f"H_{k}(l2 G): no conclusion",
        "cstar": f"H_{k}(C*_r G): no conclusion",
    }


def homology_vanishing_report(C, degrees=None, budget=None, strategy="auto"):
    """Per-degree certificates for the Laplacians of a chain complex."""
    from .complexes import laplacian

    if degrees is None:
        degrees = range(C.dimension + 1)
    out = []
    for k in degrees:
        if k > C.dimension:
            D = GroupRingMatrix(C.group, 0, 0)
        else:
            D = laplacian(C, k)
        cert = certify_gap(D, strategy, budget, degree=k)
        cert.details["conclusion"] = _language(cert, k)
        out.append(cert)
    return out


# -- finite-dimensional shadow ---------------------------------------------------


def _unimodular(rng, d, steps):
    """Random integer matrix of determinant +-1 together with its inverse."""
    Q = np.eye(d, dtype=int).astype(object)
    Qi = np.eye(d, dtype=int).astype(object)
    if d < 2:
        return Q, Qi
    for _ in range(steps):
        i, j = rng.choice(d, size=2, replace=False)
        s = int(rng.choice([-1, 1]))
        # row_i += s * row_j on Q, and the inverse column operation on Qi
        Q[i, :] = Q[i, :] + s * Q[j, :]
        Qi[:, j] = Qi[:, j] - s * Qi[:, i]
    return Q, Qi


def _random_complex(rng, length, max_dim, coeff_size):
    """Random integer chain complex with d_{k-1} d_k = 0.

    Each C_k is split as (image from above) + (homology) + (part mapped
    injectively down), then conjugated by random unimodular bases.
    """
    dims = [int(rng.integers(0, max_dim + 1)) for _ in range(length + 1)]
    if not any(dims):
        dims[0] = 1
    down = [0] * (length + 1)
    up = [0] * (length + 1)
    for k in range(1, length + 1):
        room = dims[k - 1] - down[k - 1]
        r = int(rng.integers(0, min(dims[k], room) + 1))
        down[k] = r
        up[k - 1] = r
    bases = [_unimodular(rng, d, 3 * d) for d in dims]
    mats = []
    for k in range(1, length + 1):
        D = np.zeros((dims[k - 1], dims[k]), dtype=int).astype(object)
        r = down[k]
        # the last r coordinates of C_k map onto the first r of C_{k-1}
        for t in range(r):
            D[t, dims[k] - r + t] = int(rng.integers(1, coeff_size + 1))
        if dims[k] and dims[k - 1]:
            D = bases[k - 1][0].dot(D).dot(bases[k][1])
        mats.append(D)
    return dims, mats


def finite_model_equivalence_test(seed=0, trials=500, max_length=3, max_dim=5):
    """Rank oracle versus Laplacian-eigenvalue oracle on random finite complexes.

    Homology of a finite-dimensional complex vanishes in every degree exactly
    when every Laplacian is invertible.  Returns (passed, failures, log).
    """
    from .linalg import rank as exact_rank

    rng = np.random.default_rng(seed)
    failures = []
    for trial in range(trials):
        length = int(rng.integers(1, max_length + 1))
        dims, mats = _random_complex(rng, length, max_dim, 3)
        # coefficients in a matrix ring: tensor with the identity of M_m
        m = int(rng.integers(1, 3))
        mats = [np.kron(B, np.eye(m, dtype=int).astype(object)) for B in mats]
        dims = [d * m for d in dims]
        for k in range(1, len(mats)):
            if np.any(mats[k - 1].dot(mats[k]) != 0):
                raise AssertionError("random complex is not a complex")
        ranks = [0] + [exact_rank(B.tolist()) if B.size else 0 for B in mats] + [0]
        betti = [dims[k] - ranks[k] - ranks[k + 1] for k in range(len(dims))]
        vanish_rank = all(b == 0 for b in betti)
        vanish_eig = True
        for k in range(len(dims)):
            if dims[k] == 0:
                continue
            L = np.zeros((dims[k], dims[k]))
            if k >= 1 and mats[k - 1].size:
                B = mats[k - 1].astype(float)
                L += B.T @ B
            if k < len(mats) and mats[k].size:
                B = mats[k].astype(float)
                L += B @ B.T
            lam = np.linalg.eigvalsh(L)[0]
            scale = max(1.0, float(np.abs(L).max()))
            if lam <= 1e-9 * scale:
                vanish_eig = False
            # per-degree agreement as well: kernel dimension equals betti
            zero = int(np.sum(np.linalg.eigvalsh(L) <= 1e-9 * scale))
            if zero != betti[k]:
                failures.append((trial, k, zero, betti[k]))
        if vanish_rank != vanish_eig:
            failures.append((trial, "vanishing", vanish_eig, vanish_rank))
    return not failures, failures


__all__ = [
    "Budget",
    "SpectralCertificate",
    "power_trace_lower_bound",
    "l1_upper_bound",
    "rd_upper_bound",
    "radial_power",
    "truncation_extremes",
    "certify_gap",
    "homology_vanishing_report",
    "finite_model_equivalence_test",
]
