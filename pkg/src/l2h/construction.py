"""Building a finite 3-complex with vanishing l2-homology from a suitable group.

Pipeline: check the hypothesis in degrees 0..2, wedge spheres onto the
presentation complex, search bounded-support integral 2-cycles, select a
subset that stays injective on finite quotients, attach 3-cells and verify.
The selection step is a heuristic stand-in for a non-constructive density
argument, so the final report grades every degree as certified or evidence.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import flint
import numpy as np
import scipy.sparse as sp

from . import rounding
from .complexes import (
    attach_cells,
    describe_abelian,
    integral_homology,
    laplacian,
    presentation_complex,
    wedge_spheres,
)
from .errors import HypothesisNotSatisfied, NoCandidateSubset, UnsupportedGroupForResolution
from .groups import enumerate_ball
from .grouprings import GroupRingElement, GroupRingMatrix, mat_mul
from .hopf import resolution_for
from .linalg import sparse_rank
from .presentation import format_presentation
from .quotients import (
    betti,
    diagonal_cyclic,
    entry_block,
    induce,
    nested_chain,
    quotient_library,
    _exponent_sums_divisible,
)
from .spectral import CERTIFIED, ZERO_EVIDENCE, Budget, certify_gap

DEFAULT_UNKNOWN_CAP = 1500

SATISFIED = "Satisfied"
SATISFIED_EVIDENCE = "SatisfiedEvidence"
VIOLATED = "Violated"
UNKNOWN = "Unknown"


# -- hypothesis ---------------------------------------------------------------------


def _trend(values):
    """'to-zero', 'bounded-away' or 'unclear' for a sequence of estimates."""
    if len(values) < 2:
        return "unclear"
    nonincreasing = all(b <= a for a, b in zip(values, values[1:]))
    if nonincreasing and values[-1] * 2 <= values[0]:
        return "to-zero"
    if min(values) >= Fraction(1, 2):
        return "bounded-away"
    return "unclear"


def _estimates(C, k, chain):
    rows = []
    for q in chain:
        F = induce(C, q, "regular")
        rows.append({"quotient": q.label, "order": q.order, "value": Fraction(betti(F, k), q.order)})
    return rows


def _est_json(rows):
    return [{"quotient": r["quotient"], "order": r["order"], "value": rounding.to_json(r["value"])} for r in rows]


def _classify(cert, trend):
    if cert.status == CERTIFIED:
        return "zero", "certified"
    if cert.status == ZERO_EVIDENCE:
        return "nonzero", "evidence"
    if trend == "to-zero":
        return "zero", "evidence"
    if trend == "bounded-away":
        return "nonzero", "evidence"
    return "unknown", "none"


@dataclass
class HypothesisReport:
    verdict: str
    grade: str
    degrees: list
    failing_degree: int | None = None
    reason: str = ""
    euler: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "verdict": self.verdict,
            "grade": self.grade,
            "failing_degree": self.failing_degree,
            "reason": self.reason,
            "euler_witness": self.euler,
            "degrees": self.degrees,
        }


def hypothesis_chain(g, quotient_budget):
    lib = quotient_library(g, quotient_budget)
    chain = nested_chain(lib)
    return chain if len(chain) >= 2 else lib


def check_hypothesis(P, g, budget=None, strategy="auto", quotient_budget=4):
    """Assess vanishing of the group's homology with C*_r coefficients in degrees 0, 1, 2.

    Degrees 0 and 1 use the presentation complex; degree 2 uses a free
    resolution of the group when one is available.
    """
    budget = budget or Budget()
    Z = presentation_complex(P, g)
    chain = hypothesis_chain(g, quotient_budget)
    try:
        res = resolution_for(g).complex
    except UnsupportedGroupForResolution:
        res = None
    degrees = []
    for k in range(3):
        if k <= 1:
            C, source = Z, "presentation"
        else:
            C, source = res, "resolution"
        if C is None:
            degrees.append({"degree": k, "source": "none", "status": "unsupported", "outcome": "unknown", "grade": "none"})
            continue
        if k > C.dimension:
            D = GroupRingMatrix(g, 0, 0)
        else:
            D = laplacian(C, k)
        cert = certify_gap(D, strategy, budget, degree=k)
        est = _estimates(C, k, chain)
        trend = _trend([r["value"] for r in est])
        outcome, grade = _classify(cert, trend)
        degrees.append(
            {
                "degree": k,
                "source": source,
                "certificate": cert.to_json(),
                "status": cert.status,
                "estimates": _est_json(est),
                "trend": trend,
                "outcome": outcome,
                "grade": grade,
            }
        )
    euler = {}
    chi = Z.euler_characteristic()
    if degrees[0]["outcome"] == "zero" and degrees[0]["grade"] == "certified" and Z.dimension <= 2:
        # with b_0 = 0 the l2 Euler characteristic gives b_2 - b_1 = chi, so chi < 0 forces b_1 > 0
        if chi < 0:
            euler = {"chi": chi, "forces_nonzero_degree": 1}
            degrees[1]["outcome"], degrees[1]["grade"] = "nonzero", "certified"
    verdict, grade, failing, reason = _verdict(degrees)
    return HypothesisReport(verdict, grade, degrees, failing, reason, euler)


def _verdict(degrees):
    for d in degrees:
        if d["outcome"] == "nonzero":
            k = d["degree"]
            if d.get("status") == ZERO_EVIDENCE:
                why = f"degree {k}: truncated Laplacian has spectrum near 0 (amenability-type evidence)"
            elif d["grade"] == "certified":
                why = f"degree {k}: Euler characteristic forces nonzero l2-homology"
            else:
                why = f"degree {k}: finite-quotient estimates stay away from 0"
            return VIOLATED, d["grade"], k, why
    if all(d["outcome"] == "zero" and d["grade"] == "certified" for d in degrees):
        return SATISFIED, "certified", None, "all degrees certified"
    if all(d["outcome"] == "zero" for d in degrees):
        return SATISFIED_EVIDENCE, "evidence", None, "degree 0 certified where possible; others by evidence"
    unknown = [d["degree"] for d in degrees if d["outcome"] == "unknown"]
    return UNKNOWN, "none", unknown[0], f"degree {unknown[0]}: no conclusion within budget"


# -- kernel cycles ---------------------------------------------------------------------


@dataclass
class KernelCycle:
    entries: list  # GroupRingElement per 2-cell, integral
    scalar: int  # integral vector = scalar * rational solution with a unit free coordinate
    free_index: int

    def support_size(self):
        return sum(x.support_size() for x in self.entries)

    def l1(self):
        return sum(x.l1_norm() for x in self.entries)

    def to_json(self):
        return {"entries": [x.to_json() for x in self.entries], "scalar": self.scalar}


@dataclass
class KernelSearch:
    L: int
    unknowns: int
    cycles: list
    complete: bool
    solution_dim: int


def default_radius(C, unknown_cap=DEFAULT_UNKNOWN_CAP, degree=2):
    """Largest L (at least 1) keeping the unknown count under ``unknown_cap``."""
    m = C.ranks[degree] if degree <= C.dimension else 0
    L = 1
    while True:
        nxt = len(enumerate_ball(C.group, L + 1))
        if m * nxt > unknown_cap or (C.group.is_finite and len(enumerate_ball(C.group, L)) == nxt):
            return L
        L += 1


def _kernel_int(rows, cols, vals, nrows, ncols):
    """Integral kernel basis with per-vector scalars for a sparse integer system."""
    if ncols == 0:
        return []
    if not vals:
        return [([1 if i == f else 0 for i in range(ncols)], 1, f) for f in range(ncols)]
    A = sp.csr_matrix((np.array(vals, dtype=np.int64), (rows, cols)), shape=(nrows, ncols))
    if nrows > ncols:
        # same kernel over the rationals, fewer rows
        A = (A.T @ A).tocsr()
    M = flint.fmpz_mat(A.toarray().tolist())
    R, den, r = M.rref()
    pivots = []
    for i in range(r):
        for j in range(ncols):
            if R[i, j] != 0:
                pivots.append(j)
                break
    pivset = set(pivots)
    den = int(den)
    out = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [0] * ncols
        v[f] = den
        for i, p in enumerate(pivots):
            v[p] = -int(R[i, f])
        g = 0
        for x in v:
            g = gcd(g, x)
        if v[f] < 0:
            g = -g
        v = [x // g for x in v]
        out.append((v, v[f], f))
    return out


def find_kernel_cycles(C, L=None, count_target=None, degree=2, unknown_cap=DEFAULT_UNKNOWN_CAP):
    """Basis of {z supported on B_L per cell : b_degree z = 0}, cleared of denominators.

    Ordered by (support size, l1 norm, free coordinate).  ``complete`` is set
    when the ball is the whole (finite) group.
    """
    g = C.group
    if degree > C.dimension:
        return KernelSearch(L or 0, 0, [], True, 0)
    if L is None:
        L = default_radius(C, unknown_cap, degree)
    B = C.boundaries[degree]
    ball = enumerate_ball(g, L)
    nb = len(ball)
    m = B.cols
    rowidx = {}
    rows, cols, vals = [], [], []
    for (i, j), x in sorted(B.entries.items()):
        for wi, w in enumerate(ball):
            for h, c in x.terms.items():
                if Fraction(c).denominator != 1:
                    raise ValueError("find_kernel_cycles needs an integral boundary")
                r = rowidx.setdefault((i, g.multiply(w, h)), len(rowidx))
                rows.append(r)
                cols.append(j * nb + wi)
                vals.append(int(c))
    basis = _kernel_int(rows, cols, vals, len(rowidx), m * nb)
    cycles = []
    for v, scalar, f in basis:
        entries = []
        for j in range(m):
            terms = {ball[wi]: v[j * nb + wi] for wi in range(nb) if v[j * nb + wi]}
            entries.append(GroupRingElement(g, terms))
        cycles.append(KernelCycle(entries, scalar, f))
    cycles.sort(key=lambda z: (z.support_size(), z.l1(), z.free_index))
    complete = bool(g.is_finite) and nb == g.order()
    if count_target is not None:
        cycles = cycles[: max(count_target, 0)] if count_target < len(cycles) else cycles
    return KernelSearch(L, m * nb, cycles, complete, len(basis))


def is_cycle(C, z, degree=2):
    col = GroupRingMatrix.column(C.group, z)
    return mat_mul(C.boundaries[degree], col).is_zero()


def in_span(search_cycles, z):
    """Whether the vector z (list of ring elements) is a rational combination of the cycles."""
    keys = {}
    def vec(entries):
        out = {}
        for j, x in enumerate(entries):
            for w, c in x.terms.items():
                out[keys.setdefault((j, w), len(keys))] = c
        return out
    vs = [vec(c.entries) for c in search_cycles]
    t = vec(z)
    base = {}
    for col, v in enumerate(vs):
        for r, c in v.items():
            base[(r, col)] = c
    n = len(vs)
    r0 = sparse_rank(base, len(keys), n)
    for r, c in t.items():
        base[(r, n)] = c
    return sparse_rank(base, len(keys), n + 1) == r0


# -- candidate selection -------------------------------------------------------------


def _induced_columns(z, module):
    d = module.m
    out = {}
    for i, x in enumerate(z):
        for (r, c), v in entry_block(x, module).items():
            out[(i * d + r, c)] = v
    return out


def _quotient_test(C, cycles, module, degree=2):
    """Ranks describing the induced map Q[Q]^|S| -> ker(b_degree (x) Q[Q])."""
    d = module.m
    nrows = C.ranks[degree] * d
    entries = {}
    aug = {}
    for s, z in enumerate(cycles):
        for (r, c), v in _induced_columns(z, module).items():
            entries[(r, s * d + c)] = v
        for i, x in enumerate(z):
            e = x.augmentation()
            if e:
                aug[(i, s)] = e
    full = sparse_rank(entries, nrows, len(cycles) * d)
    triv = sparse_rank(aug, C.ranks[degree], len(cycles))
    F = induce(C, module, "permutation")
    kdim = F.dims[degree] - F.rank(degree)
    reduced = full - triv
    return {
        "quotient": module.label,
        "order": module.order,
        "rank": full,
        "trivial_rank": triv,
        "reduced_rank": reduced,
        "reduced_target": len(cycles) * (d - 1),
        "kernel_dim": kdim,
        "cokernel_dim": kdim - full,
        "injective_reduced": reduced == len(cycles) * (d - 1),
    }


def _condition_estimate(C, cycles, module, degree=2):
    """Ratio of extreme nonzero singular values of the induced attaching map (floating point, display only)."""
    d = module.m
    nrows = C.ranks[degree] * d
    M = np.zeros((nrows, len(cycles) * d))
    for s, z in enumerate(cycles):
        for (r, c), v in _induced_columns(z, module).items():
            M[r, s * d + c] = float(v)
    if M.size == 0:
        return None
    sv = np.linalg.svd(M, compute_uv=False)
    nz = sv[sv > 1e-9 * max(1.0, sv[0])]
    if not len(nz):
        return None
    return float(f"{nz[0] / nz[-1]:.6g}")


@dataclass
class Selection:
    indices: list
    diagnostics: list
    heuristic: str = "greedy reduced-injectivity on finite quotients"


def select_basis_candidates(C, cycles, quotients, target, degree=2):
    """Greedy subset of cycles staying injective (off the trivial character) on every quotient."""
    modules = [q.regular() for q in quotients]
    chosen = []
    for idx, z in enumerate(cycles):
        if len(chosen) >= target:
            break
        trial = [cycles[i].entries for i in chosen] + [z.entries]
        if all(_quotient_test(C, trial, q, degree)["injective_reduced"] for q in modules):
            chosen.append(idx)
    diag = []
    subset = [cycles[i].entries for i in chosen]
    for q in modules:
        row = _quotient_test(C, subset, q, degree) if subset else {"quotient": q.label, "order": q.order}
        row["condition_estimate_approx"] = _condition_estimate(C, subset, q, degree) if subset else None
        diag.append(row)
    if len(chosen) < target:
        raise NoCandidateSubset(
            f"found {len(chosen)} of {target} candidates",
            {"selected": chosen, "per_quotient": diag},
        )
    return Selection(chosen, diag)


# -- the construction ----------------------------------------------------------------


def selection_quotients(g, seed=0):
    """Small nested quotients used to screen candidates.

    Factor-wise product quotients are left out: at characters trivial on a
    factor the product cycles degenerate, so they would reject every subset.
    """
    lib = [q for q in quotient_library(g, 3, seed) if q.order <= 64]
    chain = nested_chain(lib)
    return chain or lib


def verification_chain(g, levels=(6, 7, 8), quotient_budget=3):
    """Nested finite quotients used to verify the output complex."""
    chain = [diagonal_cyclic(g, 2 ** j) for j in levels if _exponent_sums_divisible(g, 2 ** j)]
    if len(chain) >= 3:
        return chain
    return hypothesis_chain(g, quotient_budget)


def quotient_betti_table(C, chain):
    out = []
    for q in chain:
        F = induce(C, q, "regular")
        b = [betti(F, k) for k in range(C.dimension + 1)]
        out.append({"quotient": q.label, "order": q.order, "betti": b,
                    "normalized": [Fraction(x, q.order) for x in b]})
    return out


def _table_json(t):
    return [
        {"quotient": r["quotient"], "order": r["order"], "betti": r["betti"],
         "normalized": [rounding.to_json(x) for x in r["normalized"]]}
        for r in t
    ]


def kervaire_integral_check(X):
    """Integral homology of the quotient complex, for information only."""
    H = integral_homology(X)
    return {
        "homology": [{"degree": k, "free_rank": f, "torsion": t, "group": describe_abelian(f, t)} for k, (f, t) in enumerate(H)],
        "acyclic_above_zero": all(f == 0 and not t for f, t in H[1:]),
        "note": "integral acyclicity is neither necessary for nor implied by l2-vanishing",
    }


def _trend_flags(table, degrees, threshold):
    vals = {k: [r["normalized"][k] if k < len(r["normalized"]) else Fraction(0) for r in table] for k in degrees}
    out = {}
    for k, v in vals.items():
        out[k] = {
            "below_threshold": all(x <= threshold for x in v),
            "nonincreasing": all(b <= a for a, b in zip(v, v[1:])),
        }
    return out


@dataclass
class ConstructionRecord:
    presentation: str
    group: str
    parameters: dict
    hypothesis: dict
    wedge_count: int
    cycles: list
    complex: object
    verification: dict
    flags: list
    runtime: dict

    def to_json(self):
        return {
            "presentation": self.presentation,
            "group": self.group,
            "parameters": self.parameters,
            "hypothesis": self.hypothesis,
            "wedge_count": self.wedge_count,
            "cycles": [c.to_json() for c in self.cycles],
            "complex": self.complex.to_json(),
            "verification": self.verification,
            "flags": self.flags,
            "runtime": self.runtime,
        }


def construct(
    P,
    g,
    budget=None,
    strategy="auto",
    d_s="auto",
    L=None,
    force=False,
    quotient_budget=4,
    verify_levels=(6, 7, 8),
    unknown_cap=DEFAULT_UNKNOWN_CAP,
    max_radius_doublings=1,
    timing=False,
    seed=0,
):
    """Run the full pipeline and return a ConstructionRecord."""
    budget = budget or Budget()
    t0 = time.perf_counter()
    hyp = check_hypothesis(P, g, budget, strategy, quotient_budget)
    flags = []
    if hyp.verdict in (VIOLATED, UNKNOWN):
        if not force:
            raise HypothesisNotSatisfied(f"hypothesis {hyp.verdict}: {hyp.reason}", hyp)
        flags.append("Failed-Hypothesis")
    Z = presentation_complex(P, g)
    ds = 0 if d_s == "auto" else int(d_s)
    Y = wedge_spheres(Z, ds) if ds else Z
    target = Y.euler_characteristic()
    tests = selection_quotients(g, seed)
    selection = None
    search = None
    chosen = []
    if target > 0 and Y.dimension >= 2:
        radius = L
        last_err = None
        for attempt in range(max_radius_doublings + 1):
            cap = unknown_cap * (4 ** attempt)
            if radius is not None and Y.ranks[2] * len(enumerate_ball(g, radius)) > cap:
                break
            search = find_kernel_cycles(Y, radius, unknown_cap=cap)
            try:
                selection = select_basis_candidates(Y, search.cycles, tests, target)
                break
            except NoCandidateSubset as e:
                last_err = e
                radius = 2 * search.L
        if selection is None:
            raise last_err
        chosen = [search.cycles[i] for i in selection.indices]
    X = attach_cells(Y, 3, [c.entries for c in chosen]) if chosen else Y
    verification = verify(Y, X, g, budget, strategy, verify_levels, quotient_budget)
    if selection is not None:
        verification["selection"] = {"heuristic": selection.heuristic, "per_quotient": selection.diagnostics}
    if search is not None:
        verification["kernel_search"] = {"L": search.L, "unknowns": search.unknowns, "solution_dim": search.solution_dim,
                                         "complete": search.complete}
    deg0 = verification["certificates"][0]["status"] if verification["certificates"] else None
    if deg0 == ZERO_EVIDENCE and "Failed-Hypothesis" not in flags:
        flags.append("Failed-Hypothesis")
    runtime = {"ms": int((time.perf_counter() - t0) * 1000)} if timing else {"ms": None}
    params = {"d_s": d_s, "L": L, "strategy": strategy, "quotient_budget": quotient_budget,
              "verify_levels": list(verify_levels), "force": force, "seed": seed,
              "max_power": budget.max_power, "max_radius": budget.max_radius,
              "epsilon_zero": rounding.to_json(budget.epsilon_zero)}
    return ConstructionRecord(format_presentation(P), g.describe(), params, hyp.to_json(), ds, chosen, X,
                              verification, flags, runtime)


def verify(Y, X, g, budget, strategy="auto", verify_levels=(6, 7, 8), quotient_budget=4):
    """Certificates in every degree, quotient Betti tables and attachment invariants."""
    X.check()
    certs = []
    for k in range(X.dimension + 1):
        c = certify_gap(laplacian(X, k), strategy, budget, degree=k)
        certs.append(c.to_json())
    chain = verification_chain(g, verify_levels, quotient_budget)
    tX = quotient_betti_table(X, chain)
    tY = quotient_betti_table(Y, chain)
    unchanged = all(a["betti"][:2] == b["betti"][:2] for a, b in zip(tX, tY))
    degrees = list(range(1, X.dimension + 1))
    trends = _trend_flags(tX, degrees, Fraction(1, 5))
    grades = []
    for k in range(X.dimension + 1):
        st = certs[k]["status"]
        if st == CERTIFIED:
            grades.append({"degree": k, "grade": "certified"})
        elif st == ZERO_EVIDENCE:
            grades.append({"degree": k, "grade": "nonvanishing-evidence"})
        elif k in trends and trends[k]["below_threshold"] and trends[k]["nonincreasing"]:
            grades.append({"degree": k, "grade": "evidence"})
        else:
            grades.append({"degree": k, "grade": "unknown"})
    return {
        "boundary_squares_zero": True,
        "low_degrees_unchanged": unchanged,
        "certificates": certs,
        "quotient_table": _table_json(tX),
        "quotient_table_before": _table_json(tY),
        "trends": {str(k): v for k, v in trends.items()},
        "grades": grades,
        "integral": kervaire_integral_check(X),
    }
