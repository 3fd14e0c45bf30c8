"""Free chain complexes over the group ring of a presented group.

``C.boundaries[k]`` (k >= 1) is the matrix of ``b_k : C_k -> C_{k-1}`` with
``ranks[k-1]`` rows and ``ranks[k]`` columns, composed with
:func:`grouprings.mat_mul` (so ``b_{k-1} o b_k = 0``).  Index 0 holds None.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import (
    DegreeOutOfRange,
    DimensionMismatch,
    NotACycle,
    RelatorNotTrivialInGroup,
)
from .groups import DirectProduct, descriptor_from_json, descriptor_to_json
from .grouprings import GroupRingElement, GroupRingMatrix, mat_mul, mat_star
from .linalg import homology_from_boundaries
from .presentation import format_letters


class CWChainComplex:
    def __init__(self, group, ranks, boundaries, cell_labels=None, check=True):
        self.group = group
        self.ranks = list(ranks)
        if not self.ranks or self.ranks[0] < 1:
            raise DimensionMismatch("a complex needs at least one 0-cell")
        bs = [None] + list(boundaries)
        if len(bs) != len(self.ranks):
            raise DimensionMismatch(f"{len(bs) - 1} boundaries for {len(self.ranks)} degrees")
        for k in range(1, len(bs)):
            if bs[k].shape != (self.ranks[k - 1], self.ranks[k]):
                raise DimensionMismatch(
                    f"b_{k} has shape {bs[k].shape}, expected {(self.ranks[k - 1], self.ranks[k])}"
                )
        self.boundaries = bs
        if cell_labels is None:
            cell_labels = [[f"e{k}_{i}" for i in range(r)] for k, r in enumerate(self.ranks)]
        self.cell_labels = [list(x) for x in cell_labels]
        if check:
            self.check()

    @property
    def dimension(self):
        return len(self.ranks) - 1

    def boundary(self, k):
        if 1 <= k <= self.dimension:
            return self.boundaries[k]
        if k == self.dimension + 1:
            return GroupRingMatrix(self.group, self.ranks[k - 1], 0)
        if k == 0:
            return GroupRingMatrix(self.group, 0, self.ranks[0])
        raise DegreeOutOfRange(f"no boundary b_{k} in a complex of dimension {self.dimension}")

    def check(self):
        """Assert b_{k-1} o b_k = 0 exactly in every degree."""
        for k in range(2, self.dimension + 1):
            if not mat_mul(self.boundaries[k - 1], self.boundaries[k]).is_zero():
                raise NotACycle(f"b_{k - 1} o b_{k} is not zero")
        return True

    def euler_characteristic(self):
        return sum((-1) ** k * r for k, r in enumerate(self.ranks))

    def __repr__(self):
        return f"CWChainComplex({self.group.describe()}, ranks={self.ranks})"

    def to_json(self):
        return {
            "group": descriptor_to_json(self.group),
            "ranks": list(self.ranks),
            "boundaries": [self.boundaries[k].to_json() for k in range(1, len(self.ranks))],
            "cell_labels": self.cell_labels,
        }

    @classmethod
    def from_json(cls, data):
        g = descriptor_from_json(data["group"])
        bs = [GroupRingMatrix.from_json(g, b) for b in data["boundaries"]]
        return cls(g, data["ranks"], bs, data.get("cell_labels"))


def fox_derivative(r, i, group):
    """Left Fox derivative of the letter sequence ``r`` by generator ``i``.

    Uses d(uv) = du + u dv, dx = 1 and d(x^-1) = -x^-1.
    """
    x = i + 1
    terms = {}
    prefix = []
    for letter in r:
        if letter == x:
            w = group.normalize(prefix)
            terms[w] = terms.get(w, 0) + 1
        elif letter == -x:
            w = group.normalize(prefix + [letter])
            terms[w] = terms.get(w, 0) - 1
        prefix.append(letter)
    return GroupRingElement(group, terms)


def fox_identity_holds(r, group, ngens):
    """Check sum_x (dr/dx)(x - 1) = r - 1 in Q[G] for the letters ``r``."""
    one = GroupRingElement.one(group)
    total = GroupRingElement.zero(group)
    for i in range(ngens):
        gi = GroupRingElement.word(group, group.normalize((i + 1,)))
        total = total + fox_derivative(r, i, group) * (gi - one)
    rhs = GroupRingElement.word(group, group.normalize(r)) - one
    return total == rhs


def presentation_complex(P, g):
    """Cellular chain complex of the universal cover of the presentation 2-complex."""
    n = P.ngens
    m = len(P.relators)
    for j, r in enumerate(P.relators):
        if not g.is_identity(g.normalize(r)):
            raise RelatorNotTrivialInGroup(
                f"relator {j} ({P.format_word(r)}) is not trivial in {g.describe()}"
            )
    one = GroupRingElement.one(g)
    b1 = {(0, i): GroupRingElement.word(g, g.normalize((i + 1,))) - one for i in range(n)}
    bs = [GroupRingMatrix(g, 1, n, b1)]
    if m:
        b2 = {}
        for j, r in enumerate(P.relators):
            for i in range(n):
                b2[(i, j)] = fox_derivative(r, i, g)
        bs.append(GroupRingMatrix(g, n, m, b2))
    labels = [["*"], list(P.generators)]
    if m:
        labels.append([format_letters(r, P.generators) for r in P.relators])
    ranks = [1, n] + ([m] if m else [])
    return CWChainComplex(g, ranks, bs, labels)


def point_complex(g):
    return CWChainComplex(g, [1], [], [["*"]])


def laplacian(C, k):
    """Delta_k = b_k^* b_k + b_{k+1} b_{k+1}^*, as a self-adjoint matrix."""
    if not 0 <= k <= C.dimension:
        raise DegreeOutOfRange(f"degree {k} outside 0..{C.dimension}")
    n = C.ranks[k]
    D = GroupRingMatrix(C.group, n, n)
    if k >= 1:
        b = C.boundaries[k]
        D = D + mat_mul(mat_star(b), b)
    if k + 1 <= C.dimension:
        b = C.boundaries[k + 1]
        D = D + mat_mul(b, mat_star(b))
    if mat_star(D) != D:
        raise AssertionError("Laplacian failed to be self-adjoint")
    return D


def _with_degree(C, k, extra_cols, labels):
    """Copy of C with columns appended to b_k (creating degree k if needed)."""
    ranks = list(C.ranks)
    bs = list(C.boundaries[1:])
    cell_labels = [list(x) for x in C.cell_labels]
    if k > C.dimension + 1 or k < 1:
        raise DegreeOutOfRange(f"cannot add cells in degree {k} to a {C.dimension}-complex")
    if k == C.dimension + 1:
        ranks.append(0)
        bs.append(GroupRingMatrix(C.group, ranks[k - 1], 0))
        cell_labels.append([])
    old = bs[k - 1]
    ent = {}
    for j, col in enumerate(extra_cols):
        if len(col) != ranks[k - 1]:
            raise DimensionMismatch(f"cycle {j} has {len(col)} entries, expected {ranks[k - 1]}")
        for i, x in enumerate(col):
            ent[(i, j)] = x
    new = GroupRingMatrix(C.group, ranks[k - 1], len(extra_cols), ent)
    bs[k - 1] = old.hstack(new)
    ranks[k] += len(extra_cols)
    cell_labels[k].extend(labels)
    return CWChainComplex(C.group, ranks, bs, cell_labels)


def wedge_spheres(C, d, k=2):
    """Wedge ``d`` copies of S^k onto C: new k-cells with zero boundary."""
    if d == 0:
        return C
    zero = [GroupRingElement.zero(C.group)] * C.ranks[k - 1]
    start = C.ranks[k] if k <= C.dimension else 0
    return _with_degree(C, k, [zero] * d, [f"S{k}_{start + i}" for i in range(d)])


def attach_cells(C, k, cycles, labels=None):
    """Attach k-cells along exact (k-1)-cycles given as group-ring columns."""
    b = C.boundary(k - 1) if k - 1 >= 1 else None
    for j, z in enumerate(cycles):
        if b is not None:
            col = GroupRingMatrix.column(C.group, z)
            if col.rows != b.cols:
                raise DimensionMismatch(f"cycle {j} has {col.rows} entries, expected {b.cols}")
            if not mat_mul(b, col).is_zero():
                raise NotACycle(f"attaching map {j} is not a cycle")
    if labels is None:
        start = C.ranks[k] if k <= C.dimension else 0
        labels = [f"e{k}_{start + j}" for j in range(len(cycles))]
    return _with_degree(C, k, list(cycles), labels)


def embed_element(x, product, k):
    return GroupRingElement(product, {product.embed(k, w): c for w, c in x.terms.items()})


def embed_complex(C, product, k):
    """Change rings along the inclusion of factor ``k`` into ``product``."""
    bs = []
    for b in C.boundaries[1:]:
        bs.append(
            GroupRingMatrix(product, b.rows, b.cols, {ij: embed_element(x, product, k) for ij, x in b.entries.items()})
        )
    return CWChainComplex(product, C.ranks, bs, C.cell_labels, check=False)


def tensor_product(C, D):
    """Tensor product of two complexes over one group whose entries commute.

    Cells are pairs (a, b); d(a x b) = da x b + (-1)^p a x db.  Cells of
    degree n are ordered by p descending, then a, then b.
    """
    g = C.group
    N = C.dimension + D.dimension
    cells = []
    for n in range(N + 1):
        lev = []
        for p in range(min(n, C.dimension), -1, -1):
            q = n - p
            if q > D.dimension:
                continue
            for a in range(C.ranks[p]):
                for b in range(D.ranks[q]):
                    lev.append((p, a, q, b))
        cells.append(lev)
    index = [{c: i for i, c in enumerate(lev)} for lev in cells]
    bs = []
    for n in range(1, N + 1):
        ent = {}
        for j, (p, a, q, b) in enumerate(cells[n]):
            if p >= 1:
                for (i2, j2), x in C.boundaries[p].entries.items():
                    if j2 == a:
                        ent[(index[n - 1][(p - 1, i2, q, b)], j)] = x
            if q >= 1:
                sign = -1 if p % 2 else 1
                for (i2, j2), x in D.boundaries[q].entries.items():
                    if j2 == b:
                        ent[(index[n - 1][(p, a, q - 1, i2)], j)] = x.scale(sign)
        bs.append(GroupRingMatrix(g, len(cells[n - 1]), len(cells[n]), ent))
    labels = [
        [_pair_label(C.cell_labels[p][a], D.cell_labels[q][b]) for (p, a, q, b) in lev] for lev in cells
    ]
    return CWChainComplex(g, [len(lev) for lev in cells], bs, labels)


def _pair_label(u, v):
    if u == "*":
        return v
    if v == "*":
        return u
    return f"{u}|{v}"


def product_complex(factor_complexes, product):
    """Tensor product of complexes over the factors of a direct product."""
    if not isinstance(product, DirectProduct):
        raise DimensionMismatch("product_complex needs a DirectProduct group")
    out = embed_complex(factor_complexes[0], product, 0)
    for k in range(1, len(factor_complexes)):
        out = tensor_product(out, embed_complex(factor_complexes[k], product, k))
    return out


def integral_specialization(C):
    """Apply augmentation entrywise: the cellular chain complex of the base."""
    mats = [None]
    for k in range(1, C.dimension + 1):
        m = C.boundaries[k].augmentation_matrix()
        for row in m:
            for x in row:
                if isinstance(x, Fraction) and x.denominator != 1:
                    raise ValueError("integral specialization of a non-integral complex")
        mats.append([[int(x) for x in row] for row in m])
    return list(C.ranks), mats


def integral_homology(C):
    """Homology of the augmented complex as (free rank, torsion list) per degree."""
    ranks, mats = integral_specialization(C)
    return homology_from_boundaries(ranks, mats)


def describe_abelian(free, torsion):
    parts = []
    if free:
        parts.append("Z" if free == 1 else f"Z^{free}")
    parts.extend(f"Z/{t}" for t in torsion)
    return " + ".join(parts) if parts else "0"
