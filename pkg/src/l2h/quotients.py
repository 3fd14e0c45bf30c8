"""Finite quotients of supported groups and the finite-dimensional complexes they induce.

A quotient is given by one permutation of ``{0..m-1}`` per generator, acting
on the right: the point ``p`` moves to ``p . g = perm[p]``, and a word acts
letter by letter from the left.  The permutation module ``Q[points]`` is then a
right Z[G]-module, and tensoring a free left complex with it turns each
group-ring entry ``x = sum c_g g`` into the matrix ``sum c_g P_g`` with
``(P_g)[p . g, p] = 1``.  Block matrices compose in the ordinary way.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .errors import RelatorViolation
from .groups import DirectProduct, FiniteGroup, FreeGroup, RewritingGroup
from .linalg import sparse_rank
from .presentation import format_letters

DEFAULT_ORDER_CAP = 200_000


def compose(p, q):
    """Permutation 'first p, then q'."""
    return tuple(q[i] for i in p)


def inverse_perm(p):
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def cycle(m, shift=1):
    return tuple((i + shift) % m for i in range(m))


def _orbit_transitive(gens, m):
    if m == 0:
        return True
    seen = {0}
    stack = [0]
    while stack:
        p = stack.pop()
        for g in gens:
            for q in (g[p],):
                if q not in seen:
                    seen.add(q)
                    stack.append(q)
    return len(seen) == m


def _finite_elements(g):
    return [g.rep[x] for x in sorted(g.rep)]


def descriptor_relators(g):
    """A set of defining relators (letter tuples) for a supported descriptor."""
    if isinstance(g, FreeGroup):
        return []
    if isinstance(g, DirectProduct):
        rels = []
        for f in g.factors:
            rels.extend(descriptor_relators(f))
        for a, fa in enumerate(g.factors):
            for b in range(a + 1, len(g.factors)):
                for x in fa.gens:
                    for y in g.factors[b].gens:
                        rels.append((x + 1, y + 1, -(x + 1), -(y + 1)))
        return rels
    if isinstance(g, RewritingGroup):
        return [tuple(lhs) + tuple(-x for x in reversed(rhs)) for lhs, rhs in g.rules]
    if isinstance(g, FiniteGroup):
        # every edge of the Cayley graph closes up: u x = v
        rels = []
        for u in _finite_elements(g):
            for x in g.alphabet():
                v = g.normalize(u + (x,))
                rels.append(tuple(u) + (x,) + tuple(-y for y in reversed(v)))
        return rels
    raise RelatorViolation(f"no relators known for {g.describe()}")


class FiniteQuotient:
    def __init__(self, source, images, family="", label="", check=True):
        self.source = source
        self.images = {int(k): tuple(v) for k, v in images.items()}
        missing = [g for g in source.gens if g not in self.images]
        if missing:
            raise RelatorViolation(f"no image for generators {missing}")
        sizes = {len(p) for p in self.images.values()}
        if len(sizes) != 1:
            raise RelatorViolation("generator images have different degrees")
        self.m = sizes.pop()
        for p in self.images.values():
            if sorted(p) != list(range(self.m)):
                raise RelatorViolation("an image is not a permutation")
        self.family = family
        self.label = label
        self._order = None
        self._elements = None
        self._cache = {}
        self.transitive = _orbit_transitive(list(self.images.values()), self.m)
        if check:
            self.verify(descriptor_relators(source))

    # -- evaluation ---------------------------------------------------------
    def letter_perm(self, x):
        p = self.images[abs(x) - 1]
        return p if x > 0 else inverse_perm(p)

    def evaluate(self, letters):
        """Permutation of a letter sequence (left to right)."""
        p = tuple(range(self.m))
        for x in letters:
            p = compose(p, self.letter_perm(x))
        return p

    def word_perm(self, w):
        p = self._cache.get(w)
        if p is None:
            p = self.evaluate(self.source.letters(w))
            self._cache[w] = p
        return p

    def verify(self, relators):
        ident = tuple(range(self.m))
        for r in relators:
            if self.evaluate(r) != ident:
                raise RelatorViolation(
                    f"relator {format_letters(r, self.source.names)} is not trivial in the quotient"
                )
        return True

    # -- the finite group ----------------------------------------------------
    def elements(self, cap=DEFAULT_ORDER_CAP):
        """All elements of the image group, in breadth-first order from the identity."""
        if self._elements is None:
            ident = tuple(range(self.m))
            gens = []
            for g in self.source.gens:
                for x in (g + 1, -(g + 1)):
                    gens.append(self.letter_perm(x))
            seen = {ident: 0}
            order = [ident]
            k = 0
            while k < len(order):
                p = order[k]
                k += 1
                for s in gens:
                    q = compose(p, s)
                    if q not in seen:
                        seen[q] = len(order)
                        order.append(q)
                        if len(order) > cap:
                            raise RelatorViolation(f"image group larger than {cap}")
            self._elements = order
            self._order = len(order)
        return self._elements

    @property
    def order(self):
        if self._order is None:
            self.elements()
        return self._order

    def regular(self):
        """The same quotient acting on its own elements by right multiplication."""
        if self.transitive and self.order == self.m:
            return self
        elems = self.elements()
        index = {p: i for i, p in enumerate(elems)}
        images = {}
        for g, s in self.images.items():
            images[g] = tuple(index[compose(p, s)] for p in elems)
        return FiniteQuotient(self.source, images, self.family, self.label, check=False)

    def to_json(self):
        names = self.source.names
        return {
            "m": self.m,
            "generators": {names[g]: [i + 1 for i in self.images[g]] for g in sorted(self.images)},
            "order": self.order,
            "transitive": self.transitive,
            "family": self.family,
            "label": self.label,
        }

    @classmethod
    def from_json(cls, source, data):
        index = {n: i for i, n in enumerate(source.names)}
        images = {index[n]: tuple(i - 1 for i in p) for n, p in data["generators"].items()}
        return cls(source, images, data.get("family", ""), data.get("label", ""))

    def __repr__(self):
        return f"FiniteQuotient({self.label or self.family}, m={self.m})"


class ExplicitModule:
    """A finite-dimensional module given by one invertible matrix per generator.

    ``matrices[g]`` is a representation rho(g) acting on column vectors; the
    right action used for tensoring is v . g = rho(g)^T v.
    """

    def __init__(self, source, matrices, inverses, label="explicit"):
        self.source = source
        self.matrices = {int(k): [list(map(Fraction, r)) for r in v] for k, v in matrices.items()}
        self.inverses = {int(k): [list(map(Fraction, r)) for r in v] for k, v in inverses.items()}
        self.dim = len(next(iter(self.matrices.values())))
        self.label = label
        self._cache = {}

    def letter_matrix(self, x):
        return self.matrices[abs(x) - 1] if x > 0 else self.inverses[abs(x) - 1]

    def word_matrix(self, w):
        """rho(w) for a normal-form word."""
        M = self._cache.get(w)
        if M is None:
            d = self.dim
            M = [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]
            for x in self.source.letters(w):
                L = self.letter_matrix(x)
                M = [[sum(M[i][k] * L[k][j] for k in range(d)) for j in range(d)] for i in range(d)]
            self._cache[w] = M
        return M

    def verify(self, relators):
        d = self.dim
        ident = [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]
        for r in relators:
            M = ident
            for x in r:
                L = self.letter_matrix(x)
                M = [[sum(M[i][k] * L[k][j] for k in range(d)) for j in range(d)] for i in range(d)]
            if M != ident:
                raise RelatorViolation("explicit module does not satisfy a relator")
        return True


class FiniteComplex:
    """Chain complex of finite-dimensional rational vector spaces (sparse matrices)."""

    def __init__(self, dims, boundaries, meta=None):
        self.dims = list(dims)
        self.boundaries = [None] + list(boundaries)  # entries {(row, col): value}
        self.meta = meta or {}
        self._ranks = {}

    def rank(self, k):
        if k < 1 or k >= len(self.dims):
            return 0
        if k not in self._ranks:
            self._ranks[k] = sparse_rank(self.boundaries[k], self.dims[k - 1], self.dims[k])
        return self._ranks[k]

    def check(self):
        for k in range(2, len(self.dims)):
            prod = {}
            B = self.boundaries[k]
            A = self.boundaries[k - 1]
            by_row = {}
            for (i, j), v in A.items():
                by_row.setdefault(j, []).append((i, v))
            for (j, l), v in B.items():
                for i, u in by_row.get(j, ()):
                    prod[(i, l)] = prod.get((i, l), 0) + u * v
            if any(v != 0 for v in prod.values()):
                return False
        return True

    def euler_characteristic(self):
        return sum((-1) ** k * d for k, d in enumerate(self.dims))

    def dense(self, k):
        rows, cols = self.dims[k - 1], self.dims[k]
        M = [[0] * cols for _ in range(rows)]
        for (i, j), v in self.boundaries[k].items():
            M[i][j] = v
        return M


def entry_block(x, module):
    """Sparse matrix {(row, col): value} of a group-ring element acting on ``module``."""
    out = {}
    if isinstance(module, FiniteQuotient):
        for w, c in x.terms.items():
            p = module.word_perm(w)
            for src, dst in enumerate(p):
                out[(dst, src)] = out.get((dst, src), 0) + c
    else:
        for w, c in x.terms.items():
            M = module.word_matrix(w)
            d = module.dim
            # rho(w)^T
            for i in range(d):
                for j in range(d):
                    v = M[j][i]
                    if v:
                        out[(i, j)] = out.get((i, j), 0) + c * v
    return {k: v for k, v in out.items() if v != 0}


def module_dim(module):
    return module.m if isinstance(module, FiniteQuotient) else module.dim


def induce_matrix(B, module):
    d = module_dim(module)
    out = {}
    for (i, j), x in B.entries.items():
        for (r, c), v in entry_block(x, module).items():
            out[(i * d + r, j * d + c)] = v
    return out


def induce(C, module, kind="regular"):
    """Tensor the chain complex C with a finite-dimensional module.

    ``module`` is a FiniteQuotient (used through its regular module when
    ``kind == "regular"``, else through its permutation module) or an
    ExplicitModule.
    """
    if isinstance(module, FiniteQuotient):
        if module.source != C.group:
            raise RelatorViolation("quotient source does not match the complex's group")
        if kind == "regular":
            module = module.regular()
    d = module_dim(module)
    dims = [r * d for r in C.ranks]
    bs = [induce_matrix(C.boundaries[k], module) for k in range(1, len(C.ranks))]
    meta = {"module_dim": d, "kind": kind}
    if isinstance(module, FiniteQuotient):
        meta["order"] = module.order
    return FiniteComplex(dims, bs, meta)


def betti(F, k):
    """dim ker b_k - rank b_{k+1} for a finite complex."""
    if k < 0 or k >= len(F.dims):
        return 0
    return F.dims[k] - F.rank(k) - F.rank(k + 1)


def betti_numbers(F):
    return [betti(F, k) for k in range(len(F.dims))]


def luck_estimate(C, q, k):
    """Normalized Betti number betti_k(C tensor Q[Q]) / |Q|."""
    F = induce(C, q, "regular")
    return Fraction(betti(F, k), q.order)


def luck_table(C, quotients, degrees=None):
    """Normalized Betti numbers for every quotient, with a per-degree trend."""
    degrees = range(C.dimension + 1) if degrees is None else degrees
    rows = []
    for q in quotients:
        F = induce(C, q, "regular")
        vals = {k: Fraction(betti(F, k), q.order) for k in degrees}
        rows.append({"quotient": q, "order": q.order, "estimates": vals})
    return rows


# -- the library ---------------------------------------------------------------------


def diagonal_cyclic(g, N, label=None):
    """Every generator goes to the same N-cycle (a quotient when relators have exponent sums divisible by N)."""
    c = cycle(N)
    return FiniteQuotient(g, {x: c for x in g.gens}, "diagonal-cyclic", label or f"Z/{N}")


def standard_cyclic(g, N, label=None):
    """First generator to an N-cycle, the others to the identity."""
    c = cycle(N)
    ident = tuple(range(N))
    images = {x: (c if i == 0 else ident) for i, x in enumerate(g.gens)}
    return FiniteQuotient(g, images, "cyclic", label or f"Z/{N}")


def _random_transitive(rng, n, k):
    while True:
        perms = []
        for _ in range(k):
            p = list(range(n))
            rng.shuffle(p)
            perms.append(tuple(p))
        if _orbit_transitive(perms, n):
            return perms


def symmetric_images(g, n, seed):
    """Seeded random transitive permutation images on n points (free groups only)."""
    rng = random.Random(f"{seed}:{n}:{len(g.gens)}")
    perms = _random_transitive(rng, n, len(g.gens))
    return FiniteQuotient(g, dict(zip(g.gens, perms)), "symmetric", f"S{n}-image")


def product_quotient(g, parts, label):
    """Factor-wise quotient of a direct product acting on the product of point sets."""
    sizes = [q.m for q in parts]
    total = 1
    for s in sizes:
        total *= s
    images = {}
    for k, q in enumerate(parts):
        stride = 1
        for s in sizes[k + 1 :]:
            stride *= s
        for x, p in q.images.items():
            img = []
            for idx in range(total):
                digit = (idx // stride) % sizes[k]
                img.append(idx + (p[digit] - digit) * stride)
            images[x] = tuple(img)
    return FiniteQuotient(g, images, "factorwise", label)


def regular_quotient(g):
    """The identity quotient of a finite group, acting on itself."""
    elems = _finite_elements(g)
    index = {u: i for i, u in enumerate(elems)}
    images = {x: tuple(index[g.normalize(u + (x + 1,))] for u in elems) for x in g.gens}
    return FiniteQuotient(g, images, "regular", f"{g.describe()} regular")


def _exponent_sums_divisible(g, N):
    for r in descriptor_relators(g):
        if sum(1 if x > 0 else -1 for x in r) % N:
            return False
    return True


def quotient_library(g, budget=3, seed=0):
    """Deterministic family of verified finite quotients for a supported group.

    * Z: cyclic quotients of orders 2, 4, 8, ...
    * free groups: the diagonal cyclic chain 2, 4, 8, ... (the first is
      "every generator to a transposition") and seeded symmetric images
    * direct products: the diagonal cyclic chain and factor-wise products
    * finite groups: the regular representation
    """
    out = []
    if isinstance(g, FiniteGroup):
        return [regular_quotient(g)]
    if isinstance(g, FreeGroup) and g.rank == 1:
        return [standard_cyclic(g, 2 ** j) for j in range(1, budget + 1)]
    for j in range(1, budget + 1):
        N = 2 ** j
        if _exponent_sums_divisible(g, N):
            out.append(diagonal_cyclic(g, N))
    if isinstance(g, FreeGroup):
        for n in range(3, 3 + budget):
            out.append(symmetric_images(g, n, seed))
    elif isinstance(g, DirectProduct):
        for j in range(1, min(budget, 2) + 1):
            parts = [quotient_library(f, j, seed)[j - 1] if isinstance(f, FreeGroup) else None for f in g.factors]
            if any(p is None for p in parts):
                break
            out.append(product_quotient(g, parts, f"(Z/{2 ** j})^{len(parts)}"))
    return out


def nested_chain(quotients):
    """The diagonal cyclic members of a library, ordered by increasing order."""
    chain = [q for q in quotients if q.family in ("diagonal-cyclic", "cyclic")]
    return sorted(chain, key=lambda q: q.order)
