"""Exact arithmetic in the rational group ring Q[G] and matrices over it.

Coefficients are Python ints or :class:`fractions.Fraction`; fractions with
denominator one are stored as ints so integral arithmetic stays fast.

Matrices represent homomorphisms of free *left* Q[G]-modules.  A matrix
``B`` with ``rows x cols`` extents sends the basis vector ``e_j`` to
``sum_i B[i, j] e_i`` and acts on coordinates by right multiplication,
``f(x)_i = sum_j x_j B[i, j]``.  Composition is therefore

    (A o B)[i, k] = sum_j B[j, k] * A[i, j]

which is what :func:`mat_mul` computes.  With this convention the boundary
``b_1 = (g - 1)`` and the Fox-derivative ``b_2`` compose to zero.
"""

from __future__ import annotations

import os
from fractions import Fraction

from .errors import DimensionMismatch, SupportCapExceeded

DEFAULT_SUPPORT_CAP = 5_000_000


def support_cap():
    return int(os.environ.get("L2H_SUPPORT_CAP", DEFAULT_SUPPORT_CAP))


def qnorm(x):
    """Canonical exact coefficient: int when integral, else Fraction."""
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else x


class GroupRingElement:
    __slots__ = ("group", "terms")

    def __init__(self, group, terms=None):
        self.group = group
        clean = {}
        if terms:
            for w, c in terms.items():
                c = qnorm(c)
                if c != 0:
                    clean[w] = c
        self.terms = clean

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, group):
        return cls(group)

    @classmethod
    def one(cls, group, c=1):
        return cls(group, {group.identity: c})

    @classmethod
    def word(cls, group, w, c=1):
        return cls(group, {w: c})

    @classmethod
    def from_letters(cls, group, letters, c=1):
        return cls(group, {group.normalize(letters): c})

    @classmethod
    def _raw(cls, group, terms):
        el = cls.__new__(cls)
        el.group = group
        el.terms = terms
        return el

    # -- arithmetic ------------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, GroupRingElement):
            other = GroupRingElement.one(self.group, other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            v = out.get(w, 0) + c
            if v:
                out[w] = qnorm(v)
            else:
                out.pop(w, None)
        return GroupRingElement._raw(self.group, out)

    __radd__ = __add__

    def __neg__(self):
        return GroupRingElement._raw(self.group, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, GroupRingElement):
            other = GroupRingElement.one(self.group, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, q):
        q = qnorm(q)
        if q == 0:
            return GroupRingElement.zero(self.group)
        return GroupRingElement._raw(self.group, {w: qnorm(c * q) for w, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, GroupRingElement):
            return mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative powers are not defined in the group ring")
        result = GroupRingElement.one(self.group)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, GroupRingElement):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return self.terms == {self.group.identity: qnorm(other)}

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    # -- involution and functionals -------------------------------------------
    def star(self):
        inv = self.group.invert
        return GroupRingElement._raw(self.group, {inv(w): c for w, c in self.terms.items()})

    def augmentation(self):
        return qnorm(sum(self.terms.values()))

    def coefficient_at(self, w=None):
        if w is None:
            w = self.group.identity
        return self.terms.get(w, 0)

    def l1_norm(self):
        return qnorm(sum(abs(c) for c in self.terms.values()))

    def l2_norm_squared(self):
        return qnorm(sum(c * c for c in self.terms.values()))

    def support_size(self):
        return len(self.terms)

    def max_length(self):
        length = self.group.length
        return max((length(w) for w in self.terms), default=0)

    def denominator(self):
        from math import lcm

        d = 1
        for c in self.terms.values():
            if isinstance(c, Fraction):
                d = lcm(d, c.denominator)
        return d

    def is_self_adjoint(self):
        return self == self.star()

    def sorted_terms(self):
        key = self.group.sort_key
        return sorted(self.terms.items(), key=lambda t: key(t[0]))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for w, c in self.sorted_terms():
            word = self.group.format(w)
            if word == "e":
                parts.append(str(c))
            elif c == 1:
                parts.append(word)
            elif c == -1:
                parts.append(f"-{word}")
            else:
                parts.append(f"{c}*{word}")
        return " + ".join(parts).replace("+ -", "- ")

    # -- serialization ------------------------------------------------------------
    def to_json(self):
        out = []
        for w, c in self.sorted_terms():
            q = Fraction(c)
            out.append({"word": self.group.format(w), "num": str(q.numerator), "den": str(q.denominator)})
        return out

    @classmethod
    def from_json(cls, group, data):
        terms = {}
        for t in data:
            w = group.parse(t["word"])
            terms[w] = terms.get(w, 0) + Fraction(int(t["num"]), int(t["den"]))
        return cls(group, terms)


def add(x, y):
    return x + y


def scale(q, x):
    return x.scale(q)


def mul(x, y, cap=None):
    """Convolution product with exact coefficients."""
    group = x.group
    if not x.terms or not y.terms:
        return GroupRingElement.zero(group)
    cap = support_cap() if cap is None else cap
    m = group.multiply
    out = {}
    get = out.get
    yitems = list(y.terms.items())
    for u, a in x.terms.items():
        for v, b in yitems:
            w = m(u, v)
            out[w] = get(w, 0) + a * b
        if len(out) > cap:
            raise SupportCapExceeded(f"product support exceeds {cap} terms")
    return GroupRingElement(group, out)


def star(x):
    return x.star()


def augmentation(x):
    return x.augmentation()


def coefficient_at(x, w=None):
    return x.coefficient_at(w)


def l1_norm(x):
    return x.l1_norm()


def support_size(x):
    return x.support_size()


class GroupRingMatrix:
    """Sparse matrix over Q[G]; see the module docstring for conventions."""

    __slots__ = ("group", "rows", "cols", "entries")

    def __init__(self, group, rows, cols, entries=None):
        self.group = group
        self.rows = rows
        self.cols = cols
        clean = {}
        if entries:
            for (i, j), x in entries.items():
                if not (0 <= i < rows and 0 <= j < cols):
                    raise DimensionMismatch(f"entry ({i},{j}) outside {rows}x{cols}")
                if not isinstance(x, GroupRingElement):
                    x = GroupRingElement.one(group, x)
                if x.terms:
                    clean[(i, j)] = x
        self.entries = clean

    @classmethod
    def identity(cls, group, n):
        return cls(group, n, n, {(i, i): GroupRingElement.one(group) for i in range(n)})

    @classmethod
    def zero(cls, group, rows, cols):
        return cls(group, rows, cols)

    @classmethod
    def from_rows(cls, group, rows):
        nrows = len(rows)
        ncols = len(rows[0]) if rows else 0
        entries = {}
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise DimensionMismatch("ragged rows")
            for j, x in enumerate(row):
                entries[(i, j)] = x
        return cls(group, nrows, ncols, entries)

    @classmethod
    def column(cls, group, elements):
        return cls(group, len(elements), 1, {(i, 0): x for i, x in enumerate(elements)})

    def __getitem__(self, ij):
        x = self.entries.get(ij)
        return x if x is not None else GroupRingElement.zero(self.group)

    @property
    def shape(self):
        return (self.rows, self.cols)

    def column_vector(self, j):
        return [self[(i, j)] for i in range(self.rows)]

    def columns(self):
        return [self.column_vector(j) for j in range(self.cols)]

    def is_zero(self):
        return not self.entries

    def __eq__(self, other):
        return (
            isinstance(other, GroupRingMatrix)
            and self.shape == other.shape
            and self.entries == other.entries
        )

    def __add__(self, other):
        if self.shape != other.shape:
            raise DimensionMismatch(f"cannot add {self.shape} and {other.shape}")
        out = dict(self.entries)
        for ij, x in other.entries.items():
            out[ij] = out[ij] + x if ij in out else x
        return GroupRingMatrix(self.group, self.rows, self.cols, out)

    def __neg__(self):
        return GroupRingMatrix(self.group, self.rows, self.cols, {ij: -x for ij, x in self.entries.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, q):
        return GroupRingMatrix(self.group, self.rows, self.cols, {ij: x.scale(q) for ij, x in self.entries.items()})

    def __matmul__(self, other):
        return mat_mul(self, other)

    def star(self):
        return mat_star(self)

    def is_self_adjoint(self):
        return self == mat_star(self)

    def hstack(self, other):
        if self.rows != other.rows:
            raise DimensionMismatch("row extents differ")
        out = dict(self.entries)
        for (i, j), x in other.entries.items():
            out[(i, j + self.cols)] = x
        return GroupRingMatrix(self.group, self.rows, self.cols + other.cols, out)

    def submatrix_columns(self, cols):
        out = {}
        pos = {j: k for k, j in enumerate(cols)}
        for (i, j), x in self.entries.items():
            if j in pos:
                out[(i, pos[j])] = x
        return GroupRingMatrix(self.group, self.rows, len(cols), out)

    def augmentation_matrix(self):
        """Entrywise augmentation as a dense list of rational rows."""
        m = [[0] * self.cols for _ in range(self.rows)]
        for (i, j), x in self.entries.items():
            m[i][j] = x.augmentation()
        return m

    def max_entry_length(self):
        return max((x.max_length() for x in self.entries.values()), default=0)

    def __repr__(self):
        return f"GroupRingMatrix({self.rows}x{self.cols}, {len(self.entries)} nonzero)"

    def to_json(self):
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [
                {"i": i, "j": j, "element": x.to_json()} for (i, j), x in sorted(self.entries.items())
            ],
        }

    @classmethod
    def from_json(cls, group, data):
        entries = {(e["i"], e["j"]): GroupRingElement.from_json(group, e["element"]) for e in data["entries"]}
        return cls(group, data["rows"], data["cols"], entries)


def mat_mul(A, B, cap=None):
    """Composition ``A o B`` of module maps (``B`` applied first)."""
    if A.cols != B.rows:
        raise DimensionMismatch(f"cannot compose {A.shape} after {B.shape}")
    by_row = {}
    for (i, j), x in A.entries.items():
        by_row.setdefault(j, []).append((i, x))
    acc = {}
    for (j, k), y in B.entries.items():
        for i, x in by_row.get(j, ()):
            term = mul(y, x, cap)
            if (i, k) in acc:
                acc[(i, k)] = acc[(i, k)] + term
            else:
                acc[(i, k)] = term
    return GroupRingMatrix(A.group, A.rows, B.cols, acc)


def mat_star(A):
    return GroupRingMatrix(A.group, A.cols, A.rows, {(j, i): x.star() for (i, j), x in A.entries.items()})


def as_matrix(S):
    """Promote a group-ring element to a 1x1 matrix."""
    if isinstance(S, GroupRingMatrix):
        return S
    return GroupRingMatrix(S.group, 1, 1, {(0, 0): S})
