"""Group descriptors with decidable word arithmetic.

A word in normal form is a tuple of signed-integer letters (see
:mod:`l2h.presentation`); for a direct product it is a tuple holding one
such tuple per factor.  Letters always use the *global* generator index of
the presentation, so a factor of a product owns a subset of the indices.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass
from itertools import product as iproduct

from .errors import (
    BallTooLarge,
    InvalidGroupTable,
    NonConfluentRewriting,
    UnknownGenerator,
    UnsupportedGroup,
)
from .presentation import Presentation, format_letters, invert_letters

DEFAULT_BALL_CAP = 2_000_000


def letter_key(x):
    """Order letters as a < a^-1 < b < b^-1 < ..."""
    return 2 * (abs(x) - 1) + (x < 0)


def shortlex_key(letters):
    return (len(letters), tuple(letter_key(x) for x in letters))


def free_reduce(letters):
    out = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def _free_concat(u, v):
    k = 0
    n = min(len(u), len(v))
    while k < n and u[len(u) - 1 - k] == -v[k]:
        k += 1
    if k == 0:
        return u + v
    return u[: len(u) - k] + v[k:]


@dataclass(frozen=True)
class RDProfile:
    """Rapid-decay certificate attached to a group.

    ``kind`` is ``"free"`` (Haagerup weights k+1 per sphere),
    ``"product_of_free"`` (per-factor weights multiplied; validated only
    empirically) or ``"none"``.
    """

    kind: str = "none"

    @property
    def validity(self):
        return {"free": ("free",), "product_of_free": ("direct_product_of_free",), "none": ()}[self.kind]

    @property
    def empirical(self):
        return self.kind == "product_of_free"


class GroupDescriptor:
    kind = "abstract"

    def __init__(self, names, gens):
        self.names = tuple(names)
        self.gens = tuple(sorted(gens))
        self._gen_set = frozenset(self.gens)

    # -- word interface -------------------------------------------------
    identity = ()

    def normalize(self, letters):
        raise NotImplementedError

    def multiply(self, u, v):
        raise NotImplementedError

    def invert(self, u):
        raise NotImplementedError

    def length(self, u):
        raise NotImplementedError

    def letters(self, u):
        """Flat letter sequence spelling the normal form ``u``."""
        return u

    def is_identity(self, u):
        return u == self.identity

    def sort_key(self, u):
        flat = self.letters(u)
        return (self.length(u), tuple(letter_key(x) for x in flat))

    def format(self, u):
        return format_letters(self.letters(u), self.names)

    def parse(self, text):
        from .presentation import parse_word

        return self.normalize(parse_word(text, self.names))

    def alphabet(self):
        out = []
        for g in self.gens:
            out.append(g + 1)
            out.append(-(g + 1))
        return tuple(out)

    def generator(self, i):
        return self.normalize((i + 1,))

    def _check_letters(self, letters):
        for x in letters:
            if (abs(x) - 1) not in self._gen_set:
                raise UnknownGenerator(f"letter {x} is not a generator of {self.describe()}")

    # -- structure ------------------------------------------------------
    @property
    def rd_profile(self):
        return RDProfile("none")

    @property
    def is_finite(self):
        return False

    def order(self):
        return None

    def describe(self):
        return self.kind

    def to_json(self):
        raise NotImplementedError

    def _key(self):
        return (self.kind, self.names, self.gens)

    def __eq__(self, other):
        return isinstance(other, GroupDescriptor) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"<{self.describe()}>"


class FreeGroup(GroupDescriptor):
    kind = "free"

    @property
    def rank(self):
        return len(self.gens)

    def normalize(self, letters):
        letters = tuple(letters)
        self._check_letters(letters)
        return free_reduce(letters)

    def multiply(self, u, v):
        return _free_concat(u, v)

    def invert(self, u):
        return invert_letters(u)

    def length(self, u):
        return len(u)

    @property
    def rd_profile(self):
        return RDProfile("free")

    def describe(self):
        return f"Free({self.rank})"

    def to_json(self):
        return {"type": "free", "generators": [self.names[g] for g in self.gens]}


def _shortlex_less(a, b):
    return shortlex_key(a) < shortlex_key(b)


class RewritingGroup(GroupDescriptor):
    """Group given by a terminating, locally confluent rewriting system.

    Free cancellation ``x x^-1 -> e`` is always included.  Every supplied
    rule must strictly decrease the shortlex order; local confluence is
    verified on all critical pairs at construction.
    """

    kind = "rewriting"

    def __init__(self, names, gens, rules, presentation=None):
        super().__init__(names, gens)
        clean = []
        for lhs, rhs in rules:
            lhs, rhs = tuple(lhs), tuple(rhs)
            self._check_letters(lhs + rhs)
            if not _shortlex_less(rhs, lhs):
                raise NonConfluentRewriting(
                    f"rule {format_letters(lhs, names)} -> {format_letters(rhs, names)} "
                    "does not decrease the shortlex order"
                )
            clean.append((lhs, rhs))
        self.rules = tuple(clean)
        self.presentation = presentation
        allrules = list(self.rules)
        for x in self.alphabet():
            allrules.append(((x, -x), ()))
        self._all_rules = allrules
        self._by_last = {}
        for lhs, rhs in allrules:
            self._by_last.setdefault(lhs[-1], []).append((lhs, rhs))
        self._check_confluence()

    def _reduce(self, letters):
        out = []
        todo = list(reversed(letters))
        by_last = self._by_last
        while todo:
            x = todo.pop()
            out.append(x)
            for lhs, rhs in by_last.get(x, ()):
                n = len(lhs)
                if len(out) >= n and tuple(out[-n:]) == lhs:
                    del out[-n:]
                    todo.extend(reversed(rhs))
                    break
        return tuple(out)

    def _check_confluence(self):
        rules = self._all_rules
        for i, (l1, r1) in enumerate(rules):
            for j, (l2, r2) in enumerate(rules):
                pairs = []
                for k in range(1, min(len(l1), len(l2))):
                    if l1[-k:] == l2[:k]:
                        pairs.append((r1 + l2[k:], l1[:-k] + r2))
                if i != j and len(l2) <= len(l1):
                    for p in range(len(l1) - len(l2) + 1):
                        if l1[p : p + len(l2)] == l2:
                            pairs.append((r1, l1[:p] + r2 + l1[p + len(l2) :]))
                for a, b in pairs:
                    if self._reduce(a) != self._reduce(b):
                        raise NonConfluentRewriting(
                            "critical pair does not resolve: "
                            f"{format_letters(self._reduce(a), self.names)} vs "
                            f"{format_letters(self._reduce(b), self.names)}"
                        )

    def normalize(self, letters):
        letters = tuple(letters)
        self._check_letters(letters)
        return self._reduce(letters)

    def multiply(self, u, v):
        return self._reduce(u + v)

    def invert(self, u):
        return self._reduce(invert_letters(u))

    def length(self, u):
        return len(u)

    def describe(self):
        return f"Rewriting({len(self.gens)} gens, {len(self.rules)} rules)"

    def _key(self):
        return super()._key() + (self.rules,)

    def to_json(self):
        return {
            "type": "rewriting",
            "generators": [self.names[g] for g in self.gens],
            "rules": [[format_letters(l, self.names), format_letters(r, self.names)] for l, r in self.rules],
        }


class FiniteGroup(GroupDescriptor):
    """Finite group given by a multiplication table and generator images.

    Normal forms are the shortlex-least words, so word length is the word
    metric of the generating set.
    """

    kind = "finite_table"

    def __init__(self, names, gens, table, images):
        super().__init__(names, gens)
        table = tuple(tuple(int(x) for x in row) for row in table)
        n = len(table)
        if n == 0 or any(len(row) != n for row in table):
            raise InvalidGroupTable("table must be square and nonempty")
        if any(not 0 <= x < n for row in table for x in row):
            raise InvalidGroupTable("table entries out of range")
        ident = [e for e in range(n) if all(table[e][x] == x and table[x][e] == x for x in range(n))]
        if not ident:
            raise InvalidGroupTable("no identity element")
        e = ident[0]
        inv = [None] * n
        for x in range(n):
            for y in range(n):
                if table[x][y] == e:
                    inv[x] = y
                    break
            if inv[x] is None or table[inv[x]][x] != e:
                raise InvalidGroupTable(f"element {x} has no two-sided inverse")
        for x in range(n):
            for y in range(n):
                xy = table[x][y]
                for z in range(n):
                    if table[xy][z] != table[x][table[y][z]]:
                        raise InvalidGroupTable(f"table is not associative at ({x},{y},{z})")
        self.table = table
        self.images = {int(g): int(v) for g, v in dict(images).items()}
        if set(self.images) != set(self.gens):
            raise InvalidGroupTable("every generator needs exactly one image")
        self.e = e
        self.inv = tuple(inv)
        self._img = {}
        for g, v in self.images.items():
            self._img[g + 1] = v
            self._img[-(g + 1)] = inv[v]
        # shortlex-least representatives by breadth-first search
        rep = {e: ()}
        queue = deque([e])
        alphabet = self.alphabet()
        while queue:
            x = queue.popleft()
            for a in alphabet:
                y = table[x][self._img[a]]
                if y not in rep:
                    rep[y] = rep[x] + (a,)
                    queue.append(y)
        if len(rep) != n:
            raise InvalidGroupTable("generator images do not generate the table's group")
        self.rep = rep
        self._elt = {w: x for x, w in rep.items()}

    def evaluate(self, letters):
        x = self.e
        img = self._img
        for a in letters:
            x = self.table[x][img[a]]
        return x

    def normalize(self, letters):
        letters = tuple(letters)
        self._check_letters(letters)
        return self.rep[self.evaluate(letters)]

    def element(self, u):
        return self._elt[u]

    def multiply(self, u, v):
        return self.rep[self.table[self._elt[u]][self._elt[v]]]

    def invert(self, u):
        return self.rep[self.inv[self._elt[u]]]

    def length(self, u):
        return len(u)

    @property
    def is_finite(self):
        return True

    def order(self):
        return len(self.table)

    def describe(self):
        return f"Finite(order {len(self.table)})"

    def _key(self):
        return super()._key() + (self.table, tuple(sorted(self.images.items())))

    def to_json(self):
        return {
            "type": "finite_table",
            "generators": [self.names[g] for g in self.gens],
            "table": [list(r) for r in self.table],
            "images": {self.names[g]: v for g, v in sorted(self.images.items())},
        }


def cyclic_group(names, gen, m):
    table = [[(i + j) % m for j in range(m)] for i in range(m)]
    return FiniteGroup(names, (gen,), table, {gen: 1 % m})


class DirectProduct(GroupDescriptor):
    kind = "direct_product"

    def __init__(self, factors):
        factors = tuple(factors)
        if len(factors) < 2:
            raise UnsupportedGroup("a direct product needs at least two factors")
        names = factors[0].names
        if any(f.names != names for f in factors):
            raise UnsupportedGroup("factors must share the presentation's generator names")
        owner = {}
        for k, f in enumerate(factors):
            for g in f.gens:
                if g in owner:
                    raise UnsupportedGroup(f"generator {names[g]} belongs to two factors")
                owner[g] = k
        super().__init__(names, owner)
        self.factors = factors
        self._owner = owner
        self.identity = tuple(f.identity for f in factors)

    def normalize(self, letters):
        buckets = [[] for _ in self.factors]
        for x in letters:
            k = self._owner.get(abs(x) - 1)
            if k is None:
                raise UnknownGenerator(f"letter {x} is not a generator of {self.describe()}")
            buckets[k].append(x)
        return tuple(f.normalize(b) for f, b in zip(self.factors, buckets))

    def multiply(self, u, v):
        return tuple(f.multiply(a, b) for f, a, b in zip(self.factors, u, v))

    def invert(self, u):
        return tuple(f.invert(a) for f, a in zip(self.factors, u))

    def length(self, u):
        return sum(f.length(a) for f, a in zip(self.factors, u))

    def letters(self, u):
        out = ()
        for f, a in zip(self.factors, u):
            out += f.letters(a)
        return out

    def embed(self, k, w):
        """Word of factor ``k`` viewed in the product."""
        return tuple(w if i == k else f.identity for i, f in enumerate(self.factors))

    def factor_support(self, u):
        return [k for k, (f, a) in enumerate(zip(self.factors, u)) if a != f.identity]

    @property
    def is_finite(self):
        return all(f.is_finite for f in self.factors)

    def order(self):
        if not self.is_finite:
            return None
        out = 1
        for f in self.factors:
            out *= f.order()
        return out

    @property
    def rd_profile(self):
        if all(isinstance(f, FreeGroup) for f in self.factors):
            return RDProfile("product_of_free")
        return RDProfile("none")

    def describe(self):
        return " x ".join(f.describe() for f in self.factors)

    def _key(self):
        return ("direct_product", tuple(f._key() for f in self.factors))

    def to_json(self):
        return {"type": "direct_product", "factors": [f.to_json() for f in self.factors]}


def descriptor_to_json(g):
    data = g.to_json()
    data = {"names": list(g.names), **data, "rd_profile": g.rd_profile.kind}
    return data


def descriptor_from_json(data, names=None):
    names = tuple(data.get("names", names) or ())
    kind = data["type"]
    index = {n: i for i, n in enumerate(names)}
    if kind == "direct_product":
        return DirectProduct([descriptor_from_json(f, names) for f in data["factors"]])
    gens = [index[n] for n in data["generators"]]
    if kind == "free":
        return FreeGroup(names, gens)
    if kind == "finite_table":
        images = {index[n]: v for n, v in data["images"].items()}
        return FiniteGroup(names, gens, data["table"], images)
    if kind == "rewriting":
        from .presentation import parse_word

        rules = [(parse_word(l, names), parse_word(r, names)) for l, r in data["rules"]]
        return RewritingGroup(names, gens, rules)
    raise UnsupportedGroup(f"unknown descriptor type {kind!r}")


# -- inference from presentations ------------------------------------------


def _commutator_pairs(relators):
    pairs = set()
    for r in relators:
        if len(r) == 4 and r[2] == -r[0] and r[3] == -r[1] and abs(r[0]) != abs(r[1]):
            x, y = abs(r[0]) - 1, abs(r[1]) - 1
            pairs.add(frozenset((x, y)))
    return pairs


def _is_commutator_of(r, pairs):
    return len(r) == 4 and r[2] == -r[0] and r[3] == -r[1] and frozenset((abs(r[0]) - 1, abs(r[1]) - 1)) in pairs


def _infer_block(names, gens, relators):
    relators = [free_reduce(r) for r in relators]
    relators = [r for r in relators if r]
    if not relators:
        return FreeGroup(names, gens)
    if len(gens) == 1:
        g = gens[0]
        if all(all(abs(x) == g + 1 for x in r) for r in relators):
            from math import gcd

            m = 0
            for r in relators:
                m = gcd(m, abs(sum(1 if x > 0 else -1 for x in r)))
            if m == 0:
                return FreeGroup(names, gens)
            return cyclic_group(names, g, m)
    killed = set()
    for r in relators:
        if len(r) == 1:
            killed.add(abs(r[0]) - 1)
    if killed:
        reduced = [free_reduce([x for x in r if abs(x) - 1 not in killed]) for r in relators]
        if all(not r for r in reduced):
            rules = []
            for g in sorted(killed):
                rules.append(((g + 1,), ()))
                rules.append(((-(g + 1),), ()))
            return RewritingGroup(names, gens, rules)
    raise UnsupportedGroup(
        "no built-in normal form for this presentation; supply a confluent rewriting system"
    )


def infer_descriptor(P: Presentation) -> GroupDescriptor:
    """Choose a descriptor with decidable word problem for ``P``.

    Recognised shapes: free groups (possibly with freely trivial relators),
    direct products detected from full sets of cross commutators, cyclic
    groups ``<a | a^m>``, and generators killed by one-letter relators.
    """
    names = P.generators
    gens = list(range(P.ngens))
    pairs = _commutator_pairs(P.relators)
    # blocks are connected components of the "does not commute" graph
    parent = list(range(P.ngens))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for x in gens:
        for y in gens:
            if x < y and frozenset((x, y)) not in pairs:
                parent[find(x)] = find(y)
    blocks = {}
    for x in gens:
        blocks.setdefault(find(x), []).append(x)
    blocks = sorted(blocks.values())
    if len(blocks) >= 2:
        owner = {g: k for k, b in enumerate(blocks) for g in b}
        per_block = [[] for _ in blocks]
        for r in P.relators:
            if _is_commutator_of(r, pairs) and owner[abs(r[0]) - 1] != owner[abs(r[1]) - 1]:
                continue
            ks = {owner[abs(x) - 1] for x in r}
            if len(ks) > 1:
                raise UnsupportedGroup("relator mixes factors of an apparent direct product")
            if ks:
                per_block[ks.pop()].append(r)
        return DirectProduct([_infer_block(names, b, rs) for b, rs in zip(blocks, per_block)])
    return _infer_block(names, gens, P.relators)


def free_group(n, names=None):
    if names is None:
        names = "abcdefghijklmnopqrstuvwxyz"[:n] if n <= 26 else [f"x{i}" for i in range(n)]
    return FreeGroup(tuple(names), range(n))


# -- balls -------------------------------------------------------------------


def ball_cap():
    return int(os.environ.get("L2H_BALL_CAP", DEFAULT_BALL_CAP))


def enumerate_ball(g: GroupDescriptor, R: int, cap=None):
    """All elements of word length <= R, by level then shortlex."""
    if R < 0:
        raise ValueError("radius must be nonnegative")
    cap = ball_cap() if cap is None else cap
    return [w for level in spheres(g, R, cap) for w in level]


def spheres(g: GroupDescriptor, R: int, cap=None):
    cap = ball_cap() if cap is None else cap
    alphabet = [g.normalize((a,)) for a in g.alphabet()]
    levels = [[g.identity]]
    seen = {g.identity}
    total = 1
    frontier = [g.identity]
    for _ in range(R):
        nxt = set()
        for w in frontier:
            for a in alphabet:
                v = g.multiply(w, a)
                if v not in seen:
                    nxt.add(v)
        if not nxt:
            break
        total += len(nxt)
        if total > cap:
            raise BallTooLarge(f"ball of radius {R} in {g.describe()} exceeds {cap} elements")
        seen.update(nxt)
        frontier = sorted(nxt, key=g.sort_key)
        levels.append(frontier)
    return levels


def free_ball_size(n, R):
    if n == 0:
        return 1
    if n == 1:
        return 2 * R + 1
    return 1 + 2 * n * ((2 * n - 1) ** R - 1) // (2 * n - 2)


def product_words(g: DirectProduct, per_factor):
    """Cartesian product of per-factor word lists as product-group words."""
    return [tuple(ws) for ws in iproduct(*per_factor)]


def ball_within(g: GroupDescriptor, max_radius: int, cap: int):
    """Largest ball of radius <= max_radius with at most ``cap`` elements.

    Returns ``(R, words)``; the ball of radius 0 is always returned.
    """
    alphabet = [g.normalize((a,)) for a in g.alphabet()]
    words = [g.identity]
    seen = {g.identity}
    frontier = [g.identity]
    R = 0
    while R < max_radius:
        nxt = set()
        for w in frontier:
            for a in alphabet:
                v = g.multiply(w, a)
                if v not in seen:
                    nxt.add(v)
        if not nxt or len(words) + len(nxt) > cap:
            if not nxt:
                R = max_radius
            break
        seen.update(nxt)
        frontier = sorted(nxt, key=g.sort_key)
        words.extend(frontier)
        R += 1
    return R, words
