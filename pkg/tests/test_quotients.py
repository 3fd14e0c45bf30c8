from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from l2h.complexes import integral_homology
from l2h.errors import RelatorViolation
from l2h.groups import free_group
from l2h.quotients import (
    FiniteQuotient,
    betti_numbers,
    compose,
    diagonal_cyclic,
    induce,
    inverse_perm,
    luck_estimate,
    nested_chain,
    quotient_library,
    regular_quotient,
)

from conftest import load


@pytest.mark.parametrize("N", [2, 4, 8, 16, 32])
def test_wedge_of_circles_estimates(N, corpus):
    _, g, C = corpus["f2"]
    q = diagonal_cyclic(g, N)
    assert luck_estimate(C, q, 0) == Fraction(1, N)
    assert luck_estimate(C, q, 1) == Fraction(N + 1, N)


@pytest.mark.parametrize("name", ["circle", "f2", "torus", "rp2", "f2xf2", "f2cubed"])
def test_trivial_quotient_is_integral_complex(name, corpus):
    _, g, C = corpus[name]
    q = FiniteQuotient(g, {x: (0,) for x in g.gens}, "trivial", "1")
    F = induce(C, q, "permutation")
    rational = [free for free, _ in integral_homology(C)]
    assert betti_numbers(F) == rational


@pytest.mark.parametrize("name", ["circle", "f2", "torus", "f2xf2", "f2cubed"])
def test_euler_characteristic_scales(name, corpus):
    _, g, C = corpus[name]
    for q in quotient_library(g, 2):
        F = induce(C, q, "regular")
        assert F.check()
        assert F.euler_characteristic() == C.euler_characteristic() * q.order
        assert sum((-1) ** k * b for k, b in enumerate(betti_numbers(F))) == F.euler_characteristic()


def test_projective_plane_regular(corpus):
    _, g, C = corpus["rp2"]
    F = induce(C, regular_quotient(g), "regular")
    # chi * |Q| = 2, and the double cover is the sphere
    assert betti_numbers(F) == [1, 0, 1]


def test_relator_violation():
    _, g = load("torus")
    with pytest.raises(RelatorViolation):
        FiniteQuotient(g, {0: (1, 2, 0), 1: (1, 0, 2)})


def test_perm_json_round_trip():
    _, g = load("f2")
    q = quotient_library(g, 3)[-1]
    again = FiniteQuotient.from_json(g, q.to_json())
    assert again.images == q.images
    assert q.to_json()["transitive"]


def test_library_is_deterministic():
    _, g = load("f2")
    a = [q.to_json() for q in quotient_library(g, 3, seed=7)]
    b = [q.to_json() for q in quotient_library(g, 3, seed=7)]
    assert a == b


def test_nested_chain_orders():
    _, g = load("f2cubed")
    chain = nested_chain(quotient_library(g, 4))
    assert [q.order for q in chain] == [2, 4, 8, 16]


perms = st.permutations(list(range(5))).map(tuple)


@given(perms, perms, perms)
def test_right_action_is_a_homomorphism(p, q, r):
    assert compose(compose(p, q), r) == compose(p, compose(q, r))
    assert compose(p, inverse_perm(p)) == tuple(range(5))


@settings(max_examples=20, deadline=None)
@given(st.lists(st.sampled_from([1, -1, 2, -2]), max_size=6), perms, perms)
def test_word_perm_respects_normal_forms(w, p, q):
    F = free_group(2)
    Q = FiniteQuotient(F, {0: p, 1: q})
    assert Q.evaluate(w) == Q.word_perm(F.normalize(w))


def _invariant_betti(F, n, shift):
    """Betti numbers of the subcomplex fixed by p -> p + shift (mod n) in every block."""
    from l2h.linalg import sparse_rank

    def orbits(dim):
        reps = [p for p in range(n) if p < (p + shift) % n or shift % n == 0]
        reps = sorted({min(p, (p + shift) % n) for p in range(n)})
        return [(blk, p) for blk in range(dim // n) for p in reps]

    bases = [orbits(d) for d in F.dims]
    ranks = [0]
    for k in range(1, len(F.dims)):
        rows = {(blk * n + p): r for r, (blk, p) in enumerate(bases[k - 1])}
        ent = {}
        for c, (blk, p) in enumerate(bases[k]):
            cols = {blk * n + p, blk * n + (p + shift) % n}
            for (i, j), v in F.boundaries[k].items():
                if j in cols and i in rows:
                    ent[(rows[i], c)] = ent.get((rows[i], c), 0) + v
        ranks.append(sparse_rank(ent, len(bases[k - 1]), len(bases[k])))
    ranks.append(0)
    return [len(bases[k]) - ranks[k] - ranks[k + 1] for k in range(len(F.dims))]


@pytest.mark.parametrize("name", ["f2", "torus", "f2xf2"])
def test_composite_quotient_through_invariants(name, corpus):
    # Z/4 -> Z/2: invariants of the Z/4 cover under the kernel {0, 2} give the Z/2 cover
    _, g, C = corpus[name]
    F4 = induce(C, diagonal_cyclic(g, 4), "regular")
    F2_ = induce(C, diagonal_cyclic(g, 2), "regular")
    assert _invariant_betti(F4, 4, 2) == betti_numbers(F2_)
