import pytest

from l2h.errors import BallTooLarge, InvalidGroupTable, NonConfluentRewriting, UnsupportedGroup
from l2h.groups import (
    DirectProduct,
    FiniteGroup,
    FreeGroup,
    RewritingGroup,
    ball_within,
    cyclic_group,
    descriptor_from_json,
    descriptor_to_json,
    enumerate_ball,
    free_ball_size,
    free_group,
    spheres,
)

from conftest import from_text, load


def test_free_reduction_and_inverse():
    F = free_group(2)
    w = F.normalize((1, 2, -2, -1, 1))
    assert w == (1,)
    assert F.multiply((1, 2), F.invert((1, 2))) == ()
    assert F.length((1, -2)) == 2


@pytest.mark.parametrize("n,R", [(1, 5), (2, 4), (3, 3)])
def test_free_ball_sizes(n, R):
    assert len(enumerate_ball(free_group(n), R)) == free_ball_size(n, R)


def test_sphere_sizes_of_f2():
    assert [len(s) for s in spheres(free_group(2), 4)] == [1, 4, 12, 36, 108]


def test_ball_cap():
    with pytest.raises(BallTooLarge):
        enumerate_ball(free_group(2), 10, cap=1000)
    R, words = ball_within(free_group(2), 50, 200)
    assert R == 4 and len(words) == 161


def test_infer_corpus_shapes():
    assert isinstance(load("circle")[1], FreeGroup)
    assert isinstance(load("f2")[1], FreeGroup)
    g = load("f2cubed")[1]
    assert isinstance(g, DirectProduct) and len(g.factors) == 3
    assert all(isinstance(f, FreeGroup) and f.rank == 2 for f in g.factors)
    rp2 = load("rp2")[1]
    assert isinstance(rp2, FiniteGroup) and rp2.order() == 2


def test_direct_product_normal_forms():
    g = load("f2xf2")[1]
    # a1 a2 a1^-1 a2^-1 is trivial, a1 b1 a1^-1 b1^-1 is not
    assert g.is_identity(g.normalize((1, 3, -1, -3)))
    assert not g.is_identity(g.normalize((1, 2, -1, -2)))
    u = g.normalize((3, 1))
    assert u == g.multiply(g.normalize((1,)), g.normalize((3,)))
    assert g.factor_support(u) == [0, 1]


def test_killed_generator_rewriting():
    _, g = from_text('group "x" { generators a, b; relators b; }')
    assert isinstance(g, RewritingGroup)
    assert g.normalize((2, 1, -2, 2)) == (1,)


def test_rewriting_rules_must_decrease():
    with pytest.raises(NonConfluentRewriting):
        RewritingGroup(("a",), (0,), [((1,), (1, 1))])


def test_bad_tables():
    with pytest.raises(InvalidGroupTable):
        FiniteGroup(("a",), (0,), [[0, 1], [1, 1]], {0: 1})
    with pytest.raises(InvalidGroupTable):
        FiniteGroup(("a",), (0,), [[0, 1], [1, 0]], {0: 0})


def test_cyclic_group_words():
    g = cyclic_group(("a",), 0, 5)
    assert g.normalize((1,) * 7) == g.normalize((1, 1))
    assert len(enumerate_ball(g, 10)) == 5


def test_unsupported():
    with pytest.raises(UnsupportedGroup):
        from_text('group "bs" { generators a, b; relators b a b^-1 a^-2; }')


@pytest.mark.parametrize("name", ["circle", "f2", "torus", "rp2", "f2cubed"])
def test_descriptor_json(name):
    g = load(name)[1]
    assert descriptor_from_json(descriptor_to_json(g)) == g
