import pytest

from l2h.complexes import (
    attach_cells,
    describe_abelian,
    fox_derivative,
    fox_identity_holds,
    integral_homology,
    laplacian,
    presentation_complex,
    wedge_spheres,
    CWChainComplex,
)
from l2h.errors import DegreeOutOfRange, NotACycle, RelatorNotTrivialInGroup
from l2h.groups import free_group
from l2h.grouprings import GroupRingElement

from conftest import CORPUS, from_text, load

EXPECTED_H = {
    "circle": ["Z", "Z"],
    "f2": ["Z", "Z^2"],
    "torus": ["Z", "Z^2", "Z"],
    "rp2": ["Z", "Z/2", "0"],
    "f2xf2": ["Z", "Z^4", "Z^4"],
    "f2cubed": ["Z", "Z^6", "Z^12"],
}


@pytest.mark.parametrize("name", CORPUS)
def test_fox_identity(name, corpus):
    P, g, C = corpus[name]
    for r in P.relators:
        assert fox_identity_holds(r, g, P.ngens)
    C.check()


@pytest.mark.parametrize("name", CORPUS)
def test_integral_homology_of_corpus(name, corpus):
    _, _, C = corpus[name]
    assert [describe_abelian(*h) for h in integral_homology(C)] == EXPECTED_H[name]


def test_fox_derivative_of_commutator():
    F = free_group(2)
    d = fox_derivative((1, 2, -1, -2), 0, F)
    # d[a,b]/da = 1 - a b a^-1
    assert d == 1 - GroupRingElement.word(F, (1, 2, -1))


def test_relator_must_hold():
    P, _ = from_text('group "x" { generators a, b; relators [a,b]; }')
    with pytest.raises(RelatorNotTrivialInGroup):
        presentation_complex(P, free_group(2))


def test_laplacians_self_adjoint_and_ranges(corpus):
    _, _, C = corpus["torus"]
    for k in range(3):
        D = laplacian(C, k)
        assert D.is_self_adjoint()
    with pytest.raises(DegreeOutOfRange):
        laplacian(C, 3)


def test_wedge_and_attach(corpus):
    _, g, C = corpus["rp2"]
    W = wedge_spheres(C, 2)
    assert W.ranks == [1, 1, 3]
    assert describe_abelian(*integral_homology(W)[2]) == "Z^2"
    a = GroupRingElement.word(g, g.normalize((1,)))
    X = attach_cells(C, 3, [[1 - a]])
    assert X.ranks == [1, 1, 1, 1]
    with pytest.raises(NotACycle):
        attach_cells(C, 3, [[1 + 0 * a]])


def test_product_complex_is_torus_like():
    P, g = load("f2cubed")
    from l2h.hopf import resolution_for

    R = resolution_for(g).complex
    assert R.ranks == [1, 6, 12, 8]
    R.check()
    # the quotient is a product of three wedges of two circles
    assert [describe_abelian(*h) for h in integral_homology(R)] == ["Z", "Z^6", "Z^12", "Z^8"]


def test_json_round_trip(corpus):
    _, _, C = corpus["f2xf2"]
    D = CWChainComplex.from_json(C.to_json())
    assert D.ranks == C.ranks
    assert all(D.boundaries[k] == C.boundaries[k] for k in range(1, 3))
