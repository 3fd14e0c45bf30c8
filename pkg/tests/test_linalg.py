from fractions import Fraction

import sympy
from hypothesis import given, settings, strategies as st

from l2h.linalg import homology_from_boundaries, kernel, mat_vec, rank, smith_normal_form, sparse_rank

small = st.integers(min_value=-4, max_value=4)
matrices = st.integers(1, 6).flatmap(
    lambda m: st.integers(1, 6).flatmap(lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=m, max_size=m))
)


@given(matrices)
def test_rank_matches_sympy(M):
    assert rank(M) == sympy.Matrix(M).rank()


@given(matrices)
def test_kernel_is_a_basis(M):
    n = len(M[0])
    K = kernel(M, n)
    assert len(K) == n - rank(M)
    for v in K:
        assert all(x == 0 for x in mat_vec(M, v))
    if K:
        assert rank(K) == len(K)


@settings(max_examples=60)
@given(matrices)
def test_smith_matches_sympy(M):
    from sympy.matrices.normalforms import smith_normal_form as snf

    S = snf(sympy.Matrix(M), domain=sympy.ZZ)
    ref = [abs(int(S[i, i])) for i in range(min(S.shape)) if S[i, i] != 0]
    assert smith_normal_form(M) == sorted(ref)


def test_smith_example():
    assert smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]) == [2, 6, 12]


def test_rational_rank_and_sparse():
    assert rank([[Fraction(1, 2), 1], [1, 2]]) == 1
    assert sparse_rank({(0, 0): 1, (5, 7): 3}, 10, 10) == 2
    assert sparse_rank({}, 3, 3) == 0


def test_homology_of_rp2_cells():
    # 1 -0-> 1 -2-> 1
    H = homology_from_boundaries([1, 1, 1], [None, [[0]], [[2]]])
    assert H == [(1, []), (0, [2]), (0, [])]
