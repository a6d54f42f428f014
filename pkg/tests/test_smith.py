import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import snf_oracle
from tetgluing.complex import build_edge_orbits
from tetgluing.errors import SizeLimitExceeded
from tetgluing.homology import build_absolute_complex, build_relative_complex
from tetgluing.model import sample_uniform
from tetgluing.smith import IntegerMatrix, invariant_factors_from_diagonal, smith_normal_form


def _expected(rows):
    d = snf_oracle(rows)
    return len(d), tuple(x for x in d if x > 1)


def test_identity():
    res = smith_normal_form(IntegerMatrix.from_dense(np.eye(5, dtype=int).tolist()))
    assert res.rank == 5
    assert res.invariant_factors == ()


def test_diagonal_2_6():
    res = smith_normal_form(IntegerMatrix.from_dense([[2, 0], [0, 6]]))
    assert (res.rank, res.invariant_factors) == (2, (2, 6))


def test_diagonal_needs_normalising():
    res = smith_normal_form(IntegerMatrix.from_dense([[6, 0], [0, 4]]))
    assert res.invariant_factors == (2, 12)


def test_zero_and_empty():
    assert smith_normal_form(IntegerMatrix(3, 4)).rank == 0
    assert smith_normal_form(IntegerMatrix(0, 5)).rank == 0


def test_known_example():
    m = [[12, 6, 4, 8], [3, 9, 6, 12], [2, 16, 14, 28], [20, 10, 10, 20]]
    res = smith_normal_form(IntegerMatrix.from_dense(m))
    assert (res.rank, res.invariant_factors) == (3, (10, 30))


matrices = st.integers(1, 7).flatmap(
    lambda m: st.integers(1, 7).flatmap(
        lambda n: st.lists(
            st.lists(st.sampled_from([0, 0, 0, 1, -1, 2, -2, 3, 4, -6, 9]), min_size=n, max_size=n),
            min_size=m,
            max_size=m,
        )
    )
)


@settings(max_examples=200, deadline=None)
@given(rows=matrices)
def test_matches_dense_oracle(rows):
    res = smith_normal_form(IntegerMatrix.from_dense(rows))
    assert (res.rank, res.invariant_factors) == _expected(rows)


@settings(max_examples=50, deadline=None)
@given(rows=matrices)
def test_rank_matches_float_rank(rows):
    res = smith_normal_form(IntegerMatrix.from_dense(rows))
    assert res.rank == np.linalg.matrix_rank(np.array(rows, dtype=float))


def test_sympy_cross_check():
    sympy = pytest.importorskip("sympy")
    from sympy.matrices.normalforms import smith_normal_form as sym_snf

    rng = np.random.default_rng(3)
    for _ in range(30):
        a = rng.integers(-4, 5, size=(5, 6)) * (rng.random((5, 6)) < 0.5)
        s = sym_snf(sympy.Matrix(a.tolist()), domain=sympy.ZZ)
        diag = [abs(int(s[i, i])) for i in range(5) if s[i, i] != 0]
        res = smith_normal_form(IntegerMatrix.from_dense(a.tolist()))
        assert res.rank == len(diag)
        assert res.invariant_factors == tuple(d for d in diag if d > 1)


def test_boundary_matrix_n50_matches_oracle():
    g = sample_uniform(50, 8)
    orbits = build_edge_orbits(g)
    for cx in (build_relative_complex(g, orbits), build_absolute_complex(g, orbits)):
        d2 = cx.d[2]
        dense = d2.to_dense()
        res = smith_normal_form(d2)
        assert (res.rank, res.invariant_factors) == _expected(dense)


def test_size_cap():
    m = IntegerMatrix.from_dense(np.ones((10, 10), dtype=int).tolist())
    with pytest.raises(SizeLimitExceeded):
        smith_normal_form(m, max_nnz=99)
    assert smith_normal_form(m, max_nnz=None).rank == 1


def test_big_entries_stay_exact():
    big = 10**30
    res = smith_normal_form(IntegerMatrix.from_dense([[big, 0], [0, big * 3]]))
    assert res.invariant_factors == (big, 3 * big)


def test_invariant_factor_chain():
    assert invariant_factors_from_diagonal([4, 6, 1, 0]) == [1, 2, 12]


def test_matmul_and_equality():
    a = IntegerMatrix.from_dense([[1, 2], [0, 1]])
    b = IntegerMatrix.from_dense([[1, -2], [0, 1]])
    assert (a @ b) == IntegerMatrix.from_dense([[1, 0], [0, 1]])
    with pytest.raises(ValueError):
        a @ IntegerMatrix(3, 1)
