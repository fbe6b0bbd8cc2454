from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from dgquot.exact import (
    GF,
    QQ,
    ContractError,
    ExactMatrix,
    IndexScheme,
    column_space_basis,
    inverse,
    rank_kernel,
    rank_of,
    solve_linear,
    tensor_hom_dims,
)

int_matrices = st.integers(1, 6).flatmap(
    lambda r: st.integers(1, 6).flatmap(lambda c: st.lists(st.lists(st.integers(-4, 4), min_size=c, max_size=c), min_size=r, max_size=r))
)


def test_rank_kernel_identity():
    r, k = rank_kernel(ExactMatrix.identity(2))
    assert r == 2 and k.cols == 0


def test_rank_kernel_zero():
    r, k = rank_kernel(ExactMatrix.zeros(3, 4))
    assert r == 0 and k.cols == 4 and rank_of(k) == 4


def test_rank_kernel_hand_example():
    m = ExactMatrix.from_dense([[1, 2, 3], [2, 4, 6]])
    r, k = rank_kernel(m)
    assert (r, k.cols) == (1, 2)
    assert (m @ k).is_zero()


def test_solve_linear_examples():
    assert solve_linear(ExactMatrix.identity(2), [5, 7]) == [5, 7]
    assert solve_linear(ExactMatrix.zeros(1, 1), [1]) is None
    assert solve_linear(ExactMatrix.from_dense([[2, 0], [0, 3]]), [1, 1]) == [Fraction(1, 2), Fraction(1, 3)]
    with pytest.raises(ContractError):
        solve_linear(ExactMatrix.identity(2), [1])


def test_tensor_hom_dims():
    assert tensor_hom_dims([2, 1], 2) == 4
    assert tensor_hom_dims([], 3) == 3
    assert tensor_hom_dims([2, 2], 3) == 12


def test_fields():
    assert QQ.convert("6/4") == Fraction(3, 2)
    f5 = GF(5)
    assert f5.convert(-1) == 4 and f5.inv(2) == 3
    assert f5.convert(Fraction(1, 2)) == 3
    with pytest.raises(ContractError):
        GF(6)


def test_no_stored_zeros():
    m = ExactMatrix.from_triplets(2, 2, [(0, 0, 1), (0, 0, -1), (1, 1, 0)])
    assert m.nnz == 0 and m.is_zero()


@settings(max_examples=60, deadline=None)
@given(int_matrices)
def test_rank_matches_sympy(rows):
    m = ExactMatrix.from_dense(rows)
    r, k = rank_kernel(m)
    assert r == sympy.Matrix(rows).rank()
    assert r + k.cols == m.cols
    assert (m @ k).is_zero() and rank_of(k) == k.cols


@settings(max_examples=60, deadline=None)
@given(int_matrices)
def test_rank_over_prime_fields_never_exceeds_rational(rows):
    r = rank_of(ExactMatrix.from_dense(rows))
    for q in (2, 3, 5, 101):
        assert rank_of(ExactMatrix.from_dense(rows, GF(q))) <= r


@settings(max_examples=40, deadline=None)
@given(int_matrices, st.sampled_from([None, 2, 3, 7]))
def test_solve_via_column_space(rows, q):
    fld = QQ if q is None else GF(q)
    m = ExactMatrix.from_dense(rows, fld)
    x = [fld.convert(v) for v in range(1, m.cols + 1)]
    b = m.apply(x)
    sol = solve_linear(m, b)
    assert sol is not None and m.apply(sol) == b
    basis = column_space_basis(m)
    assert basis.cols == rank_of(m)


def test_inverse():
    m = ExactMatrix.from_dense([[2, 1], [1, 1]])
    assert m @ inverse(m) == ExactMatrix.identity(2)
    with pytest.raises(ContractError):
        inverse(ExactMatrix.zeros(2, 2))


def test_index_scheme_round_trip():
    blocks = {("phi", 1, 2, (1, 1)): (2, 2, 1), ("psi", 1, 1, (1,)): (2, 1)}
    sch = IndexScheme(blocks)
    assert len(sch) == 6
    for i in range(len(sch)):
        assert sch.index(sch.label(i)) == i
    # enumeration order does not depend on insertion order
    assert list(sch.labels()) == list(IndexScheme(dict(reversed(list(blocks.items())))).labels())


def test_deterministic_representation():
    rows = np.arange(12).reshape(3, 4) % 5
    assert ExactMatrix.from_dense(rows).entries == ExactMatrix.from_dense(rows.tolist()).entries
