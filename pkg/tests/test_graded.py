from itertools import product

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from dgquot.exact import GF, QQ, ContractError, ExactMatrix
from dgquot.graded import (
    HilbertData,
    SubmodulePoint,
    build_polynomial_ring,
    check_a_regular_profile,
    check_closed,
    free_module,
    generated_submodule,
    hom_quotient_oracle,
)


def monomial_count(n, s):
    xs = sympy.symbols(f"x0:{n}")
    return sum(1 for m in sympy.itermonomials(xs, s, s))


@pytest.mark.parametrize("n,t,dims", [(2, 3, (1, 2, 3, 4)), (1, 2, (1, 1, 1)), (3, 2, (1, 3, 6))])
def test_polynomial_ring_dims(n, t, dims):
    ring = build_polynomial_ring(n, t)
    assert tuple(ring.dim(s) for s in range(t + 1)) == dims
    assert all(ring.dim(s) == monomial_count(n, s) for s in range(t + 1))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_ring_axioms(n):
    ring = build_polynomial_ring(n, 4)
    assert ring.check_associativity()
    assert ring.check_generation()
    assert free_module(ring, 2, floor=1, t_max=4).check_associativity()


def test_multiplication_is_monomial_product():
    # x * y in Q[x, y] against sympy, through the basis names
    ring = build_polynomial_ring(2, 2)
    x, y = sympy.symbols("x y")
    names = {s: [sympy.sympify(nm) for nm in ring.basis_names[s]] for s in range(3)}
    T = ring.tensor(1, 1)
    for i, j in product(range(2), repeat=2):
        col = T[:, i, j]
        got = sum(int(c) * m for c, m in zip(col, names[2]))
        assert sympy.expand(got - names[1][i] * names[1][j]) == 0


def test_generated_submodule_examples():
    i1 = build_polynomial_ring(2, 3)
    m1 = free_module(i1, 1, floor=1)
    sub = generated_submodule(ExactMatrix.from_dense([[1], [0]]), m1, (1, 3))
    assert [sub.dims()[s] for s in (1, 2, 3)] == [1, 2, 3]
    zero = generated_submodule(ExactMatrix.zeros(2, 0), m1, (1, 3))
    assert all(d == 0 for d in zero.dims().values())
    i2 = build_polynomial_ring(3, 3)
    m2 = free_module(i2, 1, floor=1)
    sub2 = generated_submodule(ExactMatrix.from_dense([[0, 0], [1, 0], [0, 1]]), m2, (1, 3))
    assert [sub2.dims()[s] for s in (1, 2, 3)] == [i2.dim(s) - 1 for s in (1, 2, 3)] == [2, 5, 9]
    with pytest.raises(ContractError):
        generated_submodule(ExactMatrix.identity(3), m1, (1, 3))


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(0, 2), min_size=3, max_size=3), st.sampled_from([2, 3]))
def test_generated_submodule_is_closed(vec, q):
    ring = build_polynomial_ring(3, 3)
    mod = free_module(ring, 1, floor=1)
    seed = ExactMatrix.from_dense([[v] for v in vec], GF(q))
    sub = generated_submodule(seed, mod, (1, 3))
    assert check_closed(sub, mod) is None


def test_closure_failure_is_located():
    ring = build_polynomial_ring(2, 2)
    mod = free_module(ring, 1, floor=1)
    sub = SubmodulePoint({1: ExactMatrix.from_dense([[1], [0]]), 2: ExactMatrix.zeros(3, 0)}, QQ)
    s, p, j = check_closed(sub, mod)
    assert (s, p, j) == (1, 1, 0)


def test_regular_profile():
    ring = build_polynomial_ring(2, 4)
    mod = free_module(ring, 1, floor=1)
    sub = generated_submodule(ExactMatrix.from_dense([[1], [0]]), mod, (1, 4))
    assert check_a_regular_profile(sub, mod, HilbertData({s: s for s in range(1, 5)}, 1))
    mod2 = free_module(ring, 1, floor=2)
    sq = generated_submodule(ExactMatrix.identity(3), mod2, (2, 3))
    assert check_a_regular_profile(sq, mod2, HilbertData({2: 3, 3: 4}, 2))
    assert not check_a_regular_profile(sq, mod2, HilbertData({2: 3, 3: 3}, 2))


def test_hilbert_bound():
    ring = build_polynomial_ring(2, 2)
    mod = free_module(ring, 1, floor=1)
    HilbertData({1: 2, 2: 3}, 1).check_against(mod)
    with pytest.raises(ContractError):
        HilbertData({1: 3, 2: 3}, 1).check_against(mod)
    with pytest.raises(ContractError):
        HilbertData({1: 2, 2: 3}, 1).check_against(mod, strict=True)


def _rank_gf2(rows):
    rows = [int("".join(str(int(v) % 2) for v in r), 2) for r in rows]
    rank = 0
    while rows:
        piv = max(rows)
        if piv == 0:
            break
        rows.remove(piv)
        top = piv.bit_length() - 1
        rows = [r ^ piv if r >> top & 1 else r for r in rows]
        rank += 1
    return rank


def _in_span(vec, cols):
    return _rank_gf2(cols + [vec]) == _rank_gf2(cols)


def test_hom_oracle_against_brute_force_gf2():
    # S = (x) in Q[x, y], window [1, 2], over GF(2). Count maps F: S -> M with
    # F(a v) - a F(v) in S, then divide by the maps landing inside S.
    x, y = sympy.symbols("x y")
    mono = {1: [x, y], 2: [x**2, x * y, y**2]}
    coords = lambda e, s: [int(sympy.Poly(e, x, y).coeff_monomial(m)) for m in mono[s]]
    S = {1: [x], 2: [x**2, x * y]}
    S_cols = {s: [coords(v, s) for v in S[s]] for s in S}
    count = 0
    for f1 in product(range(2), repeat=2):
        img1 = f1[0] * x + f1[1] * y
        for f2 in product(range(2), repeat=6):
            img2 = [sum(f2[3 * j + i] * mono[2][i] for i in range(3)) for j in range(2)]
            ok = True
            for a in mono[1]:
                av = sympy.expand(a * x)
                av_coords = coords(av, 2)
                # F_2(a x) by linearity in the S_2 basis (x^2 -> 0, xy -> 1)
                lhs = sum(c * img2[j] for j, c in enumerate([av_coords[0], av_coords[1]]))
                diff = coords(sympy.expand(lhs - a * img1), 2)
                if not _in_span(diff, S_cols[2]):
                    ok = False
                    break
            count += ok
    hom_dim = hom_quotient_oracle(
        generated_submodule(ExactMatrix.from_dense([[1], [0]], GF(2)), free_module(build_polynomial_ring(2, 2), 1, floor=1), (1, 2)),
        free_module(build_polynomial_ring(2, 2), 1, floor=1),
    )[0]
    inside = 2 ** (1 * 1 + 2 * 2)
    assert count % inside == 0
    assert count // inside == 2**hom_dim == 2


def test_hom_oracle_examples():
    r1 = build_polynomial_ring(2, 4)
    m1 = free_module(r1, 1, floor=1)
    s1 = generated_submodule(ExactMatrix.from_dense([[1], [0]]), m1, (1, 4))
    assert hom_quotient_oracle(s1, m1)[0] == 1
    r2 = build_polynomial_ring(3, 3)
    m2 = free_module(r2, 1, floor=1)
    s2 = generated_submodule(ExactMatrix.from_dense([[0, 0], [1, 0], [0, 1]]), m2, (1, 3))
    assert hom_quotient_oracle(s2, m2)[0] == 2
    full = generated_submodule(ExactMatrix.identity(2), m1, (1, 4))
    assert hom_quotient_oracle(full, m1)[0] == 0


def _point_ideal(n, seed, t, field=QQ):
    ring = build_polynomial_ring(n, t)
    mod = free_module(ring, 1, floor=1)
    return ring, mod, generated_submodule(ExactMatrix.from_dense(seed, field), mod, (1, t))


def test_hom_oracle_invariant_under_basis_change():
    rng = np.random.default_rng(9)
    for n, seed in ((2, [[1], [0]]), (3, [[0, 0], [1, 0], [0, 1]])):
        _, mod, sub = _point_ideal(n, seed, 3)
        g = {}
        for s, m in sub.basis.items():
            while True:
                c = ExactMatrix.from_dense(rng.integers(-2, 3, (m.cols, m.cols)).tolist())
                if c.rank() == m.cols:
                    break
            g[s] = c
        moved = SubmodulePoint({s: sub.basis[s] @ g[s] for s in sub.basis}, QQ)
        assert hom_quotient_oracle(moved, mod)[0] == hom_quotient_oracle(sub, mod)[0]


@pytest.mark.parametrize("n,seed,expected", [(2, [[1], [0]], 1), (3, [[0, 0], [1, 0], [0, 1]], 2)])
def test_hom_oracle_along_the_window(n, seed, expected):
    dims = []
    for t in range(1, 5):
        _, mod, sub = _point_ideal(n, seed, t)
        dims.append(hom_quotient_oracle(sub, mod)[0])
    # the window [1, 1] sees every linear map S_1 -> M_1 / S_1
    assert dims[0] >= dims[1] >= dims[2] == dims[3] == expected


@settings(max_examples=20, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=6, max_size=6))
def test_generated_dims_bounded_by_hilbert(bits):
    # S_1 of dimension <= 2 in GF(2)^3, h the point-ideal profile
    ring = build_polynomial_ring(3, 3)
    mod = free_module(ring, 1, floor=1)
    seed = ExactMatrix.from_dense(np.array(bits).reshape(3, 2).tolist(), GF(2))
    sub = generated_submodule(seed, mod, (1, 3))
    if sub.dims()[1] != 2:
        return
    h = HilbertData({s: ring.dim(s) - 1 for s in (1, 2, 3)}, 1)
    assert all(sub.dims()[s] <= h(s) for s in (1, 2, 3))
    assert (sub.dims() == {s: h(s) for s in (1, 2, 3)}) == check_a_regular_profile(sub, mod, h)
