import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from dgquot.dgla import ClassicalPoint, classical_point_from_submodule, rank_locus_predicates
from dgquot.exact import GF, QQ, ContractError, ExactMatrix
from dgquot.instance import line_point_instance, plane_point_instance, polynomial_instance
from dgquot.quot import (
    GroupElement,
    _Context,
    act,
    action_check,
    enumerate_points,
    find_b,
    geometric_locus,
    invariant_coordinates,
    propagation_check,
    quotient_comparison,
    random_group_element,
    subspaces,
    superspaces,
)
from oracles import gaussian_binomial


def gf2_rank(rows):
    rows = [[int(v) % 2 for v in row] for row in rows]
    r = 0
    for c in range(len(rows[0]) if rows else 0):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                rows[i] = [(u + v) % 2 for u, v in zip(rows[i], rows[r])]
        r += 1
    return r


def line_point(t, field=QQ):
    inst = line_point_instance(field=field)
    alg = inst.algebra(t, field)
    return inst, classical_point_from_submodule(alg, inst.seed_submodule(t, field))


# -------------------------------------------------------------- enumeration


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(0, 4), st.sampled_from([2, 3]))
def test_subspace_count_is_gaussian_binomial(n, d, q):
    if d > n:
        return
    subs = list(subspaces(n, d, q))
    assert len(subs) == gaussian_binomial(n, d, q)
    keys = {m.tobytes() for m in subs}
    assert len(keys) == len(subs)


def test_superspaces_contain_the_given_space():
    G = np.array([[1], [1], [0]])
    sup = list(superspaces(G, 3, 2, 2))
    assert len(sup) == gaussian_binomial(2, 1, 2)
    for W in sup:
        assert gf2_rank(np.hstack([W, G]).T.tolist()) == gf2_rank(W.T.tolist()) == 2


# ------------------------------------------------------------------- action


def test_identity_and_scaling():
    inst, pt = line_point(3)
    assert act(GroupElement({}, QQ), pt).element == pt.element
    g = GroupElement({1: ExactMatrix.from_dense([[2]])}, QQ)
    img = act(g, pt)
    assert img.algebra.mc_residual(img.element).is_zero()
    assert np.array_equal(img.psi(1), 2 * pt.psi(1))
    assert np.array_equal(img.psi(2), pt.psi(2))


def test_group_element_contracts():
    with pytest.raises(ContractError):
        GroupElement({1: ExactMatrix.zeros(1, 1)}, QQ)
    _, pt = line_point(2)
    with pytest.raises(ContractError):
        act(GroupElement({1: ExactMatrix.identity(2)}, QQ), pt)


def test_right_action_law_gf5():
    _, pt = line_point(3, GF(5))
    rng = np.random.default_rng(3)
    alg = pt.algebra
    for _ in range(20):
        g1 = random_group_element(alg, range(1, 4), rng)
        g2 = random_group_element(alg, range(1, 4), rng)
        assert act(g2, act(g1, pt)).element == act(g1 * g2, pt).element


def test_action_check_report():
    _, pt = line_point(3)
    rep = action_check(pt, 1, np.random.default_rng(0), pairs=5, invariance=10)
    assert rep["right_action_law"] and rep["mc_preserved"] and rep["loci_preserved"] and rep["coordinates_invariant"]


# ---------------------------------------------------------- invariant coords


def test_coordinate_example():
    _, pt = line_point(3)
    coords = invariant_coordinates(pt, 1)
    m = coords.matrices[(1, 1, 1, 2)]
    # (a, x) -> a x for a in {x, y}: x^2 and xy in the basis x^2, xy, y^2
    assert m.to_dense().tolist() == [[1, 0], [0, 1], [0, 0]]
    assert coords.ranks()[(1, 1, 1, 2)] == 2 <= coords.hilbert[2]
    assert coords.rank_bound_holds() and geometric_locus(coords)
    assert coords == invariant_coordinates(pt, 1, nesting="merged")


def test_coordinates_of_zero_psi():
    inst = line_point_instance()
    alg = inst.algebra(3)
    coords = invariant_coordinates(ClassicalPoint(alg.zero(1)), 1)
    assert all(m.is_zero() for m in coords.matrices.values())
    assert not geometric_locus(coords)


def test_plane_point_is_geometric():
    inst = plane_point_instance()
    alg = inst.algebra(3)
    pt = classical_point_from_submodule(alg, inst.seed_submodule(3))
    assert geometric_locus(invariant_coordinates(pt, 1))


def test_coordinates_need_mc_point():
    inst = line_point_instance()
    alg = inst.algebra(2)
    with pytest.raises(ContractError):
        invariant_coordinates(ClassicalPoint(alg.zero(1)), 3)


# --------------------------------------------------------------- find_b


def generated_dims_gf2(seed_forms, n, T):
    """dim over GF(2) of the degree-s part of the ideal generated by linear forms, by brute force."""
    xs = sympy.symbols(f"x0:{n}")
    out = {}
    for s in range(1, T + 1):
        monos = sorted(sympy.itermonomials(xs, s, s), key=sympy.default_sort_key)
        cofs = sorted(sympy.itermonomials(xs, s - 1, s - 1), key=sympy.default_sort_key)
        rows = []
        for f in seed_forms:
            lin = sum(c * x for c, x in zip(f, xs))
            for m in cofs:
                p = sympy.Poly(sympy.expand(lin * m), *xs)
                rows.append([int(p.coeff_monomial(mm)) % 2 for mm in monos])
        out[s] = gf2_rank(rows)
    return out


def test_find_b_line_against_brute_force():
    rep = find_b(line_point_instance(), 2, 4)
    assert rep["b"] == 1 and rep["seeds_total"] == 3
    for f in [(1, 0), (0, 1), (1, 1)]:
        assert generated_dims_gf2([f], 2, 4) == {1: 1, 2: 2, 3: 3, 4: 4}


def test_find_b_forced_seed():
    inst = polynomial_instance(2, lambda R, s: R.dim(s), 3)
    rep = find_b(inst, 2, 3)
    assert rep["b"] == inst.floor and rep["seeds_total"] == 1


# ------------------------------------------------------------ propagation


def test_propagation_small_run_line():
    rep = propagation_check(line_point_instance(), 1, 2, samples=300, twists=30, t=3, seed=4)
    assert rep["counterexamples_total"] == 0 and rep["mismatches_total"] == 0
    assert rep["enumeration"]["points"] == 3
    assert rep["twists"]["count"] == 30


def test_propagation_degenerate_full_hilbert():
    inst = polynomial_instance(2, lambda R, s: R.dim(s), 3)
    rep = propagation_check(inst, 1, 2, samples=100, twists=10, t=3)
    assert rep["counterexamples_total"] == 0 and rep["enumeration"]["points"] == 1


def test_enumeration_reports_non_injective_branches():
    # h = (1, 3) on [1, 2]: A_1 x spans only 2 of the 3 dimensions of M_2, so a
    # rank-2 psi_2 onto that span solves the equations
    inst = polynomial_instance(2, lambda R, s: 1 if s == 1 else R.dim(s), 2)
    res = enumerate_points(inst, 2, 1, 2)
    assert len(res.points) == 3
    assert len(res.counterexamples) == 3
    assert all(c["degree"] == 2 and c["rank"] == 2 for c in res.counterexamples)
    # no seed generates dimension 3 in degree 2
    rep = find_b(inst, 2, 2)
    assert rep["b"] is None and rep["status"] == "not stabilized by 2"


def test_inconsistent_hilbert_has_no_points():
    # h = (1, 1): A_1 x already has dimension 2 in degree 2
    res = enumerate_points(polynomial_instance(2, lambda R, s: 1, 2), 2, 1, 2)
    assert res.points == [] and res.counterexamples == []


# ------------------------------------------------------------- comparison


def test_quotient_comparison_line():
    rep = quotient_comparison(line_point_instance(), 1, 2, 3)
    assert rep["V"] == rep["X"] == rep["geometric"] == gaussian_binomial(2, 1, 2) == 3
    assert all(rep["checks"].values())


def test_quotient_comparison_zero_hilbert():
    rep = quotient_comparison(polynomial_instance(2, lambda R, s: 0, 3), 1, 2, 3)
    assert rep["V"] == rep["X"] == rep["geometric"] == 1


@pytest.mark.parametrize("inst_fn", [line_point_instance, plane_point_instance])
def test_enumerated_points_nesting_and_rank_bound(inst_fn):
    inst = inst_fn()
    res = enumerate_points(inst, 3, 1, 2)
    ctx = _Context(inst, 3, 2)
    for psi, phi in res.points:
        pt = ctx.point(psi, phi)
        assert rank_locus_predicates(pt, 1)["in_M"]
        coords = invariant_coordinates(pt, 1)
        assert coords == invariant_coordinates(pt, 1, nesting="merged")
        # the same action with the zero map: off the loci, bound still holds
        off = ctx.point({s: np.zeros_like(m) for s, m in psi.items()}, phi)
        assert invariant_coordinates(off, 1).rank_bound_holds() and not rank_locus_predicates(off, 1)["in_V"]
