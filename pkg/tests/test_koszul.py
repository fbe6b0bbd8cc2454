import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dgquot import koszul
from dgquot.exact import GF, QQ, ContractError
from dgquot.instance import line_point_instance, plane_point_instance, polynomial_instance
from dgquot.koszul import CdgaPresentation, Generator, check_d_squared, emit_cdga, evaluate_at, poly_mul, tower_morphism


@pytest.fixture(scope="module")
def line():
    inst = line_point_instance()
    return inst, {t: emit_cdga(inst.algebra(t)) for t in (1, 2, 3, 4)}


def test_counts_window_12(line):
    _, pres = line
    p = pres[2]
    assert p.count_by_degree() == {0: 12, -1: 6}
    for g in p.generators:
        if g.degree == -1:
            for mono in p.d(g.id):
                assert len(mono) <= 2 and all(p.degree(j) == 0 for j in mono)


def test_evaluation_is_mc_residual_window_12(line):
    inst, pres = line
    alg = inst.algebra(2)
    rng = np.random.default_rng(5)
    for _ in range(20):
        gamma = alg.from_L(1, [QQ.random(rng) for _ in range(alg.dim_L(1))])
        assert np.array_equal(evaluate_at(pres[2], alg, gamma), alg.mc_residual(gamma).L_vector())


def test_trivial_presentations():
    z = emit_cdga(polynomial_instance(2, lambda R, s: 0, 2).algebra(2))
    assert z.generators == [] and not any(z.differential.values())
    one = emit_cdga(line_point_instance().algebra(1))
    assert one.count_by_degree() == {0: 2}
    assert not any(one.differential.values())


def test_hand_presentation():
    pres = CdgaPresentation([Generator(0, 0, "x"), Generator(1, -1, "y")], {1: {(0, 0): 1}}, QQ)
    assert check_d_squared(pres)


@pytest.mark.parametrize("t", [1, 2, 3, 4])
def test_d_squared_line(line, t):
    assert check_d_squared(line[1][t])


def test_d_squared_plane_window_13():
    assert check_d_squared(emit_cdga(plane_point_instance().algebra(3)))


def test_sign_flip_breaks_d_squared(line):
    pres = koszul.loads(koszul.dumps(line[1][3]))
    for gid in sorted(pres.differential):
        quad = [m for m in pres.differential[gid] if len(m) == 2 and pres.degree(m[0]) + pres.degree(m[1]) < 0]
        if quad:
            pres.differential[gid][quad[0]] = -pres.differential[gid][quad[0]]
            break
    assert not check_d_squared(pres)


def test_round_trip_is_byte_identical(line):
    text = koszul.dumps(line[1][3])
    again = koszul.loads(text)
    assert koszul.dumps(again) == text
    assert check_d_squared(again)
    with pytest.raises(ContractError):
        koszul.loads('{"format": "other"}')


def test_tower_maps(line):
    _, pres = line
    f12 = tower_morphism(pres[1], pres[2])
    assert len(f12.mapping) == 2
    assert all(pres[1].generators[s].label == pres[2].generators[t].label for s, t in f12.mapping.items())
    f23 = tower_morphism(pres[2], pres[3])
    assert f12.commutes() and f23.commutes() and tower_morphism(pres[3], pres[4]).commutes()
    assert f12.compose(f23).mapping == tower_morphism(pres[1], pres[3]).mapping
    with pytest.raises(ContractError):
        tower_morphism(pres[3], pres[2])


def test_prime_field_evaluation():
    inst = plane_point_instance()
    alg = inst.algebra(2, GF(3))
    pres = emit_cdga(alg)
    rng = np.random.default_rng(2)
    for _ in range(5):
        gamma = alg.random_element(1, rng)
        assert np.array_equal(evaluate_at(pres, alg, gamma), alg.mc_residual(gamma).L_vector())


# graded-commutative monomial algebra on four generators of mixed parity
DEG = np.array([0, -1, -2, 1])
monos = st.lists(st.integers(0, 3), max_size=4).map(lambda m: tuple(sorted(m))).filter(lambda m: m.count(1) < 2 and m.count(3) < 2)
polys = st.dictionaries(monos, st.integers(-3, 3).filter(bool), max_size=4)


@settings(max_examples=80, deadline=None)
@given(polys, polys, polys)
def test_poly_mul_associative(p, q, r):
    assert poly_mul(poly_mul(p, q, DEG, QQ), r, DEG, QQ) == poly_mul(p, poly_mul(q, r, DEG, QQ), DEG, QQ)


@settings(max_examples=80, deadline=None)
@given(monos, monos)
def test_monomials_graded_commute(m1, m2):
    a, b = {m1: 1}, {m2: 1}
    sign = -1 if (sum(DEG[list(m1)]) * sum(DEG[list(m2)])) % 2 else 1
    ab, ba = poly_mul(a, b, DEG, QQ), poly_mul(b, a, DEG, QQ)
    assert ab == {k: sign * v for k, v in ba.items()}


@pytest.mark.parametrize("inst_fn,t", [(line_point_instance, 4), (plane_point_instance, 3)])
def test_generator_degrees_match_L(inst_fn, t):
    alg = inst_fn().algebra(t)
    counts = emit_cdga(alg).count_by_degree()
    for k in range(1, alg.max_degree + 1):
        assert counts.get(1 - k, 0) == alg.dim_L(k)
