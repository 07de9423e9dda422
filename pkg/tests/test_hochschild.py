"""Operator identities on cochains and chains, strict (on-the-nose) part."""

import random
from fractions import Fraction

import pytest

from nccalc.catalog import (dg_square_zero, dual_numbers, exterior_line,
                            exterior_plane, koszul_pair, matrix_2x2,
                            random_three_dim, two_points)
from nccalc.exact import Q1, kernel_basis
from nccalc.hochschild import (Chain, Cochain, basis_chain, basis_cochain,
                               chain_B, chain_b, chain_basis_keys,
                               chain_from_tensors, chain_inner_differential,
                               circle, cochain_basis_keys,
                               cochain_inner_differential,
                               cochain_operator_matrix, cup,
                               differential_cochain, element_cochain,
                               gerstenhaber_bracket,
                               hochschild_codifferential, lift_raw,
                               multiplication_raw, operator_matrix,
                               random_chain, random_cochain, raw_bracket,
                               restrict_raw, unit_cochain, zero_cochain)

UNGRADED = [dual_numbers, two_points, matrix_2x2]
GRADED = [exterior_line, exterior_plane, dg_square_zero, koszul_pair]


def all_algebras():
    return [f() for f in UNGRADED + GRADED] + [random_three_dim(3)]


# -- cup ---------------------------------------------------------------------

def test_cup_of_elements_is_product():
    alg = dual_numbers()
    a = element_cochain(alg, {1: Q1})          # x
    b = element_cochain(alg, {0: Q1, 1: Q1})   # 1 + x
    got = cup(a, b)
    assert got.value(()) == {1: Q1}            # x(1+x) = x


def test_cup_with_unit_cochain_is_identity():
    alg = matrix_2x2()
    rng = random.Random(0)
    d = random_cochain(alg, 2, 0, rng)
    one = unit_cochain(alg)
    assert cup(one, d) == d
    assert cup(d, one) == d


def test_cup_hand_value_dual_numbers():
    # D = E: x-bar -> 1; (D u E)(x,x) = D(x)E(x) = 1, sign exponent
    # |E| * (|x|+1) = 1 * 1 -> -1 in the ungraded convention |E| = 1
    alg = dual_numbers()
    d = Cochain(alg, 1, 0, {(1,): {0: Q1}})
    got = cup(d, d)
    assert got.value((1, 1)) == {0: -Q1}


def test_cup_associative():
    for alg in [dual_numbers(), exterior_plane(), random_three_dim(5)]:
        rng = random.Random(11)
        gs = [0, 1, 0] if alg.degrees else [0, 0, 0]
        d = random_cochain(alg, 1, gs[0], rng)
        e = random_cochain(alg, 2, gs[1], rng)
        f = random_cochain(alg, 1, gs[2], rng)
        assert cup(cup(d, e), f) == cup(d, cup(e, f))


# -- circle ------------------------------------------------------------------

def test_circle_arity_one_is_composition():
    alg = dual_numbers()
    # D: x -> x, E: x -> 1 + 2x; reduced composition keeps only x-part
    d = Cochain(alg, 1, 0, {(1,): {1: Q1}})
    e = Cochain(alg, 1, 0, {(1,): {0: Q1, 1: Fraction(2)}})
    got = circle(d, e)
    assert got.value((1,)) == {1: Fraction(2)}


def test_circle_with_zero_arity_left_is_zero():
    alg = dual_numbers()
    d = element_cochain(alg, {1: Q1})
    e = Cochain(alg, 1, 0, {(1,): {1: Q1}})
    assert circle(d, e).is_zero()


def test_bracket_antisymmetry():
    for alg in [random_three_dim(9), exterior_plane()]:
        rng = random.Random(2)
        gd = 1 if alg.degrees else 0
        d = random_cochain(alg, 2, gd, rng)
        e = random_cochain(alg, 1, 0, rng)
        lhs = gerstenhaber_bracket(d, e)
        rhs = gerstenhaber_bracket(e, d)
        s = (-1) ** ((d.total_degree + 1) * (e.total_degree + 1) % 2)
        assert lhs == -s * rhs


def test_bracket_of_multiplication_with_itself_vanishes():
    for alg in all_algebras():
        m = multiplication_raw(alg)
        assert raw_bracket(m, m).is_zero()


def test_bracket_derivations_is_commutator():
    # derivations of Q[x]/(x^2): D: x->ax+b? must satisfy Leibniz; use x->x
    alg = dual_numbers()
    d = Cochain(alg, 1, 0, {(1,): {1: Q1}})          # Euler x d/dx
    e = Cochain(alg, 1, 0, {(1,): {0: Q1}})          # x -> 1 (not derivation)
    got = gerstenhaber_bracket(d, e)
    # ungraded arity-1 bracket = commutator of maps on the reduced line
    # D(E(x)) = D(1) = 0 through the class of 1 (zero class); E(D(x)) = 1
    assert got.value((1,)) == {0: -Q1}


def test_jacobi_identity():
    rng = random.Random(4)
    for alg in [random_three_dim(1), exterior_plane()]:
        gs = [0, 1, 1] if alg.degrees else [0, 0, 0]
        d = random_cochain(alg, 1, gs[0], rng)
        e = random_cochain(alg, 2, gs[1], rng)
        f = random_cochain(alg, 2, gs[2], rng)
        sd, se, sf = (x.total_degree + 1 for x in (d, e, f))
        lhs = gerstenhaber_bracket(d, gerstenhaber_bracket(e, f))
        mid = gerstenhaber_bracket(gerstenhaber_bracket(d, e), f)
        rhs = (-1) ** (sd * se % 2) * gerstenhaber_bracket(
            e, gerstenhaber_bracket(d, f))
        diff = lhs - mid - rhs
        assert diff.is_zero()


# -- codifferential ----------------------------------------------------------

def test_delta_of_central_element_vanishes():
    alg = dual_numbers()
    x = element_cochain(alg, {1: Q1})
    assert hochschild_codifferential(x).is_zero()


def test_delta_squared_zero():
    rng = random.Random(7)
    for alg in all_algebras():
        for arity in (0, 1, 2):
            g = (1 if alg.degrees else 0) if arity == 1 else 0
            d = random_cochain(alg, arity, g, rng)
            dd = hochschild_codifferential(hochschild_codifferential(d))
            assert dd.is_zero(), (alg.name, arity)


def test_delta_matches_raw_bracket_with_m():
    rng = random.Random(13)
    for alg in all_algebras():
        m = multiplication_raw(alg)
        for arity, g in ((0, 0), (1, 0), (2, 1 if alg.degrees else 0)):
            d = random_cochain(alg, arity, g, rng)
            raw = raw_bracket(m, lift_raw(d))
            assert restrict_raw(raw) == hochschild_codifferential(d), \
                (alg.name, arity)


def test_delta_bracket_with_m_is_normalized():
    # [m, lift D] must kill the unit in every argument slot
    rng = random.Random(17)
    alg = random_three_dim(2)
    d = random_cochain(alg, 2, 0, rng)
    raw = raw_bracket(multiplication_raw(alg), lift_raw(d))
    unit = dict(alg.unit)
    basis0 = {0: Q1}
    for slot in range(raw.arity):
        args = [basis0] * slot + [unit] + [basis0] * (raw.arity - slot - 1)
        assert not raw.evaluate(args)


def test_delta_kernel_on_zero_cochains_is_center():
    # ker(delta: C^0 -> C^1) = center of A
    for alg, want in ((dual_numbers(), 2), (matrix_2x2(), 1),
                      (two_points(), 2)):
        mat = cochain_operator_matrix(alg, "delta", 0)
        assert len(kernel_basis(mat)) == want


def test_delta_cup_leibniz():
    rng = random.Random(23)
    for alg in [random_three_dim(4), exterior_plane()]:
        ge = 1 if alg.degrees else 0
        d = random_cochain(alg, 1, 0, rng)
        e = random_cochain(alg, 2, ge, rng)
        lhs = hochschild_codifferential(cup(d, e))
        rhs = cup(hochschild_codifferential(d), e) \
            + (-1) ** (d.total_degree % 2) * cup(
                d, hochschild_codifferential(e))
        assert lhs == rhs


def test_delta_bracket_leibniz():
    rng = random.Random(29)
    for alg in [random_three_dim(6), exterior_plane()]:
        ge = 1 if alg.degrees else 0
        d = random_cochain(alg, 1, 0, rng)
        e = random_cochain(alg, 2, ge, rng)
        lhs = hochschild_codifferential(gerstenhaber_bracket(d, e))
        rhs = gerstenhaber_bracket(hochschild_codifferential(d), e) \
            + (-1) ** ((d.total_degree + 1) % 2) * gerstenhaber_bracket(
                d, hochschild_codifferential(e))
        assert lhs == rhs


def test_inner_differential_squares_to_zero_and_anticommutes():
    alg = dg_square_zero()
    rng = random.Random(31)
    d = random_cochain(alg, 2, 0, rng)
    inner = cochain_inner_differential
    delta = hochschild_codifferential
    assert inner(inner(d)).is_zero()
    assert (inner(delta(d)) + delta(inner(d))).is_zero()


# -- chain differentials -----------------------------------------------------

def test_b_on_degree_zero_and_commutative_cancellation():
    alg = dual_numbers()
    c = basis_chain(alg, (1, ()))
    assert chain_b(c).is_zero()
    c1 = chain_from_tensors(alg, [{1: Q1}, {1: Q1}])
    assert chain_b(c1).is_zero()   # commutative: a0 a1 - a1 a0


def test_b_hand_value_noncommutative():
    alg = matrix_2x2()
    # a0 = e12, a1 = e21: b = e12 e21 - e21 e12 = e11 - e22
    c = chain_from_tensors(alg, [{1: Q1}, {2: Q1}])
    got = chain_b(c)
    assert got.coeffs == {(0, ()): Q1, (3, ()): -Q1}


def test_b_squared_zero():
    rng = random.Random(37)
    for alg in all_algebras():
        for p in (2, 3, 4):
            c = random_chain(alg, p, rng)
            assert chain_b(chain_b(c)).is_zero(), (alg.name, p)


def test_B_trivial_values():
    alg = dual_numbers()
    x = chain_from_tensors(alg, [{1: Q1}])
    got = chain_B(x)
    assert got.coeffs == {(0, (1,)): Q1}      # 1 (x) x-bar
    one = chain_from_tensors(alg, [dict(alg.unit)])
    assert chain_B(one).is_zero()             # 1-bar = 0


def test_B_squared_zero_and_anticommutes_with_b():
    rng = random.Random(41)
    for alg in all_algebras():
        for p in (0, 1, 2, 3):
            c = random_chain(alg, p, rng)
            assert chain_B(chain_B(c)).is_zero(), (alg.name, p)
            anti = chain_b(chain_B(c)) + chain_B(chain_b(c))
            assert anti.is_zero(), (alg.name, p)


def test_inner_chain_differential_squares_and_anticommutes():
    rng = random.Random(43)
    for alg in (dg_square_zero(), koszul_pair()):
        for p in (0, 1, 2, 3):
            c = random_chain(alg, p, rng)
            assert chain_inner_differential(
                chain_inner_differential(c)).is_zero()
            anti = chain_b(chain_inner_differential(c)) \
                + chain_inner_differential(chain_b(c))
            assert anti.is_zero(), (alg.name, p)
            anti_b = chain_B(chain_inner_differential(c)) \
                + chain_inner_differential(chain_B(c))
            assert anti_b.is_zero(), (alg.name, p)


def test_operator_matrix_b_at_zero_and_B_shape():
    alg = dual_numbers()
    mb = operator_matrix(alg, "b", 0)
    assert mb.is_zero()
    mB = operator_matrix(alg, "B", 0)
    keys1 = chain_basis_keys(alg, 1)
    assert mB.shape() == (len(keys1), 2) if callable(
        getattr(mB, "shape", None)) else True
    # x -> 1 (x) x-bar, 1 -> 0
    col_x = {i for (i, j) in mB.entries if j == 1}
    assert col_x == {keys1.index((0, (1,)))}
    assert not [1 for (i, j) in mB.entries if j == 0]


def test_operator_matrix_consistency_with_elementwise():
    alg = random_three_dim(12)
    rng = random.Random(47)
    c = random_chain(alg, 2, rng)
    mat = operator_matrix(alg, "b", 2)
    keys2 = chain_basis_keys(alg, 2)
    keys1 = chain_basis_keys(alg, 1)
    vec = {keys2.index(k): v for k, v in c.coeffs.items()}
    out = mat.matvec(vec)
    direct = chain_b(c)
    assert {keys1[i]: v for i, v in out.items()} == direct.coeffs
