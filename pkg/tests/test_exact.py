"""Exact-layer oracles: koszul signs, truncated polynomials, u-windows, linear algebra.

Expected values here were computed by hand first and frozen; the linear
algebra cases are checked against an independent dense elimination in
_dense_oracle.py as well as by direct substitution.
"""

import random
from fractions import Fraction

import pytest

from nccalc.exact import (ParamPoly, SparseMatrix, USeries, image_membership,
                          kernel_basis, koszul_sign, rank, vec_eq)
from nccalc.errors import InputError, TruncationError

from _dense_oracle import dense_rank


def test_koszul_identity_is_plus_one():
    assert koszul_sign([0, 1, 2], [3, 1, 4]) == 1


def test_koszul_swap_of_two_odds_is_minus_one():
    # hand value: one inverted pair, degrees 1*1
    assert koszul_sign([1, 0], [1, 1]) == -1


def test_koszul_swap_mixed_parity():
    # degrees 1 and 2: (-1)^(1*2) = +1
    assert koszul_sign([1, 0], [1, 2]) == 1


def test_koszul_three_cycle_hand_value():
    # permutation (2,0,1) on degrees (1,1,1): two inverted pairs -> +1... no:
    # inversions of (2,0,1): pairs (2,0),(2,1) -> exponent 2 -> +1
    assert koszul_sign([2, 0, 1], [1, 1, 1]) == 1
    # degrees (1,2,1): pairs contribute 1*2... symbols 2,0 (deg 1,1) and 2,1
    # (deg 1,2): exponent 1 + 2 = 3 -> -1
    assert koszul_sign([2, 0, 1], [1, 2, 1]) == -1


def test_koszul_multiplicative_under_composition():
    rng = random.Random(7)
    for _ in range(40):
        n = rng.randrange(2, 6)
        degs = [rng.randrange(0, 4) for _ in range(n)]
        p = list(range(n))
        rng.shuffle(p)
        q = list(range(n))
        rng.shuffle(q)
        # compose: first apply p, then q on the result
        pq = [p[q[i]] for i in range(n)]
        degs_after_p = [degs[p[i]] for i in range(n)]
        assert koszul_sign(pq, degs) == koszul_sign(p, degs) * koszul_sign(q, degs_after_p)


def test_koszul_rejects_non_permutation():
    with pytest.raises(InputError):
        koszul_sign([0, 0], [1, 1])


# ---------------------------------------------------------------------------


def test_param_poly_parse_and_arithmetic():
    p = ParamPoly.parse("1 + 2*s - t^2", ("s", "t"), 4)
    assert p.constant_term() == 1
    s = ParamPoly.variable("s", ("s", "t"), 4)
    t = ParamPoly.variable("t", ("s", "t"), 4)
    assert p == 1 + 2 * s - t * t


def test_param_poly_parse_rationals_and_parens():
    p = ParamPoly.parse("1/2*(s + t)^2", ("s", "t"), 5)
    s = ParamPoly.variable("s", ("s", "t"), 5)
    t = ParamPoly.variable("t", ("s", "t"), 5)
    q = (s + t) * (s + t)
    assert p + p == q


def test_param_poly_derivative_hand_value():
    # d/ds (s*t + s^3) = t + 3 s^2
    s = ParamPoly.variable("s", ("s", "t"), 6)
    t = ParamPoly.variable("t", ("s", "t"), 6)
    p = s * t + s * s * s
    expected = t + 3 * s * s
    assert p.derivative("s") == expected


def test_param_poly_truncates_products():
    s = ParamPoly.variable("s", ("s",), 2)
    cube = s * s * s
    assert not cube  # degree 3 exceeds the order-2 window
    sq = s * s
    assert sq and sq.max_order() == 2


def test_param_poly_subs():
    p = ParamPoly.parse("1 + 2*s - t^2", ("s", "t"), 4)
    assert p.subs({"s": Fraction(1, 2), "t": 3}) == 1 + 1 - 9


# ---------------------------------------------------------------------------


def test_useries_shift_and_window_overflow():
    s = USeries((-1, 2), {0: Fraction(3)})
    assert s.u_multiply(2).items() == [(2, Fraction(3))]
    with pytest.raises(TruncationError):
        s.u_multiply(3)
    assert s.u_multiply(-1).items() == [(-1, Fraction(3))]
    with pytest.raises(TruncationError):
        s.u_multiply(-2)


def test_useries_addition_cancels():
    a = USeries((0, 3), {1: Fraction(2)})
    b = USeries((0, 3), {1: Fraction(-2), 2: Fraction(1)})
    assert (a + b).items() == [(2, Fraction(1))]


# ---------------------------------------------------------------------------


def _mat(rows):
    m = SparseMatrix(len(rows), len(rows[0]) if rows else 0,
                     {(i, j): Fraction(v) for i, row in enumerate(rows)
                      for j, v in enumerate(row) if v})
    return m


def test_kernel_of_zero_matrix_is_full():
    m = SparseMatrix(2, 2, {})
    basis = kernel_basis(m)
    assert len(basis) == 2


def test_kernel_of_identity_is_trivial():
    assert kernel_basis(SparseMatrix.identity(3)) == []


def test_kernel_hand_value():
    # [[1,1],[2,2]] has kernel spanned by (1,-1)
    m = _mat([[1, 1], [2, 2]])
    basis = kernel_basis(m)
    assert len(basis) == 1
    v = basis[0]
    scale = v.get(0, Fraction(0))
    assert scale and vec_eq(v, {0: scale, 1: -scale})
    assert vec_eq(m.matvec(v), {})


def test_image_membership_hand_values():
    m = _mat([[2], [0]])
    assert image_membership(m, {0: Fraction(1), 1: Fraction(1)}) is None
    x = image_membership(m, {0: Fraction(1)})
    assert x is not None and m.matvec(x) == {0: Fraction(1)}


def test_rank_matches_dense_oracle_on_random_matrices():
    rng = random.Random(20260822)
    for _ in range(25):
        r = rng.randrange(1, 7)
        c = rng.randrange(1, 7)
        dense = [[Fraction(rng.randrange(-3, 4)) for _ in range(c)] for _ in range(r)]
        m = _mat(dense)
        assert rank(m) == dense_rank(dense, rule="first")
        assert rank(m) == dense_rank(dense, rule="last")
        # rank-nullity
        assert rank(m) + len(kernel_basis(m)) == c


def test_solutions_substitute_back():
    rng = random.Random(99)
    for _ in range(25):
        r = rng.randrange(1, 6)
        c = rng.randrange(1, 6)
        dense = [[Fraction(rng.randrange(-3, 4)) for _ in range(c)] for _ in range(r)]
        m = _mat(dense)
        x0 = {j: Fraction(rng.randrange(-2, 3)) for j in range(c)}
        target = m.matvec(x0)
        x = image_membership(m, target)
        assert x is not None
        assert vec_eq(m.matvec(x), target)
