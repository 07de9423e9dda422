"""Ready-made algebras and families used by tests, demos and the CLI.

The random three-dimensional algebra is a seeded change of basis applied to
the truncated polynomial algebra Q[x]/(x^3): random structure constants are
essentially never associative, while a basis change of a validated algebra
is associative by construction and still exercises generic coefficients.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .algebra import AlgebraSpec, FamilySpec, GaugeCurve
from .errors import ValidationError
from .exact import ParamPoly, Q1, SparseMatrix, image_membership


def dual_numbers():
    """Q[x]/(x^2)."""
    products = {(0, 0): {0: Q1}, (0, 1): {1: Q1}, (1, 0): {1: Q1}}
    return AlgebraSpec(("1", "x"), {0: Q1}, products, name="dual_numbers").validate()


def two_points():
    """Q x Q with idempotent basis."""
    products = {(0, 0): {0: Q1}, (1, 1): {1: Q1}}
    return AlgebraSpec(("e0", "e1"), {0: Q1, 1: Q1}, products,
                       name="two_points").validate()


def matrix_2x2():
    """M_2(Q) on the elementary matrix basis e11, e12, e21, e22."""
    names = ("e11", "e12", "e21", "e22")
    pairs = {0: (0, 0), 1: (0, 1), 2: (1, 0), 3: (1, 1)}
    products = {}
    for i, (a, b) in pairs.items():
        for j, (c, d) in pairs.items():
            if b == c:
                k = next(t for t, (p, q) in pairs.items() if (p, q) == (a, d))
                products[(i, j)] = {k: Q1}
    return AlgebraSpec(names, {0: Q1, 3: Q1}, products, name="matrix_2x2").validate()


def truncated_polynomials(order=3):
    """Q[x]/(x^order)."""
    dim = order
    products = {}
    for i in range(dim):
        for j in range(dim):
            if i + j < dim:
                products[(i, j)] = {i + j: Q1}
    return AlgebraSpec(tuple(f"x^{i}" if i else "1" for i in range(dim)),
                       {0: Q1}, products, name=f"trunc_poly_{order}").validate()


def random_three_dim(seed):
    """Seeded change of basis of Q[x]/(x^3); validated by construction."""
    rng = random.Random(seed)
    base = truncated_polynomials(3)
    dim = 3
    while True:
        entries = {}
        for i in range(dim):
            for j in range(dim):
                c = Fraction(rng.randrange(-2, 3))
                if c:
                    entries[(i, j)] = c
        p = SparseMatrix(dim, dim, entries)
        cols = []
        ok = True
        for j in range(dim):
            col = image_membership(p, {j: Q1})
            if col is None:
                ok = False
                break
            cols.append(col)
        if ok:
            p_inv = SparseMatrix.from_columns(dim, cols)
            break
    # new basis f_i = sum_k p[k,i] e_k; products transported through p
    products = {}
    for i in range(dim):
        for j in range(dim):
            fi = p.matvec({i: Q1})
            fj = p.matvec({j: Q1})
            prod = base.multiply(fi, fj)
            back = p_inv.matvec(prod)
            back = {k: v for k, v in back.items() if v}
            if back:
                products[(i, j)] = back
    unit = p_inv.matvec({0: Q1})
    alg = AlgebraSpec(("f0", "f1", "f2"), unit, products,
                      name=f"random3[seed={seed}]")
    return alg.validate()


def exterior_line():
    """Exterior algebra on one degree-1 generator: graded, x^2 = 0."""
    products = {(0, 0): {0: Q1}, (0, 1): {1: Q1}, (1, 0): {1: Q1}}
    return AlgebraSpec(("1", "x"), {0: Q1}, products, degrees=(0, 1),
                       name="exterior_line").validate()


def exterior_plane():
    """Exterior algebra on two degree-1 generators x, y (dim 4)."""
    names = ("1", "x", "y", "xy")
    products = {}
    def put(i, j, k, c):
        products.setdefault((i, j), {})[k] = Fraction(c)
    for j in range(4):
        put(0, j, j, 1)
        if j:
            put(j, 0, j, 1)
    put(1, 2, 3, 1)   # x*y = xy
    put(2, 1, 3, -1)  # y*x = -xy
    return AlgebraSpec(names, {0: Q1}, products, degrees=(0, 1, 1, 2),
                       name="exterior_plane").validate()


def dg_square_zero():
    """DG algebra Q.1 + Q.e + Q.f, deg e = 0, deg f = 1, all products of
    non-units zero, differential e -> f."""
    products = {(0, 0): {0: Q1}, (0, 1): {1: Q1}, (1, 0): {1: Q1},
                (0, 2): {2: Q1}, (2, 0): {2: Q1}}
    diff = SparseMatrix(3, 3, {(2, 1): Q1})
    return AlgebraSpec(("1", "e", "f"), {0: Q1}, products, degrees=(0, 0, 1),
                       differential=diff, name="dg_square_zero").validate()


def koszul_pair():
    """Koszul-type DG algebra: generators x (deg 0, x^2 = 0) and xi
    (deg -1, xi^2 = 0, x.xi = xi.x), differential xi -> x.  Products and
    differential interact, unlike dg_square_zero."""
    names = ("1", "x", "xi", "xxi")
    products = {}
    def put(i, j, k, c):
        products.setdefault((i, j), {})[k] = Fraction(c)
    for j in range(4):
        put(0, j, j, 1)
        if j:
            put(j, 0, j, 1)
    put(1, 2, 3, 1)   # x xi
    put(2, 1, 3, 1)   # xi x
    diff = SparseMatrix(4, 4, {(1, 2): Q1})
    return AlgebraSpec(names, {0: Q1}, products, degrees=(0, 0, -1, -1),
                       differential=diff, name="koszul_pair").validate()


def clifford_line(trunc=6):
    """One-parameter family Q[x]/(x^2 = s): dual numbers at s=0, Q x Q at s=1."""
    params = ("s",)
    c1 = ParamPoly.const(1, params, trunc)
    s = ParamPoly.variable("s", params, trunc)
    products = {(0, 0): {0: c1}, (0, 1): {1: c1}, (1, 0): {1: c1},
                (1, 1): {0: s}}
    fam = FamilySpec(params, trunc, ("1", "x"), {0: Q1}, products,
                     name="clifford_line")
    return fam.validate()


def clifford_plane(trunc=6):
    """Two-parameter Clifford family: x^2 = s, y^2 = t, xy = -yx, dim 4."""
    params = ("s", "t")
    one = ParamPoly.const(1, params, trunc)
    minus = ParamPoly.const(-1, params, trunc)
    s = ParamPoly.variable("s", params, trunc)
    t = ParamPoly.variable("t", params, trunc)
    names = ("1", "x", "y", "xy")
    p = {}
    def put(i, j, k, c):
        p.setdefault((i, j), {})[k] = c
    for j in range(4):
        put(0, j, j, one)
        if j:
            put(j, 0, j, one)
    put(1, 1, 0, s)            # x x = s
    put(2, 2, 0, t)            # y y = t
    put(1, 2, 3, one)          # x y = xy
    put(2, 1, 3, minus)        # y x = -xy
    put(1, 3, 2, s)            # x (xy) = s y
    put(3, 1, 2, minus * s)    # (xy) x = -s y
    put(2, 3, 1, minus * t)    # y (xy) = y x y ... = -t x
    put(3, 2, 1, t)            # (xy) y = t x
    put(3, 3, 0, minus * s * t)  # (xy)(xy) = -st
    fam = FamilySpec(params, trunc, names, {0: Q1}, p, name="clifford_plane")
    return fam.validate()


def shear_gauge(trunc=6):
    """Unit-preserving gauge curve on dual numbers: 1 -> 1, x -> x + s.1."""
    params = ("s",)
    one = ParamPoly.const(1, params, trunc)
    s = ParamPoly.variable("s", params, trunc)
    m = SparseMatrix(2, 2, {(0, 0): one, (1, 1): one, (0, 1): s})
    return GaugeCurve(params, trunc, m)


def clifford_shear_gauge(trunc=6):
    """Unit-preserving gauge on the 4-dim Clifford algebra at (s,t)=(0,0):
    x -> x + s.y, everything else fixed (uses the second family parameter
    slot purely as the curve parameter)."""
    params = ("s",)
    one = ParamPoly.const(1, params, trunc)
    s = ParamPoly.variable("s", params, trunc)
    entries = {(i, i): one for i in range(4)}
    entries[(2, 1)] = s
    m = SparseMatrix(4, 4, entries)
    return GaugeCurve(params, trunc, m)


STANDARD = {
    "dual_numbers": dual_numbers,
    "two_points": two_points,
    "matrix_2x2": matrix_2x2,
    "exterior_line": exterior_line,
    "exterior_plane": exterior_plane,
    "dg_square_zero": dg_square_zero,
    "koszul_pair": koszul_pair,
}

FAMILIES = {
    "clifford_line": clifford_line,
    "clifford_plane": clifford_plane,
}


def by_name(name, seed=0):
    if name in STANDARD:
        return STANDARD[name]()
    if name in FAMILIES:
        return FAMILIES[name]()
    if name.startswith("random3"):
        return random_three_dim(seed)
    raise ValidationError(f"unknown catalog name {name!r}")
