"""Finite-dimensional (DG) algebras over Q and polynomial families thereof.

An AlgebraSpec is a basis with structure constants, a distinguished unit
vector, optional integer degrees and an optional degree +1 differential.
Validation is a hard gate: every algebra entering the machinery has had
associativity, unit axioms, degree homogeneity, d^2 = 0 and the graded
Leibniz rule checked on basis elements (which is equivalent to the general
statement by multilinearity).

A FamilySpec is the same data with structure constants (and connection
coefficients) in ParamPoly: a formal polynomial neighborhood of a basepoint
algebra, truncated at a fixed total order in the parameters.
"""

from __future__ import annotations

import json
import threading
from fractions import Fraction

from .errors import InputError, ValidationError
from .exact import (ParamPoly, Q0, Q1, SparseMatrix, sign_pow, vec_add, vec_eq,
                    vec_is_zero, vec_scale)


def _coerce_scalar(value, params, trunc):
    """JSON coefficient -> Fraction (no params) or ParamPoly (family)."""
    if isinstance(value, str):
        if params:
            return ParamPoly.parse(value, params, trunc)
        return Fraction(value)
    if isinstance(value, (int, float)):
        if isinstance(value, float) and not float(value).is_integer():
            raise InputError(f"non-exact coefficient {value!r}; use 'p/q' strings")
        out = Fraction(int(value))
        return ParamPoly.const(out, params, trunc) if params else out
    raise InputError(f"bad coefficient {value!r}")


class AlgebraSpec:
    """Finite-dimensional associative algebra over Q, possibly DG."""

    def __init__(self, basis, unit, products, degrees=None, differential=None,
                 name=""):
        self.basis = tuple(basis)
        self.dim = len(self.basis)
        self.name = name or "algebra"
        self.degrees = tuple(degrees) if degrees is not None else (0,) * self.dim
        if len(self.degrees) != self.dim:
            raise InputError("degrees length != basis length")
        self.unit = {i: Fraction(c) for i, c in unit.items() if c}
        # products: {(i, j): {k: coeff}}
        self.products = {}
        for (i, j), vec in products.items():
            cleaned = {k: v for k, v in vec.items() if v}
            if cleaned:
                self.products[(i, j)] = cleaned
        self.differential = differential
        self._cache = {}
        self._cache_lock = threading.Lock()
        self._reduced = None

    # -- basic algebra -------------------------------------------------

    def mul_basis(self, i, j):
        return self.products.get((i, j), {})

    def multiply(self, a, b):
        out = {}
        for i, ca in a.items():
            if not ca:
                continue
            for j, cb in b.items():
                if not cb:
                    continue
                for k, c in self.mul_basis(i, j).items():
                    s = out.get(k, Q0) + ca * cb * c
                    if s:
                        out[k] = s
                    elif k in out:
                        del out[k]
        return out

    def basis_vector(self, i):
        return {i: Q1}

    def apply_differential(self, vec):
        if self.differential is None:
            return {}
        return self.differential.matvec(vec)

    def degree_of(self, vec):
        """Degree of a homogeneous vector; None for 0; InputError if mixed."""
        degs = {self.degrees[i] for i, c in vec.items() if c}
        if not degs:
            return None
        if len(degs) > 1:
            raise InputError("vector is not homogeneous")
        return degs.pop()

    @property
    def is_graded(self):
        return any(self.degrees) or self.differential is not None

    # -- validation ----------------------------------------------------

    def validate(self):
        if not self.unit:
            raise ValidationError("unit vector is zero")
        for i, c in self.unit.items():
            if self.degrees[i] != 0:
                raise ValidationError("unit vector is not concentrated in degree 0")
        for j in range(self.dim):
            ej = self.basis_vector(j)
            if not vec_eq(self.multiply(self.unit, ej), ej):
                raise ValidationError(f"left unit axiom fails on basis element {j}")
            if not vec_eq(self.multiply(ej, self.unit), ej):
                raise ValidationError(f"right unit axiom fails on basis element {j}")
        for (i, j), vec in self.products.items():
            want = self.degrees[i] + self.degrees[j]
            for k, c in vec.items():
                if c and self.degrees[k] != want:
                    raise ValidationError(
                        f"product e_{i} e_{j} not homogeneous of degree {want}")
        for i in range(self.dim):
            for j in range(self.dim):
                ij = self.mul_basis(i, j)
                for k in range(self.dim):
                    left = self.multiply(ij, self.basis_vector(k))
                    right = self.multiply(self.basis_vector(i), self.mul_basis(j, k))
                    if not vec_eq(left, right):
                        raise ValidationError(
                            f"associativity fails on (e_{i}, e_{j}, e_{k})")
        if self.differential is not None:
            d = self.differential
            if (d.rows, d.cols) != (self.dim, self.dim):
                raise ValidationError("differential has wrong shape")
            for (i, j), v in d.entries.items():
                if v and self.degrees[i] != self.degrees[j] + 1:
                    raise ValidationError("differential is not of degree +1")
            if not d.matmul(d).is_zero():
                raise ValidationError("differential does not square to zero")
            for i in range(self.dim):
                for j in range(self.dim):
                    lhs = self.apply_differential(self.mul_basis(i, j))
                    rhs = vec_add(
                        self.multiply(d.matvec(self.basis_vector(i)),
                                      self.basis_vector(j)),
                        vec_scale(sign_pow(self.degrees[i]),
                                  self.multiply(self.basis_vector(i),
                                                d.matvec(self.basis_vector(j)))))
                    if not vec_eq(lhs, rhs):
                        raise ValidationError(
                            f"Leibniz rule fails on (e_{i}, e_{j})")
        return self

    # -- reduced basis ---------------------------------------------------

    def reduced(self):
        if self._reduced is None:
            self._reduced = ReducedBasis(self)
        return self._reduced

    def cache_get(self, key, builder):
        with self._cache_lock:
            if key in self._cache:
                return self._cache[key]
        value = builder()
        with self._cache_lock:
            return self._cache.setdefault(key, value)

    def __repr__(self):
        return f"AlgebraSpec({self.name}, dim={self.dim})"


class ReducedBasis:
    """Complement of the unit line: A = Q.1 (+) span(e_j, j in complement).

    The dropped index carries the largest-magnitude unit coordinate (ties go
    to the lowest index), so the choice is deterministic.  reduce() returns
    the coordinates of the image of a vector in A/Q.1 with respect to the
    classes of the complement basis vectors; section() lifts a class back to
    the chosen representative basis vector.
    """

    def __init__(self, algebra):
        self.algebra = algebra
        unit = algebra.unit
        best = None
        for i in sorted(unit):
            c = unit[i]
            if best is None or abs(c) > abs(unit[best]):
                best = i
        if best is None:
            raise ValidationError("unit vector is zero")
        self.dropped = best
        self.complement = tuple(i for i in range(algebra.dim) if i != best)

    def reduce(self, vec):
        """Coordinates of pi(vec) on the complement classes, as a sparse dict."""
        lam = vec.get(self.dropped)
        out = {}
        if lam:
            lam = lam / self.algebra.unit[self.dropped]
            for j in self.complement:
                u = self.algebra.unit.get(j)
                if u:
                    out[j] = -lam * u
        for j in self.complement:
            c = vec.get(j)
            if c:
                s = out.get(j, Q0) + c
                if s:
                    out[j] = s
                elif j in out:
                    del out[j]
        return out

    def section(self, j):
        if j == self.dropped:
            raise InputError("dropped index has no section")
        return {j: Q1}

    def degree(self, j):
        return self.algebra.degrees[j]


def reduced_basis(algebra):
    return algebra.reduced()


# ---------------------------------------------------------------------------
# polynomial families


class FamilySpec:
    """Polynomial family of algebras around a basepoint (all parameters = 0).

    Structure constants are ParamPoly truncated at `trunc`; `connection`
    assigns to each parameter an endomorphism-valued coefficient (the Gamma
    of a covariant derivative d + Gamma), also with ParamPoly entries.
    `truncated_construction` records that some construction dropped terms
    beyond the truncation order, which makes specializations away from the
    basepoint approximate.
    """

    def __init__(self, params, trunc, basis, unit, products, degrees=None,
                 connection=None, name="", truncated_construction=False):
        self.params = tuple(params)
        self.trunc = int(trunc)
        self.basis = tuple(basis)
        self.dim = len(self.basis)
        self.name = name or "family"
        self.degrees = tuple(degrees) if degrees is not None else (0,) * self.dim
        self.unit = {i: Fraction(c) for i, c in unit.items() if c}
        self.products = {}
        for (i, j), vec in products.items():
            cleaned = {k: v for k, v in vec.items() if v}
            if cleaned:
                self.products[(i, j)] = cleaned
        self.connection = dict(connection or {})
        for rho in self.connection:
            if rho not in self.params:
                raise InputError(f"connection names unknown parameter {rho!r}")
        self.truncated_construction = bool(truncated_construction)

    def poly_const(self, value):
        return ParamPoly.const(value, self.params, self.trunc)

    def mul_basis(self, i, j):
        return self.products.get((i, j), {})

    def multiply(self, a, b):
        out = {}
        for i, ca in a.items():
            for j, cb in b.items():
                for k, c in self.mul_basis(i, j).items():
                    prod = ca * cb * c
                    if not prod:
                        continue
                    if k in out:
                        out[k] = out[k] + prod
                    else:
                        out[k] = prod
        return {k: v for k, v in out.items() if v}

    def validate(self):
        zero = {p: Q0 for p in self.params}
        for j in range(self.dim):
            ej = {j: self.poly_const(1)}
            unit = {i: self.poly_const(c) for i, c in self.unit.items()}
            left = self.multiply(unit, ej)
            right = self.multiply(ej, unit)
            for got, side in ((left, "left"), (right, "right")):
                diff = dict(got)
                if j in diff:
                    diff[j] = diff[j] - 1
                else:
                    diff[j] = self.poly_const(-1)
                if any(bool(v) for v in diff.values()):
                    raise ValidationError(f"{side} unit axiom fails on e_{j}")
        for i in range(self.dim):
            for j in range(self.dim):
                for k in range(self.dim):
                    left = self.multiply(self.mul_basis(i, j),
                                         {k: self.poly_const(1)})
                    right = self.multiply({i: self.poly_const(1)},
                                          self.mul_basis(j, k))
                    keys = set(left) | set(right)
                    for key in keys:
                        l = left.get(key, self.poly_const(0))
                        r = right.get(key, self.poly_const(0))
                        if l - r:
                            raise ValidationError(
                                f"associativity fails on (e_{i}, e_{j}, e_{k}) "
                                f"at order <= {self.trunc}")
        if any(self.degrees):
            for (i, j), vec in self.products.items():
                want = self.degrees[i] + self.degrees[j]
                for k, c in vec.items():
                    if c and self.degrees[k] != want:
                        raise ValidationError("family product not homogeneous")
        self.specialize(zero).validate()
        return self

    def specialize(self, point):
        """Exact substitution of a parameter point; returns an AlgebraSpec."""
        pt = {}
        for p in self.params:
            if p not in point:
                raise InputError(f"missing value for parameter {p!r}")
            pt[p] = Fraction(point[p])
        products = {}
        for (i, j), vec in self.products.items():
            out = {k: c.subs(pt) for k, c in vec.items()}
            out = {k: v for k, v in out.items() if v}
            if out:
                products[(i, j)] = out
        tag = ",".join(f"{p}={pt[p]}" for p in self.params)
        return AlgebraSpec(self.basis, self.unit, products, self.degrees,
                           name=f"{self.name}[{tag}]")

    def basepoint(self):
        return self.specialize({p: 0 for p in self.params})

    def specialization_is_exact(self, point):
        """False when construction-order truncation makes the point approximate."""
        if not self.truncated_construction:
            return True
        return all(not Fraction(point[p]) for p in self.params)

    def connection_matrix(self, rho):
        gamma = self.connection.get(rho)
        if gamma is None:
            return SparseMatrix(self.dim, self.dim, {})
        return gamma

    def __repr__(self):
        return f"FamilySpec({self.name}, dim={self.dim}, params={self.params})"


def specialize_family(family, point):
    algebra = family.specialize(point)
    algebra.validate()
    return algebra, family.specialization_is_exact(point)


class GaugeCurve:
    """Invertible, unit-preserving ParamPoly matrix family phi_s with phi_0 given.

    Stored as a dim x dim matrix of ParamPoly.  The inverse is computed as a
    truncated geometric series around the exact inverse of the constant term.
    """

    def __init__(self, params, trunc, matrix):
        self.params = tuple(params)
        self.trunc = int(trunc)
        self.matrix = matrix
        self.dim = matrix.rows
        if matrix.rows != matrix.cols:
            raise InputError("gauge matrix must be square")

    def apply(self, vec):
        return self.matrix.matvec(vec)

    def constant_part(self):
        out = {}
        for (i, j), p in self.matrix.entries.items():
            c = p.constant_term()
            if c:
                out[(i, j)] = c
        return SparseMatrix(self.dim, self.dim, out)

    def inverse_matrix(self):
        from .exact import image_membership
        m0 = self.constant_part()
        cols = []
        for j in range(self.dim):
            col = image_membership(m0, {j: Q1})
            if col is None:
                raise ValidationError("gauge matrix is singular at the basepoint")
            cols.append(col)
        inv0 = SparseMatrix.from_columns(self.dim, cols)
        lift = inv0.map_entries(lambda c: ParamPoly.const(c, self.params, self.trunc))
        m0_lift = m0.map_entries(lambda c: ParamPoly.const(c, self.params, self.trunc))
        n = lift.matmul(self.matrix.add(m0_lift.scale(ParamPoly.const(-1, self.params, self.trunc))))
        # inverse = (I + n)^-1 inv0 = sum (-n)^k inv0, n has positive order
        acc = lift
        term = lift
        for _ in range(self.trunc):
            term = n.matmul(term).scale(ParamPoly.const(-1, self.params, self.trunc))
            if term.is_zero():
                break
            acc = acc.add(term)
        return acc

    def validate(self, unit):
        unit_poly = {i: ParamPoly.const(c, self.params, self.trunc)
                     for i, c in unit.items()}
        if not _poly_vec_eq(self.matrix.matvec(unit_poly), unit_poly):
            raise ValidationError("gauge curve does not preserve the unit")
        inv = self.inverse_matrix()
        prod = inv.matmul(self.matrix)
        ident = SparseMatrix.identity(self.dim).map_entries(
            lambda c: ParamPoly.const(c, self.params, self.trunc))
        if not prod.add(ident.scale(ParamPoly.const(-1, self.params, self.trunc))).is_zero():
            raise ValidationError("gauge inverse check failed within truncation order")
        return self


def _poly_vec_eq(a, b):
    keys = set(a) | set(b)
    for k in keys:
        av = a.get(k)
        bv = b.get(k)
        if av is None:
            if bv:
                return False
        elif bv is None:
            if av:
                return False
        elif av - bv:
            return False
    return True


def conjugated_family(algebra, gauge):
    """Family with products phi_s^{-1}(m(phi_s a, phi_s b)), truncated at order T.

    The result is isomorphic to the constant family via phi_s, which is the
    exact statement the transport tests lean on.
    """
    gauge.validate(algebra.unit)
    params, trunc = gauge.params, gauge.trunc
    inv = gauge.inverse_matrix()
    products = {}
    truncated = False
    for i in range(algebra.dim):
        for j in range(algebra.dim):
            a = gauge.apply({i: ParamPoly.const(1, params, trunc)})
            b = gauge.apply({j: ParamPoly.const(1, params, trunc)})
            prod = {}
            for ia, ca in a.items():
                for jb, cb in b.items():
                    for k, c in algebra.mul_basis(ia, jb).items():
                        term = ca * cb * ParamPoly.const(c, params, trunc)
                        if not term:
                            continue
                        prod[k] = prod.get(k, ParamPoly.const(0, params, trunc)) + term
            back = inv.matvec(prod)
            back = {k: v for k, v in back.items() if v}
            if back:
                products[(i, j)] = back
    fam = FamilySpec(params, trunc, algebra.basis, algebra.unit, products,
                     degrees=algebra.degrees, name=f"{algebra.name}^gauge",
                     truncated_construction=True)
    fam.validate()
    return fam


# ---------------------------------------------------------------------------
# the JSON input format


def load_algebra(source):
    """Load an AlgebraSpec or FamilySpec from a JSON file path, string or dict.

    Returns a validated object; presence of a nonempty "parameters" field
    selects a family.
    """
    if isinstance(source, dict):
        data = source
    else:
        text = source
        if "\n" not in str(source) and str(source).endswith(".json"):
            with open(source) as fh:
                text = fh.read()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"bad JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError("top level must be an object")
    basis = data.get("basis")
    if not isinstance(basis, list) or not basis:
        raise InputError("'basis' must be a nonempty list of names")
    dim = len(basis)
    degrees = data.get("degrees")
    if degrees is not None:
        if len(degrees) != dim or not all(isinstance(d, int) for d in degrees):
            raise InputError("'degrees' must list one integer per basis element")
    unit_raw = data.get("unit")
    if not isinstance(unit_raw, list) or len(unit_raw) != dim:
        raise InputError("'unit' must list one coefficient per basis element")
    params = tuple(data.get("parameters") or ())
    trunc = data.get("truncation_order", 4)
    if not isinstance(trunc, int) or trunc < 0:
        raise InputError("'truncation_order' must be a nonnegative integer")
    unit = {}
    for i, c in enumerate(unit_raw):
        val = _coerce_scalar(c, (), 0)
        if val:
            unit[i] = val
    sc = data.get("structure_constants")
    if not isinstance(sc, list):
        raise InputError("'structure_constants' must be a list of [i,j,k,coeff]")
    products = {}
    for row in sc:
        if not (isinstance(row, list) and len(row) == 4):
            raise InputError(f"bad structure constant row {row!r}")
        i, j, k, coeff = row
        for idx in (i, j, k):
            if not isinstance(idx, int) or not 0 <= idx < dim:
                raise InputError(f"index out of range in row {row!r}")
        val = _coerce_scalar(coeff, params, trunc)
        if val:
            vec = products.setdefault((i, j), {})
            vec[k] = vec.get(k, val * 0) + val
    if params:
        connection = {}
        for rho, rows in (data.get("connection") or {}).items():
            entries = {}
            for row in rows:
                if not (isinstance(row, list) and len(row) == 3):
                    raise InputError(f"bad connection row {row!r}")
                i, j, coeff = row
                entries[(i, j)] = _coerce_scalar(coeff, params, trunc)
            connection[rho] = SparseMatrix(dim, dim, entries)
        fam = FamilySpec(params, trunc, basis, unit, products, degrees,
                         connection=connection, name=data.get("name", ""))
        fam.validate()
        return fam
    differential = None
    if data.get("differential"):
        entries = {}
        for row in data["differential"]:
            if not (isinstance(row, list) and len(row) == 3):
                raise InputError(f"bad differential row {row!r}")
            i, j, coeff = row
            entries[(i, j)] = _coerce_scalar(coeff, (), 0)
        differential = SparseMatrix(dim, dim, entries)
    alg = AlgebraSpec(basis, unit, products, degrees, differential,
                      name=data.get("name", ""))
    alg.validate()
    return alg
