"""Exact scalars, truncated parameter polynomials, u-series and sparse linear algebra.

Everything downstream works over the rationals (fractions.Fraction) or over
ParamPoly, a multivariate polynomial truncated at a fixed total degree.  No
floats anywhere: kernels, images and homology dimensions are exact answers,
and equality of operators means equality of every matrix entry.

Vectors are plain dicts index -> scalar with no explicit zeros; helpers below
keep that invariant.  Scalars only need +, *, unary -, and truthiness
(bool(x) is False exactly for zero), which Fraction and ParamPoly both honor.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import InputError, TruncationError

Q0 = Fraction(0)
Q1 = Fraction(1)


def koszul_sign(permutation, degrees):
    """Sign picked up by permuting graded symbols.

    permutation[i] = original position of the symbol that ends up in slot i.
    degrees are the degrees of the symbols in their *original* order.  Each
    inverted pair (i < j in the result with permutation[i] > permutation[j])
    contributes (-1)^(deg_a * deg_b).
    """
    if sorted(permutation) != list(range(len(degrees))):
        raise InputError("permutation/degree length mismatch or not a permutation")
    exp = 0
    n = len(permutation)
    for i in range(n):
        for j in range(i + 1, n):
            if permutation[i] > permutation[j]:
                exp += degrees[permutation[i]] * degrees[permutation[j]]
    return -1 if exp % 2 else 1


def sign_pow(exponent):
    """(-1)^exponent as a Fraction, safe for negative exponents."""
    return Fraction(-1) if exponent % 2 else Q1


def perm_parity(permutation):
    """Ordinary (-1)^inversions, i.e. koszul_sign with all degrees odd."""
    inv = 0
    n = len(permutation)
    for i in range(n):
        for j in range(i + 1, n):
            if permutation[i] > permutation[j]:
                inv += 1
    return -1 if inv % 2 else 1


# ---------------------------------------------------------------------------
# vectors as sparse dicts


def vec_add(a, b):
    out = dict(a)
    for k, v in b.items():
        w = out.get(k)
        s = v if w is None else w + v
        if s:
            out[k] = s
        elif w is not None:
            del out[k]
    return out


def vec_scale(c, a):
    if not c:
        return {}
    return {k: c * v for k, v in a.items()}


def vec_sub(a, b):
    return vec_add(a, vec_scale(Fraction(-1), b))


def vec_is_zero(a):
    return not any(bool(v) for v in a.values())


def vec_eq(a, b):
    return vec_is_zero(vec_sub(a, b))


# ---------------------------------------------------------------------------
# truncated multivariate polynomials

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
                    r"|(?P<op>[-+*^()]))")


class ParamPoly:
    """Polynomial in named parameters, truncated at total degree `trunc`.

    Monomials of total degree > trunc are dropped on every operation; the
    truncation order is part of the value, and binary operations take the
    smaller of the two orders.  Coefficients are Fractions; exponent keys are
    tuples aligned with `params`.
    """

    __slots__ = ("params", "trunc", "coeffs")

    def __init__(self, params, trunc, coeffs=None):
        self.params = tuple(params)
        self.trunc = int(trunc)
        cleaned = {}
        if coeffs:
            for exps, c in coeffs.items():
                if not isinstance(c, Fraction):
                    c = Fraction(c)
                if c and sum(exps) <= self.trunc:
                    cleaned[tuple(exps)] = c
        self.coeffs = cleaned

    # -- constructors -------------------------------------------------

    @classmethod
    def const(cls, value, params=(), trunc=10**9):
        z = tuple(0 for _ in params)
        return cls(params, trunc, {z: Fraction(value)})

    @classmethod
    def variable(cls, name, params, trunc):
        params = tuple(params)
        if name not in params:
            raise InputError(f"unknown parameter {name!r}")
        e = tuple(1 if p == name else 0 for p in params)
        return cls(params, trunc, {e: Q1})

    @classmethod
    def parse(cls, text, params, trunc):
        """Parse '1 + 2*s - t^2' style strings (rationals p/q allowed)."""
        tokens = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                if text[pos:].strip():
                    raise InputError(f"cannot tokenize polynomial {text!r} at {pos}")
                break
            tokens.append(m)
            pos = m.end()
        items = []
        for m in tokens:
            if m.group("num"):
                items.append(("num", Fraction(m.group("num"))))
            elif m.group("name"):
                items.append(("name", m.group("name")))
            else:
                items.append(("op", m.group("op")))

        out = [0]  # parser position

        def parse_sum():
            acc = parse_term(ParamPoly.const(1, params, trunc))
            sign = None
            while out[0] < len(items):
                kind, val = items[out[0]]
                if kind == "op" and val in "+-":
                    out[0] += 1
                    sign = val
                    nxt = parse_term(ParamPoly.const(1, params, trunc))
                    acc = acc + nxt if sign == "+" else acc - nxt
                elif kind == "op" and val == ")":
                    break
                else:
                    raise InputError(f"unexpected token in polynomial {text!r}")
            return acc

        def parse_term(acc):
            first = True
            while out[0] < len(items):
                kind, val = items[out[0]]
                if kind == "op" and val in "+-" and not first:
                    break
                if kind == "op" and val == ")":
                    break
                if kind == "op" and val == "*":
                    out[0] += 1
                    continue
                acc = acc * parse_factor()
                first = False
            return acc

        def parse_factor():
            kind, val = items[out[0]]
            if kind == "op" and val == "-":
                out[0] += 1
                return ParamPoly.const(-1, params, trunc) * parse_factor()
            if kind == "op" and val == "+":
                out[0] += 1
                return parse_factor()
            if kind == "op" and val == "(":
                out[0] += 1
                inner = parse_sum()
                if out[0] >= len(items) or items[out[0]] != ("op", ")"):
                    raise InputError(f"unbalanced parentheses in {text!r}")
                out[0] += 1
                return maybe_power(inner)
            if kind == "num":
                out[0] += 1
                return maybe_power(ParamPoly.const(val, params, trunc))
            if kind == "name":
                out[0] += 1
                return maybe_power(ParamPoly.variable(val, params, trunc))
            raise InputError(f"unexpected token in polynomial {text!r}")

        def maybe_power(base):
            if out[0] < len(items) and items[out[0]] == ("op", "^"):
                out[0] += 1
                kind, val = items[out[0]]
                if kind != "num" or val.denominator != 1:
                    raise InputError(f"exponent must be an integer in {text!r}")
                out[0] += 1
                acc = ParamPoly.const(1, params, trunc)
                for _ in range(int(val)):
                    acc = acc * base
                return acc
            return base

        if not items:
            return cls.const(0, params, trunc)
        result = parse_sum()
        if out[0] != len(items):
            raise InputError(f"trailing tokens in polynomial {text!r}")
        return result

    # -- ring operations ----------------------------------------------

    def _align(self, other):
        if isinstance(other, (int, Fraction)):
            other = ParamPoly.const(other, self.params, self.trunc)
        if not isinstance(other, ParamPoly):
            return NotImplemented
        if self.params != other.params:
            raise InputError("parameter lists do not match")
        return other

    def __add__(self, other):
        other = self._align(other)
        if other is NotImplemented:
            return NotImplemented
        trunc = min(self.trunc, other.trunc)
        coeffs = dict(self.coeffs)
        for e, c in other.coeffs.items():
            coeffs[e] = coeffs.get(e, Q0) + c
        return ParamPoly(self.params, trunc, coeffs)

    __radd__ = __add__

    def __neg__(self):
        return ParamPoly(self.params, self.trunc,
                         {e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other):
        other = self._align(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            return ParamPoly(self.params, self.trunc,
                             {e: c * v for e, v in self.coeffs.items()})
        other = self._align(other)
        if other is NotImplemented:
            return NotImplemented
        trunc = min(self.trunc, other.trunc)
        coeffs = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                if sum(e) > trunc:
                    continue
                coeffs[e] = coeffs.get(e, Q0) + c1 * c2
        return ParamPoly(self.params, trunc, coeffs)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.__mul__(other)
        return NotImplemented

    def __bool__(self):
        return any(bool(c) for c in self.coeffs.values())

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ParamPoly.const(other, self.params, self.trunc)
        if not isinstance(other, ParamPoly):
            return NotImplemented
        return self.params == other.params and not (self - other)

    def __hash__(self):
        return hash((self.params, frozenset(self.coeffs.items())))

    # -- calculus ------------------------------------------------------

    def derivative(self, name):
        """Exact partial derivative; lowers degree, never truncates."""
        if name not in self.params:
            raise InputError(f"unknown parameter {name!r}")
        i = self.params.index(name)
        coeffs = {}
        for e, c in self.coeffs.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                coeffs[tuple(e2)] = c * e[i]
        return ParamPoly(self.params, self.trunc, coeffs)

    def subs(self, point):
        """Evaluate at a full point {name: Fraction}; returns a Fraction."""
        total = Q0
        vals = []
        for p in self.params:
            if p not in point:
                raise InputError(f"missing value for parameter {p!r}")
            vals.append(Fraction(point[p]))
        for e, c in self.coeffs.items():
            term = c
            for exp, v in zip(e, vals):
                for _ in range(exp):
                    term *= v
            total += term
        return total

    def constant_term(self):
        z = tuple(0 for _ in self.params)
        return self.coeffs.get(z, Q0)

    def homogeneous_part(self, order):
        return ParamPoly(self.params, self.trunc,
                         {e: c for e, c in self.coeffs.items() if sum(e) == order})

    def max_order(self):
        return max((sum(e) for e in self.coeffs), default=0)

    def __repr__(self):
        if not self.coeffs:
            return "0"
        bits = []
        for e, c in sorted(self.coeffs.items()):
            mono = "*".join(f"{p}^{k}" if k > 1 else p
                            for p, k in zip(self.params, e) if k)
            if mono:
                bits.append(f"{c}*{mono}" if c != 1 else mono)
            else:
                bits.append(str(c))
        return " + ".join(bits)


def param_derivative(poly, name):
    return poly.derivative(name)


# ---------------------------------------------------------------------------
# finite Laurent windows in the degree-2 formal variable u


class USeries:
    """Finite window of u-powers with arbitrary payloads.

    coeffs maps the u-exponent k (window lo <= k <= hi) to a payload; payloads
    must support +, scalar *, and boolean zero-testing.  Multiplying by u^j
    shifts the window contents; a nonzero payload pushed outside the window is
    an explicit TruncationError, never a silent drop.
    """

    __slots__ = ("window", "coeffs")

    def __init__(self, window, coeffs=None):
        lo, hi = window
        if lo > hi:
            raise InputError("empty u-window")
        self.window = (int(lo), int(hi))
        self.coeffs = {}
        if coeffs:
            for k, v in coeffs.items():
                if not _payload_zero(v):
                    if k < lo or k > hi:
                        raise TruncationError(f"u^{k} outside window {self.window}")
                    self.coeffs[int(k)] = v

    def u_multiply(self, j):
        lo, hi = self.window
        out = {}
        for k, v in self.coeffs.items():
            k2 = k + j
            if k2 < lo or k2 > hi:
                raise TruncationError(
                    f"u^{k2} leaves window [{lo}, {hi}] under u^{j} multiplication")
            out[k2] = v
        return USeries(self.window, out)

    def add(self, other):
        if self.window != other.window:
            raise InputError("u-window mismatch")
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            if k in out:
                s = out[k] + v
                if _payload_zero(s):
                    del out[k]
                else:
                    out[k] = s
            else:
                out[k] = v
        return USeries(self.window, out)

    def scale(self, c):
        return USeries(self.window, {k: c * v for k, v in self.coeffs.items()})

    def map(self, fn):
        return USeries(self.window, {k: fn(v) for k, v in self.coeffs.items()})

    def is_zero(self):
        return not self.coeffs

    def items(self):
        return sorted(self.coeffs.items())

    def __add__(self, other):
        return self.add(other)

    def __rmul__(self, c):
        return self.scale(c)

    def __bool__(self):
        return not self.is_zero()


def _payload_zero(v):
    z = getattr(v, "is_zero", None)
    if callable(z):
        return v.is_zero()
    return not v


def u_multiply(series, j):
    return series.u_multiply(j)


# ---------------------------------------------------------------------------
# sparse exact matrices


class SparseMatrix:
    """Sparse matrix as {(i, j): scalar} with explicit shape.

    Entries are Fractions in all eliminations; ParamPoly entries are allowed
    for storage (family matrices) and must be specialized before rank/kernel
    questions are asked.
    """

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows, cols, entries=None):
        self.rows = int(rows)
        self.cols = int(cols)
        self.entries = {}
        if entries:
            for (i, j), v in entries.items():
                if v:
                    if not (0 <= i < rows and 0 <= j < cols):
                        raise InputError(f"entry ({i},{j}) outside {rows}x{cols}")
                    self.entries[(i, j)] = v

    @classmethod
    def identity(cls, n):
        return cls(n, n, {(i, i): Q1 for i in range(n)})

    @classmethod
    def from_columns(cls, rows, columns):
        entries = {}
        for j, col in enumerate(columns):
            for i, v in col.items():
                if v:
                    entries[(i, j)] = v
        return cls(rows, len(columns), entries)

    def get(self, i, j):
        return self.entries.get((i, j), Q0)

    def matvec(self, vec):
        out = {}
        for (i, j), v in self.entries.items():
            c = vec.get(j)
            if c:
                s = out.get(i, Q0) + v * c
                if s:
                    out[i] = s
                elif i in out:
                    del out[i]
        return out

    def matmul(self, other):
        if self.cols != other.rows:
            raise InputError("matmul shape mismatch")
        by_row = {}
        for (i, j), v in self.entries.items():
            by_row.setdefault(i, []).append((j, v))
        by_col = {}
        for (j, k), v in other.entries.items():
            by_col.setdefault(j, {})
        for (j, k), v in other.entries.items():
            by_col[j][k] = v
        out = {}
        for i, row in by_row.items():
            acc = {}
            for j, v in row:
                seg = by_col.get(j)
                if not seg:
                    continue
                for k, w in seg.items():
                    s = acc.get(k, Q0) + v * w
                    if s:
                        acc[k] = s
                    elif k in acc:
                        del acc[k]
            for k, s in acc.items():
                out[(i, k)] = s
        return SparseMatrix(self.rows, other.cols, out)

    def add(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise InputError("matrix shape mismatch")
        out = dict(self.entries)
        for key, v in other.entries.items():
            s = out.get(key, Q0) + v
            if s:
                out[key] = s
            elif key in out:
                del out[key]
        return SparseMatrix(self.rows, self.cols, out)

    def scale(self, c):
        if not c:
            return SparseMatrix(self.rows, self.cols, {})
        return SparseMatrix(self.rows, self.cols,
                            {k: c * v for k, v in self.entries.items()})

    def transpose(self):
        return SparseMatrix(self.cols, self.rows,
                            {(j, i): v for (i, j), v in self.entries.items()})

    def map_entries(self, fn):
        out = {}
        for k, v in self.entries.items():
            w = fn(v)
            if w:
                out[k] = w
        return SparseMatrix(self.rows, self.cols, out)

    def is_zero(self):
        return not self.entries

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and \
            self.add(other.scale(Fraction(-1))).is_zero()

    def __hash__(self):
        raise TypeError("SparseMatrix is mutable-shaped; not hashable")

    def to_dense(self):
        return [[self.get(i, j) for j in range(self.cols)] for i in range(self.rows)]

    def __repr__(self):
        return f"SparseMatrix({self.rows}x{self.cols}, {len(self.entries)} entries)"


def _row_dicts(m):
    rows = {}
    for (i, j), v in m.entries.items():
        rows.setdefault(i, {})[j] = v
    return rows


def _normalize_row(row):
    """Clear denominators and divide by content: integer row, gcd 1."""
    from math import gcd, lcm
    den = 1
    for v in row.values():
        den = lcm(den, v.denominator)
    num = 0
    scaled = {}
    for j, v in row.items():
        w = v * den
        scaled[j] = w
        num = gcd(num, int(w))
    if num > 1:
        scaled = {j: v / num for j, v in scaled.items()}
    return scaled


def _eliminate(rows, track_rhs=False):
    """Row reduction over Fraction with sparsity-first pivoting.

    rows: list of dicts col->Fraction (the special key 'rhs' is never chosen
    as pivot when track_rhs).  Returns (pivots, reduced_rows) where pivots is
    a list of (row_index, col) in elimination order and reduced rows are in
    echelon form with all entries above and below pivots cleared.
    """
    work = [_normalize_row(dict(r)) for r in rows if r]
    pivots = []
    used_cols = set()
    done = []
    while work:
        # pick the sparsest row, then its smallest-support column
        work.sort(key=len)
        row = work.pop(0)
        cand = [j for j in row if j != "rhs" and j not in used_cols]
        if not cand:
            done.append(row)
            continue
        piv = min(cand)
        used_cols.add(piv)
        pv = row[piv]
        row = {j: v / pv for j, v in row.items()}
        nxt = []
        for other in work:
            c = other.get(piv)
            if c:
                new = dict(other)
                for j, v in row.items():
                    s = new.get(j, Q0) - c * v
                    if s:
                        new[j] = s
                    elif j in new:
                        del new[j]
                if new:
                    nxt.append(_normalize_row(new))
            else:
                nxt.append(other)
        for other in done:
            c = other.get(piv)
            if c:
                for j, v in row.items():
                    s = other.get(j, Q0) - c * v
                    if s:
                        other[j] = s
                    elif j in other:
                        del other[j]
        work = nxt
        pivots.append((row, piv))
    # back-substitute among pivot rows so each pivot column is exclusive
    for idx in range(len(pivots) - 1, -1, -1):
        row, piv = pivots[idx]
        for other, _p in pivots[:idx]:
            c = other.get(piv)
            if c:
                for j, v in row.items():
                    s = other.get(j, Q0) - c * v
                    if s:
                        other[j] = s
                    elif j in other:
                        del other[j]
    return pivots, done


def rank(m):
    pivots, _ = _eliminate(_row_dicts(m).values())
    return len(pivots)


def kernel_basis(m):
    """Basis of {x : m x = 0} as a list of sparse dict-vectors.

    Deterministic: free columns in increasing order, each basis vector has a
    1 in its free column.
    """
    pivots, _ = _eliminate(_row_dicts(m).values())
    pivot_cols = {piv: row for row, piv in pivots}
    basis = []
    for j in range(m.cols):
        if j in pivot_cols:
            continue
        vec = {j: Q1}
        for piv, row in pivot_cols.items():
            c = row.get(j)
            if c:
                vec[piv] = -c
        basis.append(vec)
    return basis


def image_membership(m, target):
    """Solve m x = target exactly; returns x as a dict or None if no solution."""
    rows = _row_dicts(m)
    aug = []
    for i in range(m.rows):
        row = dict(rows.get(i, {}))
        t = target.get(i)
        if t:
            row["rhs"] = t
        if row:
            aug.append(row)
    pivots, leftovers = _eliminate(aug, track_rhs=True)
    for row in leftovers:
        if row.get("rhs"):
            return None
    x = {}
    for row, piv in pivots:
        if piv == "rhs":
            return None
        r = row.get("rhs")
        if r:
            x[piv] = r
    # verify (cheap insurance against pivot bookkeeping slips)
    if not vec_eq(m.matvec(x), {k: v for k, v in target.items() if v}):
        return None
    return x


def column_space_basis(m):
    """Independent columns of m, greedily from the left (deterministic)."""
    basis = []
    chosen = []
    cols = {}
    for (i, j), v in m.entries.items():
        cols.setdefault(j, {})[i] = v
    current = SparseMatrix(m.rows, 0, {})
    for j in range(m.cols):
        col = cols.get(j, {})
        if not col:
            continue
        if image_membership(current, col) is None:
            chosen.append(j)
            basis.append(col)
            current = SparseMatrix.from_columns(m.rows, basis)
    return chosen, basis
