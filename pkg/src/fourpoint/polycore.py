"""Exact multivariate polynomials over Q, resultants, GCDs and univariate roots.

Coefficients are ``gmpy2.mpq``; dense univariate helpers work on lists of
coefficients ordered from the constant term upward.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, NamedTuple, Optional, Sequence, Union

import numpy as np
from gmpy2 import mpq, mpz

Number = Union[int, Fraction, "mpq"]


class DegenerateDegreeError(ValueError):
    """Raised when an elimination variable does not occur in an operand."""


class IllConditionedError(ValueError):
    """Raised when a numeric polynomial has a negligible leading coefficient."""


class NotDivisibleError(ArithmeticError):
    pass


def _q(c) -> "mpq":
    if isinstance(c, Fraction):
        return mpq(c.numerator, c.denominator)
    return mpq(c)


def _to_fraction(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


class ComplexPoint2(NamedTuple):
    x: complex
    y: complex


class RatMPoly:
    """Sparse polynomial with rational coefficients in named variables."""

    __slots__ = ("variables", "terms")

    def __init__(self, variables: Sequence[str], terms: Optional[Mapping[tuple, Number]] = None):
        self.variables = tuple(variables)
        n = len(self.variables)
        clean = {}
        for e, c in (terms or {}).items():
            if len(e) != n:
                raise ValueError(f"exponent {e} does not match variables {self.variables}")
            c = _q(c)
            if c:
                clean[tuple(e)] = c
        self.terms = clean

    # -- construction -------------------------------------------------
    @classmethod
    def const(cls, c: Number, variables: Sequence[str] = ()) -> "RatMPoly":
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def var(cls, name: str, variables: Optional[Sequence[str]] = None) -> "RatMPoly":
        variables = tuple(variables) if variables is not None else (name,)
        e = tuple(1 if v == name else 0 for v in variables)
        return cls(variables, {e: 1})

    @classmethod
    def from_univariate(cls, coeffs: Sequence[Number], var: str, variables: Optional[Sequence[str]] = None):
        variables = tuple(variables) if variables is not None else (var,)
        i = variables.index(var)
        terms = {}
        for d, c in enumerate(coeffs):
            e = [0] * len(variables)
            e[i] = d
            terms[tuple(e)] = c
        return cls(variables, terms)

    def _fast(self, variables, terms) -> "RatMPoly":
        # skip validation: terms already clean
        p = RatMPoly.__new__(RatMPoly)
        p.variables = variables
        p.terms = terms
        return p

    # -- variable handling --------------------------------------------
    def with_variables(self, variables: Sequence[str]) -> "RatMPoly":
        variables = tuple(variables)
        if variables == self.variables:
            return self
        idx = []
        for v in self.variables:
            if v in variables:
                idx.append(variables.index(v))
            else:
                idx.append(None)
        terms = {}
        n = len(variables)
        for e, c in self.terms.items():
            new = [0] * n
            for k, ek in enumerate(e):
                if ek:
                    if idx[k] is None:
                        raise ValueError(f"variable {self.variables[k]} is used but not kept")
                    new[idx[k]] = ek
            terms[tuple(new)] = c
        return self._fast(variables, terms)

    def used_variables(self) -> tuple:
        used = [False] * len(self.variables)
        for e in self.terms:
            for k, ek in enumerate(e):
                if ek:
                    used[k] = True
        return tuple(v for v, u in zip(self.variables, used) if u)

    def _aligned(self, other: "RatMPoly"):
        if self.variables == other.variables:
            return self, other, self.variables
        vs = list(self.variables) + [v for v in other.variables if v not in self.variables]
        return self.with_variables(vs), other.with_variables(vs), tuple(vs)

    def _coerce(self, other) -> "RatMPoly":
        if isinstance(other, RatMPoly):
            return other
        return RatMPoly.const(other, self.variables)

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        a, b, vs = self._aligned(self._coerce(other))
        terms = dict(a.terms)
        for e, c in b.terms.items():
            s = terms.get(e, 0) + c
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        return self._fast(vs, terms)

    __radd__ = __add__

    def __neg__(self):
        return self._fast(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, RatMPoly):
            c = _q(other)
            if not c:
                return self._fast(self.variables, {})
            return self._fast(self.variables, {e: v * c for e, v in self.terms.items()})
        a, b, vs = self._aligned(other)
        terms: dict = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return self._fast(vs, {e: c for e, c in terms.items() if c})

    __rmul__ = __mul__

    def scale(self, c: Number) -> "RatMPoly":
        return self * c

    def __truediv__(self, c):
        if isinstance(c, RatMPoly):
            return exact_divide(self, c)
        return self * (1 / _q(c))

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = RatMPoly.const(1, self.variables)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, RatMPoly):
            if isinstance(other, (int, Fraction)) or type(other).__name__ == "mpq":
                other = RatMPoly.const(other, self.variables)
            else:
                return NotImplemented
        a, b, _ = self._aligned(other)
        return a.terms == b.terms

    def __hash__(self):
        return hash(frozenset(self.with_variables(sorted(self.used_variables())).terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    # -- inspection -----------------------------------------------------
    def degree(self, var: Optional[str] = None) -> int:
        """Total degree, or degree in ``var``; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        if var is None:
            return max(sum(e) for e in self.terms)
        if var not in self.variables:
            return 0
        i = self.variables.index(var)
        return max(e[i] for e in self.terms)

    total_degree = degree

    def coefficient(self, exponents: Sequence[int]) -> "mpq":
        return self.terms.get(tuple(exponents), mpq(0))

    def homogeneous_part(self, d: int) -> "RatMPoly":
        return self._fast(self.variables, {e: c for e, c in self.terms.items() if sum(e) == d})

    def coefficients_in(self, var: str) -> dict:
        """Map degree in ``var`` -> coefficient polynomial (same variable tuple)."""
        i = self.variables.index(var)
        out: dict = {}
        for e, c in self.terms.items():
            d = e[i]
            rest = e[:i] + (0,) + e[i + 1 :]
            out.setdefault(d, {})[rest] = c
        return {d: self._fast(self.variables, t) for d, t in out.items()}

    def leading_coefficient(self, var: str) -> "RatMPoly":
        return self.coefficients_in(var).get(self.degree(var), RatMPoly((self.variables)))

    def as_univariate(self, var: str) -> list:
        """Dense coefficient list (constant first); the polynomial must only involve ``var``."""
        extra = set(self.used_variables()) - {var}
        if extra:
            raise ValueError(f"polynomial also involves {sorted(extra)}")
        if not self.terms:
            return []
        if var not in self.variables:
            return [self.terms.get((0,) * len(self.variables), mpq(0))]
        i = self.variables.index(var)
        out = [mpq(0)] * (self.degree(var) + 1)
        for e, c in self.terms.items():
            out[e[i]] = c
        return out

    def max_multilinear_degree(self) -> int:
        """Largest exponent of any single variable."""
        return max((max(e) if e else 0 for e in self.terms), default=-1)

    # -- evaluation and substitution ------------------------------------
    def evaluate(self, point) -> complex:
        """Value at a point given as a sequence (variable order) or a mapping."""
        if isinstance(point, Mapping):
            point = [point[v] for v in self.variables]
        if len(point) != len(self.variables):
            raise ValueError("point dimension does not match the variable count")
        z = [complex(v) for v in point]
        cache = [{0: 1 + 0j} for _ in z]
        total = 0j
        for e, c in self.terms.items():
            term = complex(c)
            for k, ek in enumerate(e):
                if ek:
                    pk = cache[k].get(ek)
                    if pk is None:
                        pk = z[k] ** ek
                        cache[k][ek] = pk
                    term *= pk
            total += term
        return total

    __call__ = evaluate

    def evaluate_abs(self, point) -> float:
        """Sum of |term| at ``point``; the natural scale for a relative residual."""
        if isinstance(point, Mapping):
            point = [point[v] for v in self.variables]
        z = [abs(complex(v)) for v in point]
        total = 0.0
        for e, c in self.terms.items():
            term = abs(float(c))
            for k, ek in enumerate(e):
                if ek:
                    term *= z[k] ** ek
            total += term
        return total

    def evaluate_exact(self, point) -> "mpq":
        if isinstance(point, Mapping):
            point = [point[v] for v in self.variables]
        z = [_q(v) for v in point]
        total = mpq(0)
        for e, c in self.terms.items():
            term = c
            for k, ek in enumerate(e):
                if ek:
                    term *= z[k] ** ek
            total += term
        return total

    def subs(self, mapping: Mapping[str, object]) -> "RatMPoly":
        """Substitute polynomials or rationals for variables (simultaneously)."""
        keep = [v for v in self.variables if v not in mapping]
        images = {}
        for v, val in mapping.items():
            if v not in self.variables:
                continue
            images[v] = val if isinstance(val, RatMPoly) else RatMPoly.const(val, ())
        result = RatMPoly(keep)
        powcache: dict = {}
        for e, c in self.terms.items():
            term = RatMPoly.const(c, keep)
            plain = [0] * len(keep)
            for k, ek in enumerate(e):
                v = self.variables[k]
                if v in images:
                    if ek:
                        key = (v, ek)
                        if key not in powcache:
                            powcache[key] = images[v] ** ek
                        term = term * powcache[key]
                elif ek:
                    plain[keep.index(v)] = ek
            term = term * RatMPoly(keep, {tuple(plain): 1})
            result = result + term
        return result

    def diff(self, var: str) -> "RatMPoly":
        if var not in self.variables:
            return RatMPoly(self.variables)
        i = self.variables.index(var)
        terms = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = e[:i] + (e[i] - 1,) + e[i + 1 :]
                terms[ne] = c * e[i]
        return self._fast(self.variables, terms)

    # -- content --------------------------------------------------------
    def content(self) -> "mpq":
        """Positive rational content: gcd of numerators over lcm of denominators."""
        if not self.terms:
            return mpq(0)
        from gmpy2 import gcd, lcm

        g = mpz(0)
        l = mpz(1)
        for c in self.terms.values():
            g = gcd(g, c.numerator)
            l = lcm(l, c.denominator)
        return mpq(g, l)

    def primitive(self) -> "RatMPoly":
        """Integer-coefficient associate with content 1 and positive leading term."""
        if not self.terms:
            return self
        p = self * (1 / self.content())
        lead = max(p.terms)  # lex-largest exponent
        if p.terms[lead] < 0:
            p = -p
        return p

    def clear_denominators(self) -> tuple["RatMPoly", "mpz"]:
        from gmpy2 import lcm

        l = mpz(1)
        for c in self.terms.values():
            l = lcm(l, c.denominator)
        return self * l, l

    # -- display --------------------------------------------------------
    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, key=lambda e: (-sum(e), tuple(-x for x in e))):
            c = self.terms[e]
            mono = "*".join(
                v if k == 1 else f"{v}^{k}" for v, k in zip(self.variables, e) if k
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> dict:
        return {
            "variables": list(self.variables),
            "terms": [
                {"exponents": list(e), "coefficient": str(c)}
                for e, c in sorted(self.terms.items(), reverse=True)
            ],
        }

    @classmethod
    def from_json(cls, d: Mapping) -> "RatMPoly":
        return cls(d["variables"], {tuple(t["exponents"]): mpq(t["coefficient"]) for t in d["terms"]})


def mp_add(a: RatMPoly, b: RatMPoly) -> RatMPoly:
    return a + b


def mp_mul(a: RatMPoly, b: RatMPoly) -> RatMPoly:
    return a * b


def mp_scale(a: RatMPoly, c: Number) -> RatMPoly:
    return a * c


def mp_pow(a: RatMPoly, n: int) -> RatMPoly:
    return a ** n


def mp_eval(p: RatMPoly, point) -> complex:
    return p.evaluate(point)


def exact_divide(p: RatMPoly, q: RatMPoly) -> RatMPoly:
    """Quotient p/q, raising NotDivisibleError unless the division is exact."""
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    p, q, vs = p._aligned(q)
    lq = max(q.terms)
    cq = q.terms[lq]
    rem = dict(p.terms)
    quot: dict = {}
    while rem:
        lr = max(rem)
        if any(x < y for x, y in zip(lr, lq)):
            raise NotDivisibleError("polynomial division leaves a remainder")
        e = tuple(x - y for x, y in zip(lr, lq))
        c = rem[lr] / cq
        quot[e] = c
        for eq_, cq_ in q.terms.items():
            t = tuple(x + y for x, y in zip(e, eq_))
            s = rem.get(t, 0) - c * cq_
            if s:
                rem[t] = s
            else:
                rem.pop(t, None)
    return RatMPoly(vs, quot)


def divides(q: RatMPoly, p: RatMPoly) -> bool:
    try:
        exact_divide(p, q)
    except NotDivisibleError:
        return False
    return True


# ---------------------------------------------------------------------------
# dense univariate helpers (constant term first)


def u_trim(a: list) -> list:
    while a and not a[-1]:
        a.pop()
    return a


def u_add(a, b):
    n = max(len(a), len(b))
    return u_trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def u_sub(a, b):
    n = max(len(a), len(b))
    return u_trim([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)])


def u_mul(a, b):
    if not a or not b:
        return []
    out = [mpq(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return u_trim(out)


def u_scale(a, c):
    return u_trim([x * c for x in a])


def u_divmod(a, b):
    if not b:
        raise ZeroDivisionError("division by zero polynomial")
    a = [mpq(x) for x in a]
    db = len(b) - 1
    lb = b[-1]
    if len(a) - 1 < db:
        return [], u_trim(a)
    quot = [mpq(0)] * (len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i] / lb
        if c:
            quot[i - db] = c
            for j in range(db + 1):
                a[i - db + j] -= c * b[j]
    return u_trim(quot), u_trim(a[:db])


def u_monic(a):
    if not a:
        return a
    lc = a[-1]
    return [x / lc for x in a]


def u_gcd(a, b):
    """Monic gcd over Q."""
    a, b = u_trim([mpq(x) for x in a]), u_trim([mpq(x) for x in b])
    while b:
        _, r = u_divmod(a, b)
        a, b = b, _u_primitive_q(r)
    return u_monic(a)


def _u_primitive_q(a):
    # rescale a rational polynomial to integer coefficients with unit content
    if not a:
        return a
    from gmpy2 import gcd, lcm

    l = mpz(1)
    for c in a:
        l = lcm(l, mpq(c).denominator)
    ints = [mpz(c * l) for c in a]
    g = mpz(0)
    for c in ints:
        g = gcd(g, c)
    return [mpq(c, g) for c in ints]


def u_deriv(a):
    return u_trim([a[i] * i for i in range(1, len(a))])


def u_eval(a, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def u_exact_div(a, b):
    q, r = u_divmod(a, b)
    if r:
        raise NotDivisibleError("univariate division leaves a remainder")
    return q


def squarefree_decomposition(a) -> list:
    """Yun's algorithm: list of (factor, multiplicity) with monic squarefree factors."""
    a = u_monic(u_trim([mpq(x) for x in a]))
    if len(a) <= 1:
        return []
    out = []
    b = u_deriv(a)
    c = u_gcd(a, b)
    w = u_exact_div(a, c)
    y = u_exact_div(b, c)
    i = 1
    while len(w) > 1:
        z = u_sub(y, u_deriv(w))
        g = u_gcd(w, z)
        if len(g) > 1:
            out.append((g, i))
        w = u_exact_div(w, g)
        y = u_exact_div(z, g)
        i += 1
    return out


def u_gcd_mod(a, b, p: int):
    """Monic gcd over GF(p); inputs are integer coefficient lists."""
    a = [int(x) % p for x in a]
    b = [int(x) % p for x in b]

    def trim(v):
        while v and v[-1] == 0:
            v.pop()
        return v

    a, b = trim(a), trim(b)
    while b:
        inv = pow(b[-1], -1, p)
        db = len(b) - 1
        while len(a) - 1 >= db and a:
            c = a[-1] * inv % p
            shift = len(a) - 1 - db
            for j in range(db + 1):
                a[shift + j] = (a[shift + j] - c * b[j]) % p
            trim(a)
        a, b = b, a
    if a:
        inv = pow(a[-1], -1, p)
        a = [x * inv % p for x in a]
    return a


_PRIMES = (2305843009213693951, 4611686018427387847, 9223372036854775783, 1000000000000000003)


def is_squarefree(a) -> bool:
    """Exact squarefree test; a modular certificate short-circuits the rational gcd."""
    a = _u_primitive_q(u_trim([mpq(x) for x in a]))
    if len(a) <= 2:
        return True
    ints = [int(c) for c in a]
    d = [i * c for i, c in enumerate(ints)][1:]
    for p in _PRIMES:
        if ints[-1] % p == 0:
            continue
        if len(u_gcd_mod(ints, d, p)) == 1:
            return True
        break
    return len(u_gcd(a, u_deriv(a))) == 1


def squarefree_part(a) -> list:
    a = u_trim([mpq(x) for x in a])
    if is_squarefree(a):
        return u_monic(a)
    g = u_gcd(a, u_deriv(a))
    return u_monic(u_exact_div(a, g))


def interpolate(xs: Sequence, ys: Sequence) -> list:
    """Exact Newton interpolation; returns dense coefficients."""
    n = len(xs)
    xs = [mpq(x) for x in xs]
    coef = [mpq(y) for y in ys]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    poly = [coef[-1]]
    for i in range(n - 2, -1, -1):
        # poly = poly * (x - xs[i]) + coef[i]
        new = [mpq(0)] * (len(poly) + 1)
        for k, c in enumerate(poly):
            new[k + 1] += c
            new[k] -= c * xs[i]
        new[0] += coef[i]
        poly = new
    return u_trim(poly)


# ---------------------------------------------------------------------------
# determinants and resultants


def bareiss_det(matrix) -> "mpz":
    """Fraction-free Gaussian elimination on an integer matrix."""
    m = [[mpz(x) for x in row] for row in matrix]
    n = len(m)
    if n == 0:
        return mpz(1)
    sign = 1
    prev = mpz(1)
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return mpz(0)
        pivot = m[k][k]
        rowk = m[k]
        for i in range(k + 1, n):
            rowi = m[i]
            mik = rowi[k]
            for j in range(k + 1, n):
                rowi[j] = (rowi[j] * pivot - mik * rowk[j]) // prev
        prev = pivot
    return sign * m[n - 1][n - 1]


def _bareiss_poly_det(matrix) -> RatMPoly:
    # same elimination with polynomial entries and exact division
    m = [list(row) for row in matrix]
    n = len(m)
    sign = 1
    vs = m[0][0].variables
    prev = RatMPoly.const(1, vs)
    for k in range(n - 1):
        if m[k][k].is_zero():
            for r in range(k + 1, n):
                if not m[r][k].is_zero():
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return RatMPoly(vs)
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * pivot - m[i][k] * m[k][j]
                m[i][j] = exact_divide(num, prev) if not num.is_zero() else num
        prev = pivot
    d = m[n - 1][n - 1]
    return d if sign > 0 else -d


def sylvester_matrix(pc: Sequence, qc: Sequence) -> list:
    """Sylvester matrix from dense coefficient lists (constant first)."""
    m, n = len(pc) - 1, len(qc) - 1
    size = m + n
    zero = pc[0] * 0
    rows = []
    ph = list(reversed(pc))
    qh = list(reversed(qc))
    for i in range(n):
        rows.append([zero] * i + ph + [zero] * (size - m - 1 - i))
    for i in range(m):
        rows.append([zero] * i + qh + [zero] * (size - n - 1 - i))
    return rows


def _dense_in(p: RatMPoly, var: str) -> list:
    coeffs = p.coefficients_in(var)
    d = p.degree(var)
    return [coeffs.get(i, RatMPoly(p.variables)) for i in range(d + 1)]


def resultant(p: RatMPoly, q: RatMPoly, var: str) -> RatMPoly:
    """Sylvester resultant of p and q with respect to ``var``.

    The result keeps the aligned variable tuple (``var`` no longer occurs).
    Univariate and bivariate inputs go through integer Bareiss elimination,
    the bivariate case by evaluation at integer points and exact
    interpolation; more variables fall back to Bareiss on polynomial entries.
    """
    p, q, vs = p._aligned(q)
    if var not in vs or p.degree(var) <= 0 or q.degree(var) <= 0:
        raise DegenerateDegreeError(f"both operands must have positive degree in {var}")
    others = sorted((set(p.used_variables()) | set(q.used_variables())) - {var})
    m, n = p.degree(var), q.degree(var)
    pi, lp = p.clear_denominators()
    qi, lq = q.clear_denominators()
    scale = mpq(1) / (mpq(lp) ** n * mpq(lq) ** m)
    pd, qd = _dense_in(pi, var), _dense_in(qi, var)
    if not others:
        pc = [mpz(c.coefficient((0,) * len(vs))) for c in pd]
        qc = [mpz(c.coefficient((0,) * len(vs))) for c in qd]
        return RatMPoly.const(bareiss_det(sylvester_matrix(pc, qc)) * scale, vs)
    if len(others) == 1:
        u = others[0]
        pu = [c.as_univariate(u) for c in pd]
        qu = [c.as_univariate(u) for c in qd]
        du_p = max(len(c) for c in pu) - 1
        du_q = max(len(c) for c in qu) - 1
        bound = min(p.degree() * q.degree(), n * du_p + m * du_q)
        xs, ys = [], []
        for k in range(bound + 1):
            x = (k + 1) // 2 if k % 2 else -(k // 2)
            pc = [mpz(u_eval(c, x)) if c else mpz(0) for c in pu]
            qc = [mpz(u_eval(c, x)) if c else mpz(0) for c in qu]
            xs.append(x)
            ys.append(bareiss_det(sylvester_matrix(pc, qc)))
        coeffs = interpolate(xs, ys)
        return RatMPoly.from_univariate([c * scale for c in coeffs], u, vs)
    rows = sylvester_matrix(pd, qd)
    rows = [[e if isinstance(e, RatMPoly) else RatMPoly.const(e, vs) for e in row] for row in rows]
    return _bareiss_poly_det(rows) * scale


# ---------------------------------------------------------------------------
# gcd


def _univariate_gcd_poly(a: RatMPoly, b: RatMPoly, var: str, vs) -> RatMPoly:
    g = u_gcd(a.as_univariate(var), b.as_univariate(var))
    return RatMPoly.from_univariate(g, var, vs)


def _bi_dense(p: RatMPoly, v: str, u: str) -> list:
    # list over v-degree of dense univariate lists in u
    d = p.degree(v)
    out = [[] for _ in range(d + 1)]
    iv, iu = p.variables.index(v), p.variables.index(u)
    for e, c in p.terms.items():
        row = out[e[iv]]
        k = e[iu]
        if len(row) <= k:
            row.extend([mpq(0)] * (k + 1 - len(row)))
        row[k] += c
    return [u_trim(r) for r in out]


def _bi_to_poly(rows, v, u, vs) -> RatMPoly:
    iv, iu = vs.index(v), vs.index(u)
    terms = {}
    for dv, row in enumerate(rows):
        for du, c in enumerate(row):
            if c:
                e = [0] * len(vs)
                e[iv], e[iu] = dv, du
                terms[tuple(e)] = c
    return RatMPoly(vs, terms)


def _bi_content(rows):
    g = []
    for r in rows:
        if r:
            g = r if not g else u_gcd(g, r)
            if len(g) == 1:
                return [mpq(1)]
    return u_monic(g) if g else []


def _bi_prem(a, b):
    # pseudo-remainder in the outer variable over Q[u]
    a = [list(r) for r in a]
    db = len(b) - 1
    lb = b[-1]
    while len(a) - 1 >= db and a:
        la = a[-1]
        shift = len(a) - 1 - db
        new = [u_mul(r, lb) for r in a]
        for j in range(db + 1):
            new[shift + j] = u_sub(new[shift + j], u_mul(la, b[j]))
        a = new
        while a and not a[-1]:
            a.pop()
    return a


def _bi_primitive(rows):
    c = _bi_content(rows)
    if len(c) <= 1:
        return rows, c
    return [u_exact_div(r, c) if r else [] for r in rows], c


def mp_gcd(p: RatMPoly, q: RatMPoly) -> RatMPoly:
    """GCD of polynomials in at most two variables, normalized by :meth:`primitive`.

    A degree-zero result means the inputs are coprime.
    """
    p, q, vs = p._aligned(q)
    if p.is_zero():
        return q.primitive()
    if q.is_zero():
        return p.primitive()
    used = sorted(set(p.used_variables()) | set(q.used_variables()), key=vs.index)
    if len(used) > 2:
        raise ValueError("mp_gcd supports at most two variables")
    if not used:
        return RatMPoly.const(1, vs)
    if len(used) == 1:
        return _univariate_gcd_poly(p, q, used[0], vs).primitive()
    u, v = used
    if p.degree(v) == 0 and q.degree(v) == 0:
        return _univariate_gcd_poly(p, q, u, vs).primitive()
    a = _bi_dense(p, v, u)
    b = _bi_dense(q, v, u)
    a, ca = _bi_primitive(a)
    b, cb = _bi_primitive(b)
    cont = u_gcd(ca, cb) if ca and cb else [mpq(1)]
    if len(a) > 1 and len(b) > 1 and _specialized_coprime(a, b):
        prim = [[mpq(1)]]
    elif len(a) == 1 or len(b) == 1:
        prim = [[mpq(1)]]
    else:
        if len(a) < len(b):
            a, b = b, a
        while True:
            r = _bi_prem(a, b)
            if not r:
                break
            if len(r) == 1:
                b = [[mpq(1)]]
                break
            r, _ = _bi_primitive(r)
            a, b = b, r
        prim = b
    rows = [u_mul(r, cont) for r in prim]
    return _bi_to_poly(rows, v, u, vs).primitive()


def mp_squarefree(p: RatMPoly) -> RatMPoly:
    """Product of the distinct irreducible factors of p (at most two variables), primitive."""
    g = p
    for v in p.used_variables():
        g = mp_gcd(g, p.diff(v))
    if g.degree() <= 0:
        return p.primitive()
    return exact_divide(p, g).primitive()


def _specialized_coprime(a, b) -> bool:
    # gcd degree in v can only grow under a specialization that keeps both
    # leading coefficients; a trivial specialized gcd certifies coprimality
    rng = random.Random(7)
    for _ in range(4):
        x = rng.randint(-10**6, 10**6)
        if not u_eval(a[-1], x) or not u_eval(b[-1], x):
            continue
        av = [u_eval(r, x) if r else mpq(0) for r in a]
        bv = [u_eval(r, x) if r else mpq(0) for r in b]
        av, bv = _u_primitive_q(u_trim(av)), _u_primitive_q(u_trim(bv))
        ai = [int(c) for c in av]
        bi = [int(c) for c in bv]
        for pr in _PRIMES:
            if ai[-1] % pr and bi[-1] % pr:
                return len(u_gcd_mod(ai, bi, pr)) == 1
        return False
    return False


# ---------------------------------------------------------------------------
# numeric univariate roots


@dataclass(frozen=True)
class CPoly:
    """Complex polynomial, coefficients ordered from the constant term up."""

    coefficients: tuple

    def __post_init__(self):
        c = [complex(x) for x in self.coefficients]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coefficients", tuple(c))

    @property
    def degree(self) -> int:
        if len(self.coefficients) == 1 and self.coefficients[0] == 0:
            return -1
        return len(self.coefficients) - 1

    def __call__(self, z: complex) -> complex:
        acc = 0j
        for c in reversed(self.coefficients):
            acc = acc * z + c
        return acc

    def monic(self) -> np.ndarray:
        c = np.asarray(self.coefficients, dtype=complex)
        return c / c[-1]


# merge radius for clustered roots, relative to 1 + |z|
ROOT_CLUSTER_TOL = 1e-6


def _horner_with_derivative(c: np.ndarray, z: complex):
    p = 0j
    dp = 0j
    for a in c[::-1]:
        dp = dp * z + p
        p = p * z + a
    return p, dp


def _polish(c: np.ndarray, z: complex, iters: int = 30) -> complex:
    p, dp = _horner_with_derivative(c, z)
    for _ in range(iters):
        if dp == 0 or p == 0:
            break
        z_new = z - p / dp
        p_new, dp_new = _horner_with_derivative(c, z_new)
        if abs(p_new) >= abs(p):
            break
        z, p, dp = z_new, p_new, dp_new
    return z


def _cluster(roots: Sequence[complex], tol: float) -> list:
    parent = list(range(len(roots)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if abs(roots[i] - roots[j]) <= tol * (1 + max(abs(roots[i]), abs(roots[j]))):
                parent[find(i)] = find(j)
    groups: dict = {}
    for i, r in enumerate(roots):
        groups.setdefault(find(i), []).append(r)
    return [(complex(np.mean(g)), len(g)) for g in groups.values()]


def _companion_roots(monic: np.ndarray) -> np.ndarray:
    n = len(monic) - 1
    comp = np.zeros((n, n), dtype=complex)
    comp[1:, :-1] = np.eye(n - 1)
    comp[:, -1] = -monic[:-1]
    return np.linalg.eigvals(comp)


def univariate_roots(p: CPoly) -> list:
    """All complex roots with multiplicities, as ``(root, multiplicity)`` pairs.

    Companion-matrix eigenvalues followed by Newton polishing on ``p``; roots
    closer than ``ROOT_CLUSTER_TOL * (1 + |z|)`` are merged.
    """
    c = np.asarray(p.coefficients, dtype=complex)
    if p.degree < 1:
        raise ValueError("need a polynomial of degree at least one")
    if abs(c[-1]) <= 1e-14 * np.max(np.abs(c)):
        raise IllConditionedError("leading coefficient is negligible")
    zeros = 0
    while c[zeros] == 0:
        zeros += 1
    core = c[zeros:]
    roots = []
    if len(core) > 1:
        monic = core / core[-1]
        if np.all(np.isreal(c)):
            eig = _companion_roots(monic.real.astype(float) + 0j)
        else:
            eig = _companion_roots(monic)
        roots = [_polish(core, complex(z)) for z in eig]
    merged = _cluster(roots, ROOT_CLUSTER_TOL)
    if zeros:
        merged.append((0j, zeros))
    merged.sort(key=lambda rm: (round(rm[0].real, 9), round(rm[0].imag, 9)))
    return merged


def rational_roots(coeffs: Sequence[Number]) -> list:
    """Roots of an exact univariate polynomial, with exact multiplicities.

    The squarefree factors are found exactly; each is rescaled in the
    variable so that its extreme coefficients balance before the companion
    eigenvalue step, which keeps huge integer coefficients in float range.
    """
    a = u_trim([_q(c) for c in coeffs])
    if len(a) < 2:
        return []
    if is_squarefree(a):
        factors = [(u_monic(a), 1)]
    else:
        factors = squarefree_decomposition(a)
    out = []
    for f, mult in factors:
        zeros = 0
        while not f[zeros]:
            zeros += 1
        if zeros:
            out.append((0j, mult))
        f = f[zeros:]
        if len(f) < 2:
            continue
        for z in _scaled_roots(f):
            out.append((z, mult))
    out.sort(key=lambda rm: (round(rm[0].real, 9), round(rm[0].imag, 9)))
    return out


def _log2abs(c) -> float:
    c = mpq(c)
    return float(mpz(abs(c.numerator)).bit_length() - mpz(c.denominator).bit_length())


def _scaled_roots(f: list) -> list:
    n = len(f) - 1
    # variable scaling 2**s balancing the constant and leading coefficients
    s = round((_log2abs(f[0]) - _log2abs(f[-1])) / n)
    g = [c * (mpq(2) ** (s * i) if s >= 0 else mpq(1, 2 ** (-s * i))) for i, c in enumerate(f)]
    top = max(_log2abs(c) for c in g if c)
    shift = mpq(2) ** int(-top)
    fl = np.array([float(c * shift) for c in g], dtype=float)
    if fl[-1] == 0 or abs(fl[-1]) <= 1e-300:
        raise IllConditionedError("leading coefficient underflows after scaling")
    eig = _companion_roots((fl / fl[-1]).astype(complex))
    roots = [_polish(fl.astype(complex), complex(z)) for z in eig]
    return [z * 2.0 ** s for z in roots]
