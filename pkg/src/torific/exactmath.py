"""Exact truncated power series and sparse multivariate polynomials over Q.

A :class:`Series` stores finitely many rational coefficients together with a
truncation order ``prec``; it stands for ``sum c_k t^k + O(t^prec)``.  A
``prec`` of ``None`` marks an exact polynomial.  Every operation propagates
the tightest truncation order it can prove, and never invents precision.
"""

from fractions import Fraction
from functools import reduce
from math import gcd

from sympy import integer_nthroot

from .errors import (
    ConstantTermNotNthPower,
    IncompatibleVariableTags,
    NegativePowerOfNonUnit,
    TruncationInsufficient,
)

INF = float("inf")


def Q(x, d=1):
    """Coerce to Fraction."""
    if isinstance(x, Fraction) and d == 1:
        return x
    return Fraction(x, d) if d != 1 else Fraction(x)


def _minp(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class Series:
    """Truncated univariate power series with rational coefficients."""

    __slots__ = ("coeffs", "prec", "var")

    def __init__(self, coeffs=None, prec=None, var="t"):
        c = {}
        for k, v in (coeffs or {}).items():
            if k < 0:
                raise ValueError("negative exponent %d" % k)
            if prec is not None and k >= prec:
                continue
            v = Q(v)
            if v:
                c[k] = v
        if prec is not None and prec < 0:
            prec = 0
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "prec", prec)
        object.__setattr__(self, "var", var)

    def __setattr__(self, name, value):
        raise AttributeError("Series is immutable")

    # construction helpers
    @classmethod
    def const(cls, c, prec=None, var="t"):
        return cls({0: c}, prec, var)

    @classmethod
    def monomial(cls, k, c=1, prec=None, var="t"):
        return cls({k: c}, prec, var)

    @classmethod
    def from_list(cls, lst, prec=None, var="t"):
        return cls(dict(enumerate(lst)), prec, var)

    # basic queries
    def coeff(self, k):
        if self.prec is not None and k >= self.prec:
            raise TruncationInsufficient(
                "coefficient beyond truncation", exponent=k, prec=self.prec)
        return self.coeffs.get(k, Fraction(0))

    def is_zero(self):
        """True when no known coefficient is nonzero (may still be O(t^T))."""
        return not self.coeffs

    def is_exact(self):
        return self.prec is None

    def ord(self):
        """Order of vanishing; ``INF`` for the exact zero series.

        A series that is zero up to its truncation has unknown order; we raise
        rather than guess.
        """
        if self.coeffs:
            return min(self.coeffs)
        if self.prec is None:
            return INF
        raise TruncationInsufficient(
            "series vanishes to its truncation order", prec=self.prec)

    def val_bound(self):
        """A certified lower bound for the order."""
        if self.coeffs:
            return min(self.coeffs)
        return INF if self.prec is None else self.prec

    def degree(self):
        return max(self.coeffs) if self.coeffs else -1

    def lead(self):
        k = self.ord()
        return k, self.coeffs[k]

    def support(self):
        return sorted(self.coeffs)

    def terms(self):
        return sorted(self.coeffs.items())

    def truncate(self, T):
        return Series(self.coeffs, _minp(self.prec, T), self.var)

    def with_var(self, var):
        return Series(self.coeffs, self.prec, var)

    def _check(self, other):
        if self.var != other.var:
            raise IncompatibleVariableTags(
                "cannot combine series in different variables",
                left=self.var, right=other.var)

    def _lift(self, other):
        if isinstance(other, Series):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Series({0: other}, None, self.var)
        return NotImplemented

    # ring operations
    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        c = dict(self.coeffs)
        for k, v in other.coeffs.items():
            c[k] = c.get(k, 0) + v
        return Series(c, _minp(self.prec, other.prec), self.var)

    __radd__ = __add__

    def __neg__(self):
        return Series({k: -v for k, v in self.coeffs.items()}, self.prec, self.var)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Q(other)
            if other == 0 and self.prec is None:
                return Series({}, None, self.var)
            if other == 0:
                return Series({}, None, self.var)
            return Series({k: v * other for k, v in self.coeffs.items()},
                          self.prec, self.var)
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if (not self.coeffs and self.prec is None) or (
                not other.coeffs and other.prec is None):
            return Series({}, None, self.var)
        prec = None
        if other.prec is not None:
            prec = self.val_bound() + other.prec
        if self.prec is not None:
            prec = _minp(prec, other.val_bound() + self.prec)
        c = {}
        a_items = sorted(self.coeffs.items())
        b_items = sorted(other.coeffs.items())
        for i, a in a_items:
            if prec is not None and i >= prec:
                break
            for j, b in b_items:
                k = i + j
                if prec is not None and k >= prec:
                    break
                c[k] = c.get(k, 0) + a * b
        return Series(c, prec, self.var)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Q(other))
        other = self._lift(other)
        return self * other.inverse()

    def inverse(self, prec=None):
        """Multiplicative inverse of a unit.

        An exact non-constant polynomial has no finite inverse, so the caller
        must supply ``prec`` in that case.
        """
        c0 = self.coeffs.get(0, 0)
        if c0 == 0:
            raise NegativePowerOfNonUnit("series is not a unit", var=self.var)
        T = _minp(self.prec, prec)
        if T is None:
            if len(self.coeffs) == 1:
                return Series({0: 1 / c0}, None, self.var)
            raise TruncationInsufficient(
                "inverse of a non-constant polynomial needs a truncation order")
        inv0 = 1 / c0
        g = [Fraction(0)] * T
        g[0] = inv0
        items = [(k, v) for k, v in sorted(self.coeffs.items()) if k > 0]
        for n in range(1, T):
            s = Fraction(0)
            for k, v in items:
                if k > n:
                    break
                s += v * g[n - k]
            g[n] = -s * inv0
        return Series(dict(enumerate(g)), T, self.var)

    def __pow__(self, k):
        if not isinstance(k, int):
            raise TypeError("integer exponents only")
        if k < 0:
            return self.inverse() ** (-k)
        result = Series({0: 1}, None, self.var)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def shift(self, k):
        """Multiply by t^k (k may be negative if the division is exact)."""
        c = {}
        for e, v in self.coeffs.items():
            if e + k < 0:
                raise NegativePowerOfNonUnit(
                    "division by t^%d is not exact" % (-k), var=self.var)
            c[e + k] = v
        prec = None if self.prec is None else self.prec + k
        return Series(c, prec, self.var)

    def compose(self, g):
        """Return self(g) for a series g without constant term."""
        if g.coeffs.get(0, 0) != 0:
            raise ValueError("inner series must have zero constant term")
        a = g.val_bound()
        prec = None
        if self.prec is not None:
            prec = self.prec * a if a != INF else None
        if g.prec is not None and self.degree() >= 1:
            # f(g + O(t^Tg)) = f(g) + f'(g) O(t^Tg); f' has order >= 0
            prec = _minp(prec, g.prec)
        if a == INF:
            return Series({0: self.coeffs.get(0, 0)}, None, g.var)
        result = Series({}, prec, g.var)
        power = Series({0: 1}, None, g.var)
        last = 0
        for k, v in sorted(self.coeffs.items()):
            if prec is not None and k * a >= prec:
                break
            power = power * _pow_trunc(g, k - last, prec)
            last = k
            result = result + power * v
        return Series(result.coeffs, prec, g.var)

    def derivative(self):
        prec = None if self.prec is None else max(self.prec - 1, 0)
        return Series({k - 1: k * v for k, v in self.coeffs.items() if k},
                      prec, self.var)

    def agrees(self, other, upto=None):
        """Coefficient equality up to the common truncation (and ``upto``)."""
        self._check(other)
        T = _minp(_minp(self.prec, other.prec), upto)
        keys = set(self.coeffs) | set(other.coeffs)
        return all(self.coeffs.get(k, 0) == other.coeffs.get(k, 0)
                   for k in keys if T is None or k < T)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Series({0: other}, None, self.var)
        if not isinstance(other, Series):
            return NotImplemented
        return (self.var, self.prec, self.coeffs) == (other.var, other.prec, other.coeffs)

    def __hash__(self):
        return hash((self.var, self.prec, tuple(sorted(self.coeffs.items()))))

    def __repr__(self):
        return "Series(%s)" % self.pretty()

    def pretty(self):
        parts = []
        for k, v in sorted(self.coeffs.items()):
            if k == 0:
                parts.append(str(v))
            else:
                mono = self.var if k == 1 else "%s^%d" % (self.var, k)
                parts.append(mono if v == 1 else "%s*%s" % (v, mono))
        s = " + ".join(parts) if parts else "0"
        if self.prec is not None:
            s += " + O(%s^%d)" % (self.var, self.prec)
        return s


def _pow_trunc(g, k, prec):
    r = Series({0: 1}, None, g.var)
    for _ in range(k):
        r = r * g
        if prec is not None:
            r = r.truncate(prec)
    return r


def rational_nth_root(q, n):
    """Exact rational n-th root of q, or None."""
    q = Q(q)
    if n == 1:
        return q
    sign = 1
    if q < 0:
        if n % 2 == 0:
            return None
        sign = -1
        q = -q
    a, ea = integer_nthroot(q.numerator, n)
    b, eb = integer_nthroot(q.denominator, n)
    if not (ea and eb):
        return None
    return sign * Fraction(a, b)


def nth_root_series(f, n, prec=None):
    """Series g with g^n = f, for a unit f whose constant term is an n-th power.

    Uses the power recurrence for g = f^(1/n):
    g_k = 1/(k f_0) * sum_{j=1..k} ((1/n + 1) j - k) f_j g_{k-j}.
    """
    c0 = f.coeffs.get(0, 0)
    if c0 == 0:
        raise NegativePowerOfNonUnit("root of a non-unit", var=f.var)
    r = rational_nth_root(c0, n)
    if r is None:
        raise ConstantTermNotNthPower(
            "constant term is not a rational n-th power", constant=c0, n=n)
    T = _minp(f.prec, prec)
    if T is None:
        if len(f.coeffs) == 1:
            return Series({0: r}, None, f.var)
        raise TruncationInsufficient("root of a polynomial needs a truncation order")
    alpha = Fraction(1, n)
    fs = [f.coeffs.get(k, Fraction(0)) for k in range(T)]
    nz = [j for j in range(1, T) if fs[j]]
    g = [Fraction(0)] * T
    g[0] = r
    for k in range(1, T):
        s = Fraction(0)
        for j in nz:
            if j > k:
                break
            s += ((alpha + 1) * j - k) * fs[j] * g[k - j]
        g[k] = s / (k * c0)
    return Series(dict(enumerate(g)), T, f.var)


# ---------------------------------------------------------------- polynomials

def _is_zero_coef(c):
    if isinstance(c, Series):
        return not c.coeffs and c.prec is None
    return c == 0


def _norm_coef(c):
    if isinstance(c, Series):
        if c.prec is None and set(c.coeffs) <= {0}:
            return c.coeffs.get(0, Fraction(0))
        return c
    return Q(c)


class MPoly:
    """Sparse polynomial in X_0..X_{m}; coefficients are rationals or series in X_0."""

    __slots__ = ("terms", "nvars", "names")

    def __init__(self, terms, nvars, names=None):
        t = {}
        for e, c in terms.items():
            e = tuple(e)
            if len(e) != nvars:
                raise ValueError("exponent length mismatch")
            c = _norm_coef(c)
            if e in t:
                c = _norm_coef(t[e] + c)
            if _is_zero_coef(c):
                t.pop(e, None)
            else:
                t[e] = c
        object.__setattr__(self, "terms", t)
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "names", tuple(names) if names else
                           tuple("X%d" % i for i in range(nvars)))

    def __setattr__(self, name, value):
        raise AttributeError("MPoly is immutable")

    @classmethod
    def var(cls, i, nvars, names=None):
        e = [0] * nvars
        e[i] = 1
        return cls({tuple(e): 1}, nvars, names)

    @classmethod
    def const(cls, c, nvars, names=None):
        return cls({(0,) * nvars: c}, nvars, names)

    def _like(self, terms):
        return MPoly(terms, self.nvars, self.names)

    def _lift(self, other):
        if isinstance(other, MPoly):
            if other.nvars != self.nvars:
                raise ValueError("ambient dimension mismatch")
            return other
        if isinstance(other, (int, Fraction, Series)):
            return self._like({(0,) * self.nvars: other})
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t[e] + c if e in t else c
        return self._like(t)

    __radd__ = __add__

    def __neg__(self):
        return self._like({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        t = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                c = _mul_coef(c1, c2)
                t[e] = t[e] + c if e in t else c
        return self._like(t)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("non-negative integer exponent required")
        r = self._like({(0,) * self.nvars: 1})
        b = self
        while k:
            if k & 1:
                r = r * b
            k >>= 1
            if k:
                b = b * b
        return r

    def __eq__(self, other):
        if not isinstance(other, MPoly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, tuple(sorted(self.terms.items(), key=lambda kv: kv[0]))))

    def is_zero(self):
        return not self.terms

    def has_series_coefficients(self):
        return any(isinstance(c, Series) for c in self.terms.values())

    def degree_in(self, i):
        return max((e[i] for e in self.terms), default=-1)

    def total_degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def coefficient(self, e):
        return self.terms.get(tuple(e), Fraction(0))

    def rename(self, names):
        return MPoly(self.terms, self.nvars, names)

    def embed(self, nvars, positions, names=None):
        """Re-express in a larger ring; variable i goes to slot positions[i]."""
        t = {}
        for e, c in self.terms.items():
            ne = [0] * nvars
            for i, p in enumerate(positions):
                ne[p] += e[i]
            t[tuple(ne)] = c
        return MPoly(t, nvars, names)

    def expand_series(self):
        """Turn series coefficients in X_0 into explicit monomials (exact parts only).

        Returns (poly, prec) where prec bounds the X_0-truncation dropped.
        """
        t = {}
        prec = None
        for e, c in self.terms.items():
            if isinstance(c, Series):
                for k, v in c.coeffs.items():
                    ne = (e[0] + k,) + e[1:]
                    t[ne] = t.get(ne, 0) + v
                if c.prec is not None:
                    prec = _minp(prec, e[0] + c.prec)
            else:
                t[e] = t.get(e, 0) + c
        return self._like(t), prec

    def __repr__(self):
        return "MPoly(%s)" % self.pretty()

    def pretty(self):
        if not self.terms:
            return "0"
        out = []
        for e, c in sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0])):
            mono = "*".join(
                n if k == 1 else "%s^%d" % (n, k)
                for n, k in zip(self.names, e) if k)
            if isinstance(c, Series):
                cs = "(%s)" % c.pretty()
                out.append(cs + ("*" + mono if mono else ""))
            elif not mono:
                out.append(str(c))
            elif c == 1:
                out.append(mono)
            elif c == -1:
                out.append("-" + mono)
            else:
                out.append("%s*%s" % (c, mono))
        return " + ".join(out).replace("+ -", "- ")


def _mul_coef(a, b):
    if isinstance(a, Series) and not isinstance(b, Series):
        return a * b
    if isinstance(b, Series):
        return b * a
    return a * b


def parse_poly(text, names=("X", "Y")):
    """Parse a polynomial with rational coefficients in the given variables."""
    import sympy
    syms = sympy.symbols(list(names))
    local = {n: s for n, s in zip(names, syms)}
    expr = sympy.sympify(text.replace("^", "**"), locals=local)
    poly = sympy.Poly(sympy.expand(expr), *syms)
    terms = {}
    for mono, coef in poly.terms():
        coef = sympy.Rational(coef)
        terms[tuple(int(x) for x in mono)] = Fraction(int(coef.p), int(coef.q))
    return MPoly(terms, len(names), names)


def to_sympy(p, symbols=None):
    import sympy
    syms = symbols or sympy.symbols(list(p.names))
    if p.has_series_coefficients():
        raise ValueError("series coefficients have no sympy form")
    expr = 0
    for e, c in p.terms.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for s, k in zip(syms, e):
            term *= s ** k
        expr += term
    return expr


def substitute(p, args, need=None):
    """Evaluate p at a tuple of series (all in one variable).

    Series coefficients c_I(X_0) are composed into args[0].  If ``need`` is
    given and the result is zero up to a truncation below ``need``, the order
    cannot be certified and TruncationInsufficient is raised.
    """
    if len(args) != p.nvars:
        raise ValueError("expected %d arguments" % p.nvars)
    if not args:
        raise ValueError("no arguments")
    var = args[0].var
    for a in args:
        if a.var != var:
            raise IncompatibleVariableTags("arguments in different variables",
                                           left=var, right=a.var)
    cache = {}

    def power(i, k):
        key = (i, k)
        if key not in cache:
            if k == 0:
                cache[key] = Series({0: 1}, None, var)
            elif k == 1:
                cache[key] = args[i]
            else:
                h = power(i, k // 2)
                r = h * h
                if k % 2:
                    r = r * args[i]
                cache[key] = r
        return cache[key]

    total = Series({}, None, var)
    for e, c in p.terms.items():
        term = Series({0: 1}, None, var)
        for i, k in enumerate(e):
            if k:
                term = term * power(i, k)
        if isinstance(c, Series):
            term = term * c.compose(args[0])
        else:
            term = term * c
        total = total + term
    if need is not None and not total.coeffs and total.prec is not None \
            and total.prec < need:
        raise TruncationInsufficient(
            "result vanishes to the tracked order", prec=total.prec, need=need)
    return total


def vec_gcd(v):
    return reduce(gcd, (abs(int(x)) for x in v), 0)
