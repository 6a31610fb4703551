"""Plane branches over Q.

A branch transversal to ``X = 0`` is parametrized as ``x = t^n, y = zeta(t)``.
This module covers Newton-Puiseux expansion for branches with rational
coefficients, the monic defining polynomial of a parametrization, the
characteristic exponents and semigroup, intersection multiplicities and the
construction of generic sequences of maximal contact curves.
"""

import os
from fractions import Fraction
from math import gcd, lcm

from .errors import (
    GenericityExhausted,
    NeedsFieldExtension,
    NotCharacteristicSequence,
    NotSquareFree,
    TruncationInsufficient,
    VerticalBranch,
)
from .exactmath import INF, MPoly, Series, parse_poly, rational_nth_root, substitute

INFINITE = INF
TRUNCATION_CAP = 1 << 12
NAMES = ("X", "Y")


def truncation_cap():
    env = os.environ.get("TORIFIC_TRUNCATION")
    return int(env) if env else TRUNCATION_CAP


def _t(n=1):
    return Series({n: 1})


# ---------------------------------------------------------------- params

class PuiseuxParam:
    """x = t^n, y = zeta(t)."""

    __slots__ = ("n", "zeta")

    def __init__(self, n, zeta):
        if n < 1:
            raise ValueError("ramification must be positive")
        if zeta.coeffs.get(0):
            raise ValueError("zeta must vanish at t = 0")
        if zeta.is_exact():
            g = gcd(n, *zeta.support()) if zeta.coeffs else n
            if g != 1:
                raise ValueError("parametrization is not primitive")
        self.n = n
        self.zeta = zeta

    @property
    def prec(self):
        return self.zeta.prec

    def is_exact(self):
        return self.zeta.is_exact()

    def arc(self):
        return [_t(self.n), self.zeta]

    def truncate(self, T):
        return PuiseuxParam(self.n, self.zeta.truncate(T))

    def char_exponents(self):
        """(beta_0, ..., beta_g) in t-units, beta_0 = n."""
        n = self.n
        beta = [n]
        g = n
        if self.zeta.coeffs and min(self.zeta.coeffs) < n:
            raise NotCharacteristicSequence(
                "branch is tangent to X = 0", n=n, order=min(self.zeta.coeffs))
        for k in self.zeta.support():
            if g == 1:
                break
            h = gcd(g, k)
            if h < g:
                beta.append(k)
                g = h
        if g != 1:
            raise TruncationInsufficient(
                "characteristic exponents not reached", prec=self.zeta.prec)
        return tuple(beta)

    def exponents(self):
        """Characteristic exponents as rationals in x-units (beta_k / n, k >= 1)."""
        b = self.char_exponents()
        return [Fraction(x, b[0]) for x in b[1:]]

    def coefficient_at(self, e):
        """Coefficient of x^e in y(x), e rational."""
        k = e * self.n
        if k.denominator != 1:
            return Fraction(0)
        return self.zeta.coeff(int(k))

    def truncated_below(self, e, index):
        """The series of terms below x^e, reparametrized with ramification ``index``."""
        c = {}
        for k, v in self.zeta.terms():
            if Fraction(k, self.n) >= e:
                break
            kk = Fraction(k * index, self.n)
            if kk.denominator != 1:
                raise ValueError("truncation needs a larger ramification")
            c[int(kk)] = v
        if self.zeta.prec is not None and Fraction(self.zeta.prec, self.n) < e:
            raise TruncationInsufficient("truncation point beyond precision",
                                         e=e, prec=self.zeta.prec)
        return c

    def __repr__(self):
        return "PuiseuxParam(n=%d, zeta=%s)" % (self.n, self.zeta.pretty())

    def pretty(self):
        return "x = t^%d, y = %s" % (self.n, self.zeta.pretty())


def param_from_terms(n, terms, prec=None):
    """Build from (exponent, coefficient) pairs in t-units."""
    return PuiseuxParam(n, Series(dict(terms), prec))


# ---------------------------------------------------------------- semigroup

class Semigroup:
    """Minimal generators of the semigroup of a plane branch."""

    def __init__(self, generators, e, n):
        self.generators = tuple(generators)
        self.e = tuple(e)
        self.n = tuple(n)

    @property
    def conductor(self):
        # c = sum_{j>=1} (n_j - 1) bbar_j - bbar_0 + 1
        b = self.generators
        return sum((self.n[j - 1] - 1) * b[j] for j in range(1, len(b))) - b[0] + 1

    def contains(self, v):
        return v in self.elements_upto(v)

    def elements_upto(self, bound):
        reach = [False] * (bound + 1)
        reach[0] = True
        for k in range(1, bound + 1):
            reach[k] = any(k >= g and reach[k - g] for g in self.generators)
        return {k for k, r in enumerate(reach) if r}

    def __eq__(self, other):
        return isinstance(other, Semigroup) and self.generators == other.generators

    def __repr__(self):
        return "Semigroup%r" % (self.generators,)


def semigroup_from_char(beta):
    beta = [int(b) for b in beta]
    if not beta or beta[0] < 1:
        raise NotCharacteristicSequence("empty sequence", beta=beta)
    e = [beta[0]]
    for j in range(1, len(beta)):
        if beta[j] <= beta[j - 1]:
            raise NotCharacteristicSequence("not strictly increasing", beta=beta)
        g = gcd(e[-1], beta[j])
        if g == e[-1]:
            raise NotCharacteristicSequence("no gcd drop", beta=beta, index=j)
        e.append(g)
    if e[-1] != 1:
        raise NotCharacteristicSequence("gcd is not 1", beta=beta)
    ns = [e[j - 1] // e[j] for j in range(1, len(e))]
    bb = list(beta[:2])
    for j in range(2, len(beta)):
        bb.append(ns[j - 2] * bb[j - 1] + beta[j] - beta[j - 1])
    for j in range(1, len(bb) - 1):
        if not ns[j - 1] * bb[j] < bb[j + 1]:
            raise NotCharacteristicSequence("semigroup inequality fails", beta=beta)
    return Semigroup(bb, e, ns)


# ---------------------------------------------------------------- Newton-Puiseux

def _as_mpoly(f):
    return parse_poly(f, NAMES) if isinstance(f, str) else f


def _check_square_free(f):
    import sympy
    from .exactmath import to_sympy
    X, Y = sympy.symbols("X Y")
    expr = to_sympy(f, (X, Y))
    _, factors = sympy.factor_list(expr, X, Y)
    for fac, mult in factors:
        if mult > 1 and fac.subs({X: 0, Y: 0}) == 0:
            raise NotSquareFree("repeated factor through the origin",
                                factor=str(fac), multiplicity=mult)


def _edges(F):
    """Lower Newton polygon edges joining the Y-axis to the X-axis.

    Yields (a, b, weight, low j, points on the edge); y ~ x^(a/b).
    """
    pts = {}
    for (i, j), c in F.terms.items():
        pts[(i, j)] = c
    js = [j for (i, j) in pts if i == 0]
    if not js:
        return []
    cur = (0, min(js))
    out = []
    while cur[1] > 0:
        best = None
        for (i, j) in pts:
            if j < cur[1]:
                r = Fraction(i - cur[0], cur[1] - j)
                if best is None or r < best[0] or (r == best[0] and j < best[1][1]):
                    best = (r, (i, j))
        r, nxt = best
        a, b = r.numerator, r.denominator
        v = b * cur[0] + a * cur[1]
        on = {p: c for p, c in pts.items() if b * p[0] + a * p[1] == v}
        out.append((a, b, v, nxt[1], on))
        cur = nxt
    return out


def _edge_roots(a, b, j_low, on):
    """Rational roots u0 of G (with multiplicity), G(c^b) c^j_low = edge poly."""
    import sympy
    u = sympy.Symbol("u")
    G = 0
    for (i, j), c in on.items():
        G += sympy.Rational(c.numerator, c.denominator) * u ** ((j - j_low) // b)
    _, factors = sympy.factor_list(sympy.expand(G), u)
    roots = []
    for fac, mult in factors:
        p = sympy.Poly(fac, u)
        if p.degree() == 0:
            continue
        if p.degree() > 1:
            raise NeedsFieldExtension("edge polynomial has an irreducible factor "
                                      "of degree > 1", factor=str(fac))
        c1, c0 = p.all_coeffs()
        r = -sympy.Rational(c0) / sympy.Rational(c1)
        roots.append((Fraction(int(r.p), int(r.q)), mult))
    return sorted(roots)


def _shift_substitute(F, a, b, c0, v):
    """F(x^b, x^a (c0 + y)) / x^v as an exact polynomial."""
    from math import comb
    out = {}
    for (i, j), c in F.terms.items():
        base = b * i + a * j - v
        # (c0 + y)^j
        for k in range(j + 1):
            coef = c * comb(j, k) * c0 ** (j - k)
            if coef:
                key = (base, k)
                out[key] = out.get(key, 0) + coef
    return MPoly(out, 2, NAMES)


def _hensel(F, P):
    """Series y(t), y(0) = 0, with F(t, y) = 0 mod t^P; needs F_y(0,0) != 0."""
    Fy = MPoly({(i, j - 1): j * c for (i, j), c in F.terms.items() if j}, 2, NAMES)
    t = _t()
    y = Series({})
    k = 1
    while k < P:
        k = min(2 * k, P)
        yt = Series(y.coeffs, k)
        r = substitute(F, [t, yt])
        d = substitute(Fy, [t, yt])
        y = Series((yt - r / d).truncate(k).coeffs)
    return Series(y.coeffs, P)


def _branches(F, P, depth=0):
    """Branches of F with y -> 0 as x -> 0, as (n, zeta) with zeta prec >= P."""
    if depth > 256:
        raise NotSquareFree("Newton-Puiseux recursion does not terminate")
    out = []
    if F.is_zero():
        raise NotSquareFree("zero polynomial")
    if all(j >= 1 for (_, j) in F.terms):
        if all(j >= 2 for (_, j) in F.terms):
            raise NotSquareFree("y^2 divides the polynomial")
        out.append((1, Series({})))
        F = MPoly({(i, j - 1): c for (i, j), c in F.terms.items()}, 2, NAMES)
    for a, b, v, j_low, on in _edges(F):
        for u0, mult in _edge_roots(a, b, j_low, on):
            c0 = rational_nth_root(u0, b)
            if c0 is None:
                raise NeedsFieldExtension("leading coefficient needs a root",
                                          value=u0, degree=b)
            F1 = _shift_substitute(F, a, b, c0, v)
            exact_zero = all(j >= 1 for (_, j) in F1.terms)
            if mult == 1 and not exact_zero:
                y1 = _hensel(F1, max(P - a, 1))
                zeta = (Series({0: c0}) + y1).shift(a)
                out.append((b, zeta))
                continue
            for n1, z1 in _branches(F1, P, depth + 1):
                # x = s^(b n1), y = s^(a n1) (c0 + zeta1(s))
                out.append((b * n1, (Series({0: c0}) + z1).shift(a * n1)))
    return out


def _sort_key(p):
    return (p.n, [(k, v) for k, v in p.zeta.terms()])


def newton_puiseux(f, T):
    """Rational Puiseux parametrizations of the branches of f at the origin."""
    f = _as_mpoly(f)
    if f.is_zero():
        raise ValueError("zero polynomial")
    if f.coefficient((0, 0)) != 0:
        raise ValueError("curve does not pass through the origin")
    if all(i >= 1 for (i, _) in f.terms):
        raise VerticalBranch("X = 0 is a component; swap coordinates first")
    _check_square_free(f)
    P = T
    for _ in range(6):
        raw = _branches(f, P)
        params = []
        ok = True
        for n, zeta in raw:
            p = PuiseuxParam(n, zeta)
            r = substitute(f, p.arc())
            if r.coeffs:
                raise ArithmeticError("Newton-Puiseux residual is nonzero")
            if r.prec is not None and r.prec < T:
                ok = False
                break
            params.append(p)
        if ok:
            return sorted(params, key=_sort_key)
        P *= 2
    raise TruncationInsufficient("could not reach the requested residual order", T=T)


# ---------------------------------------------------------------- defining polynomial

def defining_poly_from_param(p, T=None):
    """Monic polynomial in Y of degree n vanishing on the branch.

    Power sums over the conjugates zeta(w t), w^n = 1, keep only the terms of
    zeta^k with exponent divisible by n; Newton identities give the
    elementary symmetric functions.
    """
    n = p.n
    zeta = p.zeta
    if not zeta.is_exact() and T is not None and zeta.prec < T:
        raise TruncationInsufficient("parametrization is too short", prec=zeta.prec, T=T)

    def to_x(s):
        c = {k // n: n * v for k, v in s.coeffs.items() if k % n == 0}
        prec = None if s.prec is None else -(-s.prec // n)
        return Series(c, prec, "X")

    psums = [None]
    power = Series({0: 1})
    for k in range(1, n + 1):
        power = power * zeta
        psums.append(to_x(power))
    e = [Series({0: 1}, None, "X")]
    for k in range(1, n + 1):
        s = Series({}, None, "X")
        for i in range(1, k + 1):
            term = e[k - i] * psums[i]
            s = s + term if i % 2 == 1 else s - term
        e.append(s * Fraction(1, k))
    terms = {}
    for k in range(n + 1):
        c = e[k] if k % 2 == 0 else -e[k]
        terms[(0, n - k)] = c
    poly = MPoly(terms, 2, NAMES)
    if all(isinstance(c, Fraction) or c.is_exact() for c in poly.terms.values()):
        poly, _ = poly.expand_series()
    if T is not None:
        r = substitute(poly, p.arc())
        if r.coeffs or (r.prec is not None and r.prec < T):
            raise TruncationInsufficient("defining polynomial not certified", T=T)
    return poly


# ---------------------------------------------------------------- branch data

class BranchData:
    """A plane branch: an equation, a parametrization, or both."""

    def __init__(self, equation=None, param=None, label=None, source=None):
        if equation is None and param is None and source is None:
            raise ValueError("a branch needs an equation or a parametrization")
        self.equation = _as_mpoly(equation) if equation is not None else None
        self._param = param
        self.label = label
        self._source = source
        self._beta = None

    @classmethod
    def from_string(cls, text, label=None):
        return cls(equation=parse_poly(text, NAMES), label=label)

    def param_at(self, T):
        p = self._param
        if p is not None and (p.is_exact() or p.prec >= T):
            return p
        if self._source is not None:
            f, k = self._source
            p = newton_puiseux(f, T)[k]
        elif self.equation is not None:
            ps = newton_puiseux(self.equation, T)
            if len(ps) != 1:
                raise ValueError("equation defines %d branches" % len(ps))
            p = ps[0]
        else:
            raise TruncationInsufficient("parametrization too short", T=T)
        self._param = p
        return p

    @property
    def param(self):
        if self._param is None:
            self.param_at(64)
        return self._param

    @property
    def n(self):
        return self.param.n

    @property
    def char_exponents(self):
        if self._beta is None:
            T = 64
            while True:
                try:
                    self._beta = self.param_at(T).char_exponents()
                    break
                except TruncationInsufficient:
                    T *= 2
                    if T > truncation_cap():
                        raise
        return self._beta

    @property
    def semigroup(self):
        return semigroup_from_char(self.char_exponents)

    def exponents(self):
        return [Fraction(b, self.char_exponents[0]) for b in self.char_exponents[1:]]

    def poly(self, T=None):
        if self.equation is not None:
            return self.equation
        return defining_poly_from_param(self.param_at(T or 64), T)

    def is_exact_equation(self):
        return self.equation is not None or (self._param is not None and self._param.is_exact())

    def __repr__(self):
        tag = self.label or ""
        if self.equation is not None:
            return "BranchData(%s %s)" % (tag, self.equation.pretty())
        return "BranchData(%s %s)" % (tag, self._param.pretty() if self._param else "?")


def split_branches(f, T=64, prefix="C"):
    """One BranchData per branch of the curve f = 0."""
    f = _as_mpoly(f)
    ps = newton_puiseux(f, T)
    if len(ps) == 1:
        return [BranchData(equation=f, param=ps[0], label=prefix + "1")]
    return [BranchData(param=p, source=(f, k), label="%s%d" % (prefix, k + 1))
            for k, p in enumerate(ps)]


def reference_line():
    """L_0 = Z(X)."""
    return _Reference()


class _Reference(BranchData):
    def __init__(self):
        self.equation = parse_poly("X", NAMES)
        self._param = None
        self.label = "L0"
        self._source = None
        self._beta = (1,)

    def param_at(self, T):
        raise VerticalBranch("X = 0 has no parametrization x = t^n")


def is_reference(b):
    return isinstance(b, _Reference)


# ---------------------------------------------------------------- intersections

def _default_T(*branches):
    best = 16
    for b in branches:
        if is_reference(b):
            continue
        try:
            best = max(best, max(b.semigroup.generators))
        except TruncationInsufficient:
            best = max(best, 64)
    return 4 * best


def _polys_share_factor(f, g):
    import sympy
    from .exactmath import to_sympy
    X, Y = sympy.symbols("X Y")
    h = sympy.gcd(to_sympy(f, (X, Y)), to_sympy(g, (X, Y)))
    return sympy.Poly(h, X, Y).total_degree() > 0


def _order_on(poly, p, need):
    return substitute(poly, p.arc(), need=need).ord()


def intersection_multiplicity(A, B, T=None):
    """(A . B) as ord_t of f_B along the arc of A; INFINITE for equal branches."""
    if is_reference(A) and is_reference(B):
        return INFINITE
    if is_reference(A):
        A, B = B, A
    if is_reference(B):
        return A.n
    if A.equation is not None and B.equation is not None \
            and not A.equation.has_series_coefficients() \
            and not B.equation.has_series_coefficients() \
            and _polys_share_factor(A.equation, B.equation):
        return INFINITE
    # prefer an exact parametrization on the arc side
    if B._param is not None and B._param.is_exact() and not (
            A._param is not None and A._param.is_exact()):
        A, B = B, A
    T = T or _default_T(A, B)
    cap = truncation_cap()
    while True:
        pa = A.param_at(T)
        if B.equation is not None:
            fb = B.equation
        elif B._param is not None and B._param.is_exact():
            fb = defining_poly_from_param(B._param)
        else:
            fb = defining_poly_from_param(B.param_at(T), None)
        r = substitute(fb, pa.arc())
        if r.coeffs:
            return r.ord()
        if r.prec is None:
            return INFINITE
        if T >= cap:
            raise TruncationInsufficient(
                "residual vanishes to the tracked order", prec=r.prec, T=T)
        T = min(2 * T, cap)


# ---------------------------------------------------------------- maximal contact

class Certificate:
    """Intersection numbers (L_i . C_j) against the values of nu_{E_{C_j}}."""

    def __init__(self, actual, predicted):
        self.actual = actual
        self.predicted = predicted

    @property
    def passed(self):
        return self.actual == self.predicted

    def failures(self):
        return [(k, self.actual[k], self.predicted[k]) for k in self.actual
                if self.actual[k] != self.predicted[k]]

    def __bool__(self):
        return self.passed


def coefficient_sequence(limit=None):
    """1, -1, 2, -2, ..."""
    k = 1
    while limit is None or k <= limit:
        yield Fraction(k)
        yield Fraction(-k)
        k += 1


CURVETTA_SAMPLES = 8


def curvetta_family(C, P):
    """Curvettas x^e perturbations of C at the tree point P (a function of a)."""
    base = C.param.truncated_below(P.e, P.i_plus)

    def make(a):
        c = dict(base)
        k = P.e * P.i_plus
        c[int(k)] = c.get(int(k), 0) + a
        return BranchData(param=PuiseuxParam(P.i_plus, Series(c)))
    return make


def divisor_value(h, family, samples=CURVETTA_SAMPLES):
    """nu_E(h) as a minimum of (Z(h) . D) over sampled curvettas D of E."""
    vals = []
    for a in coefficient_sequence():
        D = family(a)
        vals.append(intersection_multiplicity(D, h))
        if len(vals) >= samples:
            break
    return min(vals)


def genericity_certificate(L, C, tree=None):
    """Check condition (C . L_i) = 0 on the resolution through intersection numbers.

    For every L_i and C_j the intersection number must equal nu_{E_{C_j}}(x_i),
    which is computed independently as a minimum over generic curvettas of
    E_{C_j}.
    """
    from .eggers_wall import resolution_tree
    tree = tree or resolution_tree(C, with_semiroots=False)
    actual, predicted = {}, {}
    for j, Cj in enumerate(C):
        P = tree.divisor_of_leaf(Cj)
        fam = curvetta_family(Cj, P)
        for i, Li in enumerate(L):
            actual[(i, j)] = intersection_multiplicity(Cj, Li)
            predicted[(i, j)] = divisor_value(Li, fam)
    return Certificate(actual, predicted)


def maximal_contact_sequence(C, coefficient_range=8):
    """A generic sequence of maximal contact curves of the resolution of C.

    L_0 = Z(X) always; one semi-root per end of an index-level closure of the
    Eggers-Wall tree; one perturbed curvetta for every remaining end divisor.
    Perturbation coefficients are searched in the order 1, -1, 2, -2, ...
    """
    from .eggers_wall import resolution_tree
    C = list(C)
    tree = resolution_tree(C, with_semiroots=True)
    L = [reference_line()]
    L.extend(tree.semiroots)
    tops = tree.uncovered_ends()
    fixed = list(L)
    chosen = []
    for P, Cj in tops:
        fam = curvetta_family(Cj, P)
        for a in coefficient_sequence(coefficient_range):
            cand = fam(a)
            cand.label = "L%d" % (len(fixed) + len(chosen))
            cert = genericity_certificate([cand], C, tree)
            if cert.passed:
                chosen.append(cand)
                break
        else:
            raise GenericityExhausted("no coefficient passed", point=str(P.e),
                                      tried=coefficient_range)
    L = fixed + chosen
    if len(L) == 1:
        # smooth branch: a cross
        fam = curvetta_family(C[0], tree.divisor_of_leaf(C[0]))
        for a in coefficient_sequence(coefficient_range):
            cand = fam(a)
            if genericity_certificate([cand], C, tree).passed:
                L.append(cand)
                break
        else:
            raise GenericityExhausted("no transversal line found")
    L = [L[0]] + sorted(L[1:], key=lambda b: _attach_key(tree, b))
    for k, b in enumerate(L):
        if b.label is None or k:
            b.label = "L%d" % k
    cert = genericity_certificate(L, C, tree)
    if not cert.passed:
        raise GenericityExhausted("assembled sequence failed the certificate",
                                  failures=cert.failures())
    return L, cert


def _attach_key(tree, b):
    p = b.param
    return (max(p.exponents(), default=Fraction(1)), p.n, _sort_key(p))
