"""Adic expansions, the ideal of the re-embedded plane, weighted initial forms,
and chart-wise verification of toric embedded resolutions.

Polynomials in the plane are exact ``MPoly`` objects in (X, Y); the ambient
space of the re-embedding has coordinates X_0, ..., X_m with X_i standing
for the i-th function of the generating sequence.
"""

from fractions import Fraction
from itertools import combinations
from math import gcd

from .branch import NAMES, BranchData, is_reference
from .errors import (AttachmentCollision, DegreeLadderViolation, OrderVectorMismatch,
                     PrefixNotGeneratingSequence, SemigroupNotGeneratingZ, ShapeViolation,
                     TruncationInsufficient)
from .exactmath import INF, MPoly, Series, substitute
from .lattice import (ChartBasis, Cone, Fan, complete_to_basis, fan_of_faces, orthant,
                      primitive, rank, star_fan, star_subdivide)

DEFAULT_ARC_PRECISION = 48


# ----------------------------------------------------------------- polynomials

def plane_poly(b):
    """Exact defining polynomial in (X, Y) of a branch, normalized monic in Y."""
    if isinstance(b, MPoly):
        f = b
    elif is_reference(b):
        return MPoly.var(0, 2, NAMES)
    else:
        f = b.poly()
    if f.has_series_coefficients():
        raise DegreeLadderViolation("defining polynomial is only known up to truncation")
    d = f.degree_in(1)
    lead = [c for e, c in f.terms.items() if e[1] == d]
    if len(lead) != 1 or (0, d) not in f.terms:
        raise DegreeLadderViolation("polynomial is not monic in Y", poly=f.pretty())
    c = f.terms[(0, d)]
    return f if c == 1 else f * Fraction(1, c)


def _ycoeff(f, k):
    return MPoly({(e[0], 0): c for e, c in f.terms.items() if e[1] == k}, 2, f.names)


def _divmod_y(f, g):
    """Euclidean division in Y by a polynomial monic in Y."""
    d = g.degree_in(1)
    q = MPoly({}, 2, f.names)
    r = f
    while r.degree_in(1) >= d:
        k = r.degree_in(1)
        c = _ycoeff(r, k) * MPoly({(0, k - d): 1}, 2, f.names)
        q = q + c
        r = r - c * g
    return q, r


def _x_coeffs(f):
    """{k: coeff} for a polynomial in X alone."""
    return {e[0]: c for e, c in f.terms.items()}


def compose(H, args):
    """H(args) for polynomials args in a common ring."""
    if not args:
        raise ValueError("no arguments")
    ring = args[0]
    total = MPoly({}, ring.nvars, ring.names)
    cache = {}
    for e, c in H.terms.items():
        term = MPoly.const(c, ring.nvars, ring.names)
        for i, k in enumerate(e):
            if k:
                if (i, k) not in cache:
                    cache[(i, k)] = args[i] ** k
                term = term * cache[(i, k)]
        total = total + term
    return total


# ----------------------------------------------------------------- expansions

class AdicExpansion:
    """f = sum_I c_I(x) f_1^{i_1} ... f_G^{i_G}.

    ``terms`` maps the digit tuple I to {k: coefficient of x^k in c_I}.
    """

    def __init__(self, base, terms, ladder, source=None):
        self.base = list(base)
        self.terms = terms
        self.ladder = tuple(ladder)      # N_1, ..., N_{G-1}
        self.source = source

    @property
    def G(self):
        return len(self.base)

    def monomials(self):
        """Exponent tuples (k, i_1, ..., i_G) with their coefficients."""
        out = {}
        for I, cs in self.terms.items():
            for k, c in cs.items():
                out[(k,) + tuple(I)] = c
        return out

    def as_poly(self, names=None):
        """The expansion as a polynomial in X_0, X_1, ..., X_G."""
        names = names or tuple("X%d" % i for i in range(self.G + 1))
        return MPoly(self.monomials(), self.G + 1, names)

    def reconstruct(self):
        return compose(self.as_poly(), [MPoly.var(0, 2, NAMES)] + self.base)

    def digits_ok(self):
        for I in self.terms:
            for j, N in enumerate(self.ladder):
                if not 0 <= I[j] < N:
                    return False
        if self.source is not None and self.G:
            top = self.source.degree_in(1) // self.base[-1].degree_in(1)
            if any(I[-1] > top for I in self.terms):
                return False
        return True

    def min_weight_part(self, weights):
        mons = self.monomials()
        w = {e: sum(Fraction(a) * b for a, b in zip(weights, e)) for e in mons}
        low = min(w.values())
        return low, {e: c for e, c in mons.items() if w[e] == low}

    def leading_binomial(self, weights):
        """(n, theta, b) when the lowest-weight part is x_G^n - theta x_0^b0 ... x_{G-1}^b."""
        low, part = self.min_weight_part(weights)
        if len(part) != 2:
            return None
        G = self.G
        top = [e for e in part if all(x == 0 for x in e[:G]) and e[G] > 0]
        if len(top) != 1 or part[top[0]] != 1:
            return None
        (other,) = [e for e in part if e != top[0]]
        if other[G] != 0:
            return None
        return top[0][G], -part[other], other[:G]

    def __repr__(self):
        return "AdicExpansion(%s)" % self.as_poly().pretty()


def check_ladder(base):
    """Degrees deg f_1 = 1, deg f_{j+1} = N_j deg f_j with N_j > 1; returns the N_j."""
    if not base:
        return []
    degs = [f.degree_in(1) for f in base]
    if degs[0] != 1:
        raise DegreeLadderViolation("first base function must have degree one in Y",
                                    degrees=degs)
    N = []
    for a, b in zip(degs, degs[1:]):
        if b % a or b // a < 2:
            raise DegreeLadderViolation("degree ladder violated", degrees=degs)
        N.append(b // a)
    return N


def adic_expansion(f, base):
    """The (x, f_1, ..., f_G)-adic expansion of f; ``base`` may start with Z(X)."""
    f = f if isinstance(f, MPoly) else plane_poly(f)
    base = [plane_poly(b) for b in base if not (isinstance(b, BranchData) and is_reference(b))]
    N = check_ladder(base)

    def expand(h, G):
        if G == 0:
            if h.degree_in(1) > 0:
                raise DegreeLadderViolation("remainder still depends on Y")
            return {(): _x_coeffs(h)} if not h.is_zero() else {}
        fG = base[G - 1]
        out = {}
        k = 0
        while not h.is_zero():
            h, r = _divmod_y(h, fG)
            for I, cs in expand(r, G - 1).items():
                out[I + (k,)] = cs
            k += 1
        return out

    if f.has_series_coefficients():
        raise DegreeLadderViolation("expansion needs an exact polynomial")
    return AdicExpansion(base, expand(f, len(base)), N, source=f)


def valuation_from_expansion(h, weights, tree=None, columns=None):
    """min over terms of k w_0 + sum i_j w_j, the weights being nu(x_0..x_G).

    ``weights`` may instead be a tree point P, with the tree columns of the
    base; the weights are then the values of nu_{E_P}.
    """
    if not isinstance(weights, (list, tuple)):
        weights = divisor_weights(weights, tree, columns)
    if not h.terms:
        return INF
    return h.min_weight_part(weights)[0]


def divisor_weights(P, tree, columns):
    """nu_{E_P}(x_j) = i+(P) w^P_j for the given tree columns (0 is L_0)."""
    from .tropical import w_vector
    w = w_vector(P, tree).coords
    return [P.i_plus * w[c] for c in columns]


# ----------------------------------------------------------------- embedding ideal

class EmbeddingIdeal:
    """Generators H_2..H_m of the ideal of the plane in the re-embedding."""

    def __init__(self, genseq, order, g, generators, expansions, polys):
        self.genseq = genseq
        self.order = order                # ambient variable i is genseq[order[i]]
        self.g = g
        self.generators = generators      # H_2, ..., H_m
        self.expansions = expansions
        self.polys = polys                # plane polynomials in ambient order

    @property
    def m(self):
        return len(self.order) - 1

    def names(self):
        return tuple("X%d" % i for i in range(self.m + 1))

    def vanishes(self):
        return all(compose(H, self.polys).is_zero() for H in self.generators)

    def to_json(self):
        return {"order": [self.genseq[k].label or "L%d" % k for k in self.order],
                "g": self.g,
                "generators": [H.pretty() for H in self.generators]}


def _ladder_prefix(polys):
    degs = [p.degree_in(1) for p in polys]
    if len(degs) < 2 or degs[1] != 1:
        return 1
    g = 1
    while g + 1 < len(degs) and degs[g + 1] % degs[g] == 0 and degs[g + 1] > degs[g]:
        g += 1
    return g


def generating_prefix(tree, P, exclude=()):
    """Spine leaves giving a minimal generating sequence of nu_{E_P}, in ladder order.

    Returned indices are positions in ``tree.spine``-numbering plus one (L_0 is 0).
    """
    leaf_exps = [] if P.is_root else [x for x in tree.exps[P.leaf] if x < P.e]
    cands = [k for k in tree.spine if k not in exclude]

    def pick(n, e_min):
        best = None
        for k in cands:
            if tree.n[k] != n:
                continue
            T = tree.tripod(P, k)
            if not T.is_root and T.e < e_min:
                continue
            if T.is_root and e_min > 0:
                continue
            key = (T.e, -k)
            if best is None or key > best[0]:
                best = (key, k)
        if best is None:
            raise PrefixNotGeneratingSequence("no branch of D realizes the level",
                                              index=n, e=str(e_min))
        return best[1]

    chosen = [pick(1, Fraction(0))]
    for x in leaf_exps:
        Q = tree.point(P.leaf, x)
        chosen.append(pick(Q.i_plus, x))
    return [0] + [tree.spine.index(k) + 1 for k in chosen]


def build_embedding_ideal(genseq, active=None, tree=None, prefix=None):
    """H_{j+1} for the sequence, adapted to the divisor of ``active`` when given."""
    genseq = list(genseq)
    if not genseq or not is_reference(genseq[0]):
        raise PrefixNotGeneratingSequence("the sequence must start with Z(X)")
    if prefix is None and active is not None:
        if tree is None:
            from .eggers_wall import build_tree
            tree = build_tree(genseq)
        prefix = generating_prefix(tree, active)
    if prefix is not None:
        order = list(prefix) + [k for k in range(len(genseq)) if k not in prefix]
        g = len(prefix) - 1
    else:
        order = list(range(len(genseq)))
        g = None
    polys2 = [plane_poly(genseq[k]) for k in order]
    if g is None:
        g = _ladder_prefix(polys2)
    if len(polys2) > 1 and polys2[1].degree_in(1) != 1:
        raise PrefixNotGeneratingSequence("x_1 must be smooth and transversal to Z(X)")
    m = len(order) - 1
    names = tuple("X%d" % i for i in range(m + 1))
    gens, exps = [], []
    for j in range(1, m):
        base = polys2[1:j + 1] if j < g else polys2[1:g + 1]
        try:
            ex = adic_expansion(polys2[j + 1], base)
        except DegreeLadderViolation as exc:
            raise PrefixNotGeneratingSequence("prefix is not a degree ladder",
                                              reason=exc.message)
        k = len(base)
        body = ex.as_poly().embed(m + 1, list(range(k + 1)), names)
        H = body - MPoly.var(j + 1, m + 1, names)
        gens.append(H)
        exps.append(ex)
    ring = [p.rename(NAMES) for p in polys2]
    E = EmbeddingIdeal(genseq, order, g, gens, exps, ring)
    if not E.vanishes():
        raise PrefixNotGeneratingSequence("generators do not vanish on the plane")
    return E


# ----------------------------------------------------------------- initial forms

def _weight(e, w):
    return sum(Fraction(a) * b for a, b in zip(e, w))


def initial_form(H, w):
    low = min(_weight(e, w) for e in H.terms)
    return MPoly({e: c for e, c in H.terms.items() if _weight(e, w) == low}, H.nvars, H.names)


def initial_monomial(H, weights):
    """Minimal exponent for the order refined by the weight vectors, then lex (X_0 largest)."""
    def key(e):
        return tuple(_weight(e, w) for w in weights) + tuple(e)
    return min(H.terms, key=key)


class InitialFormCertificate:
    def __init__(self, weight, forms, shapes, leading, pivots, transcript):
        self.weight = weight
        self.forms = forms
        self.shapes = shapes
        self.leading = leading
        self.pivots = pivots
        self.transcript = transcript

    @property
    def non_degenerate(self):
        return True

    def to_json(self):
        return {"weight": [str(x) for x in self.weight],
                "initial_forms": [f.pretty() for f in self.forms],
                "shapes": self.shapes, "transcript": self.transcript}


def _uses(f):
    return {i for e in f.terms for i, k in enumerate(e) if k}


def _pure_power(e):
    nz = [i for i, k in enumerate(e) if k]
    return nz[0] if len(nz) == 1 else None


def initial_form_certificate(E, w, leaf=None, refine=None):
    """Shapes of in_w(H_j), standard-basis leading terms and torus smoothness.

    ``w`` is w^P for a rational interior point (generators adapted to P), or
    the basis vector of ``leaf`` (ambient index) with ``refine`` the semigroup
    weights of that leaf on the prefix.
    """
    w = [Fraction(x) for x in w]
    forms, shapes, lead, pivots, log = [], [], [], [], []
    g = E.g
    for idx, H in enumerate(E.generators):
        j = idx + 1                   # H_{j+1}
        f = initial_form(H, w)
        forms.append(f)
        if len(f.terms) < 2:
            raise ShapeViolation("initial form is a monomial", generator=j + 1, form=f.pretty())
        if leaf is not None:
            if j + 1 == leaf:
                expect = H + MPoly.var(j + 1, H.nvars, H.names)
                if f != expect:
                    raise ShapeViolation("leaf initial form should drop the linear term",
                                         generator=j + 1)
                ex = E.expansions[idx]
                got = ex.leading_binomial(refine[:ex.G + 1])
                if got is None:
                    raise ShapeViolation("expansion of the leaf is not binomial at its weights",
                                         generator=j + 1)
                shapes.append("leaf")
            else:
                if f != H:
                    raise ShapeViolation("initial form should be the whole generator",
                                         generator=j + 1)
                shapes.append("whole")
            continue
        if j < g:
            ex = E.expansions[idx]
            got = ex.leading_binomial(w[:j + 1])
            if got is None or MPoly(ex.min_weight_part(w[:j + 1])[1], j + 1).embed(
                    H.nvars, list(range(j + 1)), H.names) != f:
                raise ShapeViolation("expected a binomial X_j^n - theta X^b",
                                     generator=j + 1, form=f.pretty())
            n, theta, b = got
            lhs = n * w[j]
            rhs = sum(bi * wi for bi, wi in zip(b, w))
            if lhs != rhs or theta == 0:
                raise ShapeViolation("weights of the binomial do not balance", generator=j + 1)
            shapes.append({"kind": "binomial", "n": n, "theta": str(theta),
                           "b": list(b)})
            pivots.append(j)
        else:
            lin = tuple(int(i == j + 1) for i in range(H.nvars))
            if f.coefficient(lin) != -1 or not _uses(f) - {j + 1} <= set(range(g + 1)):
                raise ShapeViolation("expected -X_{j+1} + (polynomial in the prefix)",
                                     generator=j + 1, form=f.pretty())
            shapes.append({"kind": "graph"})
            pivots.append(j + 1)
    # leading monomials for the refined order must be pairwise coprime pure powers
    orders = [w] + ([refine + [0] * (len(w) - len(refine))] if refine else [])
    for H in E.generators:
        e = initial_monomial(H, orders)
        v = _pure_power(e)
        if v is None:
            raise ShapeViolation("leading monomial is not a pure power", monomial=e)
        lead.append(v)
    if len(set(lead)) != len(lead):
        raise ShapeViolation("leading monomials are not coprime", variables=lead)
    log.append("leading variables %s pairwise distinct: standard basis" % lead)
    if leaf is None:
        # triangular Jacobian on the torus: pivot derivatives are monomials
        seen = set()
        for f, p in zip(forms, pivots):
            used = _uses(f)
            if used & (set(pivots) - seen - {p}):
                raise ShapeViolation("initial forms are not triangular", pivot=p)
            d = {e: c * e[p] for e, c in f.terms.items() if e[p]}
            if len(d) != 1:
                raise ShapeViolation("pivot derivative is not a monomial", pivot=p)
            seen.add(p)
        log.append("Jacobian triangular in %s with monomial diagonal" % pivots)
    return InitialFormCertificate(w, forms, shapes, lead, pivots, log)


# ----------------------------------------------------------------- lifted arcs

def _unit_split(s):
    """s = d t^a (1 + u) with u(0) = 0."""
    a = s.ord()
    if a == INF:
        return INF, Fraction(0), None
    d = s.coeff(a)
    u = s.shift(-a) * (1 / Fraction(d))
    return a, d, u


def lift_arc(series, basis, prec=None):
    """U_k o eta for the chart of ``basis``: exact leading data and truncated units."""
    parts = [_unit_split(s) for s in series]
    if any(a == INF for a, _, _ in parts):
        raise OrderVectorMismatch("arc lies in a coordinate hyperplane")
    R = prec
    for a, _, u in parts:
        if u.prec is not None:
            R = u.prec if R is None else min(R, u.prec)
    if R is None:
        R = DEFAULT_ARC_PRECISION
    out = []
    for k in range(basis.rank):
        row = basis.inv[k]
        order = sum(c * a for c, (a, _, _) in zip(row, parts))
        const = Fraction(1)
        unit = Series({0: 1}, R, parts[0][2].var)
        for c, (a, d, u) in zip(row, parts):
            if c:
                const *= Fraction(d) ** c
                unit = unit * (u.truncate(R) ** c)
        if order < 0:
            raise OrderVectorMismatch("lifted coordinate has a pole", coordinate=k)
        out.append(unit.shift(order) * const)
    return out


def _orders(us):
    return tuple(u.ord() for u in us)


# ----------------------------------------------------------------- charts

class ChartReport:
    def __init__(self, basis):
        self.basis = basis
        self.branches = []
        self.surface = []
        self.surface_checks = []
        self.distinct = True
        self.resolved = False

    def to_json(self):
        return {
            "basis": [list(v) for v in self.basis.vectors],
            "det": self.basis.det,
            "branches": self.branches,
            "surface": [s.pretty() for s in self.surface],
            "surface_checks": self.surface_checks,
            "attachments_distinct": self.distinct,
            "resolved": self.resolved,
        }


def _pull_back(G, basis, names):
    """Substitute X_a = prod_k U_k^{v_k[a]} and divide by the monomial content."""
    r = basis.rank
    t = {}
    for e, c in G.terms.items():
        u = tuple(sum(e[a] * basis.vectors[k][a] for a in range(r)) for k in range(r))
        t[u] = t.get(u, 0) + c
    F = MPoly(t, r, names)
    if F.is_zero():
        return F, (0,) * r
    low = tuple(min(e[k] for e in F.terms) for k in range(r))
    return MPoly({tuple(a - b for a, b in zip(e, low)): c for e, c in F.terms.items()},
                 r, names), low


def _eval(F, point):
    total = Fraction(0)
    for e, c in F.terms.items():
        v = Fraction(c)
        for x, k in zip(point, e):
            if k:
                v *= Fraction(x) ** k
        total += v
    return total


def _diff(F, i):
    t = {}
    for e, c in F.terms.items():
        if e[i]:
            ne = list(e)
            ne[i] -= 1
            t[tuple(ne)] = c * e[i]
    return MPoly(t, F.nvars, F.names)


def surface_check(equations, point):
    """Vanishing, Jacobian rank, and a pair of local coordinates at ``point``."""
    vals = [_eval(F, point) for F in equations]
    n = len(point)
    J = [[_eval(_diff(F, i), point) for i in range(n)] for F in equations]
    smooth = all(v == 0 for v in vals) and (not J or rank(J) == len(equations))
    local = None
    if smooth:
        for keep in combinations(range(n), n - len(equations)):
            rest = [i for i in range(n) if i not in keep]
            if not rest or rank([[row[i] for i in rest] for row in J]) == len(equations):
                local = list(keep)
                break
    return {"point": [str(x) for x in point], "on_surface": all(v == 0 for v in vals),
            "smooth": smooth, "local_coordinates": local}


def chart_check_plane(genseq, C, sigma, coords=None, T=None):
    """Verify the chart of ``sigma`` on the re-embedding by the functions of genseq.

    ``coords`` selects which functions are ambient coordinates (default all);
    it must contain Z(X) and a function of degree one in Y.
    """
    genseq = list(genseq)
    coords = list(range(len(genseq))) if coords is None else list(coords)
    basis = sigma if isinstance(sigma, ChartBasis) else ChartBasis(sigma)
    if basis.rank != len(coords):
        raise OrderVectorMismatch("chart rank differs from the number of coordinates")
    polys = [plane_poly(genseq[k]) for k in coords]
    if polys[0] != MPoly.var(0, 2, NAMES):
        raise OrderVectorMismatch("the first coordinate must be X")
    smooth = [i for i, p in enumerate(polys) if p.degree_in(1) == 1]
    if not smooth:
        raise OrderVectorMismatch("no coordinate of degree one in Y")
    s = smooth[0]
    report = ChartReport(basis)
    unames = tuple("U%d" % (k + 1) for k in range(basis.rank))
    # surface: X_i = expansion of x_i in (x_0, x_s)
    anames = tuple("X%d" % i for i in range(len(coords)))
    for i, p in enumerate(polys):
        if i in (0, s):
            continue
        ex = adic_expansion(p, [polys[s]])
        body = ex.as_poly().embed(len(coords), [0, s], anames)
        G = body - MPoly.var(i, len(coords), anames)
        report.surface.append(_pull_back(G, basis, unames)[0])
    matched = 0
    seen = {}
    for j, b in enumerate(C):
        Tj = T or DEFAULT_ARC_PRECISION
        while True:
            arc = b.param_at(Tj).arc()
            series = [substitute(p, list(arc)) for p in polys]
            try:
                us = lift_arc(series, basis)
                if all(u.prec is None or u.prec > 3 for u in us):
                    break
            except OrderVectorMismatch:
                raise
            except TruncationInsufficient:
                pass
            Tj *= 2
        alpha = tuple(sr.ord() for sr in series)
        entry = {"label": b.label or "C%d" % (j + 1), "order_vector": list(alpha)}
        if alpha not in basis.vectors:
            entry["on_chart"] = False
            report.branches.append(entry)
            continue
        p = basis.vectors.index(alpha)
        orders = _orders(us)
        expect = tuple(int(k == p) for k in range(basis.rank))
        if orders != expect:
            raise OrderVectorMismatch("lifted arc does not have orders e_p",
                                      orders=orders, expected=expect)
        lead = tuple(u.coeff(0) for u in us)
        second = [None if k == p else _second_order(us[k]) for k in range(basis.rank)]
        point = tuple(Fraction(0) if k == p else lead[k] for k in range(basis.rank))
        entry.update(on_chart=True, position=p, orders=list(orders),
                     orders_from_ray=[orders[p]] + [o for k, o in enumerate(orders) if k != p],
                     smooth_transversal=True,
                     leading=[str(lead[k]) if k != p else "0" for k in range(basis.rank)],
                     slope=str(us[p].coeff(1)),
                     second_orders=[str(x) if x == INF else x for x in second],
                     attachment=[str(x) for x in point])
        key = (p, point)
        if key in seen:
            report.distinct = False
            raise AttachmentCollision("two branches meet the exceptional orbit at one point",
                                      first=seen[key], second=entry["label"],
                                      point=[str(x) for x in point])
        seen[key] = entry["label"]
        if report.surface:
            report.surface_checks.append(dict(surface_check(report.surface, point),
                                              branch=entry["label"]))
        report.branches.append(entry)
        matched += 1
    if not matched:
        raise OrderVectorMismatch("no branch has its order vector in the chart basis",
                                  basis=[list(v) for v in basis.vectors])
    report.resolved = report.distinct
    return report


def _second_order(u):
    d = u - Series({0: u.coeff(0)}, None, u.var)
    if not d.coeffs:
        # constant up to the tracked precision: only a lower bound is known
        return INF if d.prec is None else ">=%d" % d.prec
    return d.ord()


# ----------------------------------------------------------------- space curves

class SpaceCurveInput:
    def __init__(self, arcs, labels=None):
        self.arcs = [tuple(a) for a in arcs]
        if not self.arcs:
            raise ValueError("no arcs")
        n = len(self.arcs[0])
        if any(len(a) != n for a in self.arcs):
            raise ValueError("arcs live in spaces of different dimension")
        for a in self.arcs:
            for s in a:
                if not s.is_zero() and s.ord() < 1:
                    raise ValueError("arc is not centred at the origin")
            if all(s.is_zero() for s in a):
                raise ValueError("arc is constant")
        self.n = n
        self.labels = labels or ["C%d" % (k + 1) for k in range(len(self.arcs))]

    def order_vectors(self):
        return [tuple(INF if s.is_zero() else s.ord() for s in a) for a in self.arcs]


def repair_coordinates(inp):
    """Replace y_l by y_l + y^p so that no coordinate vanishes on an arc."""
    ov = inp.order_vectors()
    full = [i for i in range(inp.n) if all(v[i] != INF for v in ov)]
    if not full:
        raise SemigroupNotGeneratingZ("no coordinate is nonzero on every arc")
    y = full[0]
    top = max(x for v in ov for x in v if x != INF)
    p = max(top // v[y] for v in ov) + 1
    arcs = []
    for a in inp.arcs:
        yp = a[y] ** p
        arcs.append(tuple(s if i == y else s + yp for i, s in enumerate(a)))
    return SpaceCurveInput(arcs, inp.labels), {"y": y, "p": p}


def separate_arcs(inp):
    """Append coordinates f_i + y_1^{l_i} until the order vectors are distinct.

    Needs arcs whose first coordinate is t^n exactly, so that the projection to
    (X_1, X_b) has a defining polynomial f_i from its Puiseux data.
    """
    from .branch import PuiseuxParam, defining_poly_from_param
    ov = inp.order_vectors()
    r = len(inp.arcs)
    if len(set(ov)) == r:
        return inp, []
    idx = sorted(range(r), key=lambda j: -ov[j][0])
    arcs = [list(a) for a in inp.arcs]
    added = []
    for pos in range(r - 1):
        i = idx[pos]
        a = inp.arcs[i]
        n = a[0].ord()
        if a[0] != Series({n: 1}, a[0].prec, a[0].var) or not a[0].is_exact():
            raise ValueError("separation needs arcs with first coordinate t^n")
        f = None
        for b in range(1, inp.n):
            cand = defining_poly_from_param(PuiseuxParam(n, a[b]))
            if cand.has_series_coefficients():
                continue
            if all(not substitute(cand, [inp.arcs[j][0], inp.arcs[j][b]]).is_zero()
                   for j in range(r) if j != i):
                f = (b, cand)
                break
        if f is None:
            raise AttachmentCollision("no projection separates the branch", branch=inp.labels[i])
        b, cand = f
        vals = {j: substitute(cand, [inp.arcs[j][0], inp.arcs[j][b]]) for j in range(r)}
        later = idx[pos + 1:]
        ell = 1
        while any(vals[j].ord() >= ell * ov[j][0] for j in later):
            ell += 1
        for j in range(r):
            arcs[j].append(vals[j] + inp.arcs[j][0] ** ell)
        added.append({"branch": inp.labels[i], "coordinate": b, "power": ell,
                      "f": cand.pretty()})
    out = SpaceCurveInput(arcs, inp.labels)
    if len(set(out.order_vectors())) != r:
        raise AttachmentCollision("separation did not make the order vectors distinct")
    return out, added


def space_curve_resolve(inp, repair=False, separate=False):
    """Certify a toric embedded resolution of the arcs (chart by chart)."""
    notes = {}
    if repair:
        inp, notes["repair"] = repair_coordinates(inp)
    if separate:
        inp, notes["separation"] = separate_arcs(inp)
    n = inp.n
    ovs = inp.order_vectors()
    Sigma = fan_of_faces(orthant(n))
    plan = []
    for a, v in zip(inp.arcs, ovs):
        zero = [i for i in range(n) if v[i] == INF]
        live = [i for i in range(n) if v[i] != INF]
        w = [v[i] for i in live]
        g = 0
        for x in w:
            g = gcd(g, x)
        if g != 1:
            raise SemigroupNotGeneratingZ("orders of the coordinates have a common factor",
                                          orders=w, gcd=g)
        ray = tuple(0 if v[i] == INF else v[i] for i in range(n))
        plan.append((zero, live, ray))
        Sigma = star_subdivide(Sigma, ray)
    Sigma.validate()
    results = []
    seen = {}
    for label, a, (zero, live, ray) in zip(inp.labels, inp.arcs, plan):
        sigma = Cone([tuple(int(i == j) for j in range(n)) for i in zero], n)
        rec = {"label": label, "order_vector": ["inf" if x == INF else x
                                                for x in (INF if a[i].is_zero() else ray[i]
                                                          for i in range(n))]}
        if zero:
            if sigma not in Sigma.cones:
                raise OrderVectorMismatch("coordinate cone is missing from the fan")
            star = star_fan(sigma, Sigma)
            img = tuple(ray[i] for i in live)
            # the quotient by the coordinate cone is the projection to live coordinates
            if (primitive(img),) not in {c.gens for c in star.cones}:
                raise OrderVectorMismatch("order vector is not a ray of the star fan")
            rec["subspace_cone"] = [list(x) for x in sigma.gens]
            rec["star_ray"] = list(img)
        basis = complete_to_basis([tuple(ray[i] for i in live)])
        us = lift_arc([a[i] for i in live], basis)
        orders = _orders(us)
        if orders != tuple(int(k == 0) for k in range(len(live))):
            raise OrderVectorMismatch("lifted arc does not have orders (1, 0, ..., 0)",
                                      orders=orders)
        point = tuple([Fraction(0)] + [u.coeff(0) for u in us[1:]])
        key = (tuple(zero), tuple(ray), point)
        if key in seen:
            raise AttachmentCollision("two arcs meet the same orbit at one point",
                                      first=seen[key], second=label)
        seen[key] = label
        rec.update(chart=[list(v) for v in basis.vectors], orders=list(orders),
                   attachment=[str(x) for x in point], resolved=True)
        results.append(rec)
    return {"arcs": results, "fan_rays": sorted(list(c.gens[0]) for c in Sigma.cones
                                                if len(c.gens) == 1),
            "fan_regular": Sigma.is_regular(), "notes": notes,
            "resolved": all(r["resolved"] for r in results)}


# ----------------------------------------------------------------- all divisors

class ResolutionCertificate:
    def __init__(self):
        self.divisors = []
        self.leaves = []
        self.skipped = []

    @property
    def passed(self):
        return all(d["ok"] for d in self.divisors + self.leaves)

    def to_json(self):
        return {"passed": self.passed, "divisors": self.divisors, "leaves": self.leaves,
                "skipped": self.skipped}


def certify_resolution(genseq, C=(), tree=None):
    """Initial-form certificates for every exceptional divisor and singular leaf."""
    from .eggers_wall import build_tree
    from .tropical import w_vector
    tree = tree or build_tree(list(genseq), list(C))
    out = ResolutionCertificate()
    for P in tree.exceptional_points():
        rec = {"point": tree._name(P), "e": str(P.e)}
        try:
            E = build_embedding_ideal(genseq, active=P, tree=tree)
            w = [P.i_plus * x for x in w_vector(P, tree).coords]
            cert = initial_form_certificate(E, [w[k] for k in E.order])
            rec.update(ok=True, order=E.order, g=E.g, certificate=cert.to_json())
        except (ShapeViolation, PrefixNotGeneratingSequence) as exc:
            rec.update(ok=False, error=exc.envelope())
        out.divisors.append(rec)
    for pos, k in enumerate(tree.spine):
        name = tree.labels[k]
        if tree.n[k] == 1:
            out.skipped.append(name)
            continue
        rec = {"leaf": name}
        try:
            A = tree.point(k, tree.exps[k][-1])
            prefix = generating_prefix(tree, A, exclude=(k,))
            E = build_embedding_ideal(genseq, prefix=prefix)
            amb = E.order.index(pos + 1)
            w = [int(i == amb) for i in range(E.m + 1)]
            refine = [tree.n[k]] + [tree.intersections[(k, tree.spine[c - 1])]
                                    for c in prefix[1:]]
            cert = initial_form_certificate(E, w, leaf=amb, refine=refine)
            rec.update(ok=True, order=E.order, certificate=cert.to_json())
        except (ShapeViolation, PrefixNotGeneratingSequence) as exc:
            rec.update(ok=False, error=exc.envelope())
        out.leaves.append(rec)
    return out


def strict_transform(G, basis, names=None):
    """Pull back a polynomial in the chart's ambient coordinates and drop the monomial content."""
    basis = basis if isinstance(basis, ChartBasis) else ChartBasis(basis)
    names = names or tuple("U%d" % (k + 1) for k in range(basis.rank))
    return _pull_back(G, basis, names)[0]
