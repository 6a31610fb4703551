"""Integer lattices, cones and fans.

Vectors are tuples of Python ints.  Cones keep primitive, minimal generators
in lexicographic order, so structural equality is set equality.  Fans are
face-closed sets of simplicial cones, validated when built.
"""

from fractions import Fraction
from itertools import combinations
from math import gcd

from .errors import (
    ConeDimensionTooHigh, ConeNotInFan, NotAFan, NotPartOfBasis,
    ThetaConesCoincide, ZeroVector)


# ------------------------------------------------------------ linear algebra

def vgcd(v):
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g


def primitive(v):
    v = tuple(int(x) for x in v)
    g = vgcd(v)
    if g == 0:
        raise ZeroVector("zero vector has no primitive direction", vector=v)
    return tuple(x // g for x in v)


def det(rows):
    """Exact determinant of a square integer or rational matrix."""
    m = [[Fraction(x) for x in r] for r in rows]
    n = len(m)
    d = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c]), None)
        if p is None:
            return 0
        if p != c:
            m[c], m[p] = m[p], m[c]
            d = -d
        d *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                for k in range(c, n):
                    m[r][k] -= f * m[c][k]
    return int(d) if d.denominator == 1 else d


def rank(rows):
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return 0
    rk, ncol = 0, len(m[0])
    for c in range(ncol):
        p = next((r for r in range(rk, len(m)) if m[r][c]), None)
        if p is None:
            continue
        m[rk], m[p] = m[p], m[rk]
        for r in range(len(m)):
            if r != rk and m[r][c]:
                f = m[r][c] / m[rk][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[rk])]
        rk += 1
    return rk


def solve_combination(gens, v):
    """Coefficients x with sum x_i gens_i = v for independent gens, else None."""
    k = len(gens)
    n = len(v)
    # augmented system: columns are gens
    m = [[Fraction(gens[j][i]) for j in range(k)] + [Fraction(v[i])] for i in range(n)]
    row = 0
    piv = []
    for c in range(k):
        p = next((r for r in range(row, n) if m[r][c]), None)
        if p is None:
            return None
        m[row], m[p] = m[p], m[row]
        inv = 1 / m[row][c]
        m[row] = [x * inv for x in m[row]]
        for r in range(n):
            if r != row and m[r][c]:
                f = m[r][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[row])]
        piv.append(c)
        row += 1
    if any(m[r][k] for r in range(row, n)):
        return None
    return [m[i][k] for i in range(k)]


def mat_inverse(rows):
    n = len(rows)
    m = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)]
         for i, r in enumerate(rows)]
    for c in range(n):
        p = next(r for r in range(c, n) if m[r][c])
        m[c], m[p] = m[p], m[c]
        inv = 1 / m[c][c]
        m[c] = [x * inv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c]:
                f = m[r][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return [row[n:] for row in m]


def transpose(rows):
    return [list(c) for c in zip(*rows)]


# ------------------------------------------------------------------ HNF / SNF

def column_hnf(A):
    """Column-style Hermite form: returns (H, U) with A U = [H | 0].

    A is a list of k rows of length n, of full row rank for a complete [H|0]
    shape.  U is unimodular.  At each row the pivot column is rotated into
    place so that untouched columns keep their relative order; this makes
    completions as close to the identity as possible.
    """
    k = len(A)
    n = len(A[0]) if A else 0
    W = [list(map(int, r)) for r in A]
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def col_op(dst, src, f):  # column dst -= f * column src
        for r in W:
            r[dst] -= f * r[src]
        for r in U:
            r[dst] -= f * r[src]

    def rotate(src, dst):  # move column src to position dst (dst <= src)
        for r in W:
            r.insert(dst, r.pop(src))
        for r in U:
            r.insert(dst, r.pop(src))

    piv = 0
    for i in range(k):
        if piv >= n:
            break
        while True:
            nz = [c for c in range(piv, n) if W[i][c]]
            if len(nz) <= 1:
                break
            c0 = min(nz, key=lambda c: (abs(W[i][c]), c))
            for c in nz:
                if c != c0:
                    col_op(c, c0, W[i][c] // W[i][c0])
        nz = [c for c in range(piv, n) if W[i][c]]
        if not nz:
            continue
        rotate(nz[0], piv)
        if W[i][piv] < 0:
            for r in W:
                r[piv] = -r[piv]
            for r in U:
                r[piv] = -r[piv]
        for c in range(piv):
            f = W[i][c] // W[i][piv]
            if f:
                col_op(c, piv, f)
        piv += 1
    H = [r[:piv] for r in W]
    return H, U


def elementary_divisors(A):
    """Nonzero Smith invariants of an integer matrix (list of rows)."""
    M = [list(map(int, r)) for r in A]
    if not M or not M[0]:
        return []
    rows, cols = len(M), len(M[0])
    out = []
    t = 0
    while t < min(rows, cols):
        entries = [(abs(M[i][j]), i, j) for i in range(t, rows)
                   for j in range(t, cols) if M[i][j]]
        if not entries:
            break
        _, pi, pj = min(entries)
        M[t], M[pi] = M[pi], M[t]
        for r in M:
            r[t], r[pj] = r[pj], r[t]
        while True:
            changed = False
            for i in range(t + 1, rows):
                if M[i][t]:
                    q = M[i][t] // M[t][t]
                    M[i] = [a - q * b for a, b in zip(M[i], M[t])]
                    if M[i][t]:
                        M[t], M[i] = M[i], M[t]
                        changed = True
            for j in range(t + 1, cols):
                if M[t][j]:
                    q = M[t][j] // M[t][t]
                    for r in M:
                        r[j] -= q * r[t]
                    if M[t][j]:
                        for r in M:
                            r[t], r[j] = r[j], r[t]
                        changed = True
            if changed:
                continue
            bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                        if M[i][j] % M[t][t]), None)
            if bad is None:
                break
            M[t] = [a + b for a, b in zip(M[t], M[bad[0]])]
        out.append(abs(M[t][t]))
        t += 1
    return out


# --------------------------------------------------------------------- cones

def _independent(vs):
    return rank(vs) == len(vs)


def _lp_feasible(A_eq, b_eq, nvars):
    """Exact feasibility of A_eq x = b_eq, x >= 0 (phase-one simplex, Bland's rule)."""
    if nvars == 0:
        return all(b == 0 for b in b_eq)
    rows = []
    for r, b in zip(A_eq, b_eq):
        r = [Fraction(x) for x in r]
        b = Fraction(b)
        if b < 0:
            r, b = [-x for x in r], -b
        rows.append(r + [b])
    m = len(rows)
    # tableau with artificial variables nvars..nvars+m-1
    T = [r[:nvars] + [Fraction(int(i == j)) for j in range(m)] + [r[-1]]
         for i, r in enumerate(rows)]
    basis = [nvars + i for i in range(m)]
    width = nvars + m
    # objective: minimise the sum of artificials, written in reduced form
    obj = [-sum(T[i][j] for i in range(m)) for j in range(width + 1)]
    for j in range(nvars, width):
        obj[j] = Fraction(0)
    while True:
        enter = next((j for j in range(width) if obj[j] < 0), None)
        if enter is None:
            break
        best = None
        for i in range(m):
            if T[i][enter] > 0:
                ratio = T[i][-1] / T[i][enter]
                if best is None or (ratio, basis[i]) < best[0]:
                    best = ((ratio, basis[i]), i)
        if best is None:
            break
        i = best[1]
        piv = T[i][enter]
        T[i] = [x / piv for x in T[i]]
        for k in range(m):
            if k != i and T[k][enter]:
                f = T[k][enter]
                T[k] = [a - f * b for a, b in zip(T[k], T[i])]
        f = obj[enter]
        obj = [a - f * b for a, b in zip(obj, T[i])]
        basis[i] = enter
    return obj[-1] == 0


def in_cone(v, gens):
    """Exact membership of v in the cone spanned by gens."""
    v = tuple(v)
    if not any(v):
        return True
    if not gens:
        return False
    if _independent(gens):
        x = solve_combination(list(gens), v)
        return x is not None and all(c >= 0 for c in x)
    A = [[g[i] for g in gens] for i in range(len(v))]
    return _lp_feasible(A, list(v), len(gens))


class Cone:
    """A strongly convex rational polyhedral cone given by its rays."""

    __slots__ = ("gens", "rank")

    def __init__(self, gens, rank=None):
        gs = sorted({primitive(g) for g in gens})
        if rank is None:
            if not gs:
                raise ValueError("rank needed for the zero cone")
            rank = len(gs[0])
        if any(len(g) != rank for g in gs):
            raise ValueError("generator length mismatch")
        if not _independent(gs):
            keep = list(gs)
            for g in gs:
                rest = [h for h in keep if h != g]
                if in_cone(g, rest):
                    keep = rest
            gs = keep
            for g in gs:
                if in_cone(tuple(-x for x in g), gs):
                    raise ValueError("cone is not strongly convex")
        object.__setattr__(self, "gens", tuple(gs))
        object.__setattr__(self, "rank", rank)

    def __setattr__(self, name, value):
        raise AttributeError("Cone is immutable")

    def __eq__(self, other):
        return isinstance(other, Cone) and (self.rank, self.gens) == (other.rank, other.gens)

    def __hash__(self):
        return hash((self.rank, self.gens))

    def __lt__(self, other):
        return (len(self.gens), self.gens) < (len(other.gens), other.gens)

    def __repr__(self):
        return "Cone(%s)" % (list(self.gens),)

    @property
    def dim(self):
        return rank(list(self.gens)) if self.gens else 0

    def is_simplicial(self):
        return self.dim == len(self.gens)

    def faces(self):
        if not self.is_simplicial():
            raise ValueError("faces are only enumerated for simplicial cones")
        out = []
        for k in range(len(self.gens) + 1):
            for sub in combinations(self.gens, k):
                out.append(Cone(sub, self.rank))
        return out

    def contains(self, v):
        return in_cone(v, self.gens)

    def contains_cone(self, other):
        return all(self.contains(g) for g in other.gens)

    def relative_interior_contains(self, v):
        if not self.gens:
            return not any(v)
        x = solve_combination(list(self.gens), v)
        return x is not None and all(c > 0 for c in x)

    def is_regular(self):
        return primitive_and_regular(self)[1]


def primitive_and_regular(obj):
    """(primitive vector, gcd == 1) for a vector; (cone, regular?) for a cone."""
    if isinstance(obj, Cone):
        if not obj.gens:
            return obj, True
        if not obj.is_simplicial():
            return obj, False
        return obj, all(d == 1 for d in elementary_divisors(obj.gens))
    v = tuple(int(x) for x in obj)
    g = vgcd(v)
    if g == 0:
        raise ZeroVector("zero vector", vector=v)
    return tuple(x // g for x in v), g == 1


# ---------------------------------------------------------------- chart bases

class ChartBasis:
    """A unimodular basis v_0..v_n with the exponent data of its monomial map.

    The chart morphism is X_i = prod_k U_k^{v_k[i]}; the inverse exponents
    ``inv[k][i]`` give U_k = prod_i X_i^{inv[k][i]}.
    """

    __slots__ = ("vectors", "det", "inv")

    def __init__(self, vectors):
        vs = tuple(tuple(int(x) for x in v) for v in vectors)
        d = det(vs)
        if abs(d) != 1:
            raise NotPartOfBasis("vectors do not form a lattice basis", det=d)
        # V has rows v_k; X_i = prod_k U_k^{V[k][i]}; log X = V^T log U
        inv = mat_inverse(transpose(vs))
        object.__setattr__(self, "vectors", vs)
        object.__setattr__(self, "det", d)
        object.__setattr__(self, "inv", tuple(tuple(int(x) for x in r) for r in inv))

    def __setattr__(self, name, value):
        raise AttributeError("ChartBasis is immutable")

    @property
    def rank(self):
        return len(self.vectors)

    def matrix(self):
        """Columns are the coordinates of the basis vectors."""
        return transpose(self.vectors)

    def coordinates(self, w):
        """Coordinates of w in this basis."""
        x = solve_combination(list(self.vectors), w)
        return tuple(int(c) for c in x)

    def __repr__(self):
        return "ChartBasis(%s)" % (list(self.vectors),)


def complete_to_basis(prefix, rank=None):
    """Extend ``prefix`` to a unimodular basis, deterministically."""
    prefix = [tuple(int(x) for x in v) for v in prefix]
    if not prefix:
        if rank is None:
            raise ValueError("rank needed for an empty prefix")
        return ChartBasis([tuple(int(i == j) for j in range(rank)) for i in range(rank)])
    n = len(prefix[0])
    H, U = column_hnf(prefix)
    k = len(prefix)
    if len(H[0]) < k or any(H[i][i] != 1 for i in range(k)):
        raise NotPartOfBasis("prefix is not part of a lattice basis",
                             prefix=prefix)
    Uinv = mat_inverse(U)
    rest = [tuple(int(x) for x in Uinv[j]) for j in range(k, n)]
    return ChartBasis(prefix + rest)


def saturated_span(gens):
    """A basis of the saturation of the span of gens and the coordinates of gens.

    Returns (basis rows b_1..b_k, complement rows, coords) where gens[i] =
    sum coords[i][j] b_j and basis + complement is a basis of Z^n.
    """
    gens = [tuple(int(x) for x in g) for g in gens]
    n = len(gens[0])
    H, U = column_hnf(gens)
    k = len(H[0])
    Uinv = mat_inverse(U)
    rows = [tuple(int(x) for x in r) for r in Uinv]
    return rows[:k], rows[k:], [tuple(r) for r in H], U


# ---------------------------------------------------------------------- fans

class Fan:
    """A face-closed collection of simplicial cones, validated on construction."""

    __slots__ = ("cones", "rank")

    def __init__(self, cones, rank, check=True):
        closed = set()
        for c in cones:
            if c.rank != rank:
                raise NotAFan("cone rank mismatch", cone=c.gens)
            if not c.is_simplicial():
                raise NotAFan("only simplicial cones are supported", cone=c.gens)
            closed.update(c.faces())
        if not closed:
            closed.add(Cone((), rank))
        object.__setattr__(self, "cones", frozenset(closed))
        object.__setattr__(self, "rank", rank)
        if check:
            self.validate()

    def __setattr__(self, name, value):
        raise AttributeError("Fan is immutable")

    def __eq__(self, other):
        return isinstance(other, Fan) and self.rank == other.rank and self.cones == other.cones

    def __hash__(self):
        return hash((self.rank, self.cones))

    def __repr__(self):
        return "Fan(rank=%d, maximal=%s)" % (self.rank, [list(c.gens) for c in self.maximal()])

    def maximal(self):
        cs = sorted(self.cones)
        return [c for c in cs if not any(
            c != d and set(c.gens) < set(d.gens) for d in cs)]

    def rays(self):
        return sorted(c.gens[0] for c in self.cones if len(c.gens) == 1)

    def cones_of_dim(self, d):
        return sorted(c for c in self.cones if len(c.gens) == d)

    def __contains__(self, cone):
        return cone in self.cones

    def is_regular(self):
        return all(c.is_regular() for c in self.maximal())

    def validate(self):
        mx = self.maximal()
        for a, b in combinations(mx, 2):
            if not _meet_in_common_face(a, b):
                raise NotAFan("cones meet outside a common face",
                              left=a.gens, right=b.gens)

    def to_json(self):
        return {
            "rank": str(self.rank),
            "cones": [[[str(x) for x in g] for g in c.gens] for c in self.maximal()],
        }

    def support_contains(self, v):
        return any(c.contains(v) for c in self.maximal())


def _meet_in_common_face(a, b):
    shared = set(a.gens) & set(b.gens)
    union = list(set(a.gens) | set(b.gens))
    if rank(union) == len(union):
        return True
    # look for a point of a ∩ b whose a-coordinates leave the shared face
    ag = list(a.gens)
    bg = list(b.gens)
    n = a.rank
    nv = len(ag) + len(bg)
    A = [[ag[j][i] for j in range(len(ag))] + [-bg[j][i] for j in range(len(bg))]
         for i in range(n)]
    A.append([0 if g in shared else 1 for g in ag] + [0] * len(bg))
    bvec = [0] * n + [1]
    if _lp_feasible(A, bvec, nv):
        return False
    A[-1] = [0] * len(ag) + [0 if g in shared else 1 for g in bg]
    return not _lp_feasible(A, bvec, nv)


def fan_of_faces(cone):
    return Fan([cone], cone.rank)


def orthant(rank, coords=None):
    coords = range(rank) if coords is None else coords
    return Cone([tuple(int(i == j) for j in range(rank)) for i in coords], rank)


# ----------------------------------------------------------- regularization

def _det2(a, b):
    return a[0] * b[1] - a[1] * b[0]


def _unimodular_partner(r):
    """v with det(r, v) = 1 for primitive r in Z^2."""
    a, b = r
    # extended gcd: a*y - b*x = 1
    g, s, t = _egcd(a, -b)
    if g < 0:
        g, s, t = -g, -s, -t
    assert g == 1
    return (t, s)


def _egcd(a, b):
    if b == 0:
        return (a, 1, 0)
    g, x, y = _egcd(b, a % b)
    return (g, y, x - (a // b) * y)


def regularize_plane(p, q):
    """Minimal regular subdivision rays of cone(p, q) in Z^2, from p to q."""
    p, q = primitive(p), primitive(q)
    d = _det2(p, q)
    if d == 0:
        return [p] if p == q else None
    flip = d < 0
    if flip:
        p, q = q, p
    rays = [p]
    r = p
    while _det2(r, q) != 1:
        v0 = _unimodular_partner(r)
        D = _det2(r, q)
        num = -_det2(v0, q)
        t = -((-num) // D)  # ceil(num / D)
        v = (v0[0] + t * r[0], v0[1] + t * r[1])
        rays.append(v)
        r = v
    rays.append(q)
    if flip:
        rays.reverse()
    return rays


def regularize_2d(cone):
    """Minimal regular subdivision of a cone of dimension at most two."""
    gens = list(cone.gens)
    if len(gens) <= 1:
        return fan_of_faces(cone)
    if cone.dim > 2:
        raise ConeDimensionTooHigh("only cones of dimension <= 2", dim=cone.dim)
    basis, _, coords, _ = saturated_span(gens)
    p, q = coords
    plane = regularize_plane(p, q)
    lift = [tuple(x * basis[0][i] + y * basis[1][i] for i in range(cone.rank))
            for x, y in plane]
    cones = [Cone([lift[i], lift[i + 1]], cone.rank) for i in range(len(lift) - 1)]
    return Fan(cones, cone.rank, check=False)


def regular_chain(cone):
    """The ordered ray chain of regularize_2d, from the first generator."""
    gens = list(cone.gens)
    if len(gens) == 1:
        return [gens[0]]
    basis, _, coords, _ = saturated_span(gens)
    plane = regularize_plane(coords[0], coords[1])
    return [tuple(x * basis[0][i] + y * basis[1][i] for i in range(cone.rank))
            for x, y in plane]


# --------------------------------------------------------------- Star fans

def star_fan(sigma, Sigma):
    """The fan Star(sigma) in the quotient lattice N / N_sigma."""
    if sigma not in Sigma.cones:
        raise ConeNotInFan("cone is not in the fan", cone=sigma.gens)
    n = Sigma.rank
    if not sigma.gens:
        return Sigma
    _, _, _, U = saturated_span(list(sigma.gens))
    k = sigma.dim

    def proj(v):
        c = [sum(v[i] * U[i][j] for i in range(n)) for j in range(n)]
        return tuple(c[k:])

    out = []
    for tau in Sigma.cones:
        if set(sigma.gens) <= set(tau.gens):
            imgs = [proj(g) for g in tau.gens if g not in sigma.gens]
            out.append(Cone(imgs, n - k))
    return Fan(out, n - k)


def quotient_map(sigma):
    """Function sending N to coordinates in N / N_sigma (same as star_fan)."""
    n = sigma.rank
    if not sigma.gens:
        return lambda v: tuple(v)
    _, _, _, U = saturated_span(list(sigma.gens))
    k = sigma.dim
    return lambda v: tuple(sum(v[i] * U[i][j] for i in range(n)) for j in range(k, n))


def star_subdivide(fan, v):
    """Star subdivision of ``fan`` at the primitive vector of v."""
    v = primitive(v)
    cand = [c for c in fan.cones if c.relative_interior_contains(v)]
    if not cand:
        raise NotAFan("vector is outside the support of the fan", vector=v)
    G = cand[0]
    if G.gens == (v,):
        return fan
    out = []
    for tau in fan.cones:
        if set(G.gens) <= set(tau.gens):
            for F in tau.faces():
                if not set(G.gens) <= set(F.gens):
                    out.append(Cone(list(F.gens) + [v], fan.rank))
        else:
            out.append(tau)
    return Fan(out, fan.rank, check=False)


def direct_sum(f1, f2):
    n1, n2 = f1.rank, f2.rank
    out = []
    for a in f1.maximal():
        for b in f2.maximal():
            gens = [tuple(g) + (0,) * n2 for g in a.gens] + \
                   [(0,) * n1 + tuple(g) for g in b.gens]
            out.append(Cone(gens, n1 + n2))
    return Fan(out, n1 + n2, check=False)


def build_space_fan(w0, wj_list, sigma_j_list):
    """Validate the cones theta_j = R(w0 + w_j) + sigma_j and build a fan Sigma' containing them.

    w0 is supported on the last r coordinates and each w_j on the first m.
    Returns (theta fan, Sigma').
    """
    w0 = tuple(int(x) for x in w0)
    n = len(w0)
    thetas = []
    for wj, sj in zip(wj_list, sigma_j_list):
        ray = tuple(a + b for a, b in zip(w0, wj))
        thetas.append(Cone([ray] + list(sj.gens), n))
    for a, b in combinations(range(len(thetas)), 2):
        if thetas[a] == thetas[b]:
            raise ThetaConesCoincide("two theta cones coincide", first=a, second=b)
    theta_fan = Fan(thetas, n)

    r = len(wj_list)
    m = n - r
    # Sigma_1' on the first m coordinates, Sigma_2' on the last r
    f1 = fan_of_faces(orthant(m)) if m else None
    for wj in wj_list:
        if f1 is not None and any(wj[:m]):
            f1 = star_subdivide(f1, wj[:m])
    f2 = fan_of_faces(orthant(r))
    if any(w0[m:]):
        f2 = star_subdivide(f2, w0[m:])
    sigma = f2 if f1 is None else direct_sum(f1, f2)
    for wj in wj_list:
        ray = primitive(tuple(a + b for a, b in zip(w0, wj)))
        if (ray,) not in {c.gens for c in sigma.cones}:
            sigma = star_subdivide(sigma, ray)
    sigma.validate()
    for th in thetas:
        if th not in sigma.cones:
            raise NotAFan("theta cone missing from the subdivision", cone=th.gens)
    return theta_fan, sigma


# ------------------------------------------------------------- monomial maps

def monomial_map_exponents(basis):
    """Rows: for each ambient X_i, the exponents of U_0..U_n."""
    return [[basis.vectors[k][i] for k in range(basis.rank)] for i in range(basis.rank)]
