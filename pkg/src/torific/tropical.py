"""The fan T spanned by the vectors w^P, its minimal regularization, and the
linear maps identifying its 2-cones with plane cones.

The tree must come from ``eggers_wall.build_tree(D, C)``: coordinates are
indexed by L_0, ..., L_m, i.e. the root followed by the spine leaves.
"""

from fractions import Fraction
from math import gcd, lcm

import networkx as nx

from .errors import NonIntegralCoefficients, NotAFan
from .lattice import Cone, Fan, regular_chain, regularize_plane


class WVector:
    """w^P with its exact rational coordinates and a tree label."""

    __slots__ = ("coords", "label", "point")

    def __init__(self, coords, label, point=None):
        self.coords = tuple(Fraction(c) for c in coords)
        self.label = label
        self.point = point

    def primitive(self):
        """(primitive integer vector, scale) with coords = scale * primitive."""
        den = 1
        for c in self.coords:
            den = lcm(den, c.denominator)
        ints = [int(c * den) for c in self.coords]
        g = 0
        for x in ints:
            g = gcd(g, x)
        return tuple(x // g for x in ints), Fraction(g, den)

    def __eq__(self, other):
        return isinstance(other, WVector) and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self):
        return "w[%s](%s)" % (self.label, ", ".join(str(c) for c in self.coords))


def _coord_leaves(tree):
    return list(tree.spine)


def _label(tree, P):
    if P.is_root:
        return "L0"
    if P.is_leaf:
        return tree.labels[P.leaf]
    return "P(e=%s@%s)" % (P.e, tree.labels[P.leaf])


def w_vector(P, tree):
    """w^P_j = (L_0 . L_j) c(<L_0, P, L_j>), w^P_0 = 1; leaves give basis vectors."""
    cols = _coord_leaves(tree)
    m1 = len(cols) + 1
    if P.is_root:
        return WVector([1] + [0] * (m1 - 1), "L0", P)
    if P.is_leaf:
        if P.leaf not in cols:
            raise ValueError("leaf is not one of L_1..L_m")
        v = [0] * m1
        v[cols.index(P.leaf) + 1] = 1
        return WVector(v, tree.labels[P.leaf], P)
    coords = [Fraction(1)]
    for k in cols:
        T = tree.tripod(P, k)
        coords.append(tree.n[k] * T.c)
    return WVector(coords, _label(tree, P), P)


class SegmentLinearMap:
    """(p, q) -> (a_j p + b_j q)_j on the cone sigma_{P1,P2}."""

    def __init__(self, a, b, P1, P2, cone):
        self.a = tuple(a)
        self.b = tuple(b)
        self.P1, self.P2 = P1, P2
        self.cone = cone

    def __call__(self, p, q):
        return tuple(x * p + y * q for x, y in zip(self.a, self.b))

    def minors_gcd(self):
        g = 0
        for i in range(len(self.a)):
            for j in range(i + 1, len(self.a)):
                g = gcd(g, self.a[i] * self.b[j] - self.a[j] * self.b[i])
        return g

    def is_unimodular(self):
        return self.minors_gcd() == 1


def segment_linear_map(P1, P2, tree):
    """Integers a_j, b_j with nu_{E_P}(x_j) = a_j n_P + b_j m_P on (P1, P2)."""
    cols = _coord_leaves(tree)
    Q = tree.Q_of(P2)
    i = P2.i
    a, b = [Fraction(i)], [Fraction(0)]
    for k in cols:
        if tree.precedes(P2, tree.leaf_point(k)):
            a.append(i * tree.n[k] * Q.c)
            b.append(Fraction(tree.n[k], i))
        else:
            T = tree.tripod(P1, k)
            a.append(i * tree.n[k] * T.c)
            b.append(Fraction(0))
    for x in a + b:
        if x.denominator != 1:
            raise NonIntegralCoefficients("segment map is not integral",
                                          P1=str(P1.e), P2=str(P2.e), a=a, b=b)
    cone = tree.segment_cone(P1, P2)
    return SegmentLinearMap([int(x) for x in a], [int(x) for x in b], P1, P2, cone)


def _is_end(P):
    return not isinstance(P, str) and (P.is_root or P.is_leaf)


def _ray_order(P):
    if isinstance(P, str):
        return (1, Fraction(0), 0, P)
    return (0, P.e, P.leaf, "")


class TropFan:
    """Rays w^P (as primitive integer vectors) and the 2-cones between them."""

    def __init__(self, tree, rays, cones, regularized=False):
        self.tree = tree
        self.rays = rays              # point -> WVector
        self.cones = cones            # list of (point, point)
        self.regularized = regularized
        self.rank = len(_coord_leaves(tree)) + 1
        self.certified = True

    def ray_vector(self, P):
        return self.rays[P].primitive()[0]

    def fan(self, check=True):
        cs = [Cone([self.ray_vector(P), self.ray_vector(R)], self.rank) for P, R in self.cones]
        try:
            return Fan(cs, self.rank, check=check)
        except NotAFan:
            raise
        except ValueError as exc:
            raise NotAFan(str(exc))

    def graph(self):
        """Projectivization: one vertex per ray, one edge per 2-cone."""
        G = nx.Graph()
        for P in self.rays:
            kind = "leaf" if _is_end(P) else "E"
            G.add_node(self.name(P), kind=kind, point=P)
        for P, R in self.cones:
            G.add_edge(self.name(P), self.name(R))
        return G

    def name(self, P):
        return P if isinstance(P, str) else self.tree._name(P)

    def exceptional_rays(self):
        return [P for P in self.rays if not _is_end(P)]

    def to_json(self):
        out = {"rank": self.rank, "regularized": self.regularized, "rays": [], "cones": []}
        names = {}
        for P in sorted(self.rays, key=_ray_order):
            w = self.rays[P]
            name = self.name(P)
            names[P] = name
            ray = {"label": name, "primitive": list(w.primitive()[0]),
                   "w": [str(c) for c in w.coords]}
            if not isinstance(P, str):
                ray["e"] = "inf" if P.is_leaf else str(P.e)
            out["rays"].append(ray)
        for P, R in self.cones:
            out["cones"].append([names[P], names[R]])
        out["cones"].sort()
        return out


def build_trop_fan(tree, check=True):
    pts = tree.augmented_marks()
    rays = {P: w_vector(P, tree) for P in pts}
    cones = tree.edges(pts)
    T = TropFan(tree, rays, cones)
    if check:
        T.fan()
        seen = {}
        for P, w in rays.items():
            if w.coords in seen:
                raise NotAFan("two marked points share a ray", first=str(seen[w.coords]),
                              second=str(P))
            seen[w.coords] = P
    return T


def regularize_trop_fan(T, check=True):
    """Minimal regularization, transported from the plane cones by the segment maps.

    A segment whose map is not unimodular (no branch of D realizes the index
    of the segment) is regularized directly in the lattice; its new rays are
    not tree points and are keyed by a string.  ``R.certified`` records
    whether every segment was transported.

    Returns (regularized TropFan, {primitive ray: tree point or key}).
    """
    tree = T.tree
    rays = dict(T.rays)
    cones = []
    certified = True
    for P1, P2 in T.cones:
        phi = segment_linear_map(P1, P2, tree)
        if not phi.is_unimodular():
            certified = False
            chain = [P1]
            vecs = regular_chain(Cone([T.ray_vector(P1), T.ray_vector(P2)], T.rank))
            if tuple(vecs[0]) != T.ray_vector(P1):
                vecs = vecs[::-1]
            for v in vecs[1:-1]:
                key = "R(%s)" % ",".join(str(x) for x in v)
                rays[key] = WVector(v, key)
                chain.append(key)
            chain.append(P2)
            cones.extend(zip(chain, chain[1:]))
            continue
        chain = tree.chain(P1, P2)
        plane = regularize_plane(*tree.segment_cone(P1, P2))
        if len(chain) != len(plane):
            raise NotAFan("chain length mismatch")
        for P, (p, q) in zip(chain[1:-1], plane[1:-1]):
            img = phi(p, q)
            w = w_vector(P, tree)
            scaled = tuple(P.i_plus * c for c in w.coords)
            if scaled != tuple(Fraction(x) for x in img):
                raise NonIntegralCoefficients("transported ray differs from i+ w^P",
                                              e=str(P.e))
            rays[P] = w
        cones.extend(zip(chain, chain[1:]))
    R = TropFan(tree, rays, cones, regularized=True)
    R.certified = certified
    if check:
        F = R.fan()
        if not F.is_regular():
            raise NotAFan("regularization is not regular")
    return R, {R.ray_vector(P): P for P in rays}


def graphs_isomorphic(G1, G2):
    """Isomorphism preserving leaf labels (exceptional vertices are unlabeled)."""
    def nm(a, b):
        if a["kind"] == "E" or b["kind"] == "E":
            return a["kind"] == b["kind"]
        return a.get("name") == b.get("name")
    H1, H2 = G1.copy(), G2.copy()
    for H in (H1, H2):
        for v, d in H.nodes(data=True):
            d["name"] = v
            if d["kind"] == "curve":
                d["kind"] = "leaf"
    return nx.is_isomorphic(H1, H2, node_match=nm)


def matches_dual_graph(R):
    """Projectivized regularized fan versus the dual graph of D (curves removed)."""
    G = R.tree.dual_graph()
    G.remove_nodes_from([v for v, d in G.nodes(data=True) if d["kind"] == "curve"])
    return graphs_isomorphic(R.graph(), G)


def order_vector(tree, k):
    """((L_0 . C), ..., (L_m . C)) for the non-spine leaf k, from the tree data."""
    out = [tree.n[k]]
    for l in tree.spine:
        out.append(tree.intersections[(k, l)])
    return tuple(out)


def order_vector_ray(tree, k):
    """i+(A) w^A for the attaching point A of leaf k; equals order_vector when D is generic."""
    A = tree.attaching_point(k)
    w = w_vector(A, tree)
    return tuple(A.i_plus * c for c in w.coords)
