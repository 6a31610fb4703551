"""Eggers-Wall trees relative to the smooth reference branch L_0 = Z(X).

A point of the tree is stored canonically as (leaf, e): the exponent value e
on the path from the root to the smallest-numbered leaf whose path contains
the point.  The root has leaf ``ROOT`` and e = 0; a leaf has e = INF.
"""

import hashlib
from fractions import Fraction
from math import lcm

import networkx as nx

from .branch import INFINITE, BranchData, intersection_multiplicity, is_reference
from .errors import InconsistentContacts, NotRationalPoint
from .exactmath import INF
from .lattice import regularize_plane

ROOT = -1


class EWPoint:
    """A point of an Eggers-Wall tree, with exponent, index and contact complexity."""

    __slots__ = ("leaf", "e", "i", "c", "label")

    def __init__(self, leaf, e, i, c, label=None):
        self.leaf = leaf
        self.e = e
        self.i = i
        self.c = c
        self.label = label

    @property
    def key(self):
        return (self.leaf, self.e)

    def __eq__(self, other):
        return isinstance(other, EWPoint) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __lt__(self, other):
        return (self.e, self.leaf) < (other.e, other.leaf)

    @property
    def is_root(self):
        return self.leaf == ROOT

    @property
    def is_leaf(self):
        return self.e == INF

    @property
    def is_rational(self):
        return isinstance(self.e, Fraction) and 0 < self.e

    @property
    def i_plus(self):
        if not self.is_rational:
            raise NotRationalPoint("i+ needs a rational point", e=self.e)
        return lcm(self.i, self.e.denominator)

    def __repr__(self):
        if self.is_root:
            return "EWPoint(L0)"
        if self.is_leaf:
            return "EWPoint(%s)" % self.label
        return "EWPoint(leaf=%d, e=%s, i=%d, c=%s)" % (self.leaf, self.e, self.i, self.c)


class RenormData:
    __slots__ = ("Q", "n", "m", "i_plus")

    def __init__(self, Q, n, m, i_plus):
        self.Q, self.n, self.m, self.i_plus = Q, n, m, i_plus

    def __repr__(self):
        return "RenormData(Q=%r, n=%d, m=%d, i_plus=%d)" % (self.Q, self.n, self.m, self.i_plus)


def _index_at(exps, n, e):
    """Index on the open segment just below e along a path with char exponents exps."""
    if e == INF:
        return n
    i = 1
    for x in exps:
        if x < e:
            i = lcm(i, x.denominator)
    return i


def _c_at(exps, e):
    """Integral of de / i from 0 to e."""
    if e == INF:
        return INF
    total = Fraction(0)
    lo, i = Fraction(0), 1
    for x in exps:
        if x >= e:
            break
        total += (x - lo) / i
        lo, i = x, lcm(i, x.denominator)
    return total + (e - lo) / i


def _e_from_c(exps, c):
    lo, clo, i = Fraction(0), Fraction(0), 1
    for x in exps:
        cx = clo + (x - lo) / i
        if cx >= c:
            break
        lo, clo, i = x, cx, lcm(i, x.denominator)
    return lo + (c - clo) * i


class EWTree:
    """Eggers-Wall tree of L_0 together with the given branches.

    ``spine`` lists the leaves spanning the subtree on which augmented marks,
    distinguished points and the dual graph live (the D-branches); the other
    leaves only contribute marks.
    """

    def __init__(self, leaves, spine=None, labels=None):
        self.leaves = list(leaves)
        N = len(self.leaves)
        self.spine = list(range(N)) if spine is None else list(spine)
        self.labels = labels or [b.label or "B%d" % (k + 1) for k, b in enumerate(self.leaves)]
        self.n = [b.n for b in self.leaves]
        self.exps = [list(b.exponents()) for b in self.leaves]
        self.contact = [[INF] * N for _ in range(N)]
        self.intersections = {}
        for a in range(N):
            for b in range(a + 1, N):
                m = intersection_multiplicity(self.leaves[a], self.leaves[b])
                if m == INFINITE:
                    raise InconsistentContacts("branches coincide",
                                               first=self.labels[a], second=self.labels[b])
                self.intersections[(a, b)] = self.intersections[(b, a)] = m
                c = Fraction(m, self.n[a] * self.n[b])
                ea = _e_from_c(self.exps[a], c)
                eb = _e_from_c(self.exps[b], c)
                if ea != eb:
                    raise InconsistentContacts("contact exponents disagree",
                                               first=self.labels[a], second=self.labels[b],
                                               e_first=ea, e_second=eb)
                # characteristic exponents below the contact must coincide
                if [x for x in self.exps[a] if x < ea] != [x for x in self.exps[b] if x < ea]:
                    raise InconsistentContacts("characteristic exponents disagree below contact",
                                               first=self.labels[a], second=self.labels[b])
                self.contact[a][b] = self.contact[b][a] = ea
        for a in range(N):
            for b in range(N):
                for c in range(N):
                    if len({a, b, c}) == 3:
                        vals = sorted([self.contact[a][b], self.contact[b][c], self.contact[a][c]])
                        if vals[0] != vals[1]:
                            raise InconsistentContacts("contacts are not ultrametric",
                                                       leaves=[self.labels[x] for x in (a, b, c)])

    # ------------------------------------------------------------ points

    def root(self):
        return EWPoint(ROOT, Fraction(0), 1, Fraction(0), "L0")

    def leaf_point(self, k):
        return EWPoint(k, INF, self.n[k], INF, self.labels[k])

    def on_path(self, k, e):
        """Leaves whose root path contains the point (k, e)."""
        return [l for l in range(len(self.leaves)) if l == k or self.contact[k][l] >= e]

    def point(self, k, e):
        if k == ROOT or e == 0:
            return self.root()
        if e == INF:
            return self.leaf_point(k)
        e = Fraction(e)
        leaf = min(self.on_path(k, e))
        return EWPoint(leaf, e, _index_at(self.exps[leaf], self.n[leaf], e),
                       _c_at(self.exps[leaf], e))

    def index_of(self, k):
        return k if isinstance(k, int) else self.leaves.index(k)

    def leaf_of(self, branch):
        for k, b in enumerate(self.leaves):
            if b is branch:
                return k
        raise KeyError(branch)

    def precedes(self, P, R):
        """P lies on the segment [L0, R]."""
        if P.is_root:
            return True
        if R.is_root:
            return False
        return P.e <= R.e and (P.leaf == R.leaf or self.contact[P.leaf][R.leaf] >= P.e)

    def tripod(self, P, k):
        """<L0, P, L_k> as a point."""
        if P.is_root:
            return P
        e = P.e if P.leaf == k else min(P.e, self.contact[P.leaf][k])
        return self.point(k, e)

    def contact_complexity(self, P):
        return P.c

    # ------------------------------------------------------------ marks

    def marks(self):
        pts = {self.root()}
        for k in range(len(self.leaves)):
            pts.add(self.leaf_point(k))
            for x in self.exps[k]:
                pts.add(self.point(k, x))
            for l in range(len(self.leaves)):
                if l != k:
                    pts.add(self.point(k, self.contact[k][l]))
        return pts

    def on_spine(self, P):
        if P.is_root:
            return True
        return any(l in self.spine for l in self.on_path(P.leaf, P.e))

    def augmented_marks(self):
        return sorted((P for P in self.marks() if self.on_spine(P)), key=_order)

    def attaching_point(self, k):
        """Highest point of the path of leaf k lying on the spine subtree."""
        if k in self.spine:
            return self.leaf_point(k)
        e = max((self.contact[k][l] for l in self.spine), default=Fraction(0))
        return self.point(k, e)

    def edges(self, points):
        """Consecutive pairs of the given points along spine paths."""
        out = set()
        for l in self.spine:
            path = sorted((P for P in points if self.precedes(P, self.leaf_point(l))), key=_order)
            out.update(zip(path, path[1:]))
        return sorted(out, key=lambda pq: (_order(pq[0]), _order(pq[1])))

    # ------------------------------------------------------------ renormalization

    def Q_of(self, P):
        """Minimum of the closure of the index-level component of P."""
        if P.is_root:
            return P
        below = [x for x in self.exps[P.leaf] if x < P.e]
        return self.point(P.leaf, below[-1]) if below else self.root()

    def renorm_data(self, P):
        if not P.is_rational:
            raise NotRationalPoint("renormalization needs a rational interior point", e=P.e)
        Q = self.Q_of(P)
        r = P.i * (P.e - Q.e)
        return RenormData(Q, r.denominator, r.numerator, P.i * r.denominator)

    def nm(self, P):
        if P.is_root:
            return (1, 0)
        if P.is_leaf:
            return (0, 1)
        d = self.renorm_data(P)
        return (d.n, d.m)

    def segment_cone(self, P1, P2):
        """Generators of sigma_{P1,P2} in the renormalized plane of P2."""
        if P1 == self.Q_of(P2):
            return (1, 0), self.nm(P2)
        return self.nm(P1), self.nm(P2)

    def chain(self, P1, P2):
        """Points of [P1, P2] given by the minimal regularization of sigma_{P1,P2}."""
        p, q = self.segment_cone(P1, P2)
        rays = regularize_plane(p, q)
        Q = self.Q_of(P2)
        k = P2.leaf
        out = [P1]
        for a, b in rays[1:-1]:
            e = Q.e + Fraction(b, a * P2.i)
            out.append(self.point(k, e))
        out.append(P2)
        return out

    def distinguished_points(self):
        """Augmented marks together with the points added by regularization."""
        pts = set(self.augmented_marks())
        for P1, P2 in self.edges(pts):
            pts.update(self.chain(P1, P2))
        return sorted(pts, key=_order)

    def exceptional_points(self):
        return [P for P in self.distinguished_points() if not (P.is_root or P.is_leaf)]

    # ------------------------------------------------------------ dual graph

    def dual_graph(self):
        """Dual graph of the total transform: exceptional divisors plus branch leaves."""
        G = nx.Graph()
        aug = set(self.augmented_marks())
        for P in self.exceptional_points():
            G.add_node(_node(P), kind="E", point=P)
        G.add_node("L0", kind="leaf", point=self.root())
        for l in self.spine:
            G.add_node(self.labels[l], kind="leaf", point=self.leaf_point(l))
        for P1, P2 in self.edges(aug):
            ch = self.chain(P1, P2)
            for a, b in zip(ch, ch[1:]):
                G.add_edge(self._name(a), self._name(b))
        for k in range(len(self.leaves)):
            if k not in self.spine:
                A = self.attaching_point(k)
                G.add_node(self.labels[k], kind="curve", point=self.leaf_point(k))
                G.add_edge(self.labels[k], self._name(A))
        return G

    def _name(self, P):
        if P.is_root:
            return "L0"
        if P.is_leaf:
            return self.labels[P.leaf]
        return _node(P)

    def exceptional_graph(self):
        G = self.dual_graph()
        return G.subgraph([v for v, d in G.nodes(data=True) if d["kind"] == "E"]).copy()

    def ends(self):
        H = self.exceptional_graph()
        if H.number_of_nodes() == 1:
            return list(H.nodes)
        return sorted(v for v in H.nodes if H.degree(v) == 1)

    def divisor_of_leaf(self, branch):
        """The distinguished point adjacent to a leaf: E_{C_j} on the resolution."""
        k = branch if isinstance(branch, int) else self.leaf_of(branch)
        pts = [P for P in self.exceptional_points()
               if self.precedes(P, self.leaf_point(k))]
        if not pts:
            return self.point(k, Fraction(1))
        return max(pts, key=_order)

    # ------------------------------------------------------------ output

    def to_dot(self, graph=None):
        G = graph if graph is not None else self.dual_graph()
        lines = ["graph G {"]
        ids = {}
        for v, d in sorted(G.nodes(data=True), key=lambda x: str(x[0])):
            P = d["point"]
            if d["kind"] == "E":
                lab = "e=%s i=%d c=%s" % (P.e, P.i, P.c)
            else:
                lab = str(v)
            nid = "n" + hashlib.sha1(str((v, str(P.e))).encode()).hexdigest()[:10]
            ids[v] = nid
            lines.append('  %s [label="%s"];' % (nid, lab))
        for a, b in sorted((tuple(sorted((ids[a], ids[b]))) for a, b in G.edges)):
            lines.append("  %s -- %s;" % (a, b))
        lines.append("}")
        return "\n".join(lines) + "\n"

    def tree_dot(self):
        pts = self.augmented_marks()
        lines = ["digraph EW {"]
        ids = {}
        for P in pts:
            nid = "n" + hashlib.sha1(str(self._name(P) if (P.is_root or P.is_leaf)
                                         else (P.leaf, str(P.e))).encode()).hexdigest()[:10]
            ids[P] = nid
            lab = self._name(P) if (P.is_root or P.is_leaf) else \
                "e=%s i=%d c=%s" % (P.e, P.i, P.c)
            lines.append('  %s [label="%s"];' % (nid, lab))
        for P1, P2 in self.edges(pts):
            lines.append('  %s -> %s [label="%d"];' % (ids[P1], ids[P2], self.segment_index(P1, P2)))
        lines.append("}")
        return "\n".join(lines) + "\n"

    def segment_index(self, P1, P2):
        """Constant index on the half-open segment (P1, P2] between consecutive marks."""
        return P2.i

    def to_json(self):
        return {
            "leaves": [{"label": self.labels[k], "n": self.n[k],
                        "exponents": [str(x) for x in self.exps[k]]}
                       for k in range(len(self.leaves))],
            "marks": [_point_json(self, P) for P in self.augmented_marks()],
            "distinguished": [_point_json(self, P) for P in self.exceptional_points()],
        }


def _order(P):
    return (P.e, P.leaf)


def _node(P):
    return "E[%d:%s]" % (P.leaf, P.e)


def _point_json(tree, P):
    d = {"leaf": "L0" if P.is_root else tree.labels[P.leaf],
         "e": "inf" if P.is_leaf else str(P.e), "i": P.i,
         "c": "inf" if P.is_leaf else str(P.c)}
    if P.is_rational:
        r = tree.renorm_data(P)
        d.update(n=r.n, m=r.m, i_plus=r.i_plus)
    return d


# ---------------------------------------------------------------- builders

def build_tree(D, C=()):
    """Tree of D = (L_0, L_1, ..., L_m) and C; the spine is Theta(D)."""
    D = list(D)
    if not D or not is_reference(D[0]):
        raise ValueError("the first curve of D must be the reference line Z(X)")
    leaves = D[1:] + list(C)
    labels = []
    for k, b in enumerate(D[1:]):
        labels.append(b.label or "L%d" % (k + 1))
    for k, b in enumerate(C):
        labels.append(b.label or "C%d" % (k + 1))
    return EWTree(leaves, spine=range(len(D) - 1), labels=labels)


def contact_complexity(P, tree):
    return tree.contact_complexity(P)


def renorm_data(P, tree):
    return tree.renorm_data(P)


def distinguished_points(tree):
    return tree.distinguished_points()


def dual_graph(tree):
    return tree.dual_graph()


class ResolutionTree(EWTree):
    """Tree of L_0, C and the semi-roots attached at ends of index-level closures."""

    def __init__(self, C, with_semiroots=True):
        C = list(C)
        labels = [b.label or "C%d" % (k + 1) for k, b in enumerate(C)]
        base = EWTree(C, labels=labels)
        self.semiroots = []
        if with_semiroots:
            for J in _level_ends(base):
                A = base.leaves[J.leaf]
                T = int(J.e * A.n) + 1
                c = A.param_at(T).truncated_below(J.e, J.i)
                from .branch import PuiseuxParam
                from .exactmath import Series
                sr = BranchData(param=PuiseuxParam(J.i, Series(c)),
                                label="S%d" % (len(self.semiroots) + 1))
                sr.attach_e = J.e
                self.semiroots.append(sr)
        super().__init__(C + self.semiroots, labels=labels + [s.label for s in self.semiroots])
        self.curves = C

    def uncovered_ends(self):
        """End divisors not adjacent to L_0 or a semi-root, with one adjacent branch of C."""
        G = self.dual_graph()
        sr = {s.label for s in self.semiroots} | {"L0"}
        out = []
        for v in self.ends():
            nbrs = [u for u in G.neighbors(v) if G.nodes[u]["kind"] != "E"]
            if any(u in sr for u in nbrs):
                continue
            cs = sorted(self.labels.index(u) for u in nbrs)
            if not cs:
                continue
            P = G.nodes[v]["point"]
            out.append((P, self.leaves[cs[0]]))
        return out


def _level_ends(tree):
    """Characteristic points J such that every path through J jumps in index at J."""
    out = {}
    for k in range(len(tree.leaves)):
        for x in tree.exps[k]:
            through = tree.on_path(k, x)
            if all(x in tree.exps[l] for l in through):
                P = tree.point(k, x)
                out[P.key] = P
    return sorted(out.values(), key=_order)


def resolution_tree(C, with_semiroots=True):
    return ResolutionTree(C, with_semiroots=with_semiroots)
