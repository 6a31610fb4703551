"""Command-line front end: ``torific <command> [options]``."""

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from itertools import combinations

import jsonschema

from .branch import (NAMES, BranchData, PuiseuxParam, maximal_contact_sequence,
                     reference_line, split_branches)
from .eggers_wall import build_tree, resolution_tree
from .errors import SchemaViolation, TorificError
from .exactmath import INF, MPoly, Series, parse_poly
from .lattice import ChartBasis, complete_to_basis
from .resolution import (SpaceCurveInput, build_embedding_ideal, certify_resolution,
                         chart_check_plane, compose, plane_poly, space_curve_resolve)
from .tropical import build_trop_fan, matches_dual_graph, regularize_trop_fan

COMMANDS = ("semigroup", "puiseux", "ew-tree", "tropicalize", "resolve", "verify",
            "space-resolve")

_TERM = {"type": "array", "minItems": 2, "maxItems": 3, "items": {"type": "integer"}}
_COEF = {"type": "array", "minItems": 1, "maxItems": 2, "items": {"type": "integer"}}
_BRANCH = {
    "type": "object",
    "properties": {
        "label": {"type": "string"},
        "equation": {"type": "string"},
        "puiseux": {
            "type": "object",
            "properties": {"n": {"type": "integer", "minimum": 1},
                           "terms": {"type": "array", "items": _TERM}},
            "required": ["n", "terms"],
        },
        "char_exponents": {"type": "array", "items": {"type": "integer"}, "minItems": 1},
        "coefficients": {"type": "array", "items": _COEF},
    },
    "oneOf": [{"required": ["equation"]}, {"required": ["puiseux"]},
              {"required": ["char_exponents"]}],
}
CURVE_SCHEMA = {
    "type": "object",
    "properties": {
        "equation": {"type": "string"},
        "branches": {"type": "array", "items": _BRANCH},
        "sequence": {"type": "array", "items": _BRANCH},
    },
    "anyOf": [{"required": ["equation"]}, {"required": ["branches"]},
              {"required": ["sequence"]}],
}
SPACE_SCHEMA = {
    "type": "object",
    "properties": {
        "arcs": {"type": "array", "minItems": 1, "items": {
            "type": "array", "minItems": 1, "items": {"type": "array", "items": _TERM}}},
        "labels": {"type": "array", "items": {"type": "string"}},
    },
    "required": ["arcs"],
}


# ----------------------------------------------------------------- serialization

def q(x):
    """Exact rational as a "num/den" string (integers without the denominator)."""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else "%d/%d" % (x.numerator, x.denominator)


def _plain(v):
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, int):
        return v
    if isinstance(v, Fraction):
        return q(v)
    if v == INF:
        return "inf"
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return str(v)


def dumps(obj):
    return json.dumps(_plain(obj), sort_keys=True, indent=2) + "\n"


def _term(t):
    return t[0], Fraction(t[1], t[2] if len(t) > 2 else 1)


# ----------------------------------------------------------------- input

def _tangent_transform(f):
    """Make X = 0 transversal to every branch: identity, swap, or shear."""
    d = min(sum(e) for e in f.terms)
    cone = {e: c for e, c in f.terms.items() if sum(e) == d}
    if (0, d) in cone:
        return f, "identity"
    if (d, 0) in cone:
        X, Y = MPoly.var(0, 2, NAMES), MPoly.var(1, 2, NAMES)
        return compose(f, [Y, X]), "swap X<->Y"
    X, Y = MPoly.var(0, 2, NAMES), MPoly.var(1, 2, NAMES)
    k = 1
    while True:
        for s in (k, -k):
            if sum(c * Fraction(s) ** e[0] for e, c in cone.items()) != 0:
                return compose(f, [X + Y * s, Y]), "shear X -> X + (%d)*Y" % s
        k += 1


def _branch_from(d, T, default_label):
    label = d.get("label", default_label)
    if "equation" in d:
        b = BranchData.from_string(d["equation"], label=label)
        return [b]
    if "puiseux" in d:
        n = d["puiseux"]["n"]
        zeta = Series(dict(_term(t) for t in d["puiseux"]["terms"]))
        return [BranchData(param=PuiseuxParam(n, zeta), label=label)]
    beta = d["char_exponents"]
    coeffs = [Fraction(c[0], c[1] if len(c) > 1 else 1) for c in d.get("coefficients", [])]
    zeta = {}
    for k, b in enumerate(beta[1:]):
        zeta[b] = coeffs[k] if k < len(coeffs) else Fraction(1)
    return [BranchData(param=PuiseuxParam(beta[0], Series(zeta)), label=label)]


def _check_transversal(b):
    p = b.param
    if not p.zeta.is_zero() and p.zeta.ord() < p.n:
        raise SchemaViolation("Z(X) must be transversal to the branch", branch=b.label)


class CurveSpec:
    """Parsed input: branches of C, an optional sequence L_1.., and the coordinate change."""

    def __init__(self, data, T):
        try:
            jsonschema.validate(data, CURVE_SCHEMA)
        except jsonschema.ValidationError as exc:
            raise SchemaViolation("input does not match the curve schema", reason=exc.message)
        self.transform = "identity"
        self.C = []
        if "equation" in data:
            try:
                f = parse_poly(data["equation"], NAMES)
            except Exception as exc:
                raise SchemaViolation("unparsable equation", reason=str(exc))
            f, self.transform = _tangent_transform(f)
            self.C = split_branches(f, T)
        for k, d in enumerate(data.get("branches", [])):
            try:
                bs = _branch_from(d, T, "C%d" % (len(self.C) + 1))
            except (ValueError, SyntaxError, TypeError) as exc:
                raise SchemaViolation("malformed branch", index=k, reason=str(exc))
            if "equation" in d:
                f, tr = _tangent_transform(bs[0].equation)
                if tr != "identity":
                    raise SchemaViolation("Z(X) is tangent to a branch; give the curve as a "
                                          "single equation to apply a coordinate change",
                                          branch=bs[0].label)
            self.C.extend(bs)
        self.sequence = None
        if "sequence" in data:
            self.sequence = [reference_line()]
            for k, d in enumerate(data["sequence"]):
                self.sequence.extend(_branch_from(d, T, "L%d" % (k + 1)))
        for b in self.C + (self.sequence or [])[1:]:
            _check_transversal(b)


def _load(path):
    try:
        with open(path) if path != "-" else sys.stdin as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaViolation("input is not valid JSON", reason=str(exc))
    except OSError as exc:
        raise SchemaViolation("cannot read input", path=path, reason=exc.strerror)


# ----------------------------------------------------------------- commands

def cmd_semigroup(spec, args):
    out = []
    for b in spec.C:
        sg = b.semigroup
        out.append({"label": b.label, "beta": list(b.char_exponents),
                    "bbar": list(sg.generators), "e": list(sg.e), "n": list(sg.n),
                    "conductor": sg.conductor})
    return {"branches": out, "transform": spec.transform}


def cmd_puiseux(spec, args):
    out = []
    for b in spec.C:
        p = b.param_at(args.truncation)
        out.append({"label": b.label, "n": p.n,
                    "terms": [[k, c] for k, c in p.zeta.terms()],
                    "prec": "exact" if p.prec is None else p.prec,
                    "pretty": p.pretty()})
    return {"branches": out, "transform": spec.transform}


def _sequence(spec, args):
    if spec.sequence is not None:
        return spec.sequence, None
    L, cert = maximal_contact_sequence(spec.C, coefficient_range=args.seed_coefficients)
    return L, cert


def _tree(spec, args):
    if spec.sequence is not None:
        return build_tree(spec.sequence, spec.C)
    return resolution_tree(spec.C)


def cmd_ew_tree(spec, args):
    tree = _tree(spec, args)
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(tree.tree_dot())
    out = tree.to_json()
    out["transform"] = spec.transform
    return out


def cmd_tropicalize(spec, args):
    D, _ = _sequence(spec, args)
    tree = build_tree(D, spec.C)
    T = build_trop_fan(tree)
    R, _ = regularize_trop_fan(T)
    out = {"fan": T.to_json(), "regularized": R.to_json(), "certified": R.certified,
           "transform": spec.transform}
    if R.certified:
        out["isomorphic_to_dual_graph"] = matches_dual_graph(R)
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(tree.to_dot())
    return out


def _poly_json(b):
    try:
        return plane_poly(b).pretty()
    except TorificError:
        return None


def cmd_resolve(spec, args):
    _need_branches(spec)
    L, cert = _sequence(spec, args)
    tree = build_tree(L, spec.C)
    E = build_embedding_ideal(L)
    G = tree.dual_graph()
    out = {
        "generating_sequence": [{"label": b.label, "poly": _poly_json(b)} for b in L],
        "genericity": None if cert is None else {"passed": cert.passed},
        "embedding_ideal": E.to_json(),
        "divisors": [{"name": tree._name(P), "e": P.e, "i": P.i, "c": P.c}
                     for P in tree.exceptional_points()],
        "dual_graph": {"nodes": sorted(G.nodes), "edges": sorted(sorted(e) for e in G.edges)},
        "certificates": certify_resolution(L, spec.C, tree).to_json(),
        "transform": spec.transform,
    }
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(tree.to_dot())
    return out


def _parse_chart(text):
    try:
        vecs = [tuple(int(x) for x in part.split(",")) for part in text.split(";") if part]
    except ValueError:
        raise SchemaViolation("chart must be integer vectors separated by ';'", chart=text)
    if not vecs or len({len(v) for v in vecs}) != 1:
        raise SchemaViolation("chart vectors must be non-empty and of equal length", chart=text)
    return vecs


def _coords_for(vecs, L, C):
    """Coordinates (0, ...) on which some branch has one of the vectors as order vector."""
    from .branch import intersection_multiplicity
    table = [[intersection_multiplicity(c, l) for l in L] for c in C]
    r = len(vecs[0])
    for rest in combinations(range(1, len(L)), r - 1):
        coords = (0,) + rest
        if any(tuple(row[k] for k in coords) in vecs for row in table):
            return list(coords)
    return None


def _need_branches(spec):
    if not spec.C:
        raise SchemaViolation("this command needs at least one branch of C")


def cmd_verify(spec, args):
    _need_branches(spec)
    L, _ = _sequence(spec, args)
    jobs = []
    if args.chart:
        vecs = _parse_chart(args.chart)
        basis = ChartBasis(vecs) if len(vecs) == len(vecs[0]) else complete_to_basis(vecs)
        coords = list(range(len(L))) if basis.rank == len(L) else _coords_for(vecs, L, spec.C)
        if coords is None:
            raise SchemaViolation("no branch has this order vector on any coordinate subset",
                                  chart=args.chart)
        jobs.append((coords, basis, spec.C))
    else:
        from .branch import intersection_multiplicity
        coords = list(range(len(L)))
        groups = {}
        for c in spec.C:
            ov = tuple(intersection_multiplicity(c, l) for l in L)
            groups.setdefault(ov, []).append(c)
        for ov in sorted(groups):
            jobs.append((coords, complete_to_basis([ov]), groups[ov]))

    def run(job):
        coords, basis, C = job
        rep = chart_check_plane(L, C, basis, coords=coords)
        d = rep.to_json()
        d["coordinates"] = [L[k].label for k in coords]
        return d

    workers = max(1, args.parallel)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            reports = list(ex.map(run, jobs))
    else:
        reports = [run(j) for j in jobs]
    ok = all(r["resolved"] for r in reports)
    return {"verdict": "PASS" if ok else "FAIL", "charts": reports,
            "sequence": [b.label for b in L], "transform": spec.transform,
            "scope": "verified on the charts listed; a global regular refinement is cited"}


def cmd_space_resolve(data, args):
    try:
        jsonschema.validate(data, SPACE_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SchemaViolation("input does not match the space-curve schema", reason=exc.message)
    arcs = [tuple(Series(dict(_term(t) for t in coord)) for coord in arc)
            for arc in data["arcs"]]
    try:
        inp = SpaceCurveInput(arcs, data.get("labels"))
    except ValueError as exc:
        raise SchemaViolation("invalid arcs", reason=str(exc))
    return space_curve_resolve(inp, repair=args.repair, separate=args.separate)


# ----------------------------------------------------------------- entry point

def build_parser():
    p = argparse.ArgumentParser(prog="torific", description=__doc__)
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("curve", nargs="?", help="curve equation in X, Y (instead of --input)")
    p.add_argument("--input", help="JSON input file ('-' for stdin)")
    p.add_argument("--truncation", type=int, default=64, help="starting truncation order")
    p.add_argument("--json", help="write the JSON result to this file")
    p.add_argument("--dot", help="write a DOT graph to this file")
    p.add_argument("--chart", help="chart basis v0;v1;... or a single order vector")
    p.add_argument("--seed-coefficients", type=int, default=8,
                   help="perturbation coefficients tried: 1, -1, ..., K, -K")
    p.add_argument("--parallel", type=int, default=1, help="worker threads for chart checks")
    p.add_argument("--repair", action="store_true", help="space-resolve: y_l + y^p repair")
    p.add_argument("--separate", action="store_true", help="space-resolve: separate arcs")
    return p


HANDLERS = {"semigroup": cmd_semigroup, "puiseux": cmd_puiseux, "ew-tree": cmd_ew_tree,
            "tropicalize": cmd_tropicalize, "resolve": cmd_resolve, "verify": cmd_verify}


def run(argv=None):
    """(exit status, JSON text)."""
    args = build_parser().parse_args(argv)
    try:
        if args.curve is None and args.input is None:
            raise SchemaViolation("give a curve equation or --input")
        data = _load(args.input) if args.input else {"equation": args.curve}
        if args.command == "space-resolve":
            result = cmd_space_resolve(data, args)
        else:
            result = HANDLERS[args.command](CurveSpec(data, args.truncation), args)
    except SchemaViolation as exc:
        return 2, dumps({"error": exc.envelope()})
    except TorificError as exc:
        return 1, dumps({"error": exc.envelope()})
    except (ValueError, ZeroDivisionError) as exc:
        env = {"code": "InvalidInput", "module": "cli", "message": str(exc), "context": {}}
        return 1, dumps({"error": env})
    text = dumps(result)
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(text)
    return 0, text


def main(argv=None):
    status, text = run(argv)
    sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
