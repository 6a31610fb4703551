from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from helpers import random_branch, rng_for
from torific.branch import (BranchData, curvetta_family,
                            maximal_contact_sequence, reference_line)
from torific.eggers_wall import build_tree
from torific.errors import (AttachmentCollision, DegreeLadderViolation, OrderVectorMismatch,
                            PrefixNotGeneratingSequence, SemigroupNotGeneratingZ,
                            ShapeViolation)
from torific.exactmath import MPoly, Series, parse_poly, substitute
from torific.lattice import ChartBasis, complete_to_basis
from torific.resolution import (
    SpaceCurveInput, adic_expansion, build_embedding_ideal, certify_resolution,
    chart_check_plane, divisor_weights, generating_prefix, initial_form_certificate,
    space_curve_resolve, valuation_from_expansion)

STPLANE = "((Y^2-X^3)^2-X^5*Y)^2-X^10*(Y^2-X^3)"
B = BranchData.from_string


def stplane_seq():
    return [reference_line(), B("Y"), B("Y^2-X^3"), B("(Y^2-X^3)^2-X^5*Y")]


def ex1_seq():
    return [reference_line(), B("Y"), B("Y^2-X^3+X^4")]


def ex1_curve():
    return [B("Y^2-X^3-X^4"), B("Y^2-X^3-X^5")]


def names(k):
    return tuple("X%d" % i for i in range(k))


# --------------------------------------------------------------- expansions

def test_stplane_expansion_and_value():
    f = parse_poly(STPLANE)
    ex = adic_expansion(f, stplane_seq())
    assert ex.as_poly() == parse_poly("X3^2 - X0^10*X2", names(4))
    assert ex.reconstruct() == f and ex.digits_ok()
    assert valuation_from_expansion(ex, [8, 12, 26, 53]) == 106


def test_expansion_digits_are_unique():
    base = [parse_poly("Y"), parse_poly("Y^2-X^3")]
    # sum of c_I x^k y^i1 f2^i2 with digits i1 < 2 expands back to itself
    h = parse_poly("X0^2*X1 + 3*X0*X2^2 - X1*X2^3 + 5", names(3))
    from torific.resolution import compose
    f = compose(h, [parse_poly("X"), base[0], base[1]])
    assert adic_expansion(f, base).as_poly() == h


def test_degree_ladder_violations():
    with pytest.raises(DegreeLadderViolation):
        adic_expansion(parse_poly("Y^5"), [parse_poly("Y^2-X^3")])
    with pytest.raises(DegreeLadderViolation):
        adic_expansion(parse_poly("Y^5"), [parse_poly("Y"), parse_poly("Y^2-X^3"),
                                           parse_poly("Y^3-X^5")])


# --------------------------------------------------------------- embedding ideal

def test_stplane_embedding_generators():
    E = build_embedding_ideal(stplane_seq())
    assert E.g == 3
    assert E.generators == [parse_poly("-X2 + X1^2 - X0^3", names(4)),
                            parse_poly("-X3 + X2^2 - X0^5*X1", names(4))]
    assert E.vanishes()


def test_ex1_embedding_generator():
    E = build_embedding_ideal(ex1_seq())
    assert E.generators == [parse_poly("-X2 + X1^2 - X0^3 + X0^4", names(3))]


def test_prefix_must_contain_smooth_function():
    with pytest.raises(PrefixNotGeneratingSequence):
        build_embedding_ideal([reference_line(), B("Y^2-X^3"), B("Y")])
    with pytest.raises(PrefixNotGeneratingSequence):
        build_embedding_ideal([B("Y"), reference_line()])


# --------------------------------------------------------------- initial forms

def test_stplane_initial_forms():
    E = build_embedding_ideal(stplane_seq())
    cert = initial_form_certificate(E, [8, 12, 26, 53])
    assert cert.forms == [parse_poly("X1^2 - X0^3", names(4)),
                          parse_poly("X2^2 - X0^5*X1", names(4))]
    assert cert.leading == [1, 2]
    assert [s["n"] for s in cert.shapes] == [2, 2]


def test_monomial_initial_form_rejected():
    E = build_embedding_ideal(stplane_seq())
    with pytest.raises(ShapeViolation):
        initial_form_certificate(E, [1, 1, 1, 1])


def test_unbalanced_binomial_rejected():
    E = build_embedding_ideal(stplane_seq())
    # X1^2 and X0^3 balance but the second binomial does not
    with pytest.raises(ShapeViolation):
        initial_form_certificate(E, [2, 3, 7, 20])


@pytest.mark.parametrize("curves,count", [
    ([STPLANE], 7),
    (["Y^2-X^3-X^4", "Y^2-X^3-X^5"], 5),
    (["(Y^2-X^3)^2-X^5*Y", "(Y^2-X^3)^2-X^6*Y"], 7),
])
def test_all_divisors_certified(curves, count):
    C = [B(s) for s in curves]
    L, _ = maximal_contact_sequence(C)
    cert = certify_resolution(L, C)
    assert cert.passed
    assert len(cert.divisors) == count
    assert cert.skipped == ["L1"]


def test_leaf_certificate_ex1():
    E = build_embedding_ideal(ex1_seq(), prefix=[0, 1])
    cert = initial_form_certificate(E, [0, 0, 1], leaf=2, refine=[2, 3])
    assert cert.shapes == ["leaf"]
    assert cert.forms[0] == parse_poly("X1^2 - X0^3 + X0^4", names(3))


# --------------------------------------------------------------- charts

def test_stplane_chart():
    basis = ChartBasis([(1, 1, 4), (2, 3, 13), (8, 12, 53)])
    r = chart_check_plane(stplane_seq(), [B(STPLANE)], basis, coords=[0, 1, 3])
    (b,) = r.branches
    assert b["position"] == 2 and b["orders"] == [0, 0, 1]
    assert b["attachment"] == ["1", "1", "0"]
    assert b["second_orders"][:2] == [2, 1]
    (S,) = r.surface
    target = parse_poly("U2*U3^5 - (1-U1)^2 + U1^2*U2*U3^4", ("U1", "U2", "U3"))
    assert S in (target, -target)
    # x2 is not a coordinate: the image surface is singular along U1 = 1, U3 = 0
    assert not r.surface_checks[0]["smooth"]


def test_ex1_chart_attachments():
    r = chart_check_plane(ex1_seq(), ex1_curve(), [(1, 1, 2), (2, 3, 7), (2, 3, 8)])
    assert [b["attachment"] for b in r.branches] == [["1", "1/2", "0"], ["1", "1", "0"]]
    assert all(s["smooth"] for s in r.surface_checks)
    (S,) = r.surface
    assert S == parse_poly("1 - U1 - U2*U3^2 + U1^2*U2^2*U3^2", ("U1", "U2", "U3"))
    assert r.resolved


def test_chart_missing_order_vector():
    with pytest.raises(OrderVectorMismatch):
        chart_check_plane(ex1_seq(), ex1_curve(), [(1, 0, 0), (0, 1, 0), (0, 0, 1)])


def test_attachment_collision():
    C = [B("Y^2-X^3-X^4"), B("Y^2-X^3-X^4+X^6")]
    with pytest.raises(AttachmentCollision):
        chart_check_plane(ex1_seq(), C, [(1, 1, 2), (2, 3, 7), (2, 3, 8)])


def test_chart_invariance_under_completion():
    # two different bases containing the order vector give the same verdicts
    bases = [[(1, 1, 2), (2, 3, 7), (2, 3, 8)],
             [(3, 4, 10), (2, 3, 7), (2, 3, 8)],
             complete_to_basis([(2, 3, 8)]).vectors]
    for bs in bases:
        r = chart_check_plane(ex1_seq(), ex1_curve(), bs)
        assert [b["orders"] for b in r.branches] == [[int(k == bs.index((2, 3, 8)))
                                                      for k in range(3)]] * 2
        assert r.resolved and all(s["smooth"] for s in r.surface_checks)


# --------------------------------------------------------------- space curves

def S(d):
    return Series(d)


def test_space_example():
    inp = SpaceCurveInput([(S({4: 1}), S({6: 1}), S({13: 1})), (S({2: 1}), S({3: 1}), S({}))])
    out = space_curve_resolve(inp)
    a, b = out["arcs"]
    assert a["orders"] == [1, 0, 0] and a["chart"][0] == [4, 6, 13]
    assert b["subspace_cone"] == [[0, 0, 1]] and b["star_ray"] == [2, 3]
    assert out["resolved"]
    assert [4, 6, 13] in out["fan_rays"] and [2, 3, 0] in out["fan_rays"]


def test_space_semigroup_gcd():
    with pytest.raises(SemigroupNotGeneratingZ):
        space_curve_resolve(SpaceCurveInput([(S({2: 1}), S({4: 1}), S({}))]))


def test_space_repair():
    inp = SpaceCurveInput([(S({2: 1}), S({3: 1}), S({}))])
    out = space_curve_resolve(inp, repair=True)
    assert out["notes"]["repair"]["y"] == 0
    assert "subspace_cone" not in out["arcs"][0]


def test_space_separation():
    arcs = [(S({2: 1}), S({3: 1}), S({5: 1})), (S({2: 1}), S({3: 1}), S({5: 2}))]
    inp = SpaceCurveInput(arcs)
    with pytest.raises(AttachmentCollision):
        space_curve_resolve(SpaceCurveInput(arcs[:1] + [(S({2: 1}), S({3: 1}), S({5: 1, 7: 1}))]))
    out = space_curve_resolve(inp, separate=True)
    assert out["resolved"] and len(out["notes"]["separation"]) == 1
    assert len({tuple(a["order_vector"]) for a in out["arcs"]}) == 2


# --------------------------------------------------------------- properties

def _random_poly(rng, nv=2, terms=4, deg=6):
    t = {}
    for _ in range(terms):
        t[(rng.randint(0, deg), rng.randint(0, deg))] = F(rng.choice([1, -1, 2, 3]))
    return MPoly(t, nv, ("X", "Y"))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_expansion_reconstructs(seed):
    rng = rng_for(seed)
    A, _ = random_branch(rng, max_bbar=60)
    L, _ = maximal_contact_sequence([A])
    tree = build_tree(L, [A])
    P = tree.attaching_point(len(tree.spine))
    if P.is_root:
        return
    prefix = generating_prefix(tree, P)
    base = [L[c] for c in prefix]
    h = _random_poly(rng)
    ex = adic_expansion(h, base)
    assert ex.reconstruct() == h and ex.digits_ok()


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_valuation_matches_curvettas(seed):
    rng = rng_for(seed)
    A, _ = random_branch(rng, max_bbar=40)
    L, _ = maximal_contact_sequence([A])
    tree = build_tree(L, [A])
    P = tree.attaching_point(len(tree.spine))
    if P.is_root:
        return
    prefix = generating_prefix(tree, P)
    h = _random_poly(rng, terms=3, deg=4)
    if h.is_zero():
        return
    ex = adic_expansion(h, [L[c] for c in prefix])
    v = valuation_from_expansion(ex, divisor_weights(P, tree, prefix))
    fam = curvetta_family(A, P)
    oracle = min(substitute(h, fam(a).param.arc()).ord() for a in (1, -1, 2, -2, 3, 7))
    assert v == oracle


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_weight_balance_and_charts(seed):
    rng = rng_for(seed)
    A, _ = random_branch(rng, max_bbar=80)
    L, cert = maximal_contact_sequence([A])
    cert = certify_resolution(L, [A])
    assert cert.passed
    for d in cert.divisors:
        for s in d["certificate"]["shapes"]:
            assert s["kind"] in ("binomial", "graph")
    tree = build_tree(L, [A])
    from torific.tropical import order_vector
    ov = order_vector(tree, len(tree.spine))
    basis = complete_to_basis([ov])
    r = chart_check_plane(L, [A], basis)
    assert r.branches[0]["orders"] == [1] + [0] * (len(L) - 1)


def test_trivial_expansions_and_values():
    base = stplane_seq()
    ex = adic_expansion(parse_poly("Y^2-X^3"), base[:3])
    assert len(ex.monomials()) == 1
    ex = adic_expansion(parse_poly("X + X^2"), base[:2])
    assert valuation_from_expansion(ex, [8, 12]) == 8
    for j, v in enumerate([12, 26, 53], start=1):
        ex = adic_expansion(parse_poly(["Y", "Y^2-X^3", "(Y^2-X^3)^2-X^5*Y"][j - 1]), base)
        assert valuation_from_expansion(ex, [8, 12, 26, 53]) == v


def test_ex1_leading_binomial():
    ex = adic_expansion(parse_poly("Y^2-X^3+X^4"), [parse_poly("Y")])
    assert ex.leading_binomial([2, 3]) == (2, 1, (3,))
    assert ex.digits_ok()


def test_valuation_at_tree_point():
    from helpers import stplane_tree
    tree = stplane_tree()
    P = tree.attaching_point(3)
    ex = adic_expansion(parse_poly(STPLANE), stplane_seq())
    assert valuation_from_expansion(ex, P, tree, [0, 1, 2, 3]) == 106


def test_cross_has_empty_ideal():
    E = build_embedding_ideal([reference_line(), B("Y")])
    assert E.generators == []
    cert = initial_form_certificate(E, [1, 1])
    assert cert.forms == [] and cert.non_degenerate


def test_smooth_branch_blowup_chart():
    r = chart_check_plane([reference_line(), B("Y")], [B("Y-X^2")], [(1, 2), (0, 1)])
    (b,) = r.branches
    assert b["orders"] == [1, 0] and b["orders_from_ray"] == [1, 0]
    assert r.surface == []
