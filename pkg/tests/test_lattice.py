from itertools import combinations

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from torific.errors import (
    ConeDimensionTooHigh, ConeNotInFan, NotAFan, NotPartOfBasis, ThetaConesCoincide,
    ZeroVector)
from torific.lattice import (
    Cone, Fan, build_space_fan, complete_to_basis, det, elementary_divisors,
    fan_of_faces, orthant, primitive_and_regular, regular_chain, regularize_2d,
    regularize_plane, star_fan, star_subdivide)


def det2(a, b):
    return a[0] * b[1] - a[1] * b[0]


def hull_chain(p, q):
    """Brute force: lattice points on the compact boundary of conv(cone ∩ Z^2 minus 0)."""
    if det2(p, q) < 0:
        return list(reversed(hull_chain(q, p)))
    bound = max(abs(x) for x in p + q)
    pts = [(x, y) for x in range(-bound, bound + 1) for y in range(-bound, bound + 1)
           if (x, y) != (0, 0) and det2(p, (x, y)) >= 0 and det2((x, y), q) >= 0]
    chain = [p]
    r = p
    while r != q:
        cands = [x for x in pts if det2(r, x) > 0 or x == q]
        best = None
        for x in cands:
            if x == r:
                continue
            d = (x[0] - r[0], x[1] - r[1])
            ok = True
            for y in pts:
                e = (y[0] - r[0], y[1] - r[1])
                # y must not lie strictly on the origin side of r -> x
                if det2(d, e) * det2(d, (-r[0], -r[1])) > 0:
                    ok = False
                    break
            if ok and (best is None or abs(d[0]) + abs(d[1]) <
                       abs(best[0] - r[0]) + abs(best[1] - r[1])):
                best = x
        chain.append(best)
        r = best
    return chain


def test_primitive_vectors():
    assert primitive_and_regular((8, 12, 53)) == ((8, 12, 53), True)
    assert primitive_and_regular((2, 4, 6)) == ((1, 2, 3), False)
    with pytest.raises(ZeroVector):
        primitive_and_regular((0, 0))


def test_cone_regularity():
    assert primitive_and_regular(Cone([(1, 0), (2, 3)]))[1] is False
    assert elementary_divisors([[1, 0], [2, 3]]) == [1, 3]
    assert primitive_and_regular(Cone([(1, 1, 4), (2, 3, 13)]))[1] is True


def test_snf_against_sympy():
    from sympy.matrices.normalforms import smith_normal_form
    for M in ([[2, 4, 4], [-6, 6, 12], [10, -4, -16]], [[8, 12, 53]], [[1, 0], [2, 3]]):
        S = smith_normal_form(sympy.Matrix(M), domain=sympy.ZZ)
        diag = [abs(S[i, i]) for i in range(min(S.shape)) if S[i, i]]
        assert elementary_divisors(M) == diag


def test_fixture_completion_is_unimodular():
    assert det([(1, 1, 4), (2, 3, 13), (8, 12, 53)]) == 1


def test_completion_of_order_vector():
    b = complete_to_basis([(8, 12, 53)])
    assert b.vectors[0] == (8, 12, 53)
    assert abs(b.det) == 1


def test_completion_identity():
    assert complete_to_basis([(1, 0, 0)]).vectors == ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def test_completion_plane():
    b = complete_to_basis([(2, 3)])
    (a, c) = b.vectors[1]
    assert abs(2 * c - 3 * a) == 1


def test_not_part_of_basis():
    with pytest.raises(NotPartOfBasis):
        complete_to_basis([(2, 4, 6)])
    with pytest.raises(NotPartOfBasis):
        complete_to_basis([(1, 0), (2, 3)])


def test_monomial_map_inverse():
    b = complete_to_basis([(8, 12, 53)])
    for k in range(3):
        for j in range(3):
            s = sum(b.inv[k][i] * b.vectors[j][i] for i in range(3))
            assert s == (1 if j == k else 0)


def test_regularize_already_regular():
    f = regularize_2d(Cone([(1, 0), (0, 1)]))
    assert f.maximal() == [Cone([(1, 0), (0, 1)])]


def test_regularize_23():
    assert regular_chain(Cone([(1, 0), (2, 3)])) == hull_chain((1, 0), (2, 3))
    assert regular_chain(Cone([(1, 0), (2, 3)])) == [(1, 0), (1, 1), (2, 3)]


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_regularize_1k(k):
    assert regularize_plane((1, 0), (1, k)) == [(1, j) for j in range(k + 1)]
    assert regularize_plane((1, 0), (1, k)) == hull_chain((1, 0), (1, k))


def test_regularize_embedded():
    chain = regular_chain(Cone([(1, 0, 0), (2, 3, 0)]))
    assert chain == [(1, 0, 0), (1, 1, 0), (2, 3, 0)]
    # non-saturated span inside Z^4
    c = Cone([(1, 1, 0, 0), (1, 3, 2, 4)])
    chain = regular_chain(c)
    for a, b in zip(chain, chain[1:]):
        assert elementary_divisors([a, b]) == [1, 1]


def test_regularize_dimension_three():
    with pytest.raises(ConeDimensionTooHigh):
        regularize_2d(Cone([(1, 0, 0), (0, 1, 0), (1, 1, 5)]))


vec2 = st.tuples(st.integers(-12, 12), st.integers(-12, 12))


@settings(max_examples=80, deadline=None)
@given(vec2, vec2)
def test_regularize_matches_hull_and_is_minimal(p, q):
    from math import gcd
    if det2(p, q) == 0 or gcd(*p) != 1 or gcd(*q) != 1:
        return
    chain = regularize_plane(p, q)
    assert chain == hull_chain(p, q)
    for a, b in zip(chain, chain[1:]):
        assert abs(det2(a, b)) == 1
    for i in range(1, len(chain) - 1):
        assert abs(det2(chain[i - 1], chain[i + 1])) != 1


def test_star_fan_example():
    S = star_subdivide(fan_of_faces(orthant(3)), (4, 6, 13))
    st_ = star_fan(Cone([(0, 0, 1)]), S)
    assert st_.rank == 2
    assert (2, 3) in st_.rays()
    assert sorted(st_.rays()) == [(0, 1), (1, 0), (2, 3)]


def test_star_fan_trivial_cases():
    S = fan_of_faces(orthant(2))
    assert star_fan(Cone([], 2), S) == S
    full = star_fan(orthant(2), S)
    assert full.rank == 0 and len(full.cones) == 1
    with pytest.raises(ConeNotInFan):
        star_fan(Cone([(1, 1)]), S)


def test_star_fan_composes():
    S = star_subdivide(fan_of_faces(orthant(3)), (4, 6, 13))
    S = star_subdivide(S, (1, 1, 1))
    sigma = Cone([(0, 0, 1)])
    for tau in S.cones:
        if len(tau.gens) == 2 and (0, 0, 1) in tau.gens:
            direct = star_fan(tau, S)
            first = star_fan(sigma, S)
            from torific.lattice import quotient_map
            img = Cone([quotient_map(sigma)(g) for g in tau.gens if g != (0, 0, 1)], 2)
            assert star_fan(img, first) == direct


def test_not_a_fan():
    with pytest.raises(NotAFan):
        Fan([Cone([(1, 0), (1, 2)]), Cone([(1, 1), (0, 1)])], 2)


def test_space_fan_single_ray():
    theta, sigma = build_space_fan((0, 0, 1), [(2, 3, 0)], [Cone([], 3)])
    assert theta.maximal() == [Cone([(2, 3, 1)])]
    assert Cone([(2, 3, 1)]) in sigma


def test_space_fan_equal_w():
    w0 = (0, 0, 1, 1)
    theta, sigma = build_space_fan(
        w0, [(2, 3, 0, 0), (2, 3, 0, 0)], [Cone([(0, 0, 0, 1)]), Cone([(0, 0, 1, 0)])])
    a, b = theta.maximal()
    shared = set(a.gens) & set(b.gens)
    assert shared == {(2, 3, 1, 1)}
    assert a in sigma and b in sigma


def test_theta_coincide():
    with pytest.raises(ThetaConesCoincide):
        build_space_fan((0, 1), [(0, 0), (0, 0)], [Cone([], 2), Cone([], 2)])
