"""Shared oracles and generators for the test-suite."""

import random
from fractions import Fraction
from math import gcd, lcm

from torific.branch import BranchData, PuiseuxParam
from torific.exactmath import Series


def random_char_sequence(rng, max_bbar=200):
    """A characteristic sequence (beta_0, ..., beta_g) with small semigroup."""
    from torific.branch import semigroup_from_char
    while True:
        g = rng.choice([0, 1, 1, 2, 2, 3])
        ns = [rng.choice([2, 2, 3]) for _ in range(g)]
        n = 1
        for x in ns:
            n *= x
        beta = [n]
        e = n
        for nj in ns:
            e_new = e // nj
            k = beta[-1] // e_new + 1
            k += rng.randint(0, 3)
            while gcd(k, nj) != 1:
                k += 1
            beta.append(e_new * k)
            e = e_new
        sg = semigroup_from_char(beta)
        if max(sg.generators) <= max_bbar:
            return beta


def random_branch(rng, max_bbar=200, extra=2):
    """Exact parametrization with prescribed characteristic exponents."""
    beta = random_char_sequence(rng, max_bbar)
    n = beta[0]
    coeffs = {}
    for b in beta[1:]:
        coeffs[b] = Fraction(rng.choice([1, -1, 2, -2, 3]))
    # a smooth branch still needs a tangent slope and some curvature
    lo = n
    for _ in range(extra):
        k = rng.randint(lo, lo + 2 * n + 4)
        # keep gcd pattern: only exponents divisible by the current gcd
        e = n
        for b in beta[1:]:
            if b <= k:
                e = gcd(e, b)
        k -= k % e
        if k >= n and k not in coeffs:
            coeffs[k] = Fraction(rng.choice([1, -1, 2, Fraction(1, 2)]))
    return BranchData(param=PuiseuxParam(n, Series(coeffs))), tuple(beta)


def contact_exponent(pa, pb):
    """Maximal order of coincidence of the Puiseux series over all conjugates.

    Works with exact rational coefficients: a ratio of coefficients must be
    a root of unity of the form w^k, hence +-1.
    """
    N = lcm(pa.n, pb.n)
    ca = {k * (N // pa.n): v for k, v in pa.zeta.terms()}
    cb = {k * (N // pb.n): v for k, v in pb.zeta.terms()}
    keys = sorted(set(ca) | set(cb))
    best = Fraction(-1)
    for j in range(N):
        hit = None
        for k in keys:
            a, b = ca.get(k, 0), cb.get(k, 0)
            if a == b == 0:
                continue
            ok = False
            if a and b:
                r = Fraction(b) / a
                frac = Fraction(j * k, N) % 1
                ok = (r == 1 and frac == 0) or (r == -1 and frac == Fraction(1, 2))
            if not ok:
                hit = Fraction(k, N)
                break
        if hit is None:
            return None
        best = max(best, hit)
    return best


def c_along(beta, e):
    """Contact complexity along a path with characteristic sequence beta."""
    n = beta[0]
    exps = [Fraction(b, n) for b in beta[1:]]
    total, lo, i = Fraction(0), Fraction(0), 1
    for x in exps:
        if x >= e:
            break
        total += (x - lo) / i
        lo, i = x, lcm(i, x.denominator)
    return total + (e - lo) / i


def semigroup_elements(gens, bound):
    reach = [False] * (bound + 1)
    reach[0] = True
    for k in range(1, bound + 1):
        reach[k] = any(k >= g and reach[k - g] for g in gens)
    return {k for k in range(bound + 1) if reach[k]}


def rng_for(seed):
    return random.Random(seed)


def ew_example_tree():
    """The five-branch example: L1 smooth, L2..L5 with exponents below."""
    from torific.branch import reference_line
    from torific.eggers_wall import build_tree
    data = [(1, {}), (3, {5: 1}), (6, {10: 1, 12: 1, 15: 1}), (2, {3: 1}), (4, {6: 1, 7: 1})]
    Ls = []
    for k, (n, c) in enumerate(data):
        b = BranchData(param=PuiseuxParam(n, Series(c)), label="L%d" % (k + 1))
        Ls.append(b)
    return build_tree([reference_line()] + Ls)


def stplane_tree():
    from torific.branch import reference_line
    from torific.eggers_wall import build_tree
    D = [reference_line()] + [BranchData.from_string(s) for s in
                              ("Y", "Y^2-X^3", "(Y^2-X^3)^2-X^5*Y")]
    for k, b in enumerate(D[1:]):
        b.label = "L%d" % (k + 1)
    C = BranchData.from_string("((Y^2-X^3)^2-X^5*Y)^2-X^10*(Y^2-X^3)", label="C")
    return build_tree(D, [C])
