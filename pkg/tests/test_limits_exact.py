from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from permlocal.limits_exact import (
    RationalPoly,
    boundary_limit_b,
    boundary_limit_e,
    enumerate_class,
    exponent_identity_holds,
    finite_from_order,
    genfun_normalization_check,
    limit231_order_marginals,
    limit321_order_marginals,
    limit_density,
    max_distance,
    normalization_table,
    p231,
    p321,
    rooted_law_from_finite,
    symbolic_pat_b,
    symbolic_pat_e,
    symbolic_pat_j,
    tree_probability,
)
from permlocal.perm_core import Permutation, indmax, inverse, lr_maxima, maxima, rl_maxima
from permlocal.samplers import OffspringLaw, Overflow, RandomStream, gw_tree
from permlocal.bijections import btree_to_perm

HALF = Fraction(1, 2)
BIG = Permutation.parse("4,1,3,2,6,5,7,10,8,9,11,12,16,13,15,14")
polys = st.lists(st.fractions(max_denominator=20), max_size=5).map(RationalPoly)


class TestRationalPoly:
    def test_printing(self):
        poly = RationalPoly.monomial(2, 3)
        assert poly.factored() == "p^2*(1-p)^3"
        assert poly.coefficient_list() == ["0", "0", "1", "-3", "3", "-1"]
        assert RationalPoly([1, -2, 1]).expanded() == "1 - 2*p + p^2"
        assert str(RationalPoly.constant(1)) == "1"
        assert str(RationalPoly([Fraction(1, 3), 1])) == "1/3 + p"

    def test_delta_substitution(self):
        # (1-p)^2 with p = (1-d)/2 is (1+d)^2/4
        assert RationalPoly.monomial(0, 2).in_delta() == [Fraction(1, 4), Fraction(1, 2), Fraction(1, 4)]

    def test_exact_division(self):
        assert (RationalPoly.monomial(1, 2)).div_one_minus_p() == RationalPoly.monomial(1, 1)
        with pytest.raises(ArithmeticError):
            RationalPoly.p().div_one_minus_p()

    @given(polys, polys, polys)
    def test_ring_laws(self, a, b, c):
        assert a * (b + c) == a * b + a * c
        assert (a + b) - b == a
        x = Fraction(1, 3)
        assert (a * b)(x) == a(x) * b(x)
        assert (a * RationalPoly.one_minus_p()).div_one_minus_p() == a

    @given(st.integers(0, 6), st.integers(0, 6), st.fractions(min_value=1, max_value=5))
    def test_monomial_form(self, a, b, c):
        assert RationalPoly.monomial(a, b, c).monomial_form() == (c, a, b)
        assert RationalPoly([1, 1]).monomial_form() is None


class TestClosedForms:
    def test_p231_examples(self):
        assert p231(Permutation.parse("132985476")) == Fraction(1, 2**11)
        assert p231((1,)) == 1
        assert p231(BIG) == Fraction(1, 2**22)
        with pytest.raises(ValueError):
            p231((2, 3, 1))

    def test_p321_examples(self):
        assert p321((1, 2, 3)) == Fraction(1, 2)
        assert p321((1,)) == 1
        assert p321((2, 3, 1)) == Fraction(1, 8)
        assert p321((2, 1, 4, 3)) == 0
        with pytest.raises(ValueError):
            p321((3, 2, 1))

    def test_limit_density_outside_class(self):
        assert limit_density("av321", (3, 2, 1)) == 0
        assert limit_density("av231", (2, 3, 1)) == 0

    def test_against_oracles(self):
        for k in range(1, 8):
            for s in enumerate_class(231, k):
                assert p231(s) == oracles.p231(s)
            for s in enumerate_class(321, k):
                assert p321(s) == oracles.p321(s)


class TestSymbolic:
    def test_examples(self):
        assert symbolic_pat_j(BIG) == RationalPoly.monomial(15, 7)
        assert symbolic_pat_j((1,)) == RationalPoly.constant(1)
        assert symbolic_pat_j((1, 2)) == RationalPoly.p()
        assert symbolic_pat_b((1,)) == symbolic_pat_e((1,)) == RationalPoly.constant(1)
        assert boundary_limit_b((2, 1)) == HALF
        assert boundary_limit_e((1, 2)) == HALF

    def test_tree_probability(self):
        assert tree_probability((1,)) == RationalPoly.monomial(0, 2)
        assert tree_probability((1, 2))(HALF) == Fraction(1, 16)

    def test_all_patterns_to_seven(self):
        for k in range(1, 8):
            for s in enumerate_class(231, k):
                poly = symbolic_pat_j(s)
                assert poly(HALF) == p231(s)
                assert poly.monomial_form() is not None and exponent_identity_holds(s)
                assert boundary_limit_b(s) == Fraction(2 ** (len(rl_maxima(s)) + 1), 4**k)
                assert boundary_limit_e(s) == Fraction(2 ** (len(lr_maxima(s)) + 1), 4**k)

    @pytest.mark.parametrize("delta", [Fraction(1, 5), Fraction(2, 5)])
    def test_matches_sampled_gw_trees(self, delta):
        # subcritical, so the vertex cap is essentially never hit and skipping overflows is harmless
        law = OffspringLaw.binary(delta)
        p = law.p
        stream = RandomStream(11, int(delta * 5))
        draws = 40_000
        targets = [Permutation(x) for x in ((1, 2), (2, 1), (1, 3, 2), (3, 1, 2), (2, 1, 3))]
        hits_j = {t: 0 for t in targets}
        hits_b = {t: 0 for t in targets}
        hits_e = {t: 0 for t in targets}
        for _ in range(draws):
            tree = gw_tree(law, stream, vertex_cap=4096)
            if isinstance(tree, Overflow):
                continue
            sigma = btree_to_perm(tree)
            n, ell = len(sigma), indmax(sigma)
            for t in targets:
                k, m = len(t), indmax(t)
                a, b = ell - m + 1, ell + k - m
                if a >= 1 and b <= n and oracles.std(sigma[a - 1 : b]) == t:
                    hits_j[t] += 1
                if n >= k and oracles.std(sigma[:k]) == t:
                    hits_b[t] += 1
                if n >= k and oracles.std(sigma[n - k :]) == t:
                    hits_e[t] += 1
        for fn, hits in ((symbolic_pat_j, hits_j), (symbolic_pat_b, hits_b), (symbolic_pat_e, hits_e)):
            for t in targets:
                expected = float(fn(t)(p))
                se = (expected * (1 - expected) / draws) ** 0.5
                assert abs(hits[t] / draws - expected) <= 4 * se + 1e-4, (fn.__name__, t)


class TestMaxDistance:
    def test_examples(self):
        s = Permutation.parse("132985476")
        assert max_distance(s, 2) == 1 and max_distance(s, 8) == 2
        assert max_distance(s, indmax(s)) == 0
        with pytest.raises(ValueError):
            max_distance(s, 3)

    def test_sum_identity(self):
        for k in range(1, 8):
            for s in enumerate_class(231, k):
                mx = maxima(s)
                assert len(mx) + sum(max_distance(s, j) for j in mx) == k


class TestEnumeration:
    def test_examples(self):
        assert enumerate_class(231, 3) == [(1, 2, 3), (1, 3, 2), (2, 1, 3), (3, 1, 2), (3, 2, 1)]
        assert enumerate_class("321", 3) == [(1, 2, 3), (1, 3, 2), (2, 1, 3), (2, 3, 1), (3, 1, 2)]
        assert enumerate_class(231, 1) == enumerate_class(321, 1) == [(1,)]

    def test_against_filtering(self):
        for n in range(1, 8):
            assert enumerate_class(231, n) == oracles.av((2, 3, 1), n)
            assert enumerate_class(321, n) == oracles.av((3, 2, 1), n)

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            enumerate_class(231, 13)
        with pytest.raises(ValueError):
            enumerate_class(123, 3)


class TestNormalization:
    def test_small_sizes(self):
        rows = normalization_table(3)
        assert rows[0]["weighted231"] == 4
        assert rows[2]["weighted231"] == 64 and rows[2]["total321"] == 1
        assert genfun_normalization_check(8)


class TestFiniteFromOrder:
    def test_limit321_pair(self):
        law = finite_from_order(limit321_order_marginals(2))
        assert law == {(1, 2): Fraction(3, 4), (2, 1): Fraction(1, 4)}

    def test_point_masses(self):
        assert finite_from_order({(1,): Fraction(1)}) == {(1,): 1}
        assert finite_from_order(limit231_order_marginals(1)) == {(1,): 1}

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            finite_from_order({(1, 2): Fraction(1, 2)})
        with pytest.raises(ValueError):
            finite_from_order({(1, 2): Fraction(1, 2), (1,): Fraction(1, 2)})
        assert finite_from_order({(1, 2): 0.499, (2, 1): 0.5}, tolerance=0.01)

    def test_limit321_window_law_matches_oracle(self):
        for h in (1, 2, 3):
            law = finite_from_order(limit321_order_marginals(2 * h + 1))
            assert law == oracles.limit321_window_law(h)

    def test_rooted_laws_reproduce_limit_densities(self):
        # a shift-invariant order gives rooted windows with law P(pi) at every odd size
        for n in range(3, 9):
            for model, marg in (("av321", limit321_order_marginals), ("av231", limit231_order_marginals)):
                law = finite_from_order(marg(n))
                for h in range(1, (n - 1) // 2 + 1):
                    rooted = rooted_law_from_finite(law, h)
                    for pi, w in rooted.items():
                        assert w == limit_density(model, pi)
                    assert sum(rooted.values()) == 1

    def test_marginals_are_distributions(self):
        for n in range(1, 8):
            assert sum(limit321_order_marginals(n).values()) == 1
            assert sum(limit231_order_marginals(n).values()) == 1
            assert all(inverse(t) in enumerate_class(321, n) for t in limit321_order_marginals(n))
