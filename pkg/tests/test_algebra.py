import random
from fractions import Fraction

import pytest

from isoratio.algebra import (AlgebraError, UniPoly, WHomPoly, multiplicity,
                              poly_factor, poly_gcd, poly_resultant,
                              rational_roots, sturm_real_root_count,
                              whom_factor, whom_from_univariate, whom_lift,
                              whom_y)


def P(*coeffs):
    return UniPoly(coeffs)


class TestGcd:
    def test_shared_linear_factor(self):
        assert poly_gcd(P(-1, 0, 1), P(-1, 1)) == P(-1, 1)

    def test_gcd_with_zero_normalizes(self):
        assert poly_gcd(P(4, 4), UniPoly()) == P(1, 1)

    def test_both_zero_rejected(self):
        with pytest.raises(AlgebraError):
            poly_gcd(UniPoly(), UniPoly())

    def test_seven_isogeny_shared_square(self):
        u = P(49, 13, 1)
        f = -3 * u * P(1, 5, 1)
        g = 2 * u * P(-7, 70, 63, 14, 1)
        s = poly_gcd(f ** 3, g * g)
        assert (u * u).divides(s)
        assert s == u * u  # the true common factor, not the tabulated one


class TestResultant:
    def test_linear_pair(self):
        assert poly_resultant(P(-1, 1), P(1, 1)) == -2

    def test_common_root_gives_zero(self):
        assert poly_resultant(P(-1, 0, 1), P(-1, 1)) == 0

    def test_evaluation_form(self):
        for c in (2, 5, -3, Fraction(7, 2)):
            assert poly_resultant(P(0, 1), P(-c, 1)) == c

    def test_zero_input_rejected(self):
        with pytest.raises(AlgebraError):
            poly_resultant(UniPoly(), P(1))

    def test_resultant_gcd_duality_random(self):
        rng = random.Random(471)
        for _ in range(1000):
            d1, d2 = rng.randint(1, 4), rng.randint(1, 4)
            p = P(*[rng.randint(-5, 5) for _ in range(d1)], rng.randint(1, 5))
            q = P(*[rng.randint(-5, 5) for _ in range(d2)], rng.randint(1, 5))
            if rng.random() < 0.4:  # force a shared factor
                common = P(rng.randint(-4, 4), 1)
                p, q = p * common, q * common
            vanishes = poly_resultant(p, q) == 0
            shares = poly_gcd(p, q).degree >= 1
            assert vanishes == shares


class TestFactor:
    def test_difference_of_squares(self):
        fp = poly_factor(P(-1, 0, 1))
        assert [f.coeffs for f, _ in fp.factors] == [P(-1, 1).coeffs, P(1, 1).coeffs]
        assert fp.content == 1

    def test_quartic_irreducible(self):
        fp = poly_factor(P(1, 0, 0, 0, 1))
        assert len(fp.factors) == 1 and fp.factors[0][1] == 1

    def test_z3_discriminant_shape(self):
        f = 27 * P(5, 1) * P(9, 1) ** 3
        fp = poly_factor(f)
        assert fp.content == 27
        assert [(tuple(int(c) for c in g.coeffs), m) for g, m in fp.factors] == \
            [((5, 1), 1), ((9, 1), 3)]

    def test_remultiplication_random(self):
        rng = random.Random(1009)
        for _ in range(60):
            polys = []
            for _ in range(rng.randint(1, 3)):
                deg = rng.randint(1, 3)
                polys.append(P(*[rng.randint(-6, 6) for _ in range(deg)],
                               rng.randint(1, 4)) ** rng.randint(1, 2))
            prod = P(rng.choice([-3, -1, 2, 5]))
            for q in polys:
                prod = prod * q
            if prod.degree == 0:
                continue
            fp = poly_factor(prod)
            assert fp.expand() == prod

    def test_factor_stability(self):
        big = P(49, 13, 1) ** 2 * P(1, 5, 1) ** 3 * P(3, 1) * 12
        for f, _ in poly_factor(big).factors:
            refac = poly_factor(f)
            assert refac.content == 1
            assert refac.factors == ((f, 1),)

    def test_zero_rejected(self):
        with pytest.raises(AlgebraError):
            poly_factor(UniPoly())

    def test_rational_roots(self):
        p = P(-2, 1) * P(3, 2) * P(1, 0, 1)
        assert rational_roots(p) == [Fraction(-3, 2), Fraction(2)]


class TestWHom:
    def test_from_univariate_z2(self):
        A = whom_from_univariate(P(0, 1), 2, 1, 2)
        B = whom_from_univariate(P(1, 1), 2, 1, 3)
        assert A.terms == {(1, 0): 1}
        assert B.terms == {(1, 1): 1, (0, 3): 1}

    def test_constant_homogenizes_to_square(self):
        A = whom_from_univariate(P(1), 1, 1, 2)
        assert A.terms == {(0, 2): 1}

    def test_degree_condition_enforced(self):
        with pytest.raises(AlgebraError):
            whom_from_univariate(P(0, 0, 0, 1), 2, 1, 2)

    def test_whom_factor_xy(self):
        prod = whom_lift(P(0, 1), 1) * whom_y(1)
        fp = whom_factor(prod)
        assert fp.content == 1
        assert sorted(list(f.terms.keys()) for f, _ in fp.factors) == [[(0, 1)], [(1, 0)]]

    def test_round_trip_matches_univariate(self):
        f = P(-27, 324, -378, -324, -27)
        A = whom_from_univariate(f, 1, 2, 2)
        wf = whom_factor(A)
        uf = poly_factor(f)
        lifted = {tuple(q.coeffs) for q, _ in uf.factors}
        for g, _ in wf.factors:
            e, dh = g.dehomogenize()
            if e == 0:
                assert tuple(dh.coeffs) in lifted
        assert wf.content == uf.content

    def test_multiplicity(self):
        y = whom_y(3)
        x = whom_lift(P(0, 1), 3)
        assert multiplicity(x * x, y) == 0
        assert multiplicity(y ** 5 * x, y) == 5
        q = whom_lift(P(9, 0, 0, 1), 3)  # a + 9 b^3 lift shape
        prod = q ** 3 * whom_lift(P(5, 0, 0, 1), 3)
        assert multiplicity(prod, q) == 3

    def test_exact_evaluation(self):
        A = whom_from_univariate(P(-27, 324, -378, -324, -27), 1, 2, 2)
        assert A(1, 1) == -432

    def test_serialization(self):
        A = whom_from_univariate(P(3, 1), 2, 1, 2)
        back = WHomPoly.from_json(A.to_json())
        assert back == A


class TestSturm:
    def test_no_real_roots(self):
        assert sturm_real_root_count(P(49, 13, 1)) == 0

    def test_mixed(self):
        assert sturm_real_root_count(P(0, -1, 0, 1)) == 3  # t(t-1)(t+1)


class TestSerialization:
    def test_string_round_trip(self):
        p = P(Fraction(1, 2), -3, 0, 7)
        assert UniPoly.from_strings(p.to_strings()) == p
