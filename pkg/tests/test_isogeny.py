import random
from fractions import Fraction

import pytest

from isoratio.algebra import UniPoly, poly_factor, poly_gcd
from isoratio.curves import CurveModel, count_points_mod_p
from isoratio.isogeny import (IsogenyError, IsogenyPair, division_polynomial,
                              specialize, velu_odd_isogeny, velu_two_isogeny,
                              verify_isogeny, xp_divmod_monic, xp_trim)


def P(*cs):
    return UniPoly(cs)


class TestTwoIsogeny:
    def test_toy_curve(self):
        assert velu_two_isogeny(P(-1), P(0), P(0)) == (P(4), P(0))

    def test_cyclic4(self):
        fp, gp = velu_two_isogeny(P(-3, 0, 1), P(2, 0, -1), P(1))
        assert fp == P(-3, 0, -4)
        assert gp == P(2, 0, -8)

    def test_full_two_torsion_kernel(self):
        f, g = P(-27, 27, -27), P(-54, 81, 81, -54)
        fp, gp = velu_two_isogeny(f, g, P(-3, -3))
        disc = fp ** 3 * 4 + gp * gp * 27
        # -2^4 3^12 t (t-1)^4 dehomogenized
        expected = -(2 ** 4) * 3 ** 12 * P(0, 1) * P(-1, 1) ** 4
        assert disc == expected

    def test_invalid_kernel_rejected(self):
        with pytest.raises(IsogenyError):
            velu_two_isogeny(P(-1), P(0), P(1, 1))


class TestDivisionPolynomial:
    def test_three_torsion_root(self):
        f, g = P(27, 6), P(-27, 0, 1)
        psi3 = division_polynomial(3, f, g)
        val = UniPoly()
        for i, c in enumerate(psi3):
            val = val + c * Fraction(3) ** i
        assert val.is_zero

    def test_five_torsion_roots(self):
        f = P(-27, 324, -378, -324, -27)
        g = P(54, -972, 4050, 0, 4050, 972, 54)
        psi5 = division_polynomial(5, f, g)
        # x-coordinates 3(t^2 +- 6t + 1) annihilate psi_5 identically in t
        for x0 in (3 * P(1, 6, 1), 3 * P(1, -6, 1)):
            acc = UniPoly()
            power = UniPoly([1])
            for c in psi5:
                acc = acc + c * power
                power = power * x0
            assert acc.is_zero

    def test_division_by_kernel_polynomial(self):
        f = P(-27, 324, -378, -324, -27)
        g = P(54, -972, 4050, 0, 4050, 972, 54)
        psi5 = division_polynomial(5, f, g)
        ker = [P(9, 0, -306, 0, 9), P(-6, 0, -6), P(1)]
        _, rem = xp_divmod_monic(list(psi5), ker)
        assert not xp_trim(rem)


class TestOddIsogeny:
    def test_z3_codomain(self):
        fp, gp = velu_odd_isogeny(P(27, 6), P(-27, 0, 1), [P(-3), P(1)], 3)
        assert fp == -27 * P(19, 2)
        assert gp == -27 * P(169, 28, 1)

    def test_z5_codomain_matches_model(self):
        f = P(-27, 324, -378, -324, -27)
        g = P(54, -972, 4050, 0, 4050, 972, 54)
        psi = [P(9, 0, -306, 0, 9), P(-6, 0, -6), P(1)]
        fp, gp = velu_odd_isogeny(f, g, psi, 5)
        assert fp == -27 * P(1, 228, 494, -228, 1)
        assert gp == 54 * P(1, -522, -10006, 522, 1) * P(1, 0, 1)

    def test_non_divisor_kernel_rejected(self):
        f, g = P(27, 6), P(-27, 0, 1)
        with pytest.raises(IsogenyError):
            velu_odd_isogeny(f, g, [P(-4), P(1)], 3)


class TestVerify:
    def test_toy_pair(self):
        pair = IsogenyPair(P(-1), P(0), P(4), P(0), 2)
        assert verify_isogeny(pair, [Fraction(1)], [5, 7, 11, 13])

    def test_z5_pair(self):
        f = P(-27, 324, -378, -324, -27)
        g = P(54, -972, 4050, 0, 4050, 972, 54)
        fp, gp = velu_odd_isogeny(f, g, [P(9, 0, -306, 0, 9), P(-6, 0, -6), P(1)], 5)
        pair = IsogenyPair(f, g, fp, gp, 5)
        assert verify_isogeny(pair, [Fraction(2), Fraction(3)],
                              [7, 11, 13, 17, 19, 23, 29, 31, 37, 41])

    def test_wrong_codomain_detected(self):
        f = P(-27, 324, -378, -324, -27)
        g = P(54, -972, 4050, 0, 4050, 972, 54)
        fp, gp = velu_odd_isogeny(f, g, [P(9, 0, -306, 0, 9), P(-6, 0, -6), P(1)], 5)
        bad = IsogenyPair(f, g, fp + P(1), gp, 5)
        assert not verify_isogeny(bad, [Fraction(2), Fraction(3)], [7, 11, 13, 17, 19])

    def test_degenerate_samples_rejected(self):
        pair = IsogenyPair(P(-1), P(0), P(4), P(0), 2)
        with pytest.raises(IsogenyError):
            verify_isogeny(pair, [Fraction(0)], [])  # no primes at all


class TestFamilyPairs:
    def test_dual_composition_point_counts(self, registry):
        rng = random.Random(77)
        fam = registry["z5"]
        pair = fam.pair
        checked = 0
        while checked < 100:
            t = Fraction(rng.randint(-30, 30), rng.randint(1, 8))
            if pair.domain_disc()(t) == 0 or pair.codomain_disc()(t) == 0:
                continue
            E = specialize(pair.f, pair.g, t)
            Ep = specialize(pair.fprime, pair.gprime, t)
            p = rng.choice([7, 11, 13, 17, 19, 23, 29])
            if E.disc % p == 0 or Ep.disc % p == 0:
                continue
            assert count_points_mod_p(E, p) == count_points_mod_p(Ep, p)
            checked += 1

    def test_seven_isogeny_involution_identity(self, registry):
        # the codomain is the involution t -> 49/t of the domain up to a
        # quadratic twist, so the j-invariants agree after clearing powers:
        # j = 6912 f^3 / (4 f^3 + 27 g^2) evaluated at 49/t and cleared by t^12
        fam = registry["iso7"]
        f, g = fam.f, fam.g
        fp, gp = fam.pair.fprime, fam.pair.gprime
        f_inv = f.reversed_scaled(49)   # t^4 f(49/t)
        g_inv = g.reversed_scaled(49)   # t^6 g(49/t)
        num_left = f_inv ** 3
        den_left = f_inv ** 3 * 4 + g_inv * g_inv * 27
        num_right = fp ** 3
        den_right = fp ** 3 * 4 + gp * gp * 27
        assert num_left * den_right == num_right * den_left

    def test_discriminant_degree_bookkeeping(self, registry):
        expected = {"z3": 12, "z4": 12, "z5": 12, "z2": 6, "z2z2-k1": 6,
                    "z2z2-k2": 6, "z2z2-k3": 6, "cyclic4": 6, "iso7": 12,
                    "iso13": 24}
        for name, deg in expected.items():
            fam = registry[name]
            assert fam.delta_poly.wdeg == deg
            assert fam.delta_prime_poly.wdeg % 1 == 0  # defined

    def test_explicit_codomains_verify(self, registry):
        from isoratio.isogeny import default_samples
        from isoratio.arith import primes_up_to
        for name in ("iso7", "iso13"):
            pair = registry[name].pair
            assert verify_isogeny(pair, default_samples(pair),
                                  [p for p in primes_up_to(60) if p > 3])
