from fractions import Fraction
from math import gcd, log

import numpy as np
from django.test import SimpleTestCase, override_settings, tag
from mpmath import mp

from fieldcore.cyclotomic import is_root_of_unity, make_field, norm
from heights.constants import setup_constants, voutier_constant
from heights.enumeration import enumerate_bounded_height, is_enumerable
from heights.exceptional import _subgroups, exception_set, irreducible_exceptions, verify_sextic
from heights.ideals import integral_ideals_up_to, prime_ideals_up_to
from heights.profiles import height_profile
from heights.units import _independent_part, count_units_with_shift, cyclotomic_unit_generators, fundamental_units
from bounds.volume import unit_count_bound
from utils.exceptions import EnumerationUnavailable, InvalidConfiguration, ZeroDivisorError

LOCAL_CACHES = {
    "default": {"BACKEND": "django.core.cache.backends.locmem.LocMemCache"},
    "enumeration": {"BACKEND": "django.core.cache.backends.locmem.LocMemCache", "LOCATION": "heights-tests"},
}


def roots_of_unity(field):
    out = [field.zeta(k) for k in range(field.conductor)]
    if field.omega != field.conductor:
        out += [-z for z in out]
    return out


def orbit_key(alpha):
    return min((z * alpha).coeffs for z in roots_of_unity(alpha.field))


def brute_force_orbits(field, candidates, X):
    keys = set()
    for alpha in candidates:
        if not alpha or is_root_of_unity(alpha):
            continue
        if height_profile(alpha).h_weil_lower <= X:
            keys.add(orbit_key(alpha))
    return keys


class HeightProfileTests(SimpleTestCase):
    def test_golden_ratio(self):
        phi = make_field(5).element([0, 0, -1, -1])
        profile = height_profile(phi)
        self.assertAlmostEqual(float(profile.h_weil), float(mp.ln((1 + mp.sqrt(5)) / 2) / 2), places=12)
        self.assertEqual(profile.denominator_index, 1)
        self.assertEqual(profile.norm_abs, 1)

    def test_one_half(self):
        profile = height_profile(make_field(1).rational(Fraction(1, 2)))
        self.assertEqual(float(profile.h_inf), 0.0)
        self.assertAlmostEqual(float(profile.log_D), log(2), places=12)
        self.assertAlmostEqual(float(profile.h_weil), log(2), places=12)

    def test_roots_of_unity(self):
        K = make_field(12)
        for k in range(12):
            profile = height_profile(K.zeta(k))
            self.assertEqual((profile.h_inf, profile.h_weil, profile.log_D), (0, 0, 0))

    def test_zero(self):
        with self.assertRaises(ZeroDivisorError):
            height_profile(make_field(8).zero())

    def test_weil_height_splits(self):
        K = make_field(8)
        alpha = K.element([Fraction(3, 2), 1, 0, Fraction(-1, 4)])
        p = height_profile(alpha)
        self.assertLess(abs(p.h_weil - p.h_inf - p.log_D / 4), mp.mpf(10) ** -30)

    def test_invariance(self):
        rng = np.random.default_rng(7)
        K = make_field(7)
        for _ in range(10):
            coeffs = [Fraction(int(a), int(b)) for a, b in zip(rng.integers(-5, 6, 6), rng.integers(1, 4, 6))]
            alpha = K.element(coeffs)
            if not alpha:
                continue
            h = height_profile(alpha).h_weil
            self.assertLess(abs(height_profile(alpha.inverse()).h_weil - h), mp.mpf(10) ** -25)
            self.assertLess(abs(height_profile(-K.zeta(3) * alpha).h_weil - h), mp.mpf(10) ** -25)

    def test_inverse_profile(self):
        K = make_field(4)
        alpha = K.element([2, 1])
        direct = height_profile(alpha.inverse())
        derived = height_profile(alpha).inverse()
        self.assertEqual(derived.denominator_index, direct.denominator_index)
        self.assertEqual(derived.norm_abs, direct.norm_abs)
        self.assertLess(abs(derived.h_inf - direct.h_inf), mp.mpf(10) ** -25)


@override_settings(CACHES=LOCAL_CACHES)
class UnitTests(SimpleTestCase):
    def test_rank_and_norm(self):
        for m in (5, 7, 8, 12, 15, 16):
            K = make_field(m)
            basis = fundamental_units(K)
            self.assertEqual(basis.rank, K.unit_rank)
            self.assertEqual(np.linalg.matrix_rank(basis.log_matrix()), K.unit_rank)
            for unit in basis.units:
                self.assertTrue(unit.is_integral())
                self.assertEqual(norm(unit), 1)

    def test_generator_exponents_stay_small(self):
        for m in (12, 15, 16):
            K = make_field(m)
            rows = _independent_part(K, cyclotomic_unit_generators(K))
            self.assertEqual(len(rows), K.unit_rank)
            self.assertLessEqual(max(abs(e) for row in rows for e in row), 10)

    def test_golden_ratio_regulator(self):
        basis = fundamental_units(make_field(5))
        self.assertAlmostEqual(abs(basis.log_matrix()[0][0]), log((1 + 5 ** 0.5) / 2), places=10)

    def test_unit_count_lemma(self):
        rng = np.random.default_rng(2024)
        for m in (5, 7):
            K = make_field(m)
            basis = fundamental_units(K)
            card = exception_set(K).cardinality
            c_S = 0.271763
            for _ in range(100):
                shift = rng.normal(0.0, 0.5, size=len(K.places))
                shift[0] += max(0.0, -shift.sum())
                for X in (0.2, 0.5, 1.0):
                    count = count_units_with_shift(K, shift, X, basis=basis)
                    self.assertEqual(count % K.omega, 0)
                    self.assertLessEqual(count, float(unit_count_bound(X, c_S, K.unit_rank, card)))

    def test_zero_shift_counts_torsion(self):
        K = make_field(5)
        self.assertEqual(count_units_with_shift(K, [0.0, 0.0], 0.2), 10)
        # phi and its inverse have h = 0.2406
        self.assertEqual(count_units_with_shift(K, [0.0, 0.0], 0.25), 30)


@override_settings(CACHES=LOCAL_CACHES)
class IdealTests(SimpleTestCase):
    def test_gaussian_primes(self):
        K = make_field(4)
        primes = prime_ideals_up_to(K, 13)
        self.assertEqual([q.norm for q in primes], [2, 5, 5, 9, 13, 13])
        for q in primes:
            self.assertEqual(norm(q.generator), q.norm)

    def test_splitting_degrees(self):
        K = make_field(16)
        primes = prime_ideals_up_to(K, 100, with_generators=False)
        self.assertEqual(sum(1 for q in primes if q.p == 17), 8)
        self.assertEqual([q.residue_degree for q in primes if q.p == 7], [2, 2, 2, 2])
        self.assertEqual([q.ramification for q in primes if q.p == 2], [8])

    def test_integral_ideal_counts(self):
        # ideals of norm <= 10 in Z[i]: 1, 2, 4, 5, 5, 8, 9, 10, 10
        norms = [a.norm for a in integral_ideals_up_to(make_field(4), 10)]
        self.assertEqual(norms, [1, 2, 4, 5, 5, 8, 9, 10, 10])


@override_settings(CACHES=LOCAL_CACHES)
class EnumerationTests(SimpleTestCase):
    def test_rationals_oracle(self):
        K = make_field(1)
        candidates = [K.rational(Fraction(p, q)) for p in range(-3, 4) for q in range(1, 4)]
        for X in (0.3, 0.6, 0.7):
            listed = {orbit_key(r.element) for r in enumerate_bounded_height(K, X)}
            self.assertEqual(listed, brute_force_orbits(K, candidates, X))
        self.assertEqual(enumerate_bounded_height(K, 0.6), [])
        self.assertEqual(len(enumerate_bounded_height(K, 0.7)), 2)

    def test_gaussian_oracle(self):
        K = make_field(4)
        candidates = [
            K.element([Fraction(a, c), Fraction(b, c)])
            for a in range(-4, 5) for b in range(-4, 5) for c in range(1, 5)
        ]
        for X in (0.35, 0.5, 0.7):
            listed = {orbit_key(r.element) for r in enumerate_bounded_height(K, X)}
            self.assertEqual(listed, brute_force_orbits(K, candidates, X))

    def test_gaussian_low_height(self):
        K = make_field(4)
        records = enumerate_bounded_height(K, 0.35)
        keys = {orbit_key(r.element) for r in records}
        self.assertEqual(keys, {orbit_key(1 + K.zeta()), orbit_key((1 + K.zeta()).inverse())})
        for r in records:
            self.assertAlmostEqual(float(r.profile.h_weil), log(2) / 2, places=12)

    def test_sorted_and_serialisable(self):
        records = enumerate_bounded_height(make_field(5), 0.6)
        heights = [r.profile.h_weil for r in records]
        self.assertEqual(heights, sorted(heights))
        self.assertEqual(set(records[0].to_json()), {"coeffs", "h_inf", "h_weil", "D", "norm"})

    def test_units_outside_exceptions_are_tall(self):
        K = make_field(5)
        exceptional = {orbit_key(u) for u in exception_set(K).members}
        exceptional |= {orbit_key(u.inverse()) for u in exception_set(K).members}
        for r in enumerate_bounded_height(K, 0.6):
            if r.profile.norm_abs == 1 and r.profile.denominator_index == 1:
                if orbit_key(r.element) not in exceptional:
                    self.assertGreater(r.profile.h_weil_lower, mp.mpf("0.271763"))

    def test_unsupported(self):
        self.assertFalse(is_enumerable(make_field(23)))
        self.assertTrue(is_enumerable(make_field(10)))
        with self.assertRaises(EnumerationUnavailable):
            enumerate_bounded_height(make_field(23), 0.5)
        with self.assertRaises(EnumerationUnavailable):
            enumerate_bounded_height(make_field(8), 0)
        with self.assertRaises(EnumerationUnavailable):
            enumerate_bounded_height(make_field(8), 2.5)

    @tag("slow")
    def test_conductor_16(self):
        K = make_field(16)
        records = enumerate_bounded_height(K, 0.6)
        keys = {orbit_key(r.element) for r in records}
        self.assertIn(orbit_key(1 - K.zeta()), keys)
        self.assertIn(orbit_key((1 - K.zeta()).inverse()), keys)
        self.assertTrue(all(r.profile.h_weil_lower <= 0.6 for r in records))
        self.assertEqual(len(keys), len(records))


@override_settings(CACHES=LOCAL_CACHES)
class ExceptionSetTests(SimpleTestCase):
    def test_sextic_factors(self):
        self.assertEqual(sorted(f.degree() for f in verify_sextic()), [3, 3])
        self.assertIn(1, [f.degree() for f in irreducible_exceptions()])

    def test_rationals(self):
        S = exception_set(make_field(1))
        self.assertEqual(S.cardinality, 2)

    def test_conductor_5(self):
        K = make_field(5)
        S = exception_set(K)
        self.assertEqual(S.cardinality, 30)
        for beta in S.values:
            self.assertEqual(beta * beta - 3 * beta + 1, K.zero())

    def test_conductor_16(self):
        self.assertEqual(exception_set(make_field(16)).cardinality, 16)

    def test_subgroups_needing_four_generators(self):
        # (Z/120)^x is C2 x C2 x C2 x C4
        residues = [a for a in range(1, 120) if gcd(a, 120) == 1]
        self.assertEqual(_subgroups(residues, 120, 32), [frozenset(residues)])
        self.assertEqual(len(_subgroups(residues, 120, 16)), 15)
        self.assertEqual(len(_subgroups(residues, 120, 2)), 15)

    def test_closed_under_inversion(self):
        K = make_field(7)
        S = exception_set(K)
        keys = {orbit_key(u) for u in S.members}
        self.assertEqual(keys, {orbit_key(u.inverse()) for u in S.members})
        self.assertLessEqual(S.cardinality, 17 * K.omega)
        for u in S.members:
            self.assertTrue(u.is_integral())


@override_settings(CACHES=LOCAL_CACHES)
class SetupConstantsTests(SimpleTestCase):
    def test_uniform_cyclotomic(self):
        c, c_o, c_S, card, mode = setup_constants(make_field(16), "uniform_cyclotomic")
        self.assertEqual((float(c), float(c_o), float(c_S), card), (0.155, 0.2406, 0.271763, 16))

    def test_voutier(self):
        self.assertAlmostEqual(float(voutier_constant(8)), 0.0013637, delta=1e-5)
        constants = setup_constants(make_field(16), "voutier_generic")
        self.assertEqual(constants.c, constants.c_S)
        self.assertEqual(constants.card_S, 16)
        with self.assertRaises(InvalidConfiguration):
            setup_constants(make_field(4), "voutier_generic")

    def test_user(self):
        constants = setup_constants(make_field(8), "user", c=0.1, c_o=0.1, c_S=0.1)
        self.assertEqual((float(constants.c), float(constants.c_o), float(constants.c_S)), (0.1, 0.1, 0.1))
        self.assertEqual(constants.card_S, 8)
        with self.assertRaises(InvalidConfiguration):
            setup_constants(make_field(8), "user", c=0.2, c_o=0.1, c_S=0.3)
        with self.assertRaises(InvalidConfiguration):
            setup_constants(make_field(8), "user", c=0.1, c_o=0.1, c_S=0.1, card_S=4)
