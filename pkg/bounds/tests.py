import io
from fractions import Fraction

import numpy as np
from django.test import SimpleTestCase, override_settings, tag
from mpmath import iv, mp

from bounds.constants import limiting_constants, t0_and_constants
from bounds.engine import (
    BoundReport,
    bound_params,
    eta_asymptotic,
    eta_explicit,
    explicit_sum,
    profile_term,
    second_moment_enclosure,
)
from bounds.figure import MISSING, figure_data, write_figure_csv
from bounds.volume import monte_carlo_volume_ratio, unit_count_bound, volume_ratio_bound
from fieldcore.cyclotomic import is_root_of_unity, make_field
from heights.enumeration import enumerate_bounded_height
from heights.profiles import height_profile
from utils.exceptions import InvalidArgument, InvalidConfiguration, RankBelowThreshold
from utils.intervals import lower, upper

LOCAL_CACHES = {
    "default": {"BACKEND": "django.core.cache.backends.locmem.LocMemCache"},
    "enumeration": {"BACKEND": "django.core.cache.backends.locmem.LocMemCache", "LOCATION": "bounds-tests"},
}


def random_elements(field, count, seed):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        alpha = field.element([int(c) for c in rng.integers(-2, 3, field.degree)])
        if alpha and not is_root_of_unity(alpha):
            out.append(alpha)
    return out


def gaussian_coprime(a, b):
    while b:
        q = a / b
        q = complex(round(q.real), round(q.imag))
        a, b = b, a - q * b
    return round(abs(a) ** 2) == 1


def first_form(h, N, t):
    """((e^2h + e^-2h N) / 2)^-t, the degree-two volume bound."""
    return ((mp.exp(2 * h) + mp.exp(-2 * h) * N) / 2) ** (-t)


class VolumeRatioTests(SimpleTestCase):
    def test_trivial_element(self):
        for k in (None, 2, 4):
            self.assertEqual(volume_ratio_bound(0, 1, 8, 32, k), 1)

    def test_first_form(self):
        h = mp.mpf("0.2406")
        with mp.workdps(40):
            expected = mp.cosh(2 * h) ** -128
        self.assertAlmostEqual(float(expected) * 1e7, 6.2, delta=0.15)
        for k in (None, 2, 4, 16):
            value = volume_ratio_bound(h, 1, 8, 32, k)
            self.assertLess(abs(value / expected - 1), mp.mpf("1e-15"))

    def test_second_form_for_large_norm(self):
        first = volume_ratio_bound(0, 16, 8, 32)
        second = volume_ratio_bound(0, 16, 8, 32, k=2)
        self.assertLess(second, first)
        self.assertLess(abs(second / (mp.mpf(16) ** -16 * mp.mpf("1.5") ** -128) - 1), mp.mpf("1e-15"))

    def test_second_form_needs_norm_at_least_one(self):
        h, N = mp.mpf("0.5"), Fraction(1, 2)
        self.assertEqual(volume_ratio_bound(h, N, 4, 8, k=2), volume_ratio_bound(h, N, 4, 8))

    def test_never_exceeds_one(self):
        self.assertLessEqual(volume_ratio_bound(0, Fraction(1, 1000), 4, 1), 1)

    def test_invalid_arguments(self):
        with self.assertRaises(InvalidArgument):
            volume_ratio_bound(0, 1, 8, 32, k=1.5)
        with self.assertRaises(InvalidArgument):
            volume_ratio_bound(0, 1, 8, 0)

    def test_monte_carlo(self):
        K = make_field(8)
        rng = np.random.default_rng(2024)
        samples = 20000
        for alpha in random_elements(K, 5, seed=11):
            profile = height_profile(alpha)
            estimate, error = monte_carlo_volume_ratio(alpha, 8, samples, rng)
            bound = volume_ratio_bound(profile.h_inf, profile.norm_abs, K.degree, 8, 2)
            self.assertLessEqual(estimate, float(bound) + 3 * error + 1 / samples)

    @tag("slow")
    def test_monte_carlo_million(self):
        K = make_field(8)
        rng = np.random.default_rng(99)
        samples = 10 ** 6
        for alpha in random_elements(K, 20, seed=5):
            profile = height_profile(alpha)
            for t, k in ((8, 2), (16, 4)):
                estimate, error = monte_carlo_volume_ratio(alpha, t, samples, rng)
                bound = volume_ratio_bound(profile.h_inf, profile.norm_abs, K.degree, t, k)
                self.assertLessEqual(estimate, float(bound) + 3 * error + 1 / samples)


class UnitCountBoundTests(SimpleTestCase):
    def test_zero_height(self):
        self.assertAlmostEqual(float(unit_count_bound(0, mp.mpf("0.271763"), 3, 16)), 16, places=20)

    def test_ratio_two(self):
        c_S = mp.mpf("0.271763")
        self.assertAlmostEqual(float(unit_count_bound(c_S / 2, c_S, 1, 30)), 60, places=10)

    def test_conductor_16_value(self):
        value = unit_count_bound(mp.mpf("0.5"), mp.mpf("0.271763"), 3, 16)
        self.assertAlmostEqual(float(value), 1640.0, delta=1.0)

    def test_rejects_nonpositive_constant(self):
        with self.assertRaises(InvalidArgument):
            unit_count_bound(1, 0, 2, 4)


@override_settings(CACHES=LOCAL_CACHES)
class DecayConstantTests(SimpleTestCase):
    def test_limiting_constants(self):
        report = limiting_constants()
        regenerated = report["regenerated"]
        self.assertLessEqual(upper(regenerated["t0"]), 11)
        self.assertGreaterEqual(lower(regenerated["epsilon"]), mp.mpf(1) / 27)
        self.assertLessEqual(upper(regenerated["epsilon"]), mp.mpf(1) / 25)
        self.assertLess(upper(report["coset_threshold"]), mp.mpf("10.99"))
        self.assertEqual(set(report["discrepancies"]), {"epsilon", "additive", "rate_denominator"})

    def test_tail_mode(self):
        params = bound_params(make_field(16), 32, h0=mp.mpf("0.6"))
        decay = t0_and_constants(params, "tail")
        with mp.workdps(50):
            expected = mp.ln(mp.cosh(3 * params.h0 / 2)) / 2
        self.assertLess(abs(upper(decay.epsilon) - expected), mp.mpf("1e-40"))
        self.assertEqual(upper(decay.t0), 4)
        self.assertGreater(lower(decay.C), 1)

    def test_coset_with_equal_constants(self):
        params = bound_params(make_field(8), 1000, "user", c="0.3", c_o="0.3", c_S="0.3")
        decay = t0_and_constants(params, "coset", k=2)
        c = mp.mpf("0.3")
        with mp.workdps(50):
            expected = mp.ln(1 + 2 + mp.mpf(1) / 8) / mp.ln(mp.cosh(c)) / 2
        self.assertLess(abs(upper(decay.t0) - expected), mp.mpf("1e-30"))
        self.assertTrue(mp.isfinite(upper(decay.t0)))
        self.assertGreater(lower(decay.t0), 0)

    def test_ideal_sum_doubles(self):
        params = bound_params(make_field(8), 40)
        coset = t0_and_constants(params, "coset", k=4)
        ideal = t0_and_constants(params, "ideal_sum", k=4)
        self.assertGreaterEqual(lower(ideal.t0), 6)
        self.assertGreater(lower(ideal.C), upper(coset.C))

    def test_rank_below_threshold(self):
        params = bound_params(make_field(16), 8)
        with self.assertRaises(RankBelowThreshold):
            t0_and_constants(params, "ideal_sum", k=mp.mpf("10.99"))

    def test_unknown_mode(self):
        params = bound_params(make_field(8), 20)
        with self.assertRaises(InvalidConfiguration):
            t0_and_constants(params, "other", k=4)


@override_settings(CACHES=LOCAL_CACHES)
class AsymptoticBoundTests(SimpleTestCase):
    def test_theorem_rank(self):
        report = eta_asymptotic(bound_params(make_field(8), 11))
        self.assertTrue(mp.isfinite(report.eta_upper))
        self.assertGreater(report.eta_upper, 0)
        self.assertEqual(report.mode, "asymptotic")

    def test_small_rank_fails(self):
        with self.assertRaises(RankBelowThreshold):
            eta_asymptotic(bound_params(make_field(16), 5))

    def test_decreasing_in_rank(self):
        K = make_field(8)
        values = [eta_asymptotic(bound_params(K, t)).eta_upper for t in (12, 16, 24, 32)]
        for a, b in zip(values, values[1:]):
            self.assertGreater(a, b)

    def test_only_small_k(self):
        with self.assertRaises(RankBelowThreshold):
            eta_asymptotic(bound_params(make_field(8), 40, k_grid=[2]))


@override_settings(CACHES=LOCAL_CACHES)
class ExplicitBoundTests(SimpleTestCase):
    def test_gaussian_brute_force_sum(self):
        K = make_field(4)
        t = 12
        records = enumerate_bounded_height(K, 1.0)
        gaussians = [
            complex(a, b) for a in range(-3, 4) for b in range(-3, 4) if 0 < a * a + b * b <= 7
        ]
        total, pairs = mp.zero, 0
        with mp.workdps(40):
            for g in gaussians:
                for h in gaussians:
                    if abs(g) == 1 and abs(h) == 1:
                        continue
                    if not gaussian_coprime(g, h):
                        continue
                    pairs += 1
                    ng, nh = round(abs(g) ** 2), round(abs(h) ** 2)
                    own = mp.mpf(nh) ** -t * first_form(mp.ln(max(1, mp.sqrt(ng) / mp.sqrt(nh))), mp.mpf(ng) / nh, t)
                    inv = mp.mpf(ng) ** -t * first_form(mp.ln(max(1, mp.sqrt(nh) / mp.sqrt(ng))), mp.mpf(nh) / ng, t)
                    total += min(own, inv)
            # four unit multiples of the pair and four roots of unity per orbit
            total /= 16
        self.assertEqual(pairs, 16 * len(records))
        computed = explicit_sum(records, K.degree, t)
        self.assertLess(abs(upper(computed) / total - 1), mp.mpf("1e-15"))

    def test_symmetric_sum(self):
        K = make_field(4)
        records = enumerate_bounded_height(K, 0.7)
        with mp.workdps(50):
            own = mp.fsum(upper(profile_term(r.profile, 2, 12, 4)) for r in records)
            inverse = mp.fsum(upper(profile_term(r.profile.inverse(), 2, 12, 4)) for r in records)
            self.assertLess(abs(own / inverse - 1), mp.mpf("1e-25"))

    def test_empty_enumeration_is_tail(self):
        report = eta_explicit(bound_params(make_field(1), 12, h0=mp.mpf("0.3")))
        self.assertEqual(report.breakdown["orbit_count"], 0)
        self.assertEqual(report.eta_upper, upper(report.breakdown["tail_term"]))

    def test_explicit_below_asymptotic(self):
        K = make_field(4)
        explicit = eta_explicit(bound_params(K, 12, h0=mp.mpf("0.5")))
        asymptotic = eta_asymptotic(bound_params(K, 12))
        self.assertLessEqual(explicit.eta_upper, asymptotic.eta_upper)
        unnormalized = upper(explicit.breakdown["explicit_sum_unnormalized"])
        self.assertLess(abs(unnormalized / (4 * upper(explicit.breakdown["explicit_sum"])) - 1), mp.mpf("1e-12"))

    def test_decreasing_in_rank(self):
        K = make_field(8)
        values = [eta_explicit(bound_params(K, t, h0=mp.mpf("0.4"))).eta_upper for t in (15, 20, 25, 32)]
        for a, b in zip(values, values[1:]):
            self.assertGreater(a, b)

    def test_height_cutoff_range(self):
        K = make_field(8)
        for h0 in (None, mp.mpf("0.1"), mp.mpf("2.5")):
            with self.assertRaises(InvalidConfiguration):
                eta_explicit(bound_params(K, 20, h0=h0))

    def test_serialised_breakdown(self):
        payload = eta_explicit(bound_params(make_field(4), 12, h0=mp.mpf("0.5"))).to_json()
        self.assertEqual(set(payload), {"m", "t", "mode", "k", "eta_upper", "breakdown"})
        self.assertEqual(
            set(payload["breakdown"]),
            {"explicit_sum", "explicit_sum_unnormalized", "tail_term", "zeta_ratio", "orbit_count", "card_S", "constants"},
        )

    @tag("slow")
    def test_conductor_16_rank_32(self):
        K = make_field(16)
        report = eta_explicit(bound_params(K, 32, h0=mp.mpf("0.6")))
        unnormalized = upper(report.breakdown["explicit_sum_unnormalized"])
        self.assertLessEqual(report.eta_upper, mp.mpf("2.4e-11"))
        self.assertLessEqual(unnormalized, 4 * mp.mpf("1.195e-11"))
        self.assertGreaterEqual(unnormalized, mp.mpf("1.195e-11") / 4)
        self.assertLessEqual(upper(report.breakdown["tail_term"]), mp.mpf("1e-13"))
        self.assertLessEqual(report.eta_upper, eta_asymptotic(bound_params(K, 32)).eta_upper)


class SecondMomentTests(SimpleTestCase):
    def test_zero_eta(self):
        K = make_field(8)
        report = BoundReport(K, 20, "explicit", iv.mpf(0), 4)
        value = second_moment_enclosure(report, 3)
        self.assertAlmostEqual(float(lower(value)), 9 + 24, places=12)
        self.assertAlmostEqual(float(upper(value)), 9 + 24, places=12)

    def test_poisson_shape(self):
        K = make_field(8)
        report = BoundReport(K, 20, "explicit", iv.mpf(0), 4)
        lam = mp.mpf("1.5")
        value = second_moment_enclosure(report, K.omega * lam)
        self.assertLess(abs(lower(value) - K.omega ** 2 * (lam ** 2 + lam)), mp.mpf("1e-30"))

    def test_width(self):
        K = make_field(16)
        report = BoundReport(K, 32, "explicit", iv.mpf("1.2e-11"), 4)
        value = second_moment_enclosure(report, 16)
        self.assertLessEqual(upper(value) - lower(value), 16 * 16 * 16 * mp.mpf("1.2e-11") * (1 + mp.mpf("1e-12")))


@override_settings(CACHES=LOCAL_CACHES)
class FigureTests(SimpleTestCase):
    def test_small_grid(self):
        frame = figure_data(conductors=[8], ranks=[15, 16], weil_cutoff=20)
        self.assertEqual(list(frame.columns), ["m", "t", "ln_eta_upper"])
        values = [mp.mpf(v) for v in frame["ln_eta_upper"]]
        self.assertTrue(all(v < 0 for v in values))
        self.assertGreater(values[0], values[1])

    def test_missing_cells(self):
        frame = figure_data(conductors=[4], ranks=[3, 12], weil_cutoff=5)
        self.assertEqual(frame["ln_eta_upper"].iloc[0], MISSING)
        self.assertNotEqual(frame["ln_eta_upper"].iloc[1], MISSING)

    def test_csv_header(self):
        buffer = io.StringIO()
        write_figure_csv(figure_data(conductors=[4], ranks=[12], weil_cutoff=5), buffer)
        self.assertEqual(buffer.getvalue().splitlines()[0], "m,t,ln_eta_upper")

    @tag("slow")
    def test_full_grid(self):
        frame = figure_data()
        self.assertEqual(len(frame), 108)
        self.assertNotIn(MISSING, set(frame["ln_eta_upper"]))
        for _, column in frame.groupby("m"):
            values = [mp.mpf(v) for v in column.sort_values("t")["ln_eta_upper"]]
            for a, b in zip(values, values[1:]):
                self.assertGreater(a, b)
        cell = frame[(frame.m == 16) & (frame.t == 32)]["ln_eta_upper"].iloc[0]
        self.assertLessEqual(mp.mpf(cell), mp.ln(4 * mp.mpf("1.195e-11")))
