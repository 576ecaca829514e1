from django.test import SimpleTestCase
from mpmath import mp

from fieldcore.cyclotomic import make_field
from svpredict.predictions import (
    default_epsilon,
    gamma_n,
    haar_prediction,
    module_prediction,
    poisson_moment,
    poisson_moment_series,
    sv_bracket,
    unit_ball_volume,
)
from utils.exceptions import InvalidArgument


class GammaTests(SimpleTestCase):
    def test_small_dimensions(self):
        self.assertAlmostEqual(float(gamma_n(1)), 0.5, places=14)
        self.assertAlmostEqual(float(gamma_n(2)), float(1 / mp.sqrt(mp.pi)), places=14)

    def test_stirling_regime(self):
        value = gamma_n(256)
        self.assertAlmostEqual(float(value), 3.92, delta=0.01)
        approx = mp.sqrt(256 / (2 * mp.pi * mp.e))
        self.assertLess(abs(value / approx - 1), mp.mpf("0.02"))

    def test_unit_volume(self):
        for n in (1, 2, 3, 10, 64, 255, 512):
            self.assertLess(abs(gamma_n(n) ** n * unit_ball_volume(n) - 1), mp.mpf("1e-10"))

    def test_rejects_zero(self):
        with self.assertRaises(InvalidArgument):
            gamma_n(0)


class PoissonMomentTests(SimpleTestCase):
    def test_low_orders(self):
        self.assertEqual(poisson_moment(0, 3), 1)
        self.assertEqual(poisson_moment(1, mp.mpf("2.5")), mp.mpf("2.5"))
        self.assertEqual(poisson_moment(2, 3), 12)

    def test_third_moment(self):
        self.assertEqual(poisson_moment(3, 2), 22)
        self.assertLess(abs(poisson_moment_series(3, 2) - 22), mp.mpf("1e-12"))

    def test_closed_form_matches_series(self):
        with mp.workdps(30):
            for k in range(7):
                for lam in (0, mp.mpf("0.5"), 1, 4, 11, 20):
                    closed = poisson_moment(k, lam)
                    series = poisson_moment_series(k, lam, terms=150)
                    self.assertLess(abs(closed - series), mp.mpf("1e-12") * max(1, closed))


class BracketTests(SimpleTestCase):
    def test_conductor_16_floor(self):
        K = make_field(16)
        bracket = sv_bracket(K, 32, 16 * mp.mpf("1.2e-11"), default_epsilon(256))
        self.assertGreaterEqual(bracket.probability_floor, mp.mpf("0.639"))
        self.assertLessEqual(bracket.probability_floor, mp.mpf("0.640"))

    def test_zero_error(self):
        K = make_field(8)
        bracket = sv_bracket(K, 4, 0, mp.mpf("0.5"))
        self.assertEqual(bracket.probability_floor, 0)
        self.assertEqual((bracket.volume_low, bracket.volume_high), (4, 16))

    def test_clipped_floor(self):
        bracket = sv_bracket(make_field(16), 32, 10, mp.mpf("0.9"))
        self.assertEqual(bracket.probability_floor, 0)

    def test_lower_length(self):
        K = make_field(16)
        epsilon = default_epsilon(256)
        bracket = sv_bracket(K, 32, 0, epsilon)
        expected = gamma_n(256) * (16 * epsilon) ** (mp.one / 256)
        self.assertLess(abs(bracket.lambda_low / expected - 1), mp.mpf("1e-12"))
        self.assertLess(bracket.lambda_low, bracket.lambda_high)

    def test_floor_monotone(self):
        K = make_field(12)
        floors = [sv_bracket(K, 10, err, mp.mpf("0.1")).probability_floor for err in (0, mp.mpf("0.1"), 1)]
        self.assertGreater(floors[0], floors[1])
        self.assertGreater(floors[1], floors[2])
        floors = [sv_bracket(K, 10, mp.mpf("0.1"), eps).probability_floor for eps in (mp.mpf("0.05"), mp.mpf("0.1"))]
        self.assertGreater(floors[0], floors[1])

    def test_epsilon_range(self):
        for epsilon in (0, 1, mp.mpf("1.5")):
            with self.assertRaises(InvalidArgument):
                sv_bracket(make_field(8), 4, 0, epsilon)
        with self.assertRaises(InvalidArgument):
            sv_bracket(make_field(8), 4, -1, mp.mpf("0.5"))

    def test_serialisable(self):
        payload = sv_bracket(make_field(8), 4, 0, mp.mpf("0.5")).to_json()
        self.assertEqual(payload["volume_minimum"], ["4.0000000000000000000", "16.000000000000000000"])


class PredictionTests(SimpleTestCase):
    def test_inflation(self):
        prediction = module_prediction(make_field(16), 32)
        self.assertAlmostEqual(float(prediction.inflation), 0.008156, delta=1e-5)
        self.assertAlmostEqual(float(prediction.half_width), 0.00669, delta=1e-5)
        self.assertTrue(prediction.theorem_backed)

    def test_inflation_identity(self):
        for m, t in ((5, 3), (8, 20), (16, 32)):
            K = make_field(m)
            prediction = module_prediction(K, t)
            n = K.degree * t
            with mp.workdps(50):
                expected = (mp.mpf(K.omega) / 2) ** (mp.one / n) - 1
                self.assertLess(abs(prediction.inflation - expected), mp.mpf("1e-40"))

    def test_rationals_match_haar(self):
        prediction = module_prediction(make_field(1), 20)
        self.assertEqual(prediction.inflation, 0)
        self.assertAlmostEqual(float(prediction.centre), float(haar_prediction(20).centre), places=14)
        self.assertFalse(module_prediction(make_field(8), 5).theorem_backed)

    def test_haar(self):
        prediction = haar_prediction(256)
        self.assertLess(abs(prediction.centre / (2 ** (mp.one / 256) * gamma_n(256)) - 1), mp.mpf("1e-14"))
        self.assertGreater(haar_prediction(16).half_width, 0)
        self.assertGreater(haar_prediction(16).half_width, haar_prediction(4096).half_width)
        self.assertLess(prediction.lambda_low, prediction.centre)

    def test_payload(self):
        payload = module_prediction(make_field(16), 32).to_json()
        self.assertEqual(payload["log_base"], "e")
        self.assertIn("half_width_roots", payload)
