from django.test import SimpleTestCase
from mpmath import mp

from fieldcore.cyclotomic import make_field
from utils.exceptions import PrecisionFailure
from utils.intervals import contains, lower, upper, width
from zeta.characters import characters, discrete_logs, unit_group_generators
from zeta.dedekind import dedekind_zeta, local_data, zeta_ratio, zeta_square_ratio


class CharacterTests(SimpleTestCase):
    def test_group_decomposition(self):
        for m in (1, 2, 8, 15, 16, 21, 60):
            orders = [order for _, order in unit_group_generators(m)]
            size = 1
            for order in orders:
                size *= order
            self.assertEqual(size, len(discrete_logs(m)))

    def test_characters_are_multiplicative(self):
        chars = characters(12)
        self.assertEqual(len(chars), 4)
        for chi in chars:
            for a in (1, 5, 7, 11):
                for b in (1, 5, 7, 11):
                    self.assertLess(abs(chi[a] * chi[b] - chi[a * b % 12]), mp.mpf(10) ** -20)

    def test_orthogonality(self):
        chars = characters(7)
        for chi in chars[1:]:
            self.assertLess(abs(sum(chi)), mp.mpf(10) ** -20)


class LocalDataTests(SimpleTestCase):
    def test_degrees_multiply_to_field_degree(self):
        for m in (5, 8, 12, 15, 16, 84):
            d = make_field(m).degree
            for p in (2, 3, 5, 7, 11, 13, 17, 97):
                e, f, g = local_data(m, p)
                self.assertEqual(e * f * g, d)

    def test_splitting_in_conductor_16(self):
        self.assertEqual(local_data(16, 17), (1, 1, 8))
        self.assertEqual(local_data(16, 3), (1, 4, 2))
        self.assertEqual(local_data(16, 2), (8, 1, 1))


class DedekindZetaTests(SimpleTestCase):
    def test_riemann_zeta_two(self):
        value = dedekind_zeta(make_field(1), 2, tol=1e-10)
        self.assertTrue(contains(value.enclosure, mp.pi ** 2 / 6))
        self.assertLessEqual(width(value.enclosure), mp.mpf("1e-10"))
        self.assertEqual(value.method, "euler+lseries")

    def test_conductor_16_at_eight(self):
        value = dedekind_zeta(make_field(16), 8)
        self.assertLess(value.upper ** 2, mp.mpf("1.01"))
        self.assertEqual(value.method, "euler")

    def test_gaussian_at_two(self):
        value = dedekind_zeta(make_field(4), 2)
        expected = mp.pi ** 2 / 6 * mp.catalan
        self.assertLess(abs(value.upper - expected), mp.mpf("1e-8"))
        self.assertLess(abs(value.lower - expected), mp.mpf("1e-8"))

    def test_bounds(self):
        K = make_field(8)
        for s in (mp.mpf("1.5"), 2, 3, 6):
            value = dedekind_zeta(K, s)
            self.assertGreaterEqual(value.lower, 1)
            self.assertLessEqual(value.upper, mp.zeta(s) ** K.degree)

    def test_decreasing(self):
        K = make_field(12)
        values = [dedekind_zeta(K, s) for s in (2, 2.5, 3, 4, 8)]
        for a, b in zip(values, values[1:]):
            self.assertGreater(a.lower, b.upper)

    def test_too_close_to_pole(self):
        with self.assertRaises(PrecisionFailure):
            dedekind_zeta(make_field(5), 1.00005)

    def test_serialisable(self):
        self.assertEqual(set(dedekind_zeta(make_field(5), 3).to_json()), {"s", "lower", "upper", "prime_cutoff", "method"})


class ZetaRatioTests(SimpleTestCase):
    def test_large_rank_limit(self):
        ratio = zeta_ratio(make_field(16), 400, 4)
        self.assertGreaterEqual(lower(ratio), 1 - mp.mpf("1e-9"))
        self.assertLessEqual(upper(ratio), 1 + mp.mpf("1e-6"))

    def test_conductor_16(self):
        ratio = zeta_ratio(make_field(16), 32, 4)
        self.assertGreaterEqual(upper(ratio), 1)
        self.assertLessEqual(width(ratio), mp.mpf("1e-8"))

    def test_theorem_arguments(self):
        ratio = zeta_ratio(make_field(8), 11, mp.mpf("10.99"))
        self.assertTrue(mp.isfinite(upper(ratio)))
        self.assertGreater(lower(ratio), 0)

    def test_square_ratio(self):
        ratio = zeta_square_ratio(make_field(16), 32)
        self.assertLess(upper(ratio), mp.mpf("1.01"))
