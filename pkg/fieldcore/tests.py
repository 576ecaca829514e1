from fractions import Fraction

from django.conf import settings
from django.test import SimpleTestCase, override_settings
from mpmath import mp

from fieldcore.cyclotomic import (
    denominator_index, embeddings, field_arith, is_root_of_unity, make_field, norm,
    place_moduli, trace,
)
from utils.exceptions import FieldMismatch, InvalidArgument, ZeroDivisorError
from utils.intervals import lower, upper, width, working_precision

GOLDEN = (1 + mp.sqrt(5)) / 2


class MakeFieldTests(SimpleTestCase):
    def test_conductor_16(self):
        K = make_field(16)
        self.assertEqual(K.degree, 8)
        self.assertEqual(K.signature, (0, 4))
        self.assertEqual(K.omega, 16)
        self.assertEqual(K.unit_rank, 3)
        self.assertEqual(len(K.embedding_roots), 8)

    def test_rationals(self):
        K = make_field(1)
        self.assertEqual((K.degree, K.signature, K.omega, K.unit_rank), (1, (1, 0), 2, 0))
        K2 = make_field(2)
        self.assertEqual((K2.degree, K2.omega, K2.unit_rank), (1, 2, 0))
        self.assertEqual(K2.zeta(), K2.rational(-1))

    def test_conductor_5(self):
        K = make_field(5)
        self.assertEqual((K.degree, K.omega, K.unit_rank), (4, 10, 1))
        self.assertEqual(K.minimal_polynomial, (1, 1, 1, 1, 1))

    def test_odd_conductor_counts_minus_one(self):
        self.assertEqual(make_field(15).omega, 30)
        self.assertEqual(make_field(12).omega, 12)

    def test_rejects_zero(self):
        with self.assertRaises(InvalidArgument):
            make_field(0)

    def test_trace_form_of_conductor_8_is_scalar(self):
        self.assertEqual(make_field(8).trace_form(), [[4 * int(i == j) for j in range(4)] for i in range(4)])


class ArithmeticTests(SimpleTestCase):
    def test_root_of_unity_relation(self):
        K = make_field(5)
        self.assertEqual(K.zeta() * K.zeta(4), K.one())

    def test_add(self):
        K = make_field(7)
        z = K.zeta()
        self.assertEqual(field_arith(1 + z, 1 - z, "add"), K.rational(2))

    def test_gaussian_division(self):
        K = make_field(4)
        i = K.zeta()
        quotient = field_arith(1 + i, 1 - i, "div")
        self.assertEqual(quotient, i)
        self.assertEqual(quotient * (1 - i), 1 + i)

    def test_division_by_zero(self):
        K = make_field(8)
        with self.assertRaises(ZeroDivisorError):
            field_arith(K.one(), K.zero(), "div")

    def test_mixed_fields(self):
        with self.assertRaises(FieldMismatch):
            make_field(5).one() + make_field(7).one()

    def test_inverse_round_trip(self):
        K = make_field(16)
        alpha = K.element([3, -1, 0, 2, 0, 0, 1, Fraction(1, 3)])
        self.assertEqual(alpha * alpha.inverse(), K.one())

    def test_negative_power(self):
        K = make_field(12)
        z = K.zeta()
        self.assertEqual(z ** -1, K.zeta(11))
        self.assertEqual(z ** 12, K.one())

    def test_conjugate(self):
        K = make_field(8)
        self.assertEqual(K.zeta().conjugate(), K.zeta(7))
        self.assertEqual(trace(K.zeta() + K.zeta().conjugate()), 0)
        self.assertEqual(trace(K.one()), 4)


class EmbeddingTests(SimpleTestCase):
    def test_one(self):
        for value in embeddings(make_field(9).one()):
            self.assertLess(abs(value - 1), mp.mpf(10) ** -30)

    def test_zeta_8(self):
        K = make_field(8)
        values = embeddings(K.zeta())
        self.assertEqual(len(values), 4)
        for value in values:
            self.assertLess(abs(abs(value) - 1), mp.mpf(10) ** -30)
            self.assertLess(abs(value ** 4 + 1), mp.mpf(10) ** -30)
        conjugates = {complex(v.real, -v.imag) for v in values}
        self.assertEqual({complex(round(c.real, 12), round(c.imag, 12)) for c in conjugates},
                         {complex(round(float(v.real), 12), round(float(v.imag), 12)) for v in values})

    def test_golden_ratio(self):
        K = make_field(5)
        phi = K.element([0, 0, -1, -1])
        moduli = sorted(abs(v) for v in embeddings(phi))
        tol = mp.mpf(10) ** -30
        self.assertLess(abs(moduli[0] - 1 / GOLDEN), tol)
        self.assertLess(abs(moduli[1] - 1 / GOLDEN), tol)
        self.assertLess(abs(moduli[2] - GOLDEN), tol)
        self.assertLess(abs(moduli[3] - GOLDEN), tol)

    def test_embeddings_commute_with_arithmetic(self):
        K = make_field(16)
        a = K.element([1, 2, 0, -1, 0, Fraction(1, 2), 0, 3])
        b = K.element([0, -1, 4, 0, 1, 0, 0, 1])
        for x, y, z in zip(embeddings(a), embeddings(b), embeddings(a * b)):
            self.assertLess(abs(x * y - z), mp.mpf(10) ** -25)
        for x, y, z in zip(embeddings(a), embeddings(b), embeddings(a / b)):
            self.assertLess(abs(x / y - z), mp.mpf(10) ** -25)

    def test_place_moduli_enclose_values(self):
        K = make_field(5)
        phi = K.element([0, 0, -1, -1])
        moduli = place_moduli(phi)
        self.assertEqual(len(moduli), 2)
        self.assertTrue(any(lower(v) <= GOLDEN <= upper(v) for v in moduli))

    def test_place_moduli_follow_embedding_tolerance(self):
        phi = make_field(5).element([0, 0, -1, -1])
        for tolerance in (1e-30, 1e-80):
            with override_settings(TOOLKIT={**settings.TOOLKIT, "EMBEDDING_TOLERANCE": tolerance}):
                with working_precision(dps=120):
                    for v in place_moduli(phi):
                        self.assertLessEqual(width(v), 3 * mp.mpf(tolerance) * upper(v))

    def test_nonpositive_embedding_tolerance(self):
        with override_settings(TOOLKIT={**settings.TOOLKIT, "EMBEDDING_TOLERANCE": 0}):
            with self.assertRaises(InvalidArgument):
                place_moduli(make_field(5).zeta())


class NormTests(SimpleTestCase):
    def test_two(self):
        self.assertEqual(norm(make_field(16).rational(2)), 256)

    def test_one_plus_i(self):
        K = make_field(4)
        self.assertEqual(norm(1 + K.zeta()), 2)

    def test_one_minus_zeta_5(self):
        K = make_field(5)
        self.assertEqual(norm(1 - K.zeta()), 5)

    def test_rational_norm(self):
        K = make_field(7)
        self.assertEqual(norm(K.rational(Fraction(2, 3))), Fraction(2 ** 6, 3 ** 6))

    def test_matches_product_of_embeddings(self):
        K = make_field(15)
        alpha = K.element([2, -1, 0, 3, 1, 0, Fraction(-1, 2), 1])
        product = mp.mpf(1)
        for value in embeddings(alpha):
            product *= abs(value)
        exact = norm(alpha)
        relative = abs(product - mp.mpf(exact.numerator) / exact.denominator) / product
        self.assertLess(relative, mp.mpf(10) ** -20)

    def test_zero(self):
        with self.assertRaises(ZeroDivisorError):
            norm(make_field(4).zero())


class DenominatorIndexTests(SimpleTestCase):
    def test_integral(self):
        K = make_field(16)
        self.assertEqual(denominator_index(K.element([1, 2, 3, 0, 0, 0, 0, -5])), 1)

    def test_half_in_rationals(self):
        self.assertEqual(denominator_index(make_field(1).rational(Fraction(1, 2))), 2)

    def test_zeta_16_over_two(self):
        K = make_field(16)
        self.assertEqual(denominator_index(K.zeta() / 2), 256)

    def test_inverse_of_gaussian_prime(self):
        K = make_field(4)
        self.assertEqual(denominator_index((1 + K.zeta()).inverse()), 2)

    def test_unit_quotient_is_integral(self):
        K = make_field(5)
        z = K.zeta()
        self.assertEqual(denominator_index((1 - z ** 2) / (1 - z)), 1)

    def test_kernel_annihilates(self):
        K = make_field(8)
        alpha = K.element([Fraction(1, 3), Fraction(2, 9), 0, 1])
        index = denominator_index(alpha)
        # 9 * alpha is integral, so the index divides 9^4
        self.assertEqual(9 ** 4 % index, 0)
        self.assertTrue((alpha * 9).is_integral())


class RootOfUnityTests(SimpleTestCase):
    def test_powers_of_zeta(self):
        K = make_field(16)
        self.assertTrue(is_root_of_unity(K.zeta(3)))
        self.assertTrue(is_root_of_unity(K.rational(-1)))
        self.assertFalse(is_root_of_unity(1 + K.zeta()))

    def test_odd_conductor_includes_sign(self):
        K = make_field(5)
        self.assertTrue(is_root_of_unity(-K.zeta(2)))
        self.assertFalse(is_root_of_unity(K.element([0, 0, -1, -1])))
