from collections import Counter

import numpy as np
from django.conf import settings
from django.test import SimpleTestCase, override_settings, tag
from mpmath import mp
from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix

from fieldcore.cyclotomic import make_field
from latticesim.codes import Code, ResidueField, sample_code, split_prime
from latticesim.construction import (
    count_in_ball,
    lift_to_lattice,
    lll_reduce,
    ring_lattice,
    shortest_vector,
    standard_lattice,
)
from latticesim.experiment import ExperimentConfig, default_prime, run_experiment, sample_seed
from svpredict.predictions import unit_ball_volume
from utils.exceptions import DimensionTooLarge, InvalidArgument, RamifiedPrime, SampleFailure
from utils.lattice import identity

LOCAL_CACHES = {
    "default": {"BACKEND": "django.core.cache.backends.locmem.LocMemCache"},
    "enumeration": {"BACKEND": "django.core.cache.backends.locmem.LocMemCache", "LOCATION": "latticesim-tests"},
}


def integer_det(gram):
    n = len(gram)
    return DomainMatrix([[ZZ(int(v)) for v in row] for row in gram], (n, n), ZZ).det()


def lifted(m, p, t, s, seed):
    field = make_field(m)
    split = split_prime(field, p)
    code = sample_code(seed, split.q, t, s, split.residue_field())
    return lift_to_lattice(field, split, code, t)


def brute_force_norms(gram, bound=3):
    """Quadratic-form values of all nonzero coefficient vectors in [-bound, bound]^n."""
    n = len(gram)
    G = np.array(gram, dtype=np.int64)
    axis = np.arange(-bound, bound + 1)
    tail = np.stack(np.meshgrid(*([axis] * (n - 1)), indexing="ij"), axis=-1).reshape(-1, n - 1)
    values = []
    for head in axis:
        x = np.hstack([np.full((len(tail), 1), head), tail])
        norms = np.einsum("ij,jk,ik->i", x, G, x)
        values.append(norms[np.any(x != 0, axis=1)])
    return np.concatenate(values)


def count_radius(n, V):
    return (mp.mpf(V) / unit_ball_volume(n)) ** (mp.one / n)


class SplitPrimeTests(SimpleTestCase):
    def test_residue_degrees(self):
        for m, p, f, q in ((8, 17, 1, 17), (16, 3, 4, 81), (5, 2, 4, 16)):
            split = split_prime(make_field(m), p)
            self.assertEqual((split.f, split.q), (f, q))
            self.assertEqual(split.f * split.g, make_field(m).degree)
            self.assertEqual(len(split.factor), f + 1)
            self.assertEqual(split.factor[-1], 1)

    def test_conductor_two_mod_four(self):
        split = split_prime(make_field(10), 11)
        self.assertEqual(split.f, 1)

    def test_rejects_ramified_and_composite(self):
        for m, p in ((8, 2), (5, 5), (12, 3), (8, 15)):
            with self.assertRaises(RamifiedPrime):
                split_prime(make_field(m), p)

    def test_deterministic_factor(self):
        K = make_field(8)
        self.assertEqual(split_prime(K, 17).factor, split_prime(K, 17).factor)

    def test_residue_field_inverses(self):
        F = split_prime(make_field(16), 3).residue_field()
        for a in range(1, F.q):
            self.assertEqual(F.mul(a, F.inv(a)), 1)
        with self.assertRaises(ZeroDivisionError):
            F.inv(0)

    def test_default_prime(self):
        self.assertEqual(default_prime(8), 17)
        self.assertEqual(default_prime(16), 17)
        self.assertEqual(default_prime(5), 11)


class SampleCodeTests(SimpleTestCase):
    def test_lines_are_uniform(self):
        trials = 3000
        counts = Counter(sample_code(seed, 2, 2, 1).rows for seed in range(trials))
        self.assertEqual(set(counts), {((1, 0),), ((0, 1),), ((1, 1),)})
        sigma = (trials * (1 / 3) * (2 / 3)) ** 0.5
        for count in counts.values():
            self.assertLess(abs(count - trials / 3), 4 * sigma)

    def test_hyperplane_echelon(self):
        code = sample_code(11, 17, 5, 4)
        self.assertEqual(len(code.rows), 4)
        self.assertEqual(len(set(code.pivots)), 4)
        self.assertEqual(list(code.pivots), sorted(code.pivots))
        for i, pivot in enumerate(code.pivots):
            self.assertEqual(code.rows[i][pivot], 1)
            for j, row in enumerate(code.rows):
                if j != i:
                    self.assertEqual(row[pivot], 0)

    def test_replay(self):
        self.assertEqual(sample_code(7, 17, 5, 3), sample_code(7, 17, 5, 3))
        F = ResidueField(3, split_prime(make_field(16), 3).factor)
        self.assertEqual(sample_code(7, 81, 4, 2, F), sample_code(7, 81, 4, 2, F))

    def test_dimension_range(self):
        for s in (0, 5):
            with self.assertRaises(InvalidArgument):
                sample_code(1, 17, 5, s)
        with self.assertRaises(InvalidArgument):
            sample_code(1, 16, 5, 2)


class LiftTests(SimpleTestCase):
    def test_scaling_factor(self):
        basis = lifted(8, 17, 5, 3, seed=5)
        self.assertEqual(basis.n, 20)
        self.assertEqual(basis.index, 17 ** 2)
        with mp.workdps(50):
            self.assertLess(abs(basis.beta - mp.mpf(17) ** (-mp.one / 10)), mp.mpf("1e-30"))
        self.assertAlmostEqual(float(basis.beta), 0.7533, delta=1e-4)

    def test_unit_covolume(self):
        basis = lifted(8, 17, 5, 3, seed=5)
        self.assertLess(abs(basis.covolume - 1), mp.mpf("1e-30"))
        rows = lll_reduce(basis).minkowski_rows()
        self.assertAlmostEqual(abs(np.linalg.det(rows)), 1.0, delta=1e-9)

    def test_hyperplane_covolume(self):
        basis = lifted(5, 11, 3, 2, seed=2)
        self.assertEqual(basis.index, 11)
        self.assertLess(abs(basis.covolume - 1), mp.mpf("1e-30"))

    def test_closed_under_zeta(self):
        basis = lifted(8, 17, 5, 3, seed=9)
        rng = np.random.default_rng(0)
        for _ in range(3):
            vector = basis.coordinates(rng.integers(-3, 4, size=basis.n).tolist())
            self.assertTrue(basis.contains(vector))
            for k in (1, 3):
                self.assertTrue(basis.contains(basis.multiply_by_zeta(vector, k)))

    def test_membership(self):
        K = make_field(8)
        split = split_prime(K, 17)
        basis = lift_to_lattice(K, split, Code(17, 2, 1, ((1, 5),)), 2)
        self.assertTrue(basis.contains((1, 0, 0, 0, 5, 0, 0, 0)))
        self.assertTrue(basis.contains((17, 0, 0, 0, 0, 0, 0, 0)))
        self.assertFalse(basis.contains((1, 0, 0, 0, 0, 0, 0, 0)))

    def test_mismatched_code(self):
        K = make_field(8)
        with self.assertRaises(InvalidArgument):
            lift_to_lattice(K, split_prime(K, 17), Code(17, 3, 1, ((1, 0, 0),)), 2)


class ReductionTests(SimpleTestCase):
    def test_identity_unchanged(self):
        reduced = lll_reduce(standard_lattice(identity(4)))
        self.assertEqual([list(row) for row in reduced.rows], identity(4))

    def test_scrambled_identity(self):
        scrambled = [[1, 1, 0], [2, 3, 1], [1, 2, 2]]
        reduced = lll_reduce(standard_lattice(scrambled))
        self.assertEqual(reduced.gram[0][0], 1)
        self.assertEqual(integer_det(reduced.gram), 1)

    def test_gram_determinant_preserved(self):
        basis = lifted(8, 17, 5, 3, seed=1)
        self.assertEqual(integer_det(lll_reduce(basis).gram), integer_det(basis.gram))

    def test_delta_range(self):
        for delta in (0.25, 1, 1.5):
            with self.assertRaises(InvalidArgument):
                lll_reduce(standard_lattice(identity(2)), delta)


class ShortestVectorTests(SimpleTestCase):
    def test_integer_lattice(self):
        length, witness = shortest_vector(standard_lattice(identity(6)))
        self.assertLess(abs(length - 1), mp.mpf("1e-30"))
        self.assertEqual(sorted(abs(c) for c in witness), [0, 0, 0, 0, 0, 1])

    def test_ring_of_integers_of_conductor_eight(self):
        basis = ring_lattice(make_field(8))
        length, witness = shortest_vector(basis)
        self.assertLess(abs(length - 1), mp.mpf("1e-30"))
        self.assertLess(abs(basis.norm(witness) - length), mp.mpf("1e-9"))

    def test_matches_brute_force(self):
        for seed in range(3):
            basis = lll_reduce(lifted(8, 17, 2, 1, seed=seed))
            length, witness = shortest_vector(basis, reduced=True)
            norms = brute_force_norms(basis.gram)
            shortest = mp.sqrt(int(norms.min())) * basis.scale
            self.assertLess(abs(length - shortest), mp.mpf("1e-9"))
            self.assertLess(abs(basis.norm(witness) - length), mp.mpf("1e-9"))
            V = 16
            target = ((count_radius(basis.n, V)) / basis.scale) ** 2
            self.assertEqual(count_in_ball(basis, V, reduced=True), int(np.sum(norms <= float(target))))

    def test_dimension_cap(self):
        with override_settings(TOOLKIT={**settings.TOOLKIT, "MAX_SVP_DIMENSION": 4}):
            with self.assertRaises(DimensionTooLarge):
                shortest_vector(standard_lattice(identity(5)))
            with self.assertRaises(DimensionTooLarge):
                count_in_ball(standard_lattice(identity(5)), 1)


class CountTests(SimpleTestCase):
    def test_unit_vectors(self):
        V = unit_ball_volume(4) * mp.mpf("1.1") ** 4
        self.assertEqual(count_in_ball(standard_lattice(identity(4)), V), 8)

    def test_empty_ball(self):
        self.assertEqual(count_in_ball(ring_lattice(make_field(8), 2), 0), 0)
        with self.assertRaises(InvalidArgument):
            count_in_ball(ring_lattice(make_field(8), 2), -1)

    def test_monotone_and_divisible(self):
        basis = lifted(8, 17, 3, 1, seed=4)
        counts = [count_in_ball(basis, V) for V in (1, 4, 16, 64)]
        self.assertEqual(counts, sorted(counts))
        for count in counts:
            self.assertEqual(count % 8, 0)

    def test_shortest_vector_is_counted(self):
        basis = lifted(8, 17, 3, 1, seed=4)
        length, _ = shortest_vector(basis)
        V = unit_ball_volume(basis.n) * (length * (1 + mp.mpf("1e-12"))) ** basis.n
        self.assertGreaterEqual(count_in_ball(basis, V), 8)
        self.assertEqual(count_in_ball(basis, V * (1 - mp.mpf("1e-6"))), 0)


@override_settings(CACHES=LOCAL_CACHES)
class ExperimentTests(SimpleTestCase):
    def small_config(self, **overrides):
        values = {"m": 4, "t": 3, "s": 1, "V": "4", "N": 4, "master_seed": 3}
        values.update(overrides)
        return ExperimentConfig(**values)

    def test_seed_streams(self):
        self.assertEqual(sample_seed(42, 0), sample_seed(42, 0))
        self.assertNotEqual(sample_seed(42, 0), sample_seed(42, 1))
        self.assertNotEqual(sample_seed(42, 0), sample_seed(43, 0))

    def test_replay(self):
        config = self.small_config()
        first = run_experiment(config).to_json()
        self.assertEqual(first, run_experiment(config).to_json())
        self.assertEqual(first["N"], 4)
        self.assertEqual(first["sampling_law"], "construction-a")
        for record in first["samples"]:
            self.assertEqual(record["rho"] % 4, 0)

    def test_chunked_matches_inline(self):
        config = self.small_config(N=5)
        self.assertEqual(run_experiment(config, threads=2).to_json(), run_experiment(config).to_json())

    def test_sample_frame(self):
        report = run_experiment(self.small_config())
        frame = report.samples_frame()
        self.assertEqual(list(frame.columns), ["index", "lambda1", "rho", "seed"])
        self.assertEqual(list(frame["index"]), [0, 1, 2, 3])

    def test_failure_carries_index(self):
        with self.assertRaises(SampleFailure) as caught:
            run_experiment(self.small_config(p=2))
        self.assertEqual(caught.exception.index, 0)

    def test_poisson_predictions(self):
        report = run_experiment(self.small_config(V="8"))
        self.assertLess(abs(report.predictions["poisson_zero"] - mp.exp(-2)), mp.mpf("1e-30"))
        self.assertEqual(report.predictions["poisson_second_moment"], 64 + 4 * 8)

    @tag("slow")
    def test_construction_a_statistics(self):
        config = ExperimentConfig(m=8, t=5, s=3, V="8", N=200, master_seed=42, p=17)
        report = run_experiment(config)
        self.assertTrue(all(rho % 8 == 0 for rho in report.rhos))
        self.assertLessEqual(abs(float(report.mean) - 8), 3 * float(report.standard_error))
        self.assertLessEqual(abs(float(report.zero_frequency) - float(mp.exp(-1))), 0.10)
        floor = float(report.predictions["bracket"].probability_floor)
        self.assertGreaterEqual(float(report.in_bracket_fraction()), floor)
