import io
import json
import os
import tempfile

import pandas as pd
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase, override_settings
from mpmath import mp

from toolkit.models import Run
from toolkit.serializers import BoundConfigSerializer, SimulateConfigSerializer
from utils.rendering import without_timestamp

LOCAL_CACHES = {
    "default": {"BACKEND": "django.core.cache.backends.locmem.LocMemCache"},
    "enumeration": {"BACKEND": "django.core.cache.backends.locmem.LocMemCache", "LOCATION": "toolkit-tests"},
}


def run(command, *args, **options):
    out = io.StringIO()
    call_command(command, *args, stdout=out, **options)
    return out.getvalue()


def run_json(command, *args, **options):
    return json.loads(run(command, *args, **options))


class ConfigSerializerTests(SimpleTestCase):
    def test_unknown_keys_rejected(self):
        serializer = BoundConfigSerializer(data={"m": 8, "t": 20, "mode": "asymptotic", "colour": "red"})
        self.assertFalse(serializer.is_valid())
        self.assertIn("colour", serializer.errors)

    def test_numbers_kept_as_strings(self):
        serializer = BoundConfigSerializer(data={"m": 16, "t": 32, "h0": 0.6})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.validated_data["h0"], "0.6")
        self.assertEqual(serializer.validated_data["mode"], "explicit")

    def test_explicit_needs_h0(self):
        serializer = BoundConfigSerializer(data={"m": 16, "t": 32, "mode": "explicit"})
        self.assertFalse(serializer.is_valid())
        self.assertIn("h0", serializer.errors)

    def test_simulation_dimensions(self):
        base = {"m": 8, "t": 5, "V": "8", "N": 10, "seed": 1}
        self.assertTrue(SimulateConfigSerializer(data={**base, "s": 3}).is_valid())
        self.assertFalse(SimulateConfigSerializer(data={**base, "s": 5}).is_valid())
        self.assertFalse(SimulateConfigSerializer(data={**base, "s": 3, "V": "nan"}).is_valid())


@override_settings(CACHES=LOCAL_CACHES)
class BoundCommandTests(SimpleTestCase):
    def test_asymptotic(self):
        payload = run_json("bound", m=8, t=20, mode="asymptotic")
        self.assertEqual(payload["tool"], "lattice-moments")
        self.assertEqual(payload["command"], "bound")
        self.assertEqual(payload["config"]["t"], 20)
        eta = mp.mpf(payload["result"]["eta_upper"])
        self.assertTrue(mp.isfinite(eta))
        self.assertGreater(eta, 0)

    def test_rank_below_threshold(self):
        with self.assertRaises(CommandError) as caught:
            run("bound", m=16, t=5, mode="asymptotic")
        self.assertEqual(caught.exception.returncode, 3)

    def test_invalid_config_exit_code(self):
        with self.assertRaises(CommandError) as caught:
            run("bound", m=16, t=32, mode="explicit")
        self.assertEqual(caught.exception.returncode, 2)

    def test_flags_override_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "run.json")
            with open(path, "w") as handle:
                json.dump({"m": 8, "t": 5, "mode": "asymptotic"}, handle)
            payload = run_json("bound", config=path, t=20)
        self.assertEqual(payload["config"]["t"], 20)
        self.assertEqual(payload["config"]["m"], 8)

    def test_unknown_key_in_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "run.json")
            with open(path, "w") as handle:
                json.dump({"m": 8, "t": 20, "mode": "asymptotic", "bogus": 1}, handle)
            with self.assertRaises(CommandError) as caught:
                run("bound", config=path)
        self.assertEqual(caught.exception.returncode, 2)

    def test_deterministic_modulo_timestamp(self):
        first = run_json("bound", m=8, t=20, mode="asymptotic")
        second = run_json("bound", m=8, t=20, mode="asymptotic")
        self.assertEqual(without_timestamp(first), without_timestamp(second))

    def test_output_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            target = os.path.join(tmp, "out", "bound.json")
            self.assertEqual(run("bound", m=8, t=20, mode="asymptotic", output=target), "")
            with open(target) as handle:
                self.assertEqual(json.load(handle)["command"], "bound")

    def test_limiting_constants_reported(self):
        result = run_json("bound", m=8, t=20, mode="asymptotic")["result"]
        limiting = result["limiting_constants"]
        self.assertEqual(set(limiting["discrepancies"]), {"epsilon", "additive", "rate_denominator"})
        self.assertLessEqual(mp.mpf(limiting["regenerated"]["t0"]), 11)
        self.assertEqual(mp.mpf(limiting["printed"]["additive"]), 1332)


class SVBoundCommandTests(SimpleTestCase):
    def test_conductor_sixteen(self):
        result = run_json("svbound", m=16, t=32, eta="1.2e-11", epsilon="auto")["result"]
        floor = mp.mpf(result["bracket"]["probability_floor"])
        self.assertGreaterEqual(floor, mp.mpf("0.639"))
        self.assertLessEqual(floor, mp.mpf("0.640"))
        self.assertAlmostEqual(float(result["module_prediction"]["inflation"]), 0.008156, delta=1e-5)
        self.assertEqual(result["eta_source"], "supplied")

    def test_clipped_floor(self):
        result = run_json("svbound", m=16, t=32, eta="1", epsilon="0.9")["result"]
        self.assertEqual(mp.mpf(result["bracket"]["probability_floor"]), 0)

    def test_rationals(self):
        result = run_json("svbound", m=1, t=20, eta="0")["result"]
        self.assertEqual(mp.mpf(result["module_prediction"]["inflation"]), 0)
        self.assertEqual(result["module_prediction"]["centre"], result["haar_prediction"]["centre"])

    def test_invalid_epsilon(self):
        for epsilon in ("1.5", "0", "often"):
            with self.assertRaises(CommandError) as caught:
                run("svbound", m=16, t=32, eta="0", epsilon=epsilon)
            self.assertEqual(caught.exception.returncode, 2)

    @override_settings(CACHES=LOCAL_CACHES)
    def test_computed_eta_matches_bound(self):
        result = run_json("svbound", m=8, t=20, mode="asymptotic")["result"]
        bound = run_json("bound", m=8, t=20, mode="asymptotic")["result"]
        self.assertEqual(result["eta_source"], "asymptotic")
        self.assertEqual(result["eta_upper"], bound["eta_upper"])

    def test_constants_mode_reaches_eta(self):
        options = {"m": 8, "t": 20, "mode": "asymptotic", "constants_mode": "user"}
        with self.assertRaises(CommandError) as caught:
            run("svbound", c="0.3", c_o="0.2", c_S="0.3", **options)
        self.assertEqual(caught.exception.returncode, 2)


@override_settings(CACHES=LOCAL_CACHES)
class ZetaAndEnumerateCommandTests(SimpleTestCase):
    def test_conductor_sixteen_at_eight(self):
        result = run_json("zeta", m=16, s="8", tol="1e-10")["result"]
        self.assertLess(mp.mpf(result["square_upper"]), mp.mpf("1.01"))
        self.assertEqual(result["degree"], 8)
        width = mp.mpf(result["value"]["upper"]) - mp.mpf(result["value"]["lower"])
        self.assertLessEqual(width, mp.mpf("1e-10"))

    def test_pole(self):
        with self.assertRaises(CommandError) as caught:
            run("zeta", m=4, s="1.00001")
        self.assertEqual(caught.exception.returncode, 5)

    def test_enumerate_rationals(self):
        result = run_json("enumerate", m=1, X="0.7")["result"]
        self.assertEqual(result["orbit_count"], len(result["orbits"]))
        self.assertGreaterEqual(result["orbit_count"], 2)


@override_settings(CACHES=LOCAL_CACHES)
class SimulateCommandTests(SimpleTestCase):
    options = {"m": 4, "t": 3, "s": 1, "V": "4", "N": 3, "seed": 1}

    def test_deterministic(self):
        first = run_json("simulate", **self.options)
        second = run_json("simulate", threads=2, **self.options)
        self.assertEqual(without_timestamp(first), without_timestamp(second))
        self.assertEqual(first["config"]["p"], None)
        self.assertEqual(first["result"]["N"], 3)

    def test_samples_csv(self):
        with tempfile.TemporaryDirectory() as tmp:
            target = os.path.join(tmp, "samples.csv")
            result = run_json("simulate", samples_csv=target, **self.options)["result"]
            frame = pd.read_csv(target)
        self.assertEqual(list(frame.columns), ["index", "lambda1", "rho", "seed"])
        self.assertEqual(list(frame["rho"]), [record["rho"] for record in result["samples"]])

    def test_ramified_prime(self):
        with self.assertRaises(CommandError) as caught:
            run("simulate", p=2, **self.options)
        self.assertEqual(caught.exception.returncode, 6)


@override_settings(CACHES=LOCAL_CACHES)
class FigureCommandTests(SimpleTestCase):
    def test_small_grid(self):
        lines = run("figure", conductors=[8], ranks=[15, 16], weil_cutoff="20").splitlines()
        self.assertEqual(lines[0], "m,t,ln_eta_upper")
        self.assertEqual(len(lines), 3)
        self.assertTrue(lines[1].startswith("8,15,"))


@override_settings(CACHES=LOCAL_CACHES)
class RecordTests(TestCase):
    def test_record(self):
        run("zeta", m=16, s="8", record=True)
        entry = Run.objects.get()
        self.assertEqual(entry.command, "zeta")
        self.assertEqual(entry.config["m"], 16)
        self.assertIn("value", entry.result)
        self.assertGreaterEqual(entry.duration_seconds, 0)
