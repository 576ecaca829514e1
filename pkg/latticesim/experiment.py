"""Monte Carlo runs over Construction-A module lattices.

Every sample owns an RNG stream derived from (master_seed, index), so a run
gives the same report whatever the chunking or worker count.
"""
import logging
import os
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np
import pandas as pd
import sympy
from celery import group
from mpmath import mp

from bounds.engine import bound_params, eta_explicit, second_moment_enclosure
from fieldcore.cyclotomic import make_field
from latticesim.codes import sample_code, split_prime
from latticesim.construction import count_in_ball, lift_to_lattice, lll_reduce, shortest_vector
from svpredict.predictions import module_prediction, poisson_moment, sv_bracket
from utils.exceptions import InvalidConfiguration, LatticeInvariantError, SampleFailure, ToolkitError
from utils.intervals import working_precision
from utils.rendering import decimal_string, enclosure, rational_string

logger = logging.getLogger(__name__)

SAMPLING_LAW = "construction-a"
QUANTILES = (0.1, 0.5, 0.9)
CLOSURE_PROBES = 2
COVOLUME_TOLERANCE = mp.mpf("1e-9")
DEFAULT_H0 = "0.6"
DEFAULT_EPSILON = "0.15"
SAMPLE_COLUMNS = ["index", "lambda1", "rho", "seed"]


def default_prime(m):
    """Smallest prime p = 1 mod m, so that p splits completely."""
    p = m + 1
    while not sympy.isprime(p):
        p += m
    return p


@dataclass(frozen=True)
class ExperimentConfig:
    m: int
    t: int
    s: int
    V: str
    N: int
    master_seed: int
    p: int = None
    h0: str = DEFAULT_H0
    epsilon: str = DEFAULT_EPSILON

    def __post_init__(self):
        if self.p is None:
            object.__setattr__(self, "p", default_prime(self.m))
        if self.N < 1:
            raise InvalidConfiguration(f"need at least one sample, got N = {self.N}", N=self.N)
        if mp.mpf(self.V) <= 0:
            raise InvalidConfiguration(f"volume must be positive, got V = {self.V}", V=self.V)

    def to_json(self):
        return asdict(self)


def sample_seed(master_seed, index):
    state = np.random.SeedSequence([int(master_seed), int(index)]).generate_state(1, np.uint64)
    return int(state[0])


def _check_closure(basis, rng):
    for _ in range(CLOSURE_PROBES):
        combination = rng.integers(-2, 3, size=basis.n).tolist()
        vector = basis.coordinates(combination)
        if not basis.contains(basis.multiply_by_zeta(vector)):
            raise LatticeInvariantError("lattice is not closed under multiplication by zeta")


def run_sample(config, index):
    """One lattice: returns {index, lambda1, rho, seed} with lambda1 as a decimal string."""
    config = ExperimentConfig(**config) if isinstance(config, dict) else config
    seed = sample_seed(config.master_seed, index)
    try:
        field = make_field(config.m)
        split = split_prime(field, config.p)
        rng = np.random.default_rng(seed)
        code = sample_code(rng, split.q, config.t, config.s, split.residue_field())
        basis = lift_to_lattice(field, split, code, config.t)
        if abs(basis.covolume - 1) > COVOLUME_TOLERANCE:
            raise LatticeInvariantError(f"covolume {basis.covolume} is not 1")
        reduced = lll_reduce(basis)
        length, _ = shortest_vector(reduced, reduced=True)
        rho = count_in_ball(reduced, config.V, reduced=True)
        _check_closure(reduced, rng)
    except SampleFailure:
        raise
    except ToolkitError as exc:
        raise SampleFailure(f"sample {index} failed: {exc}", index=index) from exc
    logger.debug("sample %s: lambda1 = %s, rho = %s", index, mp.nstr(length, 10), rho)
    return {"index": int(index), "lambda1": decimal_string(length), "rho": rho, "seed": seed}


def _chunks(indices, parts):
    size = -(-len(indices) // parts)
    return [indices[i:i + size] for i in range(0, len(indices), size)]


def collect_samples(config, threads=1):
    from latticesim.tasks import simulate_chunk

    indices = list(range(config.N))
    if threads == 0:
        threads = os.cpu_count() or 1
    if threads == 1:
        records = [run_sample(config, i) for i in indices]
    else:
        chunks = _chunks(indices, threads)
        logger.info("dispatching %s samples in %s chunks", config.N, len(chunks))
        results = group(simulate_chunk.s(config.to_json(), chunk) for chunk in chunks).apply_async().get()
        records = [record for chunk in results for record in chunk]
    return sorted(records, key=lambda record: record["index"])


@dataclass
class SimReport:
    config: ExperimentConfig
    omega: int
    samples: list
    predictions: dict

    @property
    def rhos(self):
        return [record["rho"] for record in self.samples]

    @property
    def mean(self):
        return Fraction(sum(self.rhos), len(self.rhos))

    @property
    def second_moment(self):
        return Fraction(sum(rho * rho for rho in self.rhos), len(self.rhos))

    @property
    def zero_frequency(self):
        return Fraction(sum(1 for rho in self.rhos if rho == 0), len(self.rhos))

    @property
    def standard_error(self):
        N = len(self.rhos)
        if N < 2:
            return mp.zero
        variance = (self.second_moment - self.mean ** 2) * Fraction(N, N - 1)
        with working_precision():
            return mp.sqrt(mp.mpf(variance.numerator) / variance.denominator / N)

    @property
    def lengths(self):
        return [mp.mpf(record["lambda1"]) for record in self.samples]

    def quantiles(self):
        values = np.quantile(np.array([float(x) for x in self.lengths]), QUANTILES)
        return {f"{q:g}": decimal_string(mp.mpf(float(v))) for q, v in zip(QUANTILES, values)}

    def in_bracket_fraction(self):
        bracket = self.predictions["bracket"]
        inside = sum(1 for x in self.lengths if bracket.lambda_low <= x <= bracket.lambda_high)
        return Fraction(inside, len(self.samples))

    def samples_frame(self):
        return pd.DataFrame(self.samples, columns=SAMPLE_COLUMNS)

    def to_json(self):
        predictions = self.predictions
        bracket = predictions["bracket"].to_json()
        if predictions["eta"] is None:
            bracket["probability_floor"] = None
        return {
            "sampling_law": SAMPLING_LAW,
            "master_seed": self.config.master_seed,
            "N": len(self.samples),
            "V": self.config.V,
            "omega": self.omega,
            "empirical": {
                "mean": rational_string(self.mean),
                "standard_error": decimal_string(self.standard_error),
                "second_moment": rational_string(self.second_moment),
                "zero_frequency": rational_string(self.zero_frequency),
                "lambda1_quantiles": self.quantiles(),
                "in_bracket_fraction": rational_string(self.in_bracket_fraction()),
            },
            "predicted": {
                "mean": self.config.V,
                "poisson_zero": decimal_string(predictions["poisson_zero"]),
                "poisson_second_moment": decimal_string(predictions["poisson_second_moment"]),
                "eta": predictions["eta"].to_json() if predictions["eta"] is not None else None,
                "eta_unavailable": predictions["eta_unavailable"],
                "second_moment": enclosure(predictions["second_moment"]) if predictions["second_moment"] is not None else None,
                "bracket": bracket,
                "module_prediction": predictions["module_prediction"].to_json(),
            },
            "samples": self.samples,
        }


def predictions_for(config, field):
    omega = field.omega
    V = mp.mpf(config.V)
    eta, reason, second = None, None, None
    try:
        eta = eta_explicit(bound_params(field, config.t, h0=config.h0))
        second = second_moment_enclosure(eta, V)
    except ToolkitError as exc:
        reason = str(exc)
        logger.info("no certified eta for m = %s, t = %s: %s", config.m, config.t, exc)
    with working_precision():
        lam = V / omega
        err = omega * eta.eta_upper if eta is not None else 0
        return {
            "poisson_zero": mp.exp(-lam),
            "poisson_second_moment": omega ** 2 * poisson_moment(2, lam),
            "eta": eta,
            "eta_unavailable": reason,
            "second_moment": second,
            "bracket": sv_bracket(field, config.t, err, config.epsilon),
            "module_prediction": module_prediction(field, config.t),
        }


def run_experiment(config, threads=1):
    field = make_field(config.m)
    n = field.degree * config.t
    logger.info("simulating %s Construction-A lattices of dimension %s over %s", config.N, n, field)
    samples = collect_samples(config, threads)
    for record in samples:
        if record["rho"] % field.omega:
            raise SampleFailure(f"rho = {record['rho']} is not a multiple of {field.omega}", index=record["index"])
    return SimReport(config, field.omega, samples, predictions_for(config, field))
