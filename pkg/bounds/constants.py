"""Minimal ranks t0 and the decay constants of the coset, ideal-sum and tail estimates."""
import logging
from typing import NamedTuple

from mpmath import iv, mp

from heights.constants import CYCLOTOMIC_C_O, CYCLOTOMIC_C_S
from utils.exceptions import InvalidConfiguration, RankBelowThreshold
from utils.intervals import interval, log_cosh, lower, upper, working_precision

logger = logging.getLogger(__name__)

MODES = ("coset", "ideal_sum", "tail")
TAIL_K = 4
TAIL_INTERVALS = 12

PRINTED_LIMIT = {
    "k": mp.mpf("10.99"),
    "t0": mp.mpf("10.99"),
    "epsilon": mp.mpf(1) / 26,
    "additive": mp.mpf(1332),
    "rate_denominator": mp.mpf(16693),
}


class DecayConstants(NamedTuple):
    t0: object
    epsilon: object
    C: object
    mode: str

    def to_json(self):
        from utils.rendering import decimal_string

        return {
            "t0": decimal_string(self.t0),
            "epsilon": decimal_string(self.epsilon),
            "C": decimal_string(self.C),
            "mode": self.mode,
        }


def _imax(*values):
    return iv.mpf([max(lower(v) for v in values), max(upper(v) for v in values)])


def coset_threshold(rank_ratio, c_o, c_S, k, A):
    """(2r/d) ln(1 + 2c_o/c_S + 1/A) / ln cosh(2 c_o (1 - 1/k)) as an enclosure."""
    return rank_ratio * iv.ln(1 + 2 * c_o / c_S + 1 / A) / log_cosh(2 * c_o * (1 - 1 / k))


def coset_epsilon(c_o, k):
    return 5 * c_o ** 2 * (k - 1) ** 2 / (6 * k ** 2)


def coset_rate(c_o, k):
    """Per unit of d(t - t0) in the geometric-series constant."""
    return 5 * c_o ** 2 * (k - 1) ** 2 / (3 * k ** 5)


def t0_and_constants(params, mode, k=None, t=None):
    """(t0, epsilon, C) for one estimate.

    ``k`` defaults to the tail choice k = 4 in tail mode and must be supplied
    otherwise; C depends on t - t0, so t <= t0 raises RankBelowThreshold.
    """
    if mode not in MODES:
        raise InvalidConfiguration(f"unknown constants mode {mode!r}", mode=mode)
    field = params.field
    t = params.t if t is None else t
    d, r = field.degree, field.unit_rank
    with working_precision():
        rank_ratio = interval(2 * r) / d
        c_o, c_S = interval(params.constants.c_o), interval(params.constants.c_S)
        T = interval(t)
        if mode == "tail":
            h0 = interval(params.h0)
            threshold = rank_ratio * iv.ln(1 + (12 * h0 + 1) / (6 * c_S)) / log_cosh(3 * h0 / 2)
            t0 = _imax(interval(4), threshold)
            epsilon = log_cosh(3 * h0 / 2) / 2
            if t <= upper(t0):
                raise RankBelowThreshold(f"t = {t} does not exceed the tail threshold {mp.nstr(upper(t0), 6)}")
            C = 1 + 2 / (1 - iv.exp(-5 * d * (T - t0) / 192))
        else:
            if k is None:
                raise InvalidConfiguration(f"{mode} constants need k")
            K = interval(k)
            A = interval(params.interval_count(k))
            t0 = coset_threshold(rank_ratio, c_o, c_S, K, A)
            if mode == "ideal_sum":
                t0 = _imax(K, interval(6), t0)
            epsilon = coset_epsilon(c_o, K)
            if t <= upper(t0):
                raise RankBelowThreshold(f"t = {t} does not exceed t0 = {mp.nstr(upper(t0), 6)} at k = {k}")
            C = 1 + A + 1 / (1 - iv.exp(-coset_rate(c_o, K) * d * (T - t0)))
            if mode == "ideal_sum":
                C = 2 * C
    return DecayConstants(t0, epsilon, C, mode)


def limiting_constants(k=PRINTED_LIMIT["k"], c_o=CYCLOTOMIC_C_O, c_S=CYCLOTOMIC_C_S, tolerance=mp.mpf("1e-3")):
    """Ideal-sum constants for cyclotomic fields as r/d tends to 1/2, next to the printed ones."""
    with working_precision():
        K = interval(k)
        c_o, c_S = interval(c_o), interval(c_S)
        threshold = coset_threshold(interval(1), c_o, c_S, K, K ** 3)
        t0 = _imax(K, interval(6), threshold)
        regenerated = {
            "k": K,
            "t0": t0,
            "epsilon": coset_epsilon(c_o, K),
            "additive": 1 + K ** 3,
            "rate_denominator": 1 / coset_rate(c_o, K),
        }
    discrepancies = []
    for name, printed in PRINTED_LIMIT.items():
        value = mp.mpf(upper(regenerated[name]))
        if abs(value - printed) > tolerance * abs(printed):
            discrepancies.append(name)
            logger.warning("printed %s = %s differs from regenerated %s", name, mp.nstr(printed, 8), mp.nstr(value, 8))
    return {
        "regenerated": regenerated,
        "printed": dict(PRINTED_LIMIT),
        "coset_threshold": threshold,
        "discrepancies": discrepancies,
    }


def limiting_constants_json(report):
    from utils.rendering import decimal_string

    return {
        "regenerated": {name: decimal_string(value) for name, value in report["regenerated"].items()},
        "printed": {name: decimal_string(value) for name, value in report["printed"].items()},
        "coset_threshold": decimal_string(report["coset_threshold"]),
        "discrepancies": list(report["discrepancies"]),
    }
