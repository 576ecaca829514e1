"""Certified upper bounds on the normalised second-moment error eta.

eta = (E[rho_V^2] - V^2 - omega V) / (omega V). The asymptotic route takes
the ideal-summation estimate over a grid of k; the explicit route sums the
volume-ratio bound over an enumeration of low-height elements and adds the
tail estimate above the height cutoff.
"""
import logging
from dataclasses import dataclass, field as dataclass_field

from django.conf import settings
from mpmath import iv, mp

from bounds.constants import TAIL_INTERVALS, TAIL_K, t0_and_constants
from bounds.volume import volume_ratio_enclosure
from heights.constants import setup_constants
from heights.enumeration import enumerate_bounded_height
from utils.exceptions import InvalidConfiguration, RankBelowThreshold
from utils.intervals import fsum, interval, lower, minimum, power, upper, working_precision
from utils.rendering import decimal_string, enclosure
from zeta.dedekind import MIN_DISTANCE_FROM_POLE, zeta_ratio, zeta_square_ratio

logger = logging.getLogger(__name__)

MIN_IDEAL_SUM_K = 3


@dataclass(frozen=True)
class BoundParams:
    field: object
    t: int
    constants: object
    k_grid: tuple = ()
    h0: object = None
    A: object = None

    def interval_count(self, k):
        """Height-interval partition count; k^3 unless fixed."""
        if self.A is not None:
            return self.A
        return interval(k) ** 3

    def to_json(self):
        return {
            "m": self.field.conductor,
            "t": self.t,
            "k_grid": [decimal_string(mp.mpf(k), 6) for k in self.k_grid],
            "h0": decimal_string(self.h0) if self.h0 is not None else None,
            "A": decimal_string(self.A) if self.A is not None else None,
            "constants": self.constants.to_json(),
        }


def bound_params(field, t, constants_mode="uniform_cyclotomic", k_grid=None, h0=None, A=None, **user_constants):
    t = int(t)
    if t < 2:
        raise InvalidConfiguration(f"rank must be at least 2, got {t}", t=t)
    grid = tuple(mp.mpf(k) for k in (k_grid if k_grid is not None else settings.TOOLKIT["K_GRID"]))
    if not grid or min(grid) < 2:
        raise InvalidConfiguration("every k in the grid must be at least 2")
    constants = setup_constants(field, constants_mode, **user_constants)
    return BoundParams(
        field=field,
        t=t,
        constants=constants,
        k_grid=grid,
        h0=mp.mpf(h0) if h0 is not None else None,
        A=mp.mpf(A) if A is not None else None,
    )


@dataclass
class BoundReport:
    field: object
    t: int
    mode: str
    eta: object
    k: object
    breakdown: dict = dataclass_field(default_factory=dict)

    @property
    def eta_upper(self):
        return upper(self.eta)

    def to_json(self):
        breakdown = {}
        for name, value in self.breakdown.items():
            if hasattr(value, "to_json"):
                breakdown[name] = value.to_json()
            elif hasattr(value, "_mpi_"):
                breakdown[name] = enclosure(value)
            else:
                breakdown[name] = decimal_string(value)
        return {
            "m": self.field.conductor,
            "t": self.t,
            "mode": self.mode,
            "k": decimal_string(mp.mpf(self.k), 6),
            "eta_upper": decimal_string(self.eta_upper),
            "breakdown": breakdown,
        }


def _decay(epsilon, d, t, t0):
    return iv.exp(-epsilon * d * (interval(t) - t0))


def _admissible_for_ideal_sum(t, k):
    floor = 1 + MIN_DISTANCE_FROM_POLE
    return k >= MIN_IDEAL_SUM_K and t * (mp.mpf(1) / 2 - 1 / k) > floor and t / k > floor


def eta_asymptotic(params):
    """Minimum over the k grid of #S C Z(K, t, k) e^(-eps d (t - t0))."""
    field, t = params.field, params.t
    d = field.degree
    best = None
    for k in params.k_grid:
        if not _admissible_for_ideal_sum(t, k):
            continue
        try:
            decay = t0_and_constants(params, "ideal_sum", k=k)
        except RankBelowThreshold:
            continue
        Z = zeta_ratio(field, t, k)
        with working_precision():
            eta = params.constants.card_S * decay.C * Z * _decay(decay.epsilon, d, t, decay.t0)
        logger.debug("asymptotic eta at k = %s: %s", mp.nstr(k, 6), mp.nstr(upper(eta), 8))
        if best is None or upper(eta) < upper(best[0]):
            best = (eta, k, decay, Z)
    if best is None:
        raise RankBelowThreshold(f"no k in the grid admits t = {t} for {field}", t=t)
    eta, k, decay, Z = best
    logger.info("asymptotic eta for %s at t = %s: %s with k = %s", field, t, mp.nstr(upper(eta), 8), mp.nstr(k, 6))
    return BoundReport(field, t, "asymptotic", eta, k, {
        "zeta_ratio": Z,
        "card_S": params.constants.card_S,
        "constants": decay,
    })


def profile_term(profile, d, t, k=None):
    """D^-t times the volume-ratio bound for one element profile."""
    with working_precision():
        weight = power(profile.denominator_index, -t)
        return weight * volume_ratio_enclosure(profile.h_inf_enclosure, profile.norm_abs, d, t, k)


def orbit_term(record, d, t, k=None):
    """The smaller of the bounds computed from alpha and from alpha^-1."""
    profile = record.profile
    return minimum(profile_term(profile, d, t, k), profile_term(profile.inverse(), d, t, k))


def explicit_sum(records, d, t, k=None):
    """Orbit-normalised low-height sum; one term per mu(K)-orbit, alpha and alpha^-1 both listed."""
    with working_precision():
        return fsum(orbit_term(record, d, t, k) for record in records)


def tail_term(params):
    """Contribution of heights above h0 with k = 4 and A = 12."""
    field, t = params.field, params.t
    tail_params = BoundParams(field, t, params.constants, (mp.mpf(TAIL_K),), params.h0, mp.mpf(TAIL_INTERVALS))
    decay = t0_and_constants(tail_params, "tail")
    Z = zeta_square_ratio(field, t)
    with working_precision():
        value = decay.C * params.constants.card_S * Z * _decay(decay.epsilon, field.degree, t, decay.t0)
    return value, decay, Z


def eta_explicit(params):
    field, t = params.field, params.t
    d = field.degree
    c_S = params.constants.c_S
    h0 = params.h0
    if h0 is None or not c_S <= h0 <= mp.mpf(settings.TOOLKIT["MAX_HEIGHT"]):
        raise InvalidConfiguration(
            f"explicit mode needs c_S <= h0 <= {settings.TOOLKIT['MAX_HEIGHT']}, got h0 = {h0}",
            h0=str(h0), c_S=str(c_S),
        )
    tail, decay, Z = tail_term(params)
    records = enumerate_bounded_height(field, h0)
    best_sum, best_k = iv.mpf(0), params.k_grid[0]
    if records:
        best_sum = None
        for k in params.k_grid:
            total = explicit_sum(records, d, t, k)
            if best_sum is None or upper(total) < upper(best_sum):
                best_sum, best_k = total, k
    with working_precision():
        eta = best_sum + tail
        unnormalized = field.omega * best_sum
    logger.info(
        "explicit eta for %s at t = %s: sum %s over %s orbits, tail %s",
        field, t, mp.nstr(upper(best_sum), 8), len(records), mp.nstr(upper(tail), 8),
    )
    return BoundReport(field, t, "explicit", eta, best_k, {
        "explicit_sum": best_sum,
        "explicit_sum_unnormalized": unnormalized,
        "tail_term": tail,
        "zeta_ratio": Z,
        "orbit_count": len(records),
        "card_S": params.constants.card_S,
        "constants": decay,
    })


def compute_eta(params, mode):
    if mode == "explicit":
        return eta_explicit(params)
    if mode == "asymptotic":
        return eta_asymptotic(params)
    raise InvalidConfiguration(f"unknown bound mode {mode!r}", mode=mode)


def second_moment_enclosure(report, V):
    """[V^2 + omega V, V^2 + omega V (1 + omega eta)] for E[rho_V^2]."""
    omega = report.field.omega
    with working_precision():
        V = interval(V)
        if upper(V) <= 0:
            raise InvalidConfiguration("volume must be positive")
        base = V ** 2 + omega * V
        top = V ** 2 + omega * V * (1 + omega * interval(report.eta_upper))
    return iv.mpf([lower(base), upper(top)])
