"""Elements of bounded Weil height modulo roots of unity.

Every alpha with h(alpha) <= X factors as alpha = u * g_a / g_b with coprime
integral ideals a = (g_a), b = (g_b) of norm at most e^(dX) and a unit u. For
each pair the admissible units form a small ball in the unit log lattice,
which is enumerated exactly and filtered with certified heights.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from math import exp, floor, log

import numpy as np
from django.conf import settings
from django.core.cache import caches
from mpmath import mp

from heights.ideals import integral_ideals_up_to
from heights.profiles import height_profile
from heights.units import fundamental_units, log_moduli
from utils.exceptions import EnumerationUnavailable
from utils.lattice import enumerate_ball
from utils.rendering import decimal_string, rational_string

logger = logging.getLogger(__name__)

CACHE_VERSION = "orbits-v1"
FLOAT_SLACK = 1e-7

# class number and plus class number are both one
SUPPORTED_CONDUCTORS = frozenset({
    1, 3, 4, 5, 7, 8, 9, 11, 12, 13, 15, 16, 17, 19, 20, 21, 24, 25, 27, 28,
    32, 33, 35, 36, 40, 44, 45, 48, 60, 84,
})


def normalized_conductor(m):
    return m // 2 if m % 4 == 2 else m


def is_enumerable(field):
    return normalized_conductor(field.conductor) in SUPPORTED_CONDUCTORS


@dataclass(frozen=True)
class OrbitRecord:
    element: object
    profile: object
    numerator_norm: int
    denominator_norm: int

    def to_json(self):
        return {
            "coeffs": self.element.to_json(),
            "h_inf": decimal_string(self.profile.h_inf),
            "h_weil": decimal_string(self.profile.h_weil),
            "D": self.profile.denominator_index,
            "norm": rational_string(self.profile.norm_abs),
        }


def _sort_key(record):
    return (record.profile.h_weil, record.profile.norm_abs, record.element.coeffs)


def _check(field, X):
    if not is_enumerable(field):
        raise EnumerationUnavailable(
            f"bounded-height enumeration needs class number one for {field}", conductor=field.conductor
        )
    cap = mp.mpf(settings.TOOLKIT["MAX_HEIGHT"])
    if not 0 < X <= cap:
        raise EnumerationUnavailable(f"height bound {X} outside (0, {cap}]", height=str(X))


def _float_logs(element):
    return np.array([float(x) for x in log_moduli(element, dps=30)], dtype=float)


def _records_from_cache(field, payload):
    records = []
    for coeffs, numerator, denominator in payload:
        alpha = field.element([Fraction(c) for c in coeffs])
        records.append(OrbitRecord(alpha, height_profile(alpha, denominator=denominator), numerator, denominator))
    return records


def enumerate_bounded_height(field, X):
    """mu(K)-orbit representatives of non-torsion alpha with h(alpha) <= X, sorted by height.

    Both alpha and alpha^-1 orbits are listed. The numerator and denominator
    ideals of every listed alpha are coprime, so the denominator norm is the
    denominator index D(alpha).
    """
    X = mp.mpf(X)
    _check(field, X)
    cache = caches["enumeration"]
    key = f"{CACHE_VERSION}:{field.conductor}:{mp.nstr(X, 17)}"
    payload = cache.get(key)
    if payload is not None:
        return _records_from_cache(field, payload)

    d = field.degree
    x_float = float(X)
    bound = floor(exp(d * x_float) * (1 + 1e-12))
    logger.info("enumerating h <= %s in %s over ideals of norm <= %s", mp.nstr(X, 8), field, bound)
    ideals = integral_ideals_up_to(field, bound)
    basis = fundamental_units(field)
    weights = np.full(len(field.places), float(field.place_multiplicity))
    if basis.rank:
        L = basis.log_matrix()
        gram = basis.weighted_gram()
        min_weight = float(weights.min())
    ideal_logs = [_float_logs(ideal.generator) for ideal in ideals]
    two_dx = 2 * d * x_float

    records = []
    for i, top in enumerate(ideals):
        for j, bottom in enumerate(ideals):
            if top.support & bottom.support:
                continue
            log_top, log_bottom = log(top.norm), log(bottom.norm)
            budget = two_dx - log_top - log_bottom
            if budget < -FLOAT_SLACK:
                continue
            ell = ideal_logs[i] - ideal_logs[j]
            if basis.rank:
                # sum_j w_j |x_j| <= budget while sum_j w_j x_j is fixed
                c = (log_top - log_bottom) / d
                radius_sq = (budget + FLOAT_SLACK) ** 2 / min_weight - c * c * d
                if radius_sq < 0:
                    continue
                centre = -np.linalg.solve(gram, L @ (weights * ell))
                exponents = [x for x, _ in enumerate_ball(gram, radius_sq, center=centre)]
            else:
                exponents = [()]
            g = None
            for n in exponents:
                point = ell + (np.array(n, dtype=float) @ L if basis.rank else 0.0)
                if float(weights @ np.abs(point)) > budget + FLOAT_SLACK:
                    continue
                if top.norm == 1 and bottom.norm == 1 and not any(n):
                    continue
                if g is None:
                    g = top.generator / bottom.generator
                alpha = g * basis.power_product(n) if basis.rank else g
                profile = height_profile(alpha, denominator=bottom.norm)
                if profile.h_weil_lower <= X:
                    records.append(OrbitRecord(alpha, profile, top.norm, bottom.norm))
                    logger.debug("orbit %s with h = %s", alpha, mp.nstr(profile.h_weil, 10))
    records.sort(key=_sort_key)
    logger.info("found %s orbits of height <= %s in %s", len(records), mp.nstr(X, 8), field)
    cache.set(key, [
        ([str(c) for c in r.element.coeffs], r.numerator_norm, r.denominator_norm) for r in records
    ])
    return records


def enumeration_to_json(records):
    return [record.to_json() for record in records]
