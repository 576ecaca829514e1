"""Certified values of Dedekind zeta functions of cyclotomic fields at real s > 1."""
import logging
from dataclasses import dataclass
from functools import lru_cache

from django.conf import settings
from mpmath import iv, mp
from sympy import multiplicity, n_order, primerange, totient

from utils.exceptions import PrecisionFailure
from utils.intervals import around, interval, intersect, lower, upper, width, working_precision
from zeta.characters import characters

logger = logging.getLogger(__name__)

BASE_CUTOFF = 1000
MIN_DISTANCE_FROM_POLE = mp.mpf("1e-4")


@dataclass(frozen=True)
class ZetaValue:
    s: object
    lower: object
    upper: object
    prime_cutoff: int
    method: str

    @property
    def enclosure(self):
        return iv.mpf([self.lower, self.upper])

    def to_json(self):
        from utils.rendering import decimal_string

        return {
            "s": decimal_string(self.s),
            "lower": decimal_string(self.lower),
            "upper": decimal_string(self.upper),
            "prime_cutoff": self.prime_cutoff,
            "method": self.method,
        }


@lru_cache(maxsize=None)
def local_data(m, p):
    """(e, f, g) for the rational prime p in Q(zeta_m)."""
    v = multiplicity(p, m)
    m0 = m // p ** v
    f = int(n_order(p, m0)) if m0 > 1 else 1
    g = int(totient(m0)) // f
    e = int(totient(p ** v))
    return e, f, g


def _log_local_factor(m, p, s):
    _, f, g = local_data(m, p)
    return -g * iv.ln(1 - iv.exp(-f * s * iv.ln(p)))


def _log_tail(d, s, cutoff):
    return 2 * d * iv.exp((1 - s) * iv.ln(cutoff)) / (s - 1)


class _EulerProduct:
    """Running log of the Euler product, extended block by block as the cutoff grows."""

    def __init__(self, field, s):
        self.field = field
        self.s = s
        self.cutoff = 1
        self.log_sum = iv.mpf(0)

    def extend(self, cutoff):
        m = self.field.conductor
        for p in primerange(self.cutoff + 1, cutoff + 1):
            self.log_sum += _log_local_factor(m, int(p), self.s)
        self.cutoff = cutoff

    def enclosure(self):
        tail = _log_tail(self.field.degree, self.s, self.cutoff)
        return iv.exp(self.log_sum + iv.mpf([0, upper(tail)]))


def _required_cutoff(d, s, tol):
    """Cutoff at which the tail alone fits into ``tol`` for a value near 1."""
    exponent = mp.ln(2 * d / ((s - 1) * tol)) / (s - 1)
    if exponent > 60:
        return None
    return int(mp.ceil(mp.exp(exponent)))


def _lseries(field, s, dps):
    """prod_chi L(s, chi) over characters mod m, times the local factors at p | m."""
    m = field.conductor
    with mp.workdps(dps + 15):
        value = mp.one
        for chi in characters(m):
            value *= mp.dirichlet(s, chi)
        value = mp.re(value)
        for p in primerange(2, m + 1):
            if m % p == 0:
                _, f, g = local_data(m, int(p))
                value *= (1 - mp.mpf(p) ** (-f * s)) ** (-g)
    return around(value, mp.mpf(10) ** (-(dps - 5)) * value)


def dedekind_zeta(field, s, tol=None):
    tol = mp.mpf(tol if tol is not None else settings.TOOLKIT["ZETA_TOLERANCE"])
    return _dedekind_zeta(field, mp.mpf(s), tol)


@lru_cache(maxsize=1024)
def _dedekind_zeta(field, s, tol):
    if s <= 1 + MIN_DISTANCE_FROM_POLE:
        raise PrecisionFailure(f"zeta argument {s} is too close to the pole at 1", s=str(s))
    if tol <= 0:
        raise PrecisionFailure("zeta tolerance must be positive")
    cap = int(settings.TOOLKIT["ZETA_MAX_PRIME"])
    d = field.degree
    with working_precision():
        point = interval(s)
        euler = _EulerProduct(field, point)
        required = _required_cutoff(d, s, tol / 4)
        cutoff = BASE_CUTOFF if required is None or required > cap else max(BASE_CUTOFF, required)
        euler.extend(cutoff)
        value = euler.enclosure()
        while width(value) > tol and euler.cutoff < cap and required is not None and required <= cap:
            euler.extend(min(2 * euler.cutoff, cap))
            value = euler.enclosure()
        method = "euler"
        if width(value) > tol:
            logger.warning(
                "Euler product for zeta_K(%s) of %s stalls at width %s; refining with L-series",
                mp.nstr(s, 8), field, mp.nstr(width(value), 3),
            )
            refined = intersect(value, _lseries(field, s, mp.dps))
            if refined is None:
                raise PrecisionFailure(f"L-series value of zeta_K({s}) leaves the Euler enclosure", s=str(s))
            value = refined
            method = "euler+lseries"
        if width(value) > tol:
            raise PrecisionFailure(f"zeta_K({s}) enclosure of width {width(value)} exceeds {tol}", s=str(s))
        lo = max(mp.one, lower(value))
    logger.debug("zeta_K(%s) of %s in [%s, %s] via %s", s, field, lo, upper(value), method)
    return ZetaValue(s, lo, upper(value), euler.cutoff, method)


@lru_cache(maxsize=4096)
def zeta_ratio(field, t, k):
    """Enclosure of zeta_K(t(1/2 - 1/k)) * zeta_K(t/k) / zeta_K(t/2)."""
    t, k = mp.mpf(t), mp.mpf(k)
    arguments = (t * (mp.mpf(1) / 2 - 1 / k), t / k, t / 2)
    values = [dedekind_zeta(field, a).enclosure for a in arguments]
    with working_precision():
        return values[0] * values[1] / values[2]


def zeta_square_ratio(field, t):
    """Enclosure of zeta_K(t/4)^2 / zeta_K(t/2), the ratio used by the tail estimate."""
    t = mp.mpf(t)
    quarter = dedekind_zeta(field, t / 4).enclosure
    half = dedekind_zeta(field, t / 2).enclosure
    with working_precision():
        return quarter * quarter / half
