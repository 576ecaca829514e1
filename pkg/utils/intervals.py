"""Outward-rounded helpers on top of ``mpmath.iv``.

Every quantity that ends up inside a certified bound goes through here, so
the directed-rounding rules live in one place: enclosures are ``iv.mpf``
intervals and the public readers (:func:`upper`, :func:`lower`) return plain
``mpf`` endpoints.
"""
from contextlib import contextmanager
from fractions import Fraction

from django.conf import settings
from mpmath import iv, mp


def working_dps():
    return int(settings.TOOLKIT["WORKING_DPS"])


@contextmanager
def working_precision(dps=None, guard=0):
    dps = (dps or working_dps()) + guard
    # iv has no workdps manager
    saved = iv.dps
    iv.dps = dps
    try:
        with mp.workdps(dps):
            yield
    finally:
        iv.dps = saved


def interval(value):
    if isinstance(value, Fraction):
        return iv.mpf(value.numerator) / iv.mpf(value.denominator)
    if hasattr(value, "_mpi_"):
        return value
    if hasattr(value, "_mpf_"):
        return iv.mpf(value)
    if isinstance(value, (tuple, list)):
        lo, hi = value
        return iv.mpf([interval(lo), interval(hi)])
    return iv.mpf(value)


def around(value, radius):
    """Enclosure of a value known only up to an absolute error ``radius``."""
    centre = mp.mpf(value)
    radius = abs(mp.mpf(radius))
    return iv.mpf([mp.fsub(centre, radius, rounding="d"), mp.fadd(centre, radius, rounding="u")])


def lower(x):
    return mp.make_mpf(interval(x)._mpi_[0])


def upper(x):
    return mp.make_mpf(interval(x)._mpi_[1])


def width(x):
    return upper(x) - lower(x)


def contains(enclosure, value):
    lo, hi = lower(enclosure), upper(enclosure)
    v = interval(value)
    return lo <= lower(v) and upper(v) <= hi


def cosh(x):
    x = interval(x)
    return (iv.exp(x) + iv.exp(-x)) / 2


def log_cosh(x):
    return iv.ln(cosh(x))


def power(base, exponent):
    """base ** exponent for a positive base."""
    return iv.exp(interval(exponent) * iv.ln(interval(base)))


def hull(*values):
    lows = [lower(v) for v in values]
    highs = [upper(v) for v in values]
    return iv.mpf([min(lows), max(highs)])


def intersect(a, b):
    lo = max(lower(a), lower(b))
    hi = min(upper(a), upper(b))
    if lo > hi:
        return None
    return iv.mpf([lo, hi])


def minimum(*values):
    """Enclosure of min(values), valid when each value is an enclosure."""
    return iv.mpf([min(lower(v) for v in values), min(upper(v) for v in values)])


def fsum(values):
    """Deterministic outward sum: terms are ordered by their upper endpoints first."""
    ordered = sorted((interval(v) for v in values), key=lambda v: (upper(v), lower(v)))
    total = iv.mpf(0)
    for term in ordered:
        total += term
    return total
