"""Volume-ratio and unit-count bounds for the second-moment error sum."""
import logging

import numpy as np
from mpmath import iv, mp

from fieldcore.cyclotomic import embeddings
from utils.exceptions import InvalidArgument
from utils.intervals import interval, lower, power, upper, working_precision

logger = logging.getLogger(__name__)

MC_CHUNK = 20000


def _form(h2, N, d, t):
    """((e^{h2} + e^{-h2} N^{2/d}) / 2)^{-dt/2}."""
    base = (iv.exp(h2) + iv.exp(-h2) * power(N, mp.mpf(2) / d)) / 2
    return power(base, -mp.mpf(d) * t / 2)


def _cap(x):
    return iv.mpf([min(lower(x), mp.one), min(upper(x), mp.one)])


def volume_ratio_enclosure(h_inf, norm_abs, d, t, k=None):
    """Enclosure of the smaller of the two volume-ratio bounds.

    ``h_inf`` may be an enclosure; the second form is used only for norm >= 1
    and a given k.
    """
    if k is not None and k < 2:
        raise InvalidArgument(f"k must be at least 2, got {k}", k=str(k))
    if t < 1:
        raise InvalidArgument(f"rank must be at least 1, got {t}", t=t)
    with working_precision():
        h = interval(h_inf)
        h = iv.mpf([max(mp.zero, lower(h)), max(mp.zero, upper(h))])
        N = interval(norm_abs)
        if upper(N) <= 0:
            raise InvalidArgument("norm must be positive")
        bound = _form(2 * h, N, d, t)
        if k is not None and lower(N) >= 1:
            k = interval(k)
            second = power(N, -interval(t) / k) * _form(2 * h * (k - 1) / k, N, d, t)
            if upper(second) < upper(bound):
                bound = second
        return _cap(bound)


def volume_ratio_bound(h_inf, norm_abs, d, t, k=None):
    return upper(volume_ratio_enclosure(h_inf, norm_abs, d, t, k))


def unit_count_bound(X, c_S, r, card_S):
    """card_S * ((X + c_S/2) / (c_S/2))^r, rounded up."""
    if c_S <= 0:
        raise InvalidArgument("c_S must be positive")
    with working_precision():
        half = interval(c_S) / 2
        value = card_S * ((interval(X) + half) / half) ** int(r)
    return upper(value)


def monte_carlo_volume_ratio(alpha, t, samples, rng):
    """Estimate vol(B ∩ alpha^-1 B) / vol(B) for the unit ball B of K_R^t.

    Returns ``(estimate, standard_error)``. Points are uniform in B; a point
    y lies in alpha^-1 B when alpha * y, scaled by |sigma(alpha)| on each
    place, stays in B.
    """
    field = alpha.field
    index = {a: i for i, a in enumerate(field.residues)}
    values = embeddings(alpha, dps=30)
    moduli = [float(abs(values[index[a]])) ** 2 for a in field.places]
    # real coordinates per place: 1 for real places, 2 for complex ones
    width = 1 if field.is_real else 2
    scale = np.repeat(np.array(moduli), width)
    scale = np.tile(scale, t)
    n = scale.size
    hits, drawn = 0, 0
    while drawn < samples:
        size = min(MC_CHUNK, samples - drawn)
        directions = rng.standard_normal((size, n))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        radii = rng.random(size) ** (1.0 / n)
        points = directions * radii[:, None]
        hits += int(np.count_nonzero((points ** 2) @ scale <= 1.0))
        drawn += size
    estimate = hits / samples
    error = (estimate * (1 - estimate) / samples) ** 0.5
    logger.debug("Monte Carlo volume ratio %s +- %s from %s samples", estimate, error, samples)
    return estimate, error
