import logging
from dataclasses import dataclass

from mpmath import iv, mp

from fieldcore.cyclotomic import denominator_index, is_root_of_unity, norm, place_moduli
from utils.exceptions import ZeroDivisorError
from utils.intervals import fsum, interval, lower, upper, working_precision

logger = logging.getLogger(__name__)


def _positive_part(x):
    return iv.mpf([max(mp.zero, lower(x)), max(mp.zero, upper(x))])


@dataclass(frozen=True)
class HeightProfile:
    """Heights in nats per degree; the plain fields are the upward-rounded ends."""
    h_inf: object
    h_weil: object
    log_D: object
    norm_abs: object
    denominator_index: int
    degree: int
    h_inf_enclosure: object
    h_weil_enclosure: object

    @property
    def h_weil_lower(self):
        return lower(self.h_weil_enclosure)

    @property
    def h_inf_lower(self):
        return lower(self.h_inf_enclosure)

    def inverse(self):
        """Profile of alpha^-1, from h(alpha^-1) = h(alpha) and D(alpha^-1) = N(alpha) D(alpha)."""
        D = int(self.norm_abs * self.denominator_index)
        with working_precision():
            log_D = iv.ln(D)
            h_inf = _positive_part(self.h_weil_enclosure - log_D / self.degree)
        return HeightProfile(
            h_inf=upper(h_inf),
            h_weil=self.h_weil,
            log_D=upper(log_D),
            norm_abs=1 / self.norm_abs,
            denominator_index=D,
            degree=self.degree,
            h_inf_enclosure=h_inf,
            h_weil_enclosure=self.h_weil_enclosure,
        )


def height_profile(alpha, denominator=None):
    if not alpha:
        raise ZeroDivisorError("the height of zero is undefined")
    parent = alpha.field
    d = parent.degree
    N = norm(alpha)
    D = denominator if denominator is not None else denominator_index(alpha)
    if N == 1 and D == 1 and is_root_of_unity(alpha):
        zero = iv.mpf(0)
        return HeightProfile(mp.zero, mp.zero, mp.zero, N, 1, d, zero, zero)
    with working_precision():
        logs = [iv.ln(interval(v)) for v in place_moduli(alpha)]
        h_inf = fsum(parent.place_multiplicity * _positive_part(x) for x in logs) / d
        log_D = iv.ln(D)
        h_weil = h_inf + log_D / d
    return HeightProfile(
        h_inf=upper(h_inf),
        h_weil=upper(h_weil),
        log_D=upper(log_D),
        norm_abs=N,
        denominator_index=D,
        degree=d,
        h_inf_enclosure=h_inf,
        h_weil_enclosure=h_weil,
    )
