"""Shortest-vector brackets from second-moment bounds, and the Haar reference predictions."""
import logging
from dataclasses import dataclass

from mpmath import mp
from sympy.functions.combinatorial.numbers import stirling

from utils.exceptions import InvalidArgument
from utils.intervals import working_precision
from utils.rendering import decimal_string

logger = logging.getLogger(__name__)

THEOREM_MIN_RANK = 11
LOG_BASE = "e"


def gamma_n(n):
    """Radius of the n-dimensional ball of unit volume."""
    if n < 1:
        raise InvalidArgument(f"dimension must be positive, got {n}", n=n)
    with working_precision():
        value = mp.exp(mp.loggamma(mp.mpf(n) / 2 + 1) / n) / mp.sqrt(mp.pi)
    return value


def unit_ball_volume(n):
    with working_precision():
        value = mp.exp(mp.mpf(n) / 2 * mp.ln(mp.pi) - mp.loggamma(mp.mpf(n) / 2 + 1))
    return value


def radius_for_volume(n, V):
    """gamma(n) V^(1/n), the radius of the ball of volume V."""
    with working_precision():
        return gamma_n(n) * mp.mpf(V) ** (mp.one / n)


def poisson_moment(k, lam):
    """k-th raw moment of a Poisson(lam) variable, sum_j S(k, j) lam^j."""
    if k < 0 or lam < 0:
        raise InvalidArgument(f"need k >= 0 and lambda >= 0, got {k}, {lam}")
    lam = mp.mpf(lam)
    return mp.fsum(int(stirling(k, j)) * lam ** j for j in range(k + 1))


def poisson_moment_series(k, lam, terms=60):
    """Truncated e^-lam sum_r lam^r r^k / r!."""
    lam = mp.mpf(lam)
    return mp.exp(-lam) * mp.fsum(lam ** r * mp.mpf(r) ** k / mp.factorial(r) for r in range(terms + 1))


def default_epsilon(n):
    return 1 / mp.ln(n)


def _clip(x):
    return min(mp.one, max(mp.zero, x))


@dataclass(frozen=True)
class SVBracket:
    n: int
    omega: int
    epsilon: object
    err: object
    probability_floor: object
    volume_low: object
    volume_high: object
    lambda_low: object
    lambda_high: object

    def to_json(self):
        return {
            "n": self.n,
            "omega": self.omega,
            "epsilon": decimal_string(self.epsilon),
            "err": decimal_string(self.err),
            "probability_floor": decimal_string(self.probability_floor),
            "volume_minimum": [decimal_string(self.volume_low), decimal_string(self.volume_high)],
            "lambda1": [decimal_string(self.lambda_low), decimal_string(self.lambda_high)],
        }


def sv_bracket(field, t, err, epsilon):
    """Bracket for the first volume minimum, with probability at least 1 - eps (2 + omega Err)."""
    epsilon, err = mp.mpf(epsilon), mp.mpf(err)
    if not 0 < epsilon < 1:
        raise InvalidArgument(f"epsilon must lie in (0, 1), got {epsilon}", epsilon=str(epsilon))
    if err < 0:
        raise InvalidArgument(f"Err must be nonnegative, got {err}", err=str(err))
    n = field.degree * int(t)
    omega = field.omega
    with working_precision():
        floor = _clip(1 - epsilon * (2 + omega * err))
        low, high = omega * epsilon, omega / epsilon
        bracket = SVBracket(
            n=n,
            omega=omega,
            epsilon=epsilon,
            err=err,
            probability_floor=floor,
            volume_low=low,
            volume_high=high,
            lambda_low=radius_for_volume(n, low),
            lambda_high=radius_for_volume(n, high),
        )
    logger.debug("volume-minimum bracket [%s, %s] for n = %s holds with probability >= %s", low, high, n, floor)
    return bracket


def _half_width(x, n):
    # ln ln x / n, nonpositive below x = e
    return max(mp.zero, mp.ln(mp.ln(x)) / n)


@dataclass(frozen=True)
class LengthPrediction:
    n: int
    centre: object
    half_width: object
    lambda_low: object
    lambda_high: object
    inflation: object = None
    half_width_roots: object = None
    theorem_backed: bool = False

    def to_json(self):
        payload = {
            "n": self.n,
            "centre": decimal_string(self.centre),
            "half_width": decimal_string(self.half_width),
            "lambda1": [decimal_string(self.lambda_low), decimal_string(self.lambda_high)],
            "log_base": LOG_BASE,
        }
        if self.inflation is not None:
            payload.update({
                "inflation": decimal_string(self.inflation),
                "half_width_roots": decimal_string(self.half_width_roots),
                "theorem_backed": self.theorem_backed,
                "lower_bound_unconditional": True,
            })
        return payload


def module_prediction(field, t):
    """lambda_1 around omega^(1/n) gamma(n) for a random rank-t module lattice over the field."""
    t = int(t)
    if t < 2:
        raise InvalidArgument(f"rank must be at least 2, got {t}", t=t)
    n = field.degree * t
    omega = field.omega
    with working_precision():
        centre = mp.mpf(omega) ** (mp.one / n) * gamma_n(n)
        half = _half_width(n, n)
        inflation = (mp.mpf(omega) / 2) ** (mp.one / n) - 1
        prediction = LengthPrediction(
            n=n,
            centre=centre,
            half_width=half,
            lambda_low=(1 - half) * centre,
            lambda_high=(1 + half) * centre,
            inflation=inflation,
            half_width_roots=_half_width(omega, n),
            theorem_backed=t >= THEOREM_MIN_RANK,
        )
    return prediction


def haar_prediction(n):
    """lambda_1 around 2^(1/n) gamma(n) for a Haar-random unimodular lattice."""
    if n < 2:
        raise InvalidArgument(f"dimension must be at least 2, got {n}", n=n)
    with working_precision():
        centre = mp.mpf(2) ** (mp.one / n) * gamma_n(n)
        half = _half_width(n, n)
        prediction = LengthPrediction(
            n=n,
            centre=centre,
            half_width=half,
            lambda_low=(1 - half) * centre,
            lambda_high=(1 + half) * centre,
        )
    return prediction
