"""Unit groups of cyclotomic fields from cyclotomic units."""
import logging
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

import numpy as np
import sympy
from django.core.cache import caches
from mpmath import mp

from fieldcore.cyclotomic import embeddings, norm
from utils.exceptions import PrecisionFailure
from utils.intervals import working_dps, working_precision
from utils.lattice import enumerate_ball, identity, lll_gram

logger = logging.getLogger(__name__)

CACHE_VERSION = "units-v2"
RELATION_SCALE_BITS = 64
LOG_SCALE_BITS = 40


@dataclass(frozen=True)
class UnitBasis:
    """Fundamental units modulo mu(K) with their place-wise log moduli."""
    field: object
    units: tuple
    logs: tuple

    @property
    def rank(self):
        return len(self.units)

    def weights(self):
        return np.full(len(self.field.places), float(self.field.place_multiplicity))

    def log_matrix(self):
        return np.array([[float(x) for x in row] for row in self.logs], dtype=float).reshape(
            self.rank, len(self.field.places)
        )

    def weighted_gram(self):
        L = self.log_matrix()
        return (L * self.weights()) @ L.T

    def embedded_gram(self):
        """Gram of the vectors L(u) = (w_j ln|sigma_j u|)_j under the plain dot product."""
        L = self.log_matrix() * self.weights()
        return L @ L.T

    def power_product(self, exponents):
        result = self.field.one()
        for unit, e in zip(self.units, exponents):
            if e:
                result = result * unit ** int(e)
        return result


def log_moduli(alpha, dps=None):
    """ln|sigma_j(alpha)| for one embedding per place."""
    values = embeddings(alpha, dps=dps)
    index = {a: i for i, a in enumerate(alpha.field.residues)}
    with mp.workdps(dps or working_dps()):
        return [mp.ln(abs(values[index[a]])) for a in alpha.field.places]


def unit_log_embedding(alpha):
    """L(alpha) = (w_j ln|sigma_j alpha|)_j with w_j = 2 at complex places."""
    w = alpha.field.place_multiplicity
    with working_precision():
        return [w * x for x in log_moduli(alpha)]


def cyclotomic_unit_generators(field):
    """Generators of the cyclotomic units modulo torsion.

    1 - zeta^b is a unit when zeta^b does not have prime-power order; for
    prime-power order the quotient by 1 - zeta^gcd(b, m) (same order) is.
    """
    m = field.conductor
    generators = []
    for b in range(1, m // 2 + 1):
        g = gcd(b, m)
        order = m // g
        if order == 1:
            continue
        if len(sympy.factorint(order)) == 1:
            if b == g:
                continue
            generators.append((1 - field.zeta(b)) / (1 - field.zeta(g)))
        else:
            generators.append(1 - field.zeta(b))
    return generators


def _reduce_complement(relations, basis):
    """Short exponent rows spanning the same lattice as ``basis`` modulo ``relations``.

    The rows are LLL-reduced after projecting away the relation span, then
    lifted back by rounding off against the relation rows.
    """
    if not relations:
        return identity(len(basis))
    R, C = sympy.Matrix(relations), sympy.Matrix(basis)
    lift = R.T * (R * R.T).inv()
    projected = C - C * lift * R
    gram = projected * projected.T
    scale = lcm(*[int(sympy.fraction(x)[1]) for x in gram])
    _, transform, _ = lll_gram([[int(x * scale) for x in gram.row(i)] for i in range(gram.rows)], exact=True)
    C = sympy.Matrix(transform) * C
    half = sympy.Rational(1, 2)
    C = C - (C * lift).applyfunc(lambda x: sympy.floor(x + half)) * R
    return [[int(x) for x in C.row(i)] for i in range(C.rows)]


def _independent_part(field, generators):
    r = field.unit_rank
    k = len(generators)
    with working_precision():
        logs = [unit_log_embedding(u) for u in generators]
        scale = mp.mpf(2) ** RELATION_SCALE_BITS
        rows = []
        for i, row in enumerate(logs):
            rows.append([int(i == j) for j in range(k)] + [int(mp.nint(scale * x)) for x in row[:r]])
        gram = [[sum(a * b for a, b in zip(x, y)) for y in rows] for x in rows]
        _, transform, _ = lll_gram(gram, exact=True)
        relations, basis = transform[: k - r], transform[k - r:]
        tolerance = mp.mpf(10) ** (-(working_dps() // 2))
        for row in relations:
            residual = [sum(e * logs[i][j] for i, e in enumerate(row)) for j in range(len(field.places))]
            if max(abs(x) for x in residual) > tolerance:
                raise PrecisionFailure(f"unit relation search did not converge for {field}")
    return _reduce_complement(relations, basis)


def _from_cache(field, payload):
    units = tuple(field.element([Fraction(c) for c in coeffs]) for coeffs in payload)
    return UnitBasis(field, units, tuple(tuple(log_moduli(u)) for u in units))


def fundamental_units(field):
    """LLL-reduced basis of O_K^x / mu(K) built from cyclotomic units."""
    r = field.unit_rank
    if r == 0:
        return UnitBasis(field, (), ())
    cache = caches["enumeration"]
    key = f"{CACHE_VERSION}:{field.conductor}"
    payload = cache.get(key)
    if payload is not None:
        return _from_cache(field, payload)

    generators = cyclotomic_unit_generators(field)
    logger.info("extracting %s fundamental units of %s from %s generators", r, field, len(generators))
    exponents = _independent_part(field, generators)
    units = []
    for row in exponents:
        unit = field.one()
        for g, e in zip(generators, row):
            if e:
                unit = unit * g ** int(e)
        units.append(unit)

    # reduce in log space so that enumeration boxes stay round
    provisional = UnitBasis(field, tuple(units), tuple(tuple(log_moduli(u)) for u in units))
    scaled = np.rint(provisional.weighted_gram() * 2 ** LOG_SCALE_BITS).astype(object)
    gram = [[int(v) for v in row] for row in scaled]
    _, transform, _ = lll_gram(gram)
    reduced = [provisional.power_product(row) for row in transform]
    for unit in reduced:
        if norm(unit) != 1 or not unit.is_integral():
            raise PrecisionFailure(f"non-unit produced while reducing units of {field}")
    cache.set(key, [[str(c) for c in u.coeffs] for u in reduced])
    return UnitBasis(field, tuple(reduced), tuple(tuple(log_moduli(u)) for u in reduced))


def count_units_with_shift(field, shift, X, basis=None):
    """#{beta in O_K^x : h(shift + L(beta)) <= X}, torsion included.

    h(x) = (1/d) sum_j max(0, x_j) on R^(r1 + r2); ``shift`` must have a
    nonnegative coordinate sum.
    """
    basis = basis or fundamental_units(field)
    d = field.degree
    shift = np.array([float(s) for s in shift], dtype=float)
    total = float(shift.sum())
    if total < -1e-12:
        raise ValueError("shift must have nonnegative coordinate sum")
    if basis.rank == 0:
        inside = np.maximum(shift, 0).sum() / d <= X + 1e-12
        return field.omega if inside else 0
    L = basis.log_matrix() * basis.weights()
    gram = L @ L.T
    places = len(field.places)
    # sum |x_j| <= 2dX - S and the all-ones component is fixed at S / (r + 1)
    radius_sq = (2 * d * X - total) ** 2 - total ** 2 / places
    if radius_sq < 0:
        return 0
    centre = -np.linalg.solve(gram, L @ shift)
    count = 0
    candidates = enumerate_ball(gram, radius_sq, center=centre)
    candidates.append((tuple([0] * basis.rank), 0.0))
    seen = set()
    for x, _ in candidates:
        if x in seen:
            continue
        seen.add(x)
        point = shift + np.array(x, dtype=float) @ L
        if np.maximum(point, 0).sum() / d <= X + 1e-12:
            count += 1
    return count * field.omega
