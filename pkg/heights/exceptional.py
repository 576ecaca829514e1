"""The exceptional unit set S_K of a cyclotomic field.

S_K collects the units u whose totally positive u * conj(u) is a root of one
of the low-height exceptions for totally positive algebraic integers. Outside
S_K every unit has height above 0.271763.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations

import sympy
from mpmath import mp

from fieldcore.cyclotomic import X, trace
from utils.exceptions import ToolkitError
from utils.intervals import working_dps
from utils.lattice import enumerate_ball, lll_gram, quadratic_form

logger = logging.getLogger(__name__)

# the sextic carries the corrected coefficients 41x^4 - 63x^3
EXCEPTION_POLYNOMIALS = (
    "x - 1",
    "x**2 - 3*x + 1",
    "x**4 - 7*x**3 + 13*x**2 - 7*x + 1",
    "x**6 - 11*x**5 + 41*x**4 - 63*x**3 + 41*x**2 - 11*x + 1",
    "x**8 - 15*x**7 + 83*x**6 - 220*x**5 + 303*x**4 - 220*x**3 + 83*x**2 - 15*x + 1",
    "x**8 - 15*x**7 + 84*x**6 - 225*x**5 + 311*x**4 - 225*x**3 + 84*x**2 - 15*x + 1",
    "x**16 - 31*x**15 + 413*x**14 - 3141*x**13 + 15261*x**12 - 50187*x**11 + 115410*x**10"
    " - 189036*x**9 + 222621*x**8 - 189036*x**7 + 115410*x**6 - 50187*x**5 + 15261*x**4"
    " - 3141*x**3 + 413*x**2 - 31*x + 1",
)
SPLITTING_PROBES = 6
MAX_ROOT_SEARCH_DEGREE = 8


@dataclass(frozen=True)
class ExceptionSet:
    field: object
    members: tuple
    values: tuple

    @property
    def cardinality(self):
        return self.field.omega * len(self.members)

    def to_json(self):
        return {
            "conductor": self.field.conductor,
            "cardinality": self.cardinality,
            "members": [u.to_json() for u in self.members],
            "values": [b.to_json() for b in self.values],
        }


def verify_sextic():
    """The sextic must be the product of the minimal polynomials of (2cos(2pi/7))^2 and its inverse."""
    sextic = sympy.Poly(sympy.sympify(EXCEPTION_POLYNOMIALS[3]), X)
    _, factors = sextic.factor_list()
    if sorted(f.degree() for f, _ in factors) != [3, 3]:
        raise ToolkitError("the sextic exception does not split into two cubics")
    with mp.workdps(working_dps()):
        alpha = (2 * mp.cos(2 * mp.pi / 7)) ** 2
        tolerance = mp.mpf(10) ** (-(working_dps() - 10))
        hits = []
        for f, _ in factors:
            coeffs = [int(c) for c in f.all_coeffs()]
            hits.append((abs(mp.polyval(coeffs, alpha)) < tolerance, abs(mp.polyval(coeffs, 1 / alpha)) < tolerance))
    if sorted(hits) != [(False, True), (True, False)]:
        raise ToolkitError("the sextic exception does not vanish at (2cos(2pi/7))^2 and its inverse")
    return [f for f, _ in factors]


@lru_cache(maxsize=1)
def irreducible_exceptions():
    verify_sextic()
    seen = {}
    for text in EXCEPTION_POLYNOMIALS:
        _, factors = sympy.Poly(sympy.sympify(text), X).factor_list()
        for factor, _ in factors:
            key = tuple(int(c) for c in factor.all_coeffs())
            seen[key] = factor
    return [seen[key] for key in sorted(seen, key=lambda k: (len(k), k))]


def _splits_completely(poly, m):
    """Necessary condition for a root in Q(zeta_m): complete splitting at primes 1 mod m."""
    disc = int(sympy.discriminant(poly))
    checked, p = 0, 1
    while checked < SPLITTING_PROBES:
        p += m
        if not sympy.isprime(p) or disc % p == 0:
            continue
        checked += 1
        _, factors = sympy.Poly(poly.as_expr(), X, modulus=p).factor_list()
        if any(f.degree() != 1 or e != 1 for f, e in factors):
            return False
    return True


def _closure(group, g, m):
    """The subgroup generated by ``group`` and ``g`` in (Z/m)^x."""
    elements = set(group)
    power = g % m
    while power not in group:
        elements.update(h * power % m for h in group)
        power = power * g % m
    return frozenset(elements)


def _subgroups(residues, m, order):
    """All subgroups of (Z/m)^x of the given order, grown one generator at a time."""
    trivial = frozenset({1 % m})
    seen = {trivial}
    frontier = [trivial]
    while frontier:
        group = frontier.pop()
        for g in residues:
            if g in group:
                continue
            larger = _closure(group, g, m)
            if order % len(larger) or larger in seen:
                continue
            seen.add(larger)
            frontier.append(larger)
    return sorted((group for group in seen if len(group) == order), key=sorted)


def _inverse_vandermonde(field, dps):
    m = field.conductor
    with mp.workdps(dps):
        roots = [mp.expjpi(mp.mpf(2 * k) / m) for k in range(m)]
        V = mp.matrix(field.degree, field.degree)
        for i, a in enumerate(field.residues):
            for j in range(field.degree):
                V[i, j] = roots[a * j % m]
        return mp.inverse(V)


def roots_in_field(field, poly):
    """All beta in Z[zeta_m] with poly(beta) = 0.

    A root generates the fixed field of a subgroup H of index deg(poly), and
    its embedding values are constant on cosets of H; each bijection between
    cosets and complex roots is solved for integral coordinates and verified
    exactly.
    """
    e = poly.degree()
    d, m = field.degree, field.conductor
    if d % e:
        return []
    if e > MAX_ROOT_SEARCH_DEGREE:
        raise ToolkitError(f"root search for a degree {e} polynomial in {field} is not supported")
    dps = working_dps()
    coeffs = [int(c) for c in poly.all_coeffs()]
    with mp.workdps(dps):
        complex_roots = [mp.re(r) for r in mp.polyroots(coeffs, maxsteps=200, extraprec=2 * dps)]
    inverse = _inverse_vandermonde(field, dps)
    found = {}
    for group in _subgroups(field.residues, m, d // e):
        cosets = []
        coset_of = {}
        for a in field.residues:
            if a in coset_of:
                continue
            coset = sorted(a * h % m for h in group)
            for b in coset:
                coset_of[b] = len(cosets)
            cosets.append(coset)
        for assignment in permutations(complex_roots):
            with mp.workdps(dps):
                values = mp.matrix([assignment[coset_of[a]] for a in field.residues])
                solution = inverse * values
                rounded = [int(mp.nint(mp.re(c))) for c in solution]
                error = max(abs(c - r) for c, r in zip(solution, rounded))
            if error > mp.mpf(10) ** (-(dps // 2)):
                continue
            beta = field.element(rounded)
            value = field.zero()
            for c in coeffs:
                value = value * beta + c
            if not value:
                found[beta.coeffs] = beta
    return [found[key] for key in sorted(found)]


def units_with_product(field, beta):
    """Units u with u * conj(u) = beta, found among elements of T2 = Tr(beta)."""
    target = trace(beta)
    if target.denominator != 1:
        return []
    target = int(target)
    form = field.trace_form()
    reduced, transform, _ = lll_gram(form)
    units = []
    for x, _ in enumerate_ball(reduced, target, half=True):
        if quadratic_form(reduced, x) != target:
            continue
        coeffs = [sum(c * transform[k][i] for k, c in enumerate(x)) for i in range(field.degree)]
        u = field.element([Fraction(c) for c in coeffs])
        if u * u.conjugate() == beta:
            units.append(u)
            break
    return units


@lru_cache(maxsize=None)
def exception_set(field):
    """S_K as mu(K)-orbit representatives; the orbit of 1 is mu(K) itself."""
    members = [field.one()]
    values = []
    for poly in irreducible_exceptions():
        if poly.degree() == 1 or field.degree % poly.degree():
            continue
        if not _splits_completely(poly, field.conductor):
            continue
        for beta in roots_in_field(field, poly):
            units = units_with_product(field, beta)
            if units:
                values.append(beta)
                members.extend(units)
    result = ExceptionSet(field, tuple(members), tuple(values))
    logger.info("exceptional unit set of %s has %s elements", field, result.cardinality)
    return result
