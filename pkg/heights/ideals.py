"""Prime ideals of Z[zeta_m] and generators of principal ideals."""
import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import sympy
from django.core.cache import caches

from fieldcore.cyclotomic import X, norm
from utils.exceptions import EnumerationUnavailable
from utils.lattice import apply_transform, enumerate_ball, gram_matrix, hnf_basis, lll_gram

logger = logging.getLogger(__name__)

CACHE_VERSION = "primes-v1"
GENERATOR_SEARCH_ROUNDS = 12


@dataclass(frozen=True)
class PrimeIdeal:
    """The prime (p, g(zeta)) of residue degree f and ramification index e."""
    p: int
    residue_degree: int
    ramification: int
    residue_poly: tuple
    generator: object = None

    @property
    def norm(self):
        return self.p ** self.residue_degree

    def label(self):
        return f"({self.p}, {'+'.join(f'{c}x^{i}' for i, c in enumerate(self.residue_poly) if c)})"


def ideal_basis(field, p, residue_poly):
    """HNF row basis of (p, g(zeta)) in power-basis coordinates."""
    d = field.degree
    g = field.element([Fraction(c) for c in residue_poly])
    generators = [[p * int(i == j) for j in range(d)] for i in range(d)]
    for j in range(d):
        generators.append([int(c) for c in (g * field.zeta(j)).coeffs])
    return hnf_basis(generators, modulus=p ** (len(residue_poly) - 1))


def _float_norm(field, coeffs):
    m = field.conductor
    powers = np.exp(2j * np.pi * np.outer(field.residues, np.arange(field.degree)) / m)
    return float(np.prod(np.abs(powers @ np.array(coeffs, dtype=float))))


def principal_generator(field, basis, target_norm):
    """An element of the lattice ``basis`` of absolute norm ``target_norm``.

    Raises EnumerationUnavailable when no generator turns up, which signals a
    non-principal ideal.
    """
    d = field.degree
    gram = gram_matrix(basis, field.trace_form())
    reduced, transform, _ = lll_gram(gram)
    rows = apply_transform(transform, basis)
    radius_sq = 1.25 * d * target_norm ** (2 / d)
    tried = set()
    for _ in range(GENERATOR_SEARCH_ROUNDS):
        candidates = enumerate_ball(reduced, radius_sq, half=True)
        candidates.sort(key=lambda item: (item[1], item[0]))
        for x, _ in candidates:
            if x in tried:
                continue
            tried.add(x)
            coeffs = [sum(c * row[i] for c, row in zip(x, rows)) for i in range(d)]
            approx = _float_norm(field, coeffs)
            if abs(approx - target_norm) > 1e-6 * target_norm:
                continue
            element = field.element([Fraction(c) for c in coeffs])
            if norm(element) == target_norm:
                return element
        radius_sq *= 2
    raise EnumerationUnavailable(f"no generator of norm {target_norm} found in {field}")


def _factor_mod_p(field, p):
    phi = sympy.Poly(list(reversed(field.minimal_polynomial)), X, modulus=p)
    _, factors = phi.factor_list()
    out = []
    for factor, multiplicity in factors:
        coeffs = tuple(int(c) % p for c in reversed(factor.all_coeffs()))
        out.append((coeffs, multiplicity))
    return sorted(out)


def primes_above(field, p):
    m = field.conductor
    primes = []
    for coeffs, multiplicity in _factor_mod_p(field, p):
        primes.append(PrimeIdeal(p, len(coeffs) - 1, multiplicity, coeffs))
    if m % p and sum(q.residue_degree for q in primes) != field.degree:
        raise ArithmeticError(f"inconsistent splitting of {p} in {field}")
    return primes


def prime_ideals_up_to(field, bound, with_generators=True):
    """Prime ideals of norm <= bound, sorted by (norm, p, residue polynomial)."""
    cache = caches["enumeration"]
    key = f"{CACHE_VERSION}:{field.conductor}:{int(bound)}:{int(with_generators)}"
    payload = cache.get(key)
    if payload is not None:
        return [
            PrimeIdeal(p, f, e, tuple(poly), field.element([Fraction(c) for c in gen]) if gen else None)
            for p, f, e, poly, gen in payload
        ]
    ideals = []
    for p in sympy.primerange(2, int(bound) + 1):
        for prime in primes_above(field, p):
            if prime.norm > bound:
                continue
            if with_generators:
                generator = principal_generator(field, ideal_basis(field, p, prime.residue_poly), prime.norm)
                prime = PrimeIdeal(prime.p, prime.residue_degree, prime.ramification, prime.residue_poly, generator)
                logger.debug("prime %s of norm %s generated by %s", prime.label(), prime.norm, generator)
            ideals.append(prime)
    ideals.sort(key=lambda q: (q.norm, q.p, q.residue_poly))
    cache.set(key, [
        (q.p, q.residue_degree, q.ramification, list(q.residue_poly),
         [str(c) for c in q.generator.coeffs] if q.generator is not None else None)
        for q in ideals
    ])
    return ideals


@dataclass(frozen=True)
class IntegralIdeal:
    norm: int
    factors: tuple
    generator: object

    @property
    def support(self):
        return frozenset(i for i, _ in self.factors)


def integral_ideals_up_to(field, bound):
    """All integral ideals of norm <= bound as products of prime ideals, with generators."""
    primes = prime_ideals_up_to(field, bound)
    out = []

    def extend(start, current_norm, factors, generator):
        out.append(IntegralIdeal(current_norm, tuple(factors), generator))
        for i in range(start, len(primes)):
            prime = primes[i]
            if current_norm * prime.norm > bound:
                break
            n, power, e = current_norm, generator, 0
            while n * prime.norm <= bound:
                n *= prime.norm
                power = power * prime.generator
                e += 1
                extend(i + 1, n, factors + [(i, e)], power)

    extend(0, 1, [], field.one())
    out.sort(key=lambda a: (a.norm, a.factors))
    return out
