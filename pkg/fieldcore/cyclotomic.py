"""Exact arithmetic in cyclotomic fields Q(zeta_m).

Elements are rational coefficient vectors in the power basis 1, zeta, ...,
zeta^(d-1). The power basis is an integral basis, so an element is an
algebraic integer iff all of its coefficients are integers. Q itself is the
degenerate case m in {1, 2}.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm

import sympy
from django.conf import settings
from mpmath import mp

from utils.exceptions import FieldMismatch, InvalidArgument, ZeroDivisorError
from utils.intervals import around, working_dps
from utils.lattice import hnf_basis, triangular_determinant

logger = logging.getLogger(__name__)

X = sympy.Symbol("x")


def _fraction(value):
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    return Fraction(int(value.numerator), int(value.denominator))


def ramanujan_sum(m, k):
    """Trace of zeta_m^k down to Q."""
    g = gcd(k, m)
    return int(sympy.mobius(m // g)) * int(sympy.totient(m)) // int(sympy.totient(m // g))


@dataclass(frozen=True, eq=False)
class CyclotomicField:
    conductor: int
    degree: int
    signature: tuple
    omega: int
    unit_rank: int
    minimal_polynomial: tuple
    residues: tuple
    embedding_roots: tuple = field(repr=False)
    powers: tuple = field(repr=False)

    def __eq__(self, other):
        return isinstance(other, CyclotomicField) and other.conductor == self.conductor

    def __hash__(self):
        return hash(("CyclotomicField", self.conductor))

    def __str__(self):
        return f"Q(zeta_{self.conductor})"

    @property
    def is_real(self):
        return self.signature[1] == 0

    @property
    def places(self):
        """One residue per archimedean place."""
        if self.is_real:
            return self.residues
        return tuple(a for a in self.residues if 2 * a < self.conductor)

    @property
    def place_multiplicity(self):
        return 1 if self.is_real else 2

    def element(self, coeffs):
        coeffs = [_fraction(c) for c in coeffs]
        if len(coeffs) > self.degree:
            return FieldElement.from_long(self, coeffs)
        coeffs += [Fraction(0)] * (self.degree - len(coeffs))
        return FieldElement(self, tuple(coeffs))

    def rational(self, value):
        return self.element([_fraction(Fraction(value))])

    def zero(self):
        return self.rational(0)

    def one(self):
        return self.rational(1)

    def zeta(self, k=1):
        return FieldElement(self, tuple(Fraction(c) for c in self.powers[k % self.conductor]))

    def trace_form(self):
        """Integer Gram matrix of the power basis under (x, y) -> Tr(x * conj(y))."""
        d, m = self.degree, self.conductor
        return [[ramanujan_sum(m, i - j) for j in range(d)] for i in range(d)]


def _power_table(m, minpoly):
    d = len(minpoly) - 1
    table = []
    current = [0] * d
    current[0] = 1
    for _ in range(m):
        table.append(tuple(current))
        top = current[-1]
        shifted = [0] + current[:-1]
        if top:
            shifted = [s - top * c for s, c in zip(shifted, minpoly[:-1])]
        current = shifted
    return tuple(table)


@lru_cache(maxsize=None)
def _roots(m, dps):
    with mp.workdps(dps):
        return tuple(mp.expjpi(mp.mpf(2 * k) / m) for k in range(m))


@lru_cache(maxsize=64)
def make_field(m):
    if not isinstance(m, int) or isinstance(m, bool) or m < 1:
        raise InvalidArgument(f"conductor must be a positive integer, got {m!r}", conductor=m)
    degree = int(sympy.totient(m))
    poly = sympy.Poly(sympy.cyclotomic_poly(m, X), X)
    minpoly = tuple(int(c) for c in reversed(poly.all_coeffs()))
    residues = tuple(a for a in range(m) if gcd(a, m) == 1)
    signature = (1, 0) if m <= 2 else (0, degree // 2)
    omega = 2 if m <= 2 else (m if m % 2 == 0 else 2 * m)
    roots = _roots(m, working_dps())
    logger.debug("built cyclotomic field of conductor %s and degree %s", m, degree)
    return CyclotomicField(
        conductor=m,
        degree=degree,
        signature=signature,
        omega=omega,
        unit_rank=signature[0] + signature[1] - 1,
        minimal_polynomial=minpoly,
        residues=residues,
        embedding_roots=tuple(roots[a] for a in residues),
        powers=_power_table(m, minpoly),
    )


@dataclass(frozen=True)
class FieldElement:
    field: CyclotomicField
    coeffs: tuple

    @classmethod
    def from_long(cls, parent, coeffs):
        """Reduce an arbitrary-length coefficient list modulo Phi_m."""
        out = [Fraction(0)] * parent.degree
        for k, c in enumerate(coeffs):
            if c:
                for i, p in enumerate(parent.powers[k % parent.conductor]):
                    if p:
                        out[i] += c * p
        return cls(parent, tuple(out))

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field} and {other.field} differ")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.rational(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.field, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        d = self.field.degree
        product = [Fraction(0)] * (2 * d - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        product[i + j] += a * b
        return FieldElement.from_long(self.field, product)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, exponent):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result, base = self.field.one(), self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __bool__(self):
        return any(self.coeffs)

    def __str__(self):
        return "[" + ", ".join(str(c) for c in self.coeffs) + "]"

    @property
    def denominator(self):
        return lcm(*(c.denominator for c in self.coeffs))

    def is_integral(self):
        return self.denominator == 1

    def integer_polynomial(self):
        den = self.denominator
        return den, [int(c * den) for c in self.coeffs]

    def inverse(self):
        if not self:
            raise ZeroDivisorError("division by zero in " + str(self.field))
        poly = sympy.Poly(list(reversed(self.coeffs)), X, domain=sympy.QQ)
        modulus = sympy.Poly(list(reversed(self.field.minimal_polynomial)), X, domain=sympy.QQ)
        inverse = poly.invert(modulus)
        coeffs = [_fraction(c) for c in reversed(inverse.all_coeffs())]
        return self.field.element(coeffs)

    def galois(self, a):
        """Image under zeta -> zeta^a (a coprime to m)."""
        m = self.field.conductor
        if gcd(a, m) != 1:
            raise InvalidArgument(f"{a} is not a unit modulo {m}")
        long = [Fraction(0)] * m
        for j, c in enumerate(self.coeffs):
            long[(a * j) % m] += c
        return FieldElement.from_long(self.field, long)

    def conjugate(self):
        return self.galois(-1 % self.field.conductor) if self.field.conductor > 2 else self

    def multiplication_matrix(self):
        """Rows are the coefficient vectors of alpha * zeta^j."""
        return [list((self * self.field.zeta(j)).coeffs) for j in range(self.field.degree)]

    def to_json(self):
        return [str(c) for c in self.coeffs]


def field_arith(a, b, op):
    if not isinstance(a, FieldElement) or not isinstance(b, FieldElement):
        raise InvalidArgument("field_arith expects field elements")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise InvalidArgument(f"unknown operation {op!r}")


def _nonzero(alpha):
    if not alpha:
        raise ZeroDivisorError("operation undefined at zero")


def embeddings(alpha, dps=None):
    """All d complex embeddings, ordered like ``field.residues``."""
    dps = dps or working_dps()
    parent = alpha.field
    m = parent.conductor
    magnitude = sum(abs(c) for c in alpha.coeffs) or 1
    extra = max(0, int(mp.log10(mp.mpf(magnitude.numerator) / magnitude.denominator))) + 10
    roots = _roots(m, dps + extra)
    with mp.workdps(dps + extra):
        values = []
        for a in parent.residues:
            total = mp.mpc(0)
            for j, c in enumerate(alpha.coeffs):
                if c:
                    total += mp.mpf(c.numerator) / c.denominator * roots[(a * j) % m]
            values.append(total)
    with mp.workdps(dps):
        return [+v for v in values]


def place_moduli(alpha, dps=None):
    """Certified enclosures of |sigma(alpha)|, one per archimedean place.

    Precision is raised until each radius is at most EMBEDDING_TOLERANCE
    times the smallest modulus.
    """
    _nonzero(alpha)
    dps = dps or working_dps()
    tolerance = min(mp.mpf(settings.TOOLKIT["EMBEDDING_TOLERANCE"]), mp.mpf("0.01"))
    if tolerance <= 0:
        raise InvalidArgument(f"EMBEDDING_TOLERANCE must be positive, got {tolerance}")
    parent = alpha.field
    index = {a: i for i, a in enumerate(parent.residues)}
    magnitude = sum(abs(c) for c in alpha.coeffs) + 1
    while True:
        values = embeddings(alpha, dps=dps + 10)
        with mp.workdps(dps + 10):
            radius = mp.mpf(magnitude.numerator) / magnitude.denominator * mp.mpf(10) ** (-dps)
            moduli = [abs(values[index[a]]) for a in parent.places]
            if radius <= tolerance * min(moduli):
                return [around(v, radius) for v in moduli]
        logger.debug("raising embedding precision to %s digits", 2 * dps)
        dps *= 2


def norm(alpha):
    """|N_{K/Q}(alpha)| as an exact rational, from the resultant with Phi_m."""
    _nonzero(alpha)
    parent = alpha.field
    den, numerator = alpha.integer_polynomial()
    phi = sympy.Poly(list(reversed(parent.minimal_polynomial)), X, domain=sympy.ZZ)
    poly = sympy.Poly(list(reversed(numerator)), X, domain=sympy.ZZ)
    if poly.degree() <= 0:
        res = int(numerator[0]) ** parent.degree
    else:
        res = int(sympy.resultant(phi, poly))
    return Fraction(abs(res), den ** parent.degree)


def denominator_index(alpha):
    """[O_K : alpha^-1 O_K ∩ O_K] from the HNF of {x : alpha x integral}."""
    _nonzero(alpha)
    d = alpha.field.degree
    rows = alpha.multiplication_matrix()
    den = lcm(*(c.denominator for row in rows for c in row))
    if den == 1:
        return 1
    # column j of A is den * (alpha zeta^j); the kernel index is den^d / [Z^d : A Z^d + den Z^d]
    generators = [[int(c * den) for c in row] for row in rows]
    generators += [[den * int(i == j) for j in range(d)] for i in range(d)]
    basis = hnf_basis(generators, modulus=den ** d)
    return den ** d // triangular_determinant(basis)


def is_root_of_unity(alpha):
    _nonzero(alpha)
    return alpha ** alpha.field.omega == alpha.field.one()


def trace(alpha):
    m = alpha.field.conductor
    return sum((c * ramanujan_sum(m, j) for j, c in enumerate(alpha.coeffs)), Fraction(0))
