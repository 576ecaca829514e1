"""Residue fields of unramified primes and uniform subspaces of F_q^t."""
import logging
from dataclasses import dataclass

import numpy as np
import sympy
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_gcdex, gf_mul, gf_rem, gf_strip

from utils.exceptions import InvalidArgument, RamifiedPrime

logger = logging.getLogger(__name__)


class ResidueField:
    """F_q = F_p[x]/(g) with elements encoded as integers sum_j c_j p^j."""

    def __init__(self, p, modulus):
        self.p = int(p)
        self.modulus = tuple(int(c) % self.p for c in modulus)
        self.degree = len(self.modulus) - 1
        self.q = self.p ** self.degree
        self._gf_modulus = list(reversed(self.modulus))

    def __repr__(self):
        return f"ResidueField(q={self.q})"

    def digits(self, a):
        out = []
        for _ in range(self.degree):
            a, c = divmod(a, self.p)
            out.append(c)
        return out

    def encode(self, digits):
        value = 0
        for c in reversed(digits):
            value = value * self.p + int(c) % self.p
        return value

    def _to_gf(self, a):
        return gf_strip(list(reversed(self.digits(a))))

    def _from_gf(self, poly):
        return self.encode(list(reversed([int(c) for c in poly])))

    def add(self, a, b):
        if self.degree == 1:
            return (a + b) % self.p
        return self.encode([x + y for x, y in zip(self.digits(a), self.digits(b))])

    def neg(self, a):
        if self.degree == 1:
            return -a % self.p
        return self.encode([-x for x in self.digits(a)])

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.degree == 1:
            return a * b % self.p
        product = gf_mul(self._to_gf(a), self._to_gf(b), self.p, ZZ)
        return self._from_gf(gf_rem(product, self._gf_modulus, self.p, ZZ))

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("zero has no inverse in the residue field")
        if self.degree == 1:
            return pow(a, -1, self.p)
        s, _, h = gf_gcdex(self._to_gf(a), self._gf_modulus, self.p, ZZ)
        if h != [1]:
            raise ArithmeticError("residue modulus is not irreducible")
        return self._from_gf(s)


@dataclass(frozen=True)
class PrimeSplit:
    field: object
    p: int
    f: int
    g: int
    factor: tuple

    @property
    def q(self):
        return self.p ** self.f

    def residue_field(self):
        return ResidueField(self.p, self.factor)

    def to_json(self):
        return {"m": self.field.conductor, "p": self.p, "f": self.f, "q": self.q, "factor": list(self.factor)}


def split_prime(field, p):
    """Residue degree of p and the lexicographically smallest irreducible factor of Phi_m mod p."""
    p = int(p)
    m = field.conductor
    if not sympy.isprime(p):
        raise RamifiedPrime(f"{p} is not prime", p=p)
    # Q(zeta_m) = Q(zeta_(m/2)) for m = 2 mod 4
    core = m // 2 if m % 4 == 2 else m
    if core % p == 0:
        raise RamifiedPrime(f"{p} ramifies in {field}", p=p)
    f = int(sympy.n_order(p, core)) if core > 1 else 1
    phi = sympy.Poly(list(reversed(field.minimal_polynomial)), sympy.Symbol("x"), modulus=p)
    _, factors = phi.factor_list()
    candidates = []
    for poly, _ in factors:
        coeffs = [int(c) % p for c in poly.all_coeffs()]
        if len(coeffs) - 1 != f:
            raise ArithmeticError(f"factor of degree {len(coeffs) - 1} modulo {p}, expected {f}")
        candidates.append(tuple(coeffs))
    high_first = min(candidates)
    split = PrimeSplit(field, p, f, field.degree // f, tuple(reversed(high_first)))
    logger.debug("%s splits in %s with f = %s, g = %s", p, field, split.f, split.g)
    return split


@dataclass(frozen=True)
class Code:
    """Row-reduced echelon basis of an s-dimensional subspace of F_q^t."""
    q: int
    t: int
    s: int
    rows: tuple
    draws: int = 1

    @property
    def pivots(self):
        return tuple(next(j for j, c in enumerate(row) if c) for row in self.rows)

    def to_json(self):
        return {"q": self.q, "t": self.t, "s": self.s, "rows": [list(row) for row in self.rows]}


def row_reduce(matrix, F):
    """Reduced echelon form over F; returns the nonzero rows."""
    rows = [list(row) for row in matrix]
    n_rows, n_cols = len(rows), len(rows[0]) if rows else 0
    rank = 0
    for col in range(n_cols):
        pivot = next((i for i in range(rank, n_rows) if rows[i][col]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        scale = F.inv(rows[rank][col])
        rows[rank] = [F.mul(scale, c) for c in rows[rank]]
        for i in range(n_rows):
            if i != rank and rows[i][col]:
                factor = rows[i][col]
                rows[i] = [F.sub(a, F.mul(factor, b)) for a, b in zip(rows[i], rows[rank])]
        rank += 1
        if rank == n_rows:
            break
    return [tuple(row) for row in rows[:rank]]


def sample_code(seed, q, t, s, residue_field=None):
    """Uniform s-dimensional subspace of F_q^t by rejection of rank-deficient draws.

    ``seed`` may be anything ``numpy.random.default_rng`` accepts, including a
    generator. Prime-power q needs the residue field of the prime.
    """
    if not 1 <= s <= t - 1:
        raise InvalidArgument(f"need 1 <= s <= t - 1, got s = {s}, t = {t}", s=s, t=t)
    F = residue_field
    if F is None:
        if not sympy.isprime(q):
            raise InvalidArgument(f"q = {q} is not prime; pass the residue field", q=q)
        F = ResidueField(q, (0, 1))
    if F.q != q:
        raise InvalidArgument(f"residue field has {F.q} elements, not {q}", q=q)
    rng = np.random.default_rng(seed)
    draws = 0
    while True:
        draws += 1
        matrix = rng.integers(0, q, size=(s, t)).tolist()
        rows = row_reduce(matrix, F)
        if len(rows) == s:
            return Code(q, t, s, tuple(rows), draws)
