"""Dirichlet characters modulo m from a product decomposition of (Z/m)^x."""
from functools import lru_cache
from itertools import product
from math import gcd

from mpmath import mp
from sympy import factorint, primitive_root, totient
from sympy.ntheory.modular import crt


def _lift(a, q, m):
    """The residue mod m that is a mod q and 1 mod m/q."""
    rest = m // q
    if rest == 1:
        return a % m
    return int(crt([q, rest], [a % q, 1])[0]) % m


@lru_cache(maxsize=None)
def unit_group_generators(m):
    """Pairs (g, order) whose cyclic groups multiply to (Z/m)^x directly."""
    generators = []
    for p, k in sorted(factorint(m).items()):
        q = p ** k
        if p == 2:
            if k >= 2:
                generators.append((_lift(q - 1, q, m), 2))
            if k >= 3:
                generators.append((_lift(5, q, m), 2 ** (k - 2)))
        else:
            generators.append((_lift(primitive_root(q), q, m), int(totient(q))))
    return tuple(generators)


@lru_cache(maxsize=None)
def discrete_logs(m):
    """Map each unit a mod m to its exponent vector on ``unit_group_generators(m)``."""
    generators = unit_group_generators(m)
    table = {}
    for exponents in product(*(range(order) for _, order in generators)):
        a = 1 % m
        for (g, _), e in zip(generators, exponents):
            a = a * pow(g, e, m) % m
        table[a] = exponents
    if len(table) != int(totient(m)):
        raise ArithmeticError(f"generators do not decompose (Z/{m})^x")
    return table


def characters(m):
    """All phi(m) characters mod m as value lists of length m, for ``mp.dirichlet``."""
    generators = unit_group_generators(m)
    logs = discrete_logs(m)
    out = []
    for twist in product(*(range(order) for _, order in generators)):
        values = []
        for n in range(m):
            if gcd(n, m) != 1:
                values.append(mp.zero)
                continue
            turns = sum(mp.mpf(c * e) / order for c, e, (_, order) in zip(twist, logs[n % m], generators))
            values.append(mp.expjpi(2 * turns))
        out.append(values)
    return out
