"""Lattice kernels that work on Gram matrices.

Bases are never materialised here: callers hand over the Gram matrix of
their basis (exact integers whenever the lattice has an integral form) and
get back the reduced Gram together with the unimodular transform, or integer
coefficient vectors found by enumeration.
"""
import logging
import math
from fractions import Fraction

import numpy as np
from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import hermite_normal_form

logger = logging.getLogger(__name__)

FLOAT_SAFE_ENTRY = 2 ** 50


class _Unstable(ArithmeticError):
    pass


def identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def gram_matrix(basis, form=None):
    """Exact Gram matrix B·F·Bᵀ for integer rows B and an optional integer form F."""
    rows = [list(map(int, row)) for row in basis]
    if form is not None:
        form = [list(map(int, row)) for row in form]
        rows_f = [[sum(a * f for a, f in zip(row, col)) for col in zip(*form)] for row in rows]
    else:
        rows_f = rows
    n = len(rows)
    gram = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            value = sum(a * b for a, b in zip(rows_f[i], rows[j]))
            gram[i][j] = gram[j][i] = value
    return gram


def hnf_basis(generators, modulus=None):
    """Row basis of the lattice spanned by integer generator rows.

    The rows come from the columns of the Hermite normal form, so the basis is
    triangular. ``modulus`` must be a multiple of the lattice determinant; the
    lattice must then have full rank.
    """
    dim = len(generators[0])
    columns = DomainMatrix(
        [[ZZ(int(g[i])) for g in generators] for i in range(dim)], (dim, len(generators)), ZZ
    )
    if modulus is not None:
        hnf = hermite_normal_form(columns, D=ZZ(int(modulus)))
    else:
        hnf = hermite_normal_form(columns)
    cols = hnf.to_list()
    rank = len(cols[0]) if cols else 0
    return [[int(cols[i][j]) for i in range(dim)] for j in range(rank)]


def triangular_determinant(basis):
    value = 1
    for i, row in enumerate(basis):
        value *= row[i]
    return abs(value)


def apply_transform(transform, rows):
    return [[sum(u * row[c] for u, row in zip(t_row, rows)) for c in range(len(rows[0]))] for t_row in transform]


def quadratic_form(gram, x):
    return sum(x[i] * sum(gram[i][j] * x[j] for j in range(len(x))) for i in range(len(x)))


def gso(gram):
    """Float Gram–Schmidt data (mu, r) from a positive definite Gram matrix."""
    gram = np.array(gram, dtype=float)
    chol = np.linalg.cholesky(gram)
    diag = np.diag(chol)
    return chol / diag[np.newaxis, :], diag ** 2


def _reduce_pair(gram, transform, k, j, q):
    n = len(gram)
    for c in range(n):
        gram[k][c] -= q * gram[j][c]
    for c in range(n):
        gram[c][k] -= q * gram[c][j]
    transform[k] = [a - q * b for a, b in zip(transform[k], transform[j])]


def _swap(gram, transform, k):
    gram[k], gram[k - 1] = gram[k - 1], gram[k]
    for row in gram:
        row[k], row[k - 1] = row[k - 1], row[k]
    transform[k], transform[k - 1] = transform[k - 1], transform[k]


def _lll_float(gram, delta, max_rounds):
    n = len(gram)
    if max(abs(v) for row in gram for v in row) > FLOAT_SAFE_ENTRY:
        raise _Unstable("entries exceed double precision")
    transform = identity(n)
    try:
        mu, r = gso(gram)
    except np.linalg.LinAlgError as exc:
        raise _Unstable(str(exc)) from exc
    k, rounds = 1, 0
    while k < n:
        rounds += 1
        if rounds > max_rounds:
            raise _Unstable("no convergence")
        reduced = False
        for j in range(k - 1, -1, -1):
            q = int(round(mu[k, j]))
            if q:
                _reduce_pair(gram, transform, k, j, q)
                mu[k, : j + 1] -= q * mu[j, : j + 1]
                reduced = True
        if reduced:
            try:
                mu, r = gso(gram)
            except np.linalg.LinAlgError as exc:
                raise _Unstable(str(exc)) from exc
        if r[k] >= (delta - mu[k, k - 1] ** 2) * r[k - 1]:
            k += 1
        else:
            _swap(gram, transform, k)
            try:
                mu, r = gso(gram)
            except np.linalg.LinAlgError as exc:
                raise _Unstable(str(exc)) from exc
            k = max(k - 1, 1)
    if not np.all(r > 0):
        raise _Unstable("degenerate Gram–Schmidt data")
    return gram, transform


def _round_div(a, b):
    return (2 * a + b) // (2 * b)


def _lll_integral(gram, delta):
    """Integral LLL on a Gram matrix; all GSO data are kept as exact integers."""
    n = len(gram)
    transform = identity(n)
    a, b = delta.numerator, delta.denominator
    d = [1] + [0] * n
    lam = [[0] * n for _ in range(n)]
    d[1] = gram[0][0]
    if d[1] <= 0:
        raise ArithmeticError("Gram matrix is not positive definite")

    def reduce(k, l):
        if 2 * abs(lam[k][l]) > d[l + 1]:
            q = _round_div(lam[k][l], d[l + 1])
            _reduce_pair(gram, transform, k, l, q)
            lam[k][l] -= q * d[l + 1]
            for i in range(l):
                lam[k][i] -= q * lam[l][i]

    def swap(k, kmax):
        _swap(gram, transform, k)
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        x = lam[k][k - 1]
        big = (d[k - 1] * d[k + 1] + x * x) // d[k]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k + 1] * lam[i][k - 1] - x * t) // d[k]
            lam[i][k - 1] = (big * t + x * lam[i][k]) // d[k + 1]
        d[k] = big

    k, kmax = 1, 0
    while k < n:
        if k > kmax:
            kmax = k
            for j in range(k + 1):
                u = gram[k][j]
                for i in range(j):
                    u = (d[i + 1] * u - lam[k][i] * lam[j][i]) // d[i]
                if j < k:
                    lam[k][j] = u
                else:
                    if u <= 0:
                        raise ArithmeticError("Gram matrix is not positive definite")
                    d[k + 1] = u
        reduce(k, k - 1)
        if b * d[k + 1] * d[k - 1] < a * d[k] * d[k] - b * lam[k][k - 1] ** 2:
            swap(k, kmax)
            k = max(1, k - 1)
        else:
            for l in range(k - 2, -1, -1):
                reduce(k, l)
            k += 1
    return gram, transform


def lll_gram(gram, delta=0.99, exact=False):
    """LLL-reduce the lattice with the given Gram matrix.

    Returns ``(reduced_gram, transform, method)`` where the rows of
    ``transform`` express the reduced basis in the input basis.
    """
    if not 0.25 < delta < 1:
        raise ValueError("delta must lie in (0.25, 1)")
    gram = [list(map(int, row)) for row in gram]
    n = len(gram)
    if n <= 1:
        return gram, identity(n), "trivial"
    if not exact:
        try:
            reduced, transform = _lll_float([row[:] for row in gram], delta, max_rounds=50 * n ** 3 + 10000)
            return reduced, transform, "float"
        except _Unstable as exc:
            logger.warning("floating-point LLL failed (%s); using exact arithmetic", exc)
    reduced, transform = _lll_integral([row[:] for row in gram], Fraction(delta).limit_denominator(10 ** 6))
    return reduced, transform, "exact"


def _walk(mu, r, center, bound, on_point, half):
    n = len(r)
    x = [0] * n
    y = [0.0] * n
    bound_ref = [bound]

    def level(i, partial, above_zero):
        shift = 0.0
        for j in range(i + 1, n):
            shift += mu[j][i] * y[j]
        ctr = center[i] - shift
        remaining = bound_ref[0] - partial
        if remaining < 0:
            return
        w = math.sqrt(remaining / r[i])
        lo, hi = math.ceil(ctr - w), math.floor(ctr + w)
        if half and above_zero:
            lo = max(lo, 0)
        candidates = sorted(range(lo, hi + 1), key=lambda v: abs(v - ctr))
        for v in candidates:
            dist = v - ctr
            value = partial + r[i] * dist * dist
            if value > bound_ref[0]:
                break
            x[i] = v
            y[i] = v - center[i]
            if i == 0:
                new_bound = on_point(tuple(x), value)
                if new_bound is not None:
                    bound_ref[0] = new_bound
            else:
                level(i - 1, value, above_zero and v == 0)
        x[i] = 0
        y[i] = -center[i]

    for i in range(n):
        y[i] = -center[i]
    level(n - 1, 0.0, True)


def enumerate_ball(gram, radius_sq, center=None, half=False, slack=1e-9):
    """All integer vectors x with (x-c)ᵀG(x-c) ≤ radius_sq (Fincke–Pohst).

    ``gram`` may be integral or real. With ``half`` set and no centre, only
    one of ±x is reported. The zero vector is never reported when the centre
    is the origin.
    """
    n = len(gram)
    mu, r = gso(gram)
    mu = mu.tolist()
    r = r.tolist()
    origin = center is None
    center = [0.0] * n if origin else [float(c) for c in center]
    bound = radius_sq * (1 + slack) + slack
    found = []

    def keep(x, value):
        if origin and not any(x):
            return None
        found.append((x, value))
        return None

    _walk(mu, r, center, bound, keep, half and origin)
    return found


def shortest_nonzero(gram, slack=1e-9):
    """Schnorr–Euchner search for a shortest nonzero vector of an LLL-reduced Gram."""
    n = len(gram)
    mu, r = gso(gram)
    mu = mu.tolist()
    r = r.tolist()
    best_index = min(range(n), key=lambda i: gram[i][i])
    best = [tuple(int(i == best_index) for i in range(n)), float(gram[best_index][best_index])]

    def shrink(x, value):
        if not any(x):
            return None
        if value < best[1]:
            best[0], best[1] = x, value
        return best[1] * (1 + slack)

    _walk(mu, r, [0.0] * n, best[1] * (1 + slack), shrink, True)
    return best[0]
