"""Construction-A module lattices beta * pi^-1(S) in K_R^t and exact SVP on them.

Lattices are kept in power-basis coordinates: a basis row is the
concatenation of the coefficient vectors of its t entries in O_K. The
Euclidean structure of K_R^t is the block trace form Tr(x conj(y)), which is
integral on these coordinates, times ``scale ** 2``.
"""
import logging
from dataclasses import dataclass, field as dataclass_field, replace
from functools import lru_cache

import numpy as np
from django.conf import settings
from mpmath import mp
from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix

from fieldcore.cyclotomic import embeddings, make_field
from svpredict.predictions import radius_for_volume
from utils.exceptions import DimensionTooLarge, InvalidArgument, LatticeInvariantError
from utils.intervals import working_precision
from utils.lattice import (
    apply_transform,
    enumerate_ball,
    gram_matrix,
    hnf_basis,
    identity,
    lll_gram,
    quadratic_form,
    shortest_nonzero,
    triangular_determinant,
)

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def trace_form_determinant(m):
    """|disc(Q(zeta_m))|, the determinant of the trace form on the power basis."""
    form = make_field(m).trace_form()
    d = len(form)
    return abs(int(DomainMatrix([[ZZ(v) for v in row] for row in form], (d, d), ZZ).det()))


def block_form(field, t):
    d = field.degree
    form = field.trace_form()
    out = [[0] * (d * t) for _ in range(d * t)]
    for b in range(t):
        for i in range(d):
            for j in range(d):
                out[b * d + i][b * d + j] = form[i][j]
    return out


def unit_covolume_scale(field, t, index):
    """Factor c with c^n sqrt(det Gram) = 1."""
    n = field.degree * t
    with working_precision():
        log_covolume = mp.ln(index) + mp.mpf(t) / 2 * mp.ln(trace_form_determinant(field.conductor))
        return mp.exp(-log_covolume / n)


@dataclass(frozen=True)
class LatticeBasis:
    field: object
    t: int
    rows: tuple
    gram: tuple
    index: int
    scale: object
    beta: object = 1
    method: str = "hnf"
    provenance: dict = dataclass_field(default_factory=dict, compare=False)

    @property
    def n(self):
        return len(self.rows)

    @property
    def covolume(self):
        """scale^n [O_K^t : L] |disc|^(t/2); one after normalisation."""
        with working_precision():
            log_volume = (
                self.n * mp.ln(self.scale) + mp.ln(self.index)
                + mp.mpf(self.t) / 2 * mp.ln(trace_form_determinant(self.field.conductor))
            )
            return mp.exp(log_volume)

    def norm(self, vector):
        """Euclidean length of a vector given in power-basis coordinates."""
        form = block_form(self.field, self.t)
        with working_precision():
            return self.scale * mp.sqrt(quadratic_form(form, list(vector)))

    def coordinates(self, coefficients):
        """Power-basis coordinates of an integer combination of the basis rows."""
        return tuple(sum(c * row[j] for c, row in zip(coefficients, self.rows)) for j in range(self.n))

    def contains(self, vector):
        if self.index == 1:
            return True
        extended = hnf_basis([list(row) for row in self.rows] + [list(vector)], modulus=self.index)
        return len(extended) == self.n and triangular_determinant(extended) == self.index

    def multiply_by_zeta(self, vector, k=1):
        d = self.field.degree
        z = self.field.zeta(k)
        out = []
        for b in range(self.t):
            entry = self.field.element(vector[b * d:(b + 1) * d]) * z
            out.extend(int(c) for c in entry.coeffs)
        return tuple(out)

    def minkowski_rows(self, dps=30):
        """Float basis in Minkowski coordinates, real and imaginary parts interleaved."""
        field = self.field
        d = field.degree
        index = {a: i for i, a in enumerate(field.residues)}
        root_two = np.sqrt(2.0)
        out = np.zeros((self.n, self.n))
        for r, row in enumerate(self.rows):
            coords = []
            for b in range(self.t):
                values = embeddings(field.element(row[b * d:(b + 1) * d]), dps=dps)
                for a in field.places:
                    value = values[index[a]]
                    if field.is_real:
                        coords.append(float(mp.re(value)))
                    else:
                        coords.extend([root_two * float(mp.re(value)), root_two * float(mp.im(value))])
            out[r] = coords
        return out * float(self.scale)

    def to_json(self):
        return {
            "m": self.field.conductor,
            "t": self.t,
            "n": self.n,
            "index": self.index,
            "beta": mp.nstr(mp.mpf(self.beta), 17),
            "scale": mp.nstr(mp.mpf(self.scale), 17),
            "method": self.method,
            "provenance": self.provenance,
        }


def _from_rows(field, t, rows, index, beta=1, **provenance):
    rows = tuple(tuple(int(v) for v in row) for row in rows)
    gram = gram_matrix(rows, block_form(field, t))
    return LatticeBasis(
        field=field,
        t=t,
        rows=rows,
        gram=tuple(tuple(row) for row in gram),
        index=index,
        scale=unit_covolume_scale(field, t, index),
        beta=beta,
        provenance=provenance,
    )


def standard_lattice(rows):
    """A full-rank sublattice of Z^n with the standard inner product, scaled to covolume 1."""
    rows = [list(map(int, row)) for row in rows]
    n = len(rows)
    triangular = hnf_basis(rows)
    if len(triangular) != n:
        raise LatticeInvariantError("rows do not span a full-rank lattice")
    return _from_rows(make_field(1), n, rows, triangular_determinant(triangular))


def ring_lattice(field, t=1):
    """O_K^t itself."""
    return _from_rows(field, t, identity(field.degree * t), 1)


def _lift(field, F, value):
    return field.element(F.digits(value))


def lift_to_lattice(field, split, code, t=None):
    """Z-basis of pi^-1(S) with S the code over the residue field of ``split``."""
    t = code.t if t is None else t
    if code.t != t or code.q != split.q:
        raise InvalidArgument(f"code over F_{code.q}^{code.t} does not match q = {split.q}, t = {t}")
    d = field.degree
    F = split.residue_field()
    powers = [field.zeta(j) for j in range(d)]
    generator = field.element(list(split.factor))
    generators = []
    for row in code.rows:
        lifted = [_lift(field, F, c) for c in row]
        for z in powers:
            vector = []
            for entry in lifted:
                vector.extend(int(c) for c in (entry * z).coeffs)
            generators.append(vector)
    for b in range(t):
        for z in powers:
            for ideal_generator in (split.p * z, generator * z):
                vector = [0] * (d * t)
                vector[b * d:(b + 1) * d] = [int(c) for c in ideal_generator.coeffs]
                generators.append(vector)
    index = split.q ** (t - code.s)
    rows = hnf_basis(generators, modulus=index)
    if len(rows) != d * t or triangular_determinant(rows) != index:
        raise LatticeInvariantError(
            f"lift has index {triangular_determinant(rows) if len(rows) == d * t else 0}, expected {index}"
        )
    with working_precision():
        beta = mp.mpf(split.q) ** (-(1 - mp.mpf(code.s) / t) / d)
    basis = _from_rows(field, t, rows, index, beta=beta, p=split.p, q=split.q, s=code.s, code=code.to_json()["rows"])
    logger.debug("lifted a rank-%s code over F_%s to a %s-dimensional lattice", code.s, split.q, basis.n)
    return basis


def lll_reduce(basis, delta=None):
    delta = float(settings.TOOLKIT["LLL_DELTA"] if delta is None else delta)
    if not 0.25 < delta < 1:
        raise InvalidArgument(f"delta must lie in (0.25, 1), got {delta}", delta=delta)
    reduced, transform, method = lll_gram([list(row) for row in basis.gram], delta)
    rows = apply_transform(transform, [list(row) for row in basis.rows])
    return replace(
        basis,
        rows=tuple(tuple(row) for row in rows),
        gram=tuple(tuple(row) for row in reduced),
        method=method,
    )


def _check_dimension(basis):
    cap = int(settings.TOOLKIT["MAX_SVP_DIMENSION"])
    if basis.n > cap:
        raise DimensionTooLarge(f"dimension {basis.n} exceeds the enumeration cap {cap}", n=basis.n)


def shortest_vector(basis, reduced=False):
    """(lambda_1, witness) with the witness in power-basis coordinates."""
    _check_dimension(basis)
    if not reduced:
        basis = lll_reduce(basis)
    gram = [list(row) for row in basis.gram]
    x = shortest_nonzero(gram)
    norm_sq = quadratic_form(gram, list(x))
    with working_precision():
        length = basis.scale * mp.sqrt(norm_sq)
    return length, basis.coordinates(x)


def count_in_ball(basis, V, reduced=False):
    """Number of nonzero lattice points in the centred ball of volume V."""
    _check_dimension(basis)
    V = mp.mpf(V)
    if V < 0:
        raise InvalidArgument("volume must be nonnegative")
    if V == 0:
        return 0
    if not reduced:
        basis = lll_reduce(basis)
    gram = [list(row) for row in basis.gram]
    with working_precision():
        radius = radius_for_volume(basis.n, V)
        target = (radius / basis.scale) ** 2
        found = enumerate_ball(gram, float(target), half=True)
        count = 2 * sum(1 for x, _ in found if quadratic_form(gram, list(x)) <= target)
    if count % basis.field.omega:
        raise LatticeInvariantError(f"{count} points is not a multiple of {basis.field.omega}", count=count)
    return count
