import logging
from typing import NamedTuple

from mpmath import iv, mp

from heights.exceptional import exception_set
from utils.exceptions import InvalidConfiguration
from utils.intervals import lower, working_precision

logger = logging.getLogger(__name__)

MODES = ("uniform_cyclotomic", "voutier_generic", "user")

# Lehmer-type constants valid uniformly over cyclotomic fields
CYCLOTOMIC_C = mp.mpf("0.155")
CYCLOTOMIC_C_O = mp.mpf("0.2406")
CYCLOTOMIC_C_S = mp.mpf("0.271763")


class SetupConstants(NamedTuple):
    c: object
    c_o: object
    c_S: object
    card_S: int
    mode: str

    def to_json(self):
        from utils.rendering import decimal_string

        return {
            "c": decimal_string(self.c),
            "c_o": decimal_string(self.c_o),
            "c_S": decimal_string(self.c_S),
            "card_S": self.card_S,
            "mode": self.mode,
        }


def voutier_constant(d):
    """Lower end of (1/4d)(ln ln d / ln d)^3."""
    if d < 3:
        raise InvalidConfiguration(f"the generic constant needs degree >= 3, got {d}; use user mode", degree=d)
    with working_precision():
        ln_d = iv.ln(d)
        value = (iv.ln(ln_d) / ln_d) ** 3 / (4 * d)
    return lower(value)


def setup_constants(field, mode, c=None, c_o=None, c_S=None, card_S=None):
    if mode == "uniform_cyclotomic":
        return SetupConstants(
            CYCLOTOMIC_C, CYCLOTOMIC_C_O, CYCLOTOMIC_C_S, exception_set(field).cardinality, mode
        )
    if mode == "voutier_generic":
        value = voutier_constant(field.degree)
        return SetupConstants(value, value, value, field.omega, mode)
    if mode != "user":
        raise InvalidConfiguration(f"unknown constants mode {mode!r}", mode=mode)
    if None in (c, c_o, c_S):
        raise InvalidConfiguration("user mode needs c, c_o and c_S")
    c, c_o, c_S = mp.mpf(c), mp.mpf(c_o), mp.mpf(c_S)
    if not 0 < c <= c_o <= c_S:
        raise InvalidConfiguration(
            f"constants must satisfy 0 < c <= c_o <= c_S, got {c}, {c_o}, {c_S}", c=str(c), c_o=str(c_o), c_S=str(c_S)
        )
    card_S = field.omega if card_S is None else int(card_S)
    if card_S < field.omega or card_S % field.omega:
        raise InvalidConfiguration(f"#S_K must be a positive multiple of {field.omega}, got {card_S}")
    logger.debug("user constants %s, %s, %s with #S_K = %s", c, c_o, c_S, card_S)
    return SetupConstants(c, c_o, c_S, card_S, mode)
