"""Decimal-string rendering and deterministic JSON artifacts."""
import json
from datetime import datetime, timezone
from fractions import Fraction

from mpmath import mp

import config

DECIMAL_DIGITS = 20


def decimal_string(value, digits=DECIMAL_DIGITS):
    """Render a number as a decimal string; interval enclosures render their upper end."""
    if value is None:
        return None
    if isinstance(value, bool):
        return value
    if isinstance(value, int):
        return str(value)
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        value = mp.mpf(value.numerator) / value.denominator
    if hasattr(value, "_mpi_"):
        value = mp.make_mpf(value._mpi_[1])
    with mp.workdps(max(digits + 5, mp.dps)):
        return mp.nstr(mp.mpf(value), digits, strip_zeros=False)


def rational_string(value):
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def enclosure(value, digits=DECIMAL_DIGITS):
    return {
        "lower": decimal_string(mp.make_mpf(value._mpi_[0]), digits),
        "upper": decimal_string(mp.make_mpf(value._mpi_[1]), digits),
    }


def envelope(command, resolved_config, result):
    return {
        "tool": "lattice-moments",
        "version": config.__version__,
        "command": command,
        "config": resolved_config,
        "generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "result": result,
    }


def dumps(payload):
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def without_timestamp(payload):
    return {key: value for key, value in payload.items() if key != "generated_at"}
