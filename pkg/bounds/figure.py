"""Grid of ln eta upper bounds over cyclotomic conductors and ranks."""
import logging
from dataclasses import replace

import pandas as pd
from django.conf import settings
from mpmath import mp

from bounds.engine import bound_params, eta_explicit
from fieldcore.cyclotomic import make_field
from utils.exceptions import ToolkitError
from utils.rendering import decimal_string

logger = logging.getLogger(__name__)

COLUMNS = ["m", "t", "ln_eta_upper"]
MISSING = "missing"
LN_DIGITS = 12


def cutoff_height(field, weil_cutoff, c_S):
    """Height h0 with H_W <= weil_cutoff, never below c_S."""
    return max(mp.mpf(c_S), mp.ln(weil_cutoff) / field.degree)


def figure_data(conductors=None, ranks=None, weil_cutoff=None):
    conductors = conductors or settings.TOOLKIT["FIGURE_CONDUCTORS"]
    ranks = ranks or settings.TOOLKIT["FIGURE_RANKS"]
    weil_cutoff = weil_cutoff or settings.TOOLKIT["FIGURE_WEIL_CUTOFF"]
    rows = []
    for m in conductors:
        field = make_field(int(m))
        params = None
        for t in ranks:
            try:
                if params is None:
                    base = bound_params(field, t)
                    h0 = cutoff_height(field, weil_cutoff, base.constants.c_S)
                    params = bound_params(field, t, h0=h0)
                report = eta_explicit(replace(params, t=int(t)))
                value = decimal_string(mp.ln(report.eta_upper), LN_DIGITS)
            except ToolkitError as exc:
                logger.warning("figure cell (m=%s, t=%s) is missing: %s", m, t, exc)
                value = MISSING
            rows.append({"m": int(m), "t": int(t), "ln_eta_upper": value})
        logger.info("figure column m = %s done", m)
    return pd.DataFrame(rows, columns=COLUMNS)


def write_figure_csv(frame, target):
    frame.to_csv(target, index=False, lineterminator="\n")
