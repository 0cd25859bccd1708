"""
Records and tables shared by the CLI and the HTTP service.

Column orders are fixed; CSV output starts with a comment line naming the
table kind and its column version. Floats are written in their shortest
round-trip form, so CSV and JSON carry the same numbers.
"""
import csv
import io
import json
import logging
import math
from typing import Iterable, Sequence

from scalar_means import (PositivePair, alpha_m, arith_mean, as_pair, beta_m, convergence_profile, delta_m,
                          gamma_m, geo_mean, lin_upper, log_mean, polya_upper, rational_lower)
from utils import format_float
from verify import REPORT_COLUMNS

logger = logging.getLogger(__name__)

COLUMNS_VERSION = "v1"
FORMATS = ("csv", "json")

BOUND_NAMES = ("geo_mean", "arith_mean", "lin_upper", "polya_upper", "rational_lower",
               "alpha_m", "beta_m", "gamma_m", "delta_m")

EVAL_COLUMNS = ("a", "b", "m", "log_mean") + BOUND_NAMES
TABLE_COLUMNS = ("t", "m", "log_mean") + BOUND_NAMES + tuple(f"gap_{name}" for name in BOUND_NAMES)
CONVERGE_COLUMNS = ("m", "alpha_error", "beta_error", "alpha_local_order", "beta_local_order")
MIN_M_COLUMNS = ("t", "min_m", "beta_at_min", "lin_upper", "log_mean")

COLUMNS = {
    "eval": EVAL_COLUMNS,
    "table": TABLE_COLUMNS,
    "converge": CONVERGE_COLUMNS,
    "min-m": MIN_M_COLUMNS,
    "verify": REPORT_COLUMNS,
}


def eval_record(pair, m: int = 1) -> dict:
    """Every mean and bound at (a, b); the one-variable families are scaled by b."""
    p: PositivePair = as_pair(pair)
    t = p.ratio
    return {
        "a": p.a,
        "b": p.b,
        "m": m,
        "log_mean": log_mean(p),
        "geo_mean": geo_mean(p),
        "arith_mean": arith_mean(p),
        "lin_upper": lin_upper(p),
        "polya_upper": polya_upper(p),
        "rational_lower": rational_lower(p),
        "alpha_m": p.b * alpha_m(t, m),
        "beta_m": p.b * beta_m(t, m),
        "gamma_m": p.b * gamma_m(t, m),
        "delta_m": p.b * delta_m(t, m),
    }


def tightness_rows(t_grid: Iterable[float], orders: Sequence[int]) -> list[dict]:
    """One row per (t, m) with each bound and its signed gap to L(t, 1)."""
    rows = []
    for t in t_grid:
        for m in orders:
            record = eval_record((t, 1.0), m)
            row = {"t": float(t), "m": m, "log_mean": record["log_mean"]}
            row.update({name: record[name] for name in BOUND_NAMES})
            row.update({f"gap_{name}": record[name] - record["log_mean"] for name in BOUND_NAMES})
            rows.append(row)
    return rows


def convergence_rows(t: float, orders: Sequence[int]) -> tuple[list[dict], dict]:
    """Errors of alpha_m and beta_m per order, local orders between neighbours, and the fitted slopes."""
    profile = convergence_profile(t, orders)
    rows = []
    for i, m in enumerate(profile.orders):
        row = {"m": m, "alpha_error": profile.alpha_errors[i], "beta_error": profile.beta_errors[i],
               "alpha_local_order": None, "beta_local_order": None}
        if i:
            step = math.log(m / profile.orders[i - 1])
            for family, errors in (("alpha", profile.alpha_errors), ("beta", profile.beta_errors)):
                if errors[i] > 0 and errors[i - 1] > 0:
                    row[f"{family}_local_order"] = math.log(errors[i - 1] / errors[i]) / step
        rows.append(row)
    fitted = {"t": profile.t, "alpha_order": profile.alpha_slope, "beta_order": profile.beta_slope}
    return rows, fitted


def min_m_rows(rows: Iterable[dict], m_max: int) -> list[dict]:
    """Search rows with a missing minimum spelled NOT_FOUND(m_max)."""
    return [dict(row, min_m=row["min_m"] if row["min_m"] is not None else f"NOT_FOUND({m_max})")
            for row in rows]


def _json_value(value):
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    if isinstance(value, dict):
        return {k: _json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    return value


def render_table(rows: Sequence[dict], kind: str, fmt: str = "csv", meta: dict | None = None) -> str:
    """
    Serialize rows of a known table kind.

    Args:
        rows: dicts keyed by the kind's columns
        kind: one of COLUMNS
        fmt: "csv" or "json"
        meta: config echo; only written in JSON

    Returns:
        The full text, LF line endings, ending in a newline.

    Raises:
        ValueError: unknown kind or format
    """
    if kind not in COLUMNS:
        raise ValueError(f"unknown table kind {kind!r}; expected one of {', '.join(COLUMNS)}")
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}, got {fmt!r}")
    columns = COLUMNS[kind]

    if fmt == "json":
        body = {
            "meta": _json_value(dict(meta or {}, table=kind, columns=list(columns),
                                     columns_version=COLUMNS_VERSION)),
            "rows": [{c: _json_value(row.get(c)) for c in columns} for row in rows],
        }
        return json.dumps(body, indent=2) + "\n"

    buffer = io.StringIO()
    buffer.write(f"# logmean-bounds {kind} columns {COLUMNS_VERSION}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_float(row.get(c)) for c in columns])
    logger.debug("Rendered %d %s rows as csv", len(rows), kind)
    return buffer.getvalue()
