"""Per-iteration telemetry records and their CSV form."""

from __future__ import annotations

from dataclasses import dataclass

from .qp import relative_error

METRICS_HEADER = "k,f,re,cols_total,cols_per_proc,hits,seconds,alpha,descent"


def _g17(x):
    """17 significant digits: enough to reproduce any 64-bit float exactly."""
    return format(x, ".17g")


@dataclass(frozen=True)
class MetricsRecord:
    k: int
    fval: float
    error: float | None  # relative to fstar when known, absolute when fstar = 0
    cols_total: int
    cols_per_proc: int
    hits: int
    seconds: float
    alpha: float
    descent: bool


def build_records(result, q, fstar=None, zero_seconds=False):
    """One record per iteration plus the k = 0 starting row.

    cols_per_proc is cols_total // q, the per-process share of fresh column
    work under q-way parallel solves (any remainder lands on one process).
    With zero_seconds the timing column is written as 0 so reruns of the same
    configuration emit byte-identical files.
    """

    def err(fval):
        if fstar is None:
            return None
        if fstar == 0.0:
            return abs(fval)
        return relative_error(fval, fstar)

    records = [MetricsRecord(0, 0.0, err(0.0), 0, 0, 0, 0.0, 0.0, False)]
    for rep in result.reports:
        records.append(
            MetricsRecord(
                k=rep.k,
                fval=rep.fval,
                error=err(rep.fval),
                cols_total=rep.cols_total,
                cols_per_proc=rep.cols_total // q,
                hits=rep.hits_total,
                seconds=0.0 if zero_seconds else rep.elapsed,
                alpha=rep.alpha,
                descent=rep.descent,
            )
        )
    return records


def render_metrics(records):
    lines = [METRICS_HEADER]
    for r in records:
        lines.append(
            ",".join(
                (
                    str(r.k),
                    _g17(r.fval),
                    "" if r.error is None else _g17(r.error),
                    str(r.cols_total),
                    str(r.cols_per_proc),
                    str(r.hits),
                    _g17(r.seconds),
                    _g17(r.alpha),
                    "1" if r.descent else "0",
                )
            )
        )
    return "\n".join(lines) + "\n"


def write_metrics(records, path):
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(render_metrics(records))
