"""Versioned JSON reports and fixed-header CSV files."""

from __future__ import annotations

import csv
import io
import json
import math
from datetime import datetime, timezone
from importlib import resources
from typing import Any, Iterable, Sequence

from .metrics import RunRecord, SuccessCurve

SCHEMA_VERSION = "1.0"

CURVE_HEADER = ("iter", "successes", "n")
RECORD_HEADER = ("repeat_id", "first_success_iter")
COMPARE_HEADER = ("p1", "p2", "n", "frac_correct_order", "frac_no_overlap")
RELERR_HEADER = ("p_true", "trial", "rel_error")


def _encode(value: Any) -> Any:
    # JSON has no infinity; the string marker round-trips through _decode
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return "nan"
        return value
    if isinstance(value, dict):
        return {str(k): _encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_encode(v) for v in value]
    return value


def _decode(value: Any) -> Any:
    if value in ("inf", "-inf", "nan"):
        return float(value)
    if isinstance(value, dict):
        return {k: _decode(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_decode(v) for v in value]
    return value


def make_report(command: str, inputs: dict, results: dict, provenance: dict | None = None) -> dict:
    from . import __version__

    prov = {"tool_version": __version__,
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds")}
    prov.update(provenance or {})
    return {"schema_version": SCHEMA_VERSION, "command": command, "inputs": inputs,
            "results": results, "provenance": prov}


def dumps(report: dict) -> str:
    return json.dumps(_encode(report), indent=2, sort_keys=False, allow_nan=False)


def loads(text: str) -> dict:
    return _decode(json.loads(text))


def load_schema() -> dict:
    return json.loads(resources.files("repeatstat").joinpath("report.schema.json").read_text())


def _write_rows(fh, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


def curve_csv(curve: SuccessCurve) -> str:
    buf = io.StringIO()
    _write_rows(buf, CURVE_HEADER, curve.rows())
    return buf.getvalue()


def records_csv(records: Sequence[RunRecord]) -> str:
    buf = io.StringIO()
    _write_rows(buf, RECORD_HEADER,
                ((r.repeat_id, "" if r.first_success_iter is None else r.first_success_iter)
                 for r in records))
    return buf.getvalue()


def rows_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    _write_rows(buf, header, rows)
    return buf.getvalue()


def read_table(text: str) -> tuple[tuple[str, ...], list[list[str]]]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = tuple(h.strip() for h in next(reader))
    except StopIteration:
        raise ValueError("empty CSV input") from None
    return header, [row for row in reader if row]


def parse_curve(text: str) -> SuccessCurve:
    header, rows = read_table(text)
    if header != CURVE_HEADER:
        raise ValueError(f"expected header {','.join(CURVE_HEADER)}, got {','.join(header)}")
    if not rows:
        raise ValueError("success curve CSV has no rows")
    iters = [int(r[0]) for r in rows]
    if iters != list(range(1, len(rows) + 1)):
        raise ValueError("curve rows must cover iter = 1, 2, ... without gaps")
    ns = {int(r[2]) for r in rows}
    if len(ns) != 1:
        raise ValueError("curve rows disagree on n")
    return SuccessCurve(len(rows), tuple(int(r[1]) for r in rows), ns.pop())


def parse_records(text: str) -> list[RunRecord]:
    header, rows = read_table(text)
    if header != RECORD_HEADER:
        raise ValueError(f"expected header {','.join(RECORD_HEADER)}, got {','.join(header)}")
    out = []
    for r in rows:
        first = r[1].strip() if len(r) > 1 else ""
        out.append(RunRecord(int(r[0]), int(first) if first else None))
    return out
