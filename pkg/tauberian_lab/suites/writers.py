"""
CSV/JSON emission of remainder series and verification reports
"""
import csv
import json
import logging
import math
import re
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from tauberian_lab.core.exceptions import UsageError
from tauberian_lab.core.reports import RemainderSeries, VerificationReport

logger = logging.getLogger(__name__)

SERIES_COLUMNS = ('x', 'raw', 'main', 'remainder', 'normalized', 'normalizer')
REPORT_COLUMNS = ('name', 'range', 'max_violation', 'location', 'status')

_UNSAFE = re.compile(r'[^A-Za-z0-9_.-]+')


def format_number(value: Optional[float]) -> str:
    """15 significant digits, '.' decimal separator; empty for a missing location"""
    if value is None:
        return ''
    value = float(value)
    if math.isnan(value):
        return 'nan'
    if math.isinf(value):
        return 'inf' if value > 0 else '-inf'
    return f"{value:.15g}"


def _json_number(value: Optional[float]) -> Optional[float]:
    # JSON has no NaN/inf
    if value is None or not math.isfinite(value):
        return None
    return float(format_number(value))


def file_stem(*parts: str) -> str:
    return '_'.join(_UNSAFE.sub('_', part).strip('_') for part in parts if part)


def series_rows(series: RemainderSeries) -> List[List[Any]]:
    return [[r.x, r.raw, r.main, r.remainder, r.normalized, r.normalizer] for r in series.records]


def report_rows(reports: Sequence[VerificationReport]) -> List[List[Any]]:
    return [[r.name, r.range_desc, r.max_violation, r.location, r.status.value] for r in reports]


def _write_csv(path: Path, columns: Sequence[str], rows: List[List[Any]]) -> None:
    with path.open('w', encoding='utf-8', newline='') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(columns)
        for row in rows:
            writer.writerow([cell if isinstance(cell, str) else format_number(cell) for cell in row])


def _write_json(path: Path, columns: Sequence[str], rows: List[List[Any]]) -> None:
    document: Dict[str, List[Any]] = {column: [] for column in columns}
    for row in rows:
        for column, cell in zip(columns, row):
            document[column].append(cell if isinstance(cell, str) else _json_number(cell))
    path.write_text(json.dumps(document, indent=2, allow_nan=False) + '\n', encoding='utf-8')


def write_table(out_dir: Path, stem: str, columns: Sequence[str], rows: List[List[Any]], fmt: str) -> Path:
    """Write one table as <stem>.csv or <stem>.json under out_dir"""
    if fmt == 'csv':
        write = _write_csv
    elif fmt == 'json':
        write = _write_json
    else:
        raise UsageError(f"Unknown output format {fmt!r}")

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{stem}.{fmt}"
    write(path, columns, rows)
    logger.debug(f"Wrote {len(rows)} rows to {path}")
    return path


def write_series(out_dir: Path, suite: str, series: RemainderSeries, fmt: str) -> Path:
    return write_table(out_dir, file_stem(suite, series.name), SERIES_COLUMNS, series_rows(series), fmt)


def write_reports(out_dir: Path, suite: str, reports: Sequence[VerificationReport], fmt: str) -> Path:
    return write_table(out_dir, file_stem(suite, 'reports'), REPORT_COLUMNS, report_rows(reports), fmt)
