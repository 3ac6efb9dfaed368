"""CSV schemas: cohort files, performance curves and gain reports.

Floats are written with 17 significant digits so every double round-trips
bit for bit. Line numbers in errors are 1-based with the header on line 1.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cohort import Cohort
from .errors import DataFormatError

COHORT_BASE_COLUMNS = ("id", "label", "s_avail", "s_acquired")
CURVE_COLUMNS = ("strategy", "metric", "task", "run", "b", "value", "m_pre", "m_post")
REPORT_COLUMNS = (
    "strategy",
    "metric",
    "task",
    "g_full_mean",
    "g_full_sem",
    "n_runs",
    "n_dropped_tasks",
)

_fmt = "%.17g".__mod__


def format_float(x: float) -> str:
    return _fmt(float(x))


# -- cohort files ------------------------------------------------------------


def cohort_header(k: int) -> list[str]:
    return list(COHORT_BASE_COLUMNS) + [f"s_imp_{j}" for j in range(k)]


def write_cohort(cohort: Cohort, path) -> None:
    lines = [",".join(cohort_header(cohort.k))]
    floats = np.column_stack([cohort.s_avail, cohort.s_acquired, cohort.s_imp]).tolist()
    for i, lab, row in zip(cohort.ids.tolist(), cohort.labels.tolist(), floats):
        lines.append(f"{i},{lab}," + ",".join(map(_fmt, row)))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _check_header(header: list[str]) -> int:
    """Validate the cohort header and return K."""
    if tuple(header[:4]) != COHORT_BASE_COLUMNS:
        raise DataFormatError(
            f"header must start with {','.join(COHORT_BASE_COLUMNS)}", line=1
        )
    k = len(header) - 4
    expected = cohort_header(k)
    for got, want in zip(header, expected):
        if got != want:
            raise DataFormatError(f"expected column {want!r}, found {got!r}", line=1)
    return k


@dataclass
class Issue:
    line: int | None
    column: str | None
    message: str
    fatal: bool = True

    def __str__(self) -> str:
        where = []
        if self.line is not None:
            where.append(f"line {self.line}")
        if self.column is not None:
            where.append(f"column {self.column!r}")
        prefix = "error" if self.fatal else "warning"
        loc = f" ({', '.join(where)})" if where else ""
        return f"{prefix}{loc}: {self.message}"


def _scan_cohort(path) -> tuple[list[Issue], Cohort | None]:
    """Parse a cohort file, collecting every schema violation."""
    issues: list[Issue] = []
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        return [Issue(1, None, "file is empty")], None
    try:
        k = _check_header(rows[0])
    except DataFormatError as exc:
        return [Issue(1, None, str(exc).split(": ", 1)[-1])], None
    header = rows[0]
    width = len(header)

    ids, labels, scores = [], [], []
    seen: dict[int, int] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            issues.append(Issue(lineno, None, "blank line"))
            continue
        if len(row) != width:
            issues.append(Issue(lineno, None, f"expected {width} fields, found {len(row)}"))
            continue
        ok = True
        try:
            sid = int(row[0])
            if sid < 0:
                raise ValueError
        except ValueError:
            issues.append(Issue(lineno, "id", f"id must be a non-negative integer, got {row[0]!r}"))
            ok = False
        else:
            if sid in seen:
                issues.append(
                    Issue(lineno, "id", f"duplicate id {sid} (first on line {seen[sid]})")
                )
                ok = False
            else:
                seen[sid] = lineno
        if row[1] not in ("0", "1"):
            issues.append(Issue(lineno, "label", f"label must be 0 or 1, got {row[1]!r}"))
            ok = False
        vals = []
        for col, cell in zip(header[2:], row[2:]):
            try:
                x = float(cell)
            except ValueError:
                issues.append(Issue(lineno, col, f"not a number: {cell!r}"))
                ok = False
                continue
            if not math.isfinite(x):
                issues.append(Issue(lineno, col, f"non-finite score {cell!r}"))
                ok = False
            vals.append(x)
        if ok:
            ids.append(sid)
            labels.append(int(row[1]))
            scores.append(vals)

    if len(rows) == 1:
        issues.append(Issue(None, None, "no samples"))
    if any(i.fatal for i in issues):
        return issues, None

    order = np.argsort(np.asarray(ids, dtype=np.int64), kind="stable")
    arr = np.asarray(scores, dtype=np.float64).reshape(len(ids), 2 + k)[order]
    cohort = Cohort(
        labels=np.asarray(labels, dtype=np.int8)[order],
        s_avail=arr[:, 0],
        s_acquired=arr[:, 1],
        s_imp=arr[:, 2:],
        ids=np.asarray(ids, dtype=np.int64)[order],
    )
    n_pos = cohort.n_pos
    if n_pos == 0 or n_pos == cohort.n:
        issues.append(
            Issue(None, None, f"single-class cohort ({n_pos} of {cohort.n} positive); "
                  "AUROC is undefined", fatal=False)
        )
    return issues, cohort


def read_cohort(path) -> Cohort:
    """Load a cohort file; raises :class:`DataFormatError` on the first violation."""
    issues, cohort = _scan_cohort(path)
    for issue in issues:
        if issue.fatal:
            raise DataFormatError(issue.message, line=issue.line, column=issue.column)
    return cohort


def validate_cohort_file(path) -> tuple[list[Issue], Cohort | None]:
    """Every schema issue in a cohort file, plus the cohort when it is valid."""
    return _scan_cohort(path)


# -- curves and reports --------------------------------------------------------


def write_curves(curves, path) -> None:
    """Write curves sorted by strategy, metric, task, run and budget fraction."""
    rows = []
    for c in curves:
        for b, v in zip(c.grid.fractions.tolist(), c.values.tolist()):
            rows.append((c.strategy, c.metric, c.task, c.run, b, v, c.m_pre, c.m_post))
    rows.sort(key=lambda r: r[:5])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(CURVE_COLUMNS) + "\n")
        for s, m, t, r, b, v, lo, hi in rows:
            fh.write(f"{s},{m},{t},{r},{_fmt(b)},{_fmt(v)},{_fmt(lo)},{_fmt(hi)}\n")


@dataclass
class CurveRow:
    strategy: str
    metric: str
    task: str
    run: int
    b: float
    value: float
    m_pre: float
    m_post: float


def read_curves(path) -> list[CurveRow]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != CURVE_COLUMNS:
            raise DataFormatError(f"header must be {','.join(CURVE_COLUMNS)}", line=1)
        out = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(CURVE_COLUMNS):
                raise DataFormatError(
                    f"expected {len(CURVE_COLUMNS)} fields, found {len(row)}", line=lineno
                )
            try:
                out.append(
                    CurveRow(row[0], row[1], row[2], int(row[3]), *(float(x) for x in row[4:]))
                )
            except ValueError as exc:
                raise DataFormatError(str(exc), line=lineno) from None
    return out


def write_report(rows, path) -> None:
    rows = sorted(rows, key=lambda r: (r.strategy, r.metric, r.task))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(REPORT_COLUMNS) + "\n")
        for r in rows:
            fh.write(
                f"{r.strategy},{r.metric},{r.task},{_fmt(r.mean)},{_fmt(r.sem)},"
                f"{r.n_runs},{r.n_dropped}\n"
            )


def read_report(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != REPORT_COLUMNS:
            raise DataFormatError(f"header must be {','.join(REPORT_COLUMNS)}", line=1)
        return list(reader)
