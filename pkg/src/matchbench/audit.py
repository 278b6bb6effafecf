"""Descriptive metadata audit.

Cross-tabulations, symptom-combination frequency tables, per-variable
distribution breakdowns by covid status, submissions-over-time series, and
a flagging report that names candidate confounders before any model is
trained. Everything here is read-only over an immutable Dataset.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from datetime import timedelta

import numpy as np

from .records import (
    CovidStatus,
    Dataset,
    Variable,
    observed_categories,
    variable,
)

# Rendered counts below this level are masked for disclosure control; the
# raw integers stay available on the dataclasses.
MASK_BELOW = 5

DEFAULT_FLAG_THRESHOLD = 0.2

# Variables scored against covid_status in the audit report. The outcome
# itself and raw dates are excluded; everything else in the registry that
# could plausibly leak status stays in.
_EXCLUDED_FROM_AUDIT = ("covid_status",)


@dataclass(frozen=True)
class CrossTab:
    """Contingency table of two categorical variables."""

    row_variable: str
    col_variable: str
    row_categories: tuple
    col_categories: tuple
    counts: tuple  # tuple of row tuples of ints

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.counts)

    def cell(self, row_category, col_category) -> int:
        return self.counts[self.row_categories.index(row_category)][
            self.col_categories.index(col_category)
        ]

    def to_dict(self) -> dict:
        return {
            "row_variable": self.row_variable,
            "col_variable": self.col_variable,
            "row_categories": [str(c) for c in self.row_categories],
            "col_categories": [str(c) for c in self.col_categories],
            "counts": [list(row) for row in self.counts],
        }


@dataclass(frozen=True)
class SymptomComboTable:
    """Distinct full symptom bitmasks with their frequencies.

    Masks use the bit order of SYMPTOM_FIELDS (bit i = field i). Entries
    are sorted by frequency descending, ties broken by mask ascending, and
    only combinations at or above the cutoff appear.
    """

    status: CovidStatus
    cutoff: int
    entries: tuple  # of (bitmask, frequency)

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "cutoff": self.cutoff,
            "entries": [[mask, freq] for mask, freq in self.entries],
        }


@dataclass(frozen=True)
class BreakdownRow:
    label: str
    count_positive: int
    count_negative: int
    masked: bool  # total below the disclosure floor


@dataclass(frozen=True)
class Breakdown:
    """Per-category (or per-bin) counts of one variable, split by status."""

    variable: str
    kind: str
    rows: tuple
    median_positive: float | None = None
    median_negative: float | None = None

    def to_dict(self) -> dict:
        return {
            "variable": self.variable,
            "kind": self.kind,
            "rows": [
                {
                    "label": r.label,
                    "count_positive": r.count_positive,
                    "count_negative": r.count_negative,
                    "masked": r.masked,
                }
                for r in self.rows
            ],
            "median_positive": self.median_positive,
            "median_negative": self.median_negative,
        }


@dataclass(frozen=True)
class TimeSeries:
    """Submission counts per calendar bin per recruitment source."""

    granularity: str  # "day" | "week"
    bin_starts: tuple  # of date, contiguous, zero bins included
    series: dict  # source value -> tuple of ints

    def to_csv(self) -> str:
        sources = sorted(self.series)
        lines = ["bin_start," + ",".join(sources)]
        for i, start in enumerate(self.bin_starts):
            lines.append(
                start.isoformat() + "," + ",".join(str(self.series[s][i]) for s in sources)
            )
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class AuditReport:
    """Association of every audited variable with covid status.

    statistic: numeric variables use the absolute standardized mean
    difference (pooled-sd denominator); categorical and boolean variables
    use the largest absolute gap between the category proportions of the
    two status groups. A variable is flagged iff statistic > threshold.
    """

    threshold: float
    statistics: dict  # variable -> float
    flagged: tuple  # variable names, statistic descending
    cross_tabs: tuple  # of CrossTab

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "statistics": {k: self.statistics[k] for k in sorted(self.statistics)},
            "flagged": list(self.flagged),
            "cross_tabs": [ct.to_dict() for ct in self.cross_tabs],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _category_values(d: Dataset, var: Variable):
    cats = observed_categories(d, var)
    index = {c: i for i, c in enumerate(cats)}
    return cats, index


def cross_tabulate(d: Dataset, var_a: str, var_b: str) -> CrossTab:
    """Exact contingency counts of two categorical or boolean variables."""
    va = variable(var_a)
    vb = variable(var_b)
    for v in (va, vb):
        if v.kind == "numeric":
            raise ValueError(f"cross_tabulate requires categorical variables, {v.name} is numeric")
    rows, row_index = _category_values(d, va)
    cols, col_index = _category_values(d, vb)
    counts = [[0] * len(cols) for _ in rows]
    for rec in d:
        counts[row_index[va.category_of(rec)]][col_index[vb.category_of(rec)]] += 1
    return CrossTab(
        row_variable=var_a,
        col_variable=var_b,
        row_categories=tuple(rows),
        col_categories=tuple(cols),
        counts=tuple(tuple(r) for r in counts),
    )


def symptom_combinations(d: Dataset, status: CovidStatus, cutoff: int) -> SymptomComboTable:
    if cutoff < 1:
        raise ValueError(f"cutoff must be >= 1, got {cutoff}")
    freq: dict[int, int] = {}
    for rec in d:
        if rec.covid_status is not status:
            continue
        mask = rec.symptom_bitmask()
        freq[mask] = freq.get(mask, 0) + 1
    entries = sorted(
        ((m, f) for m, f in freq.items() if f >= cutoff),
        key=lambda e: (-e[1], e[0]),
    )
    return SymptomComboTable(status=status, cutoff=cutoff, entries=tuple(entries))


def _numeric_rows(values_pos, values_neg, bin_width: float):
    lows = []
    for vals in (values_pos, values_neg):
        for v in vals:
            lows.append(math.floor(v / bin_width) * bin_width)
    if not lows:
        return ()
    lo, hi = min(lows), max(lows)
    rows = []
    edge = lo
    while edge <= hi:
        in_pos = sum(1 for v in values_pos if edge <= v < edge + bin_width)
        in_neg = sum(1 for v in values_neg if edge <= v < edge + bin_width)

        def fmt(x):
            return str(int(x)) if float(x).is_integer() else f"{x:g}"

        rows.append(
            BreakdownRow(
                label=f"[{fmt(edge)}, {fmt(edge + bin_width)})",
                count_positive=in_pos,
                count_negative=in_neg,
                masked=(in_pos + in_neg) < MASK_BELOW,
            )
        )
        edge += bin_width
    return tuple(rows)


def distribution_breakdown(d: Dataset, variable_name: str, bin_width: float = 5.0) -> Breakdown:
    """Counts of one variable split by covid status.

    Numeric variables are histogrammed over fixed-width bins aligned to
    multiples of bin_width (default 5, matching a five-year age grid) and
    the result carries per-status medians. Categorical and boolean
    variables get one row per observed category. Rows whose total count
    falls below the disclosure floor are marked masked; renderers should
    suppress them, but the counts stay on the object.
    """
    var = variable(variable_name)
    pos = [rec for rec in d if rec.covid_status is CovidStatus.POSITIVE]
    neg = [rec for rec in d if rec.covid_status is CovidStatus.NEGATIVE]
    if var.kind == "numeric":
        vp = [float(var.value(r)) for r in pos]
        vn = [float(var.value(r)) for r in neg]
        return Breakdown(
            variable=variable_name,
            kind="numeric",
            rows=_numeric_rows(vp, vn, bin_width),
            median_positive=float(np.median(vp)) if vp else None,
            median_negative=float(np.median(vn)) if vn else None,
        )
    cats, _ = _category_values(d, var)
    rows = []
    for cat in cats:
        cp = sum(1 for r in pos if var.category_of(r) == cat)
        cn = sum(1 for r in neg if var.category_of(r) == cat)
        rows.append(
            BreakdownRow(
                label=str(cat),
                count_positive=cp,
                count_negative=cn,
                masked=(cp + cn) < MASK_BELOW,
            )
        )
    return Breakdown(variable=variable_name, kind=var.kind, rows=tuple(rows))


def submissions_over_time(d: Dataset, bin: str = "day") -> TimeSeries:
    """Per-source submission counts on a contiguous calendar grid.

    Day bins are calendar dates; week bins start on Mondays. Bins between
    the first and last submission with no records still appear as zeros.
    """
    if bin not in ("day", "week"):
        raise ValueError(f"bin must be 'day' or 'week', got {bin!r}")
    sources = sorted({rec.recruitment_source.value for rec in d})
    if not len(d):
        return TimeSeries(granularity=bin, bin_starts=(), series={})

    def bin_start(day):
        if bin == "day":
            return day
        return day - timedelta(days=day.weekday())

    dates = [rec.submission_date for rec in d]
    first = bin_start(min(dates))
    last = bin_start(max(dates))
    step = timedelta(days=1 if bin == "day" else 7)
    starts = []
    cur = first
    while cur <= last:
        starts.append(cur)
        cur += step
    index = {s: i for i, s in enumerate(starts)}
    series = {s: [0] * len(starts) for s in sources}
    for rec in d:
        series[rec.recruitment_source.value][index[bin_start(rec.submission_date)]] += 1
    return TimeSeries(
        granularity=bin,
        bin_starts=tuple(starts),
        series={s: tuple(v) for s, v in series.items()},
    )


def _association_statistic(d: Dataset, var: Variable) -> float:
    pos = [rec for rec in d if rec.covid_status is CovidStatus.POSITIVE]
    neg = [rec for rec in d if rec.covid_status is CovidStatus.NEGATIVE]
    if not pos or not neg:
        return 0.0
    if var.kind == "numeric":
        vp = np.array([float(var.value(r)) for r in pos])
        vn = np.array([float(var.value(r)) for r in neg])
        # Population variances: keeps the statistic exactly invariant to
        # duplicating every record, like the proportion-based one.
        pooled = math.sqrt(0.5 * (float(vp.var()) + float(vn.var())))
        diff = abs(float(vp.mean()) - float(vn.mean()))
        if pooled == 0.0:
            return 0.0 if diff == 0.0 else math.inf
        return diff / pooled
    cats, _ = _category_values(d, var)
    gap = 0.0
    for cat in cats:
        pp = sum(1 for r in pos if var.category_of(r) == cat) / len(pos)
        pn = sum(1 for r in neg if var.category_of(r) == cat) / len(neg)
        gap = max(gap, abs(pp - pn))
    return gap


def build_audit_report(d: Dataset, threshold: float = DEFAULT_FLAG_THRESHOLD) -> AuditReport:
    """Score every audited variable against covid status and flag the big gaps."""
    if not threshold > 0:
        raise ValueError(f"threshold must be > 0, got {threshold}")
    from .records import VARIABLES

    stats: dict[str, float] = {}
    for name, var in VARIABLES.items():
        if name in _EXCLUDED_FROM_AUDIT:
            continue
        stats[name] = _association_statistic(d, var)
    flagged = tuple(
        name
        for name in sorted(stats, key=lambda k: (-stats[k], k))
        if stats[name] > threshold
    )
    cross_tabs = (
        cross_tabulate(d, "covid_status", "recruitment_source"),
        cross_tabulate(d, "covid_status", "symptomatic"),
        cross_tabulate(d, "recruitment_source", "symptomatic"),
    )
    return AuditReport(
        threshold=threshold,
        statistics=stats,
        flagged=flagged,
        cross_tabs=cross_tabs,
    )


# -- rendering -------------------------------------------------------------


def render_cross_tab(ct: CrossTab) -> str:
    header = f"| {ct.row_variable} \\ {ct.col_variable} | " + " | ".join(
        str(c) for c in ct.col_categories
    ) + " |"
    sep = "|" + " --- |" * (len(ct.col_categories) + 1)
    lines = [header, sep]
    for cat, row in zip(ct.row_categories, ct.counts):
        lines.append(f"| {cat} | " + " | ".join(str(v) for v in row) + " |")
    return "\n".join(lines)


def render_breakdown(b: Breakdown) -> str:
    lines = [
        f"### {b.variable}",
        "",
        "| category | positive | negative |",
        "| --- | --- | --- |",
    ]
    for row in b.rows:
        if row.masked:
            lines.append(f"| {row.label} | <{MASK_BELOW} | <{MASK_BELOW} |")
        else:
            lines.append(f"| {row.label} | {row.count_positive} | {row.count_negative} |")
    if b.median_positive is not None and b.median_negative is not None:
        lines.append("")
        lines.append(
            f"Median positive: {b.median_positive:g}; median negative: {b.median_negative:g}."
        )
    return "\n".join(lines)


def render_audit_report(report: AuditReport) -> str:
    lines = [
        "# Metadata audit",
        "",
        f"Flag threshold: {report.threshold:g}",
        "",
        "## Variable association with covid status",
        "",
        "| variable | statistic | flagged |",
        "| --- | --- | --- |",
    ]
    for name in sorted(report.statistics, key=lambda k: (-report.statistics[k], k)):
        stat = report.statistics[name]
        mark = "yes" if name in report.flagged else ""
        lines.append(f"| {name} | {stat:.4f} | {mark} |")
    lines.append("")
    lines.append("## Cross-tabulations")
    for ct in report.cross_tabs:
        lines.append("")
        lines.append(render_cross_tab(ct))
    lines.append("")
    return "\n".join(lines)
