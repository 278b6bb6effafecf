"""CSV interchange for datasets.

Layout (version 1):
  line 1: ``schema=1``
  line 2: column header: the fixed metadata columns below, then one
          ``audio_<i>`` column per feature dimension
  line 3+: one submission per row

Enum cells must match a declared value exactly; anything else is a parse
error naming the row and column, never a coercion. Audio cells may be empty,
but only all-or-none per row: a row with every audio cell blank yields a
record with no audio vector.
"""

from __future__ import annotations

import csv
from datetime import date
from pathlib import Path

from .records import (
    Dataset,
    SubmissionRecord,
    CovidStatus,
    Gender,
    RecruitmentSource,
    SmokerStatus,
    TestType,
    ViralLoad,
    HEIGHT_BINS,
    WEIGHT_BINS,
    SYMPTOM_FIELDS,
    RESPIRATORY_FIELDS,
)

SCHEMA_LINE = "schema=1"

METADATA_COLUMNS = (
    ("id", str),
    ("age", int),
    ("gender", Gender),
    ("ethnicity", str),
    ("first_language", str),
    ("local_authority", str),
    ("recruitment_source", RecruitmentSource),
    ("covid_status", CovidStatus),
    *((s, bool) for s in SYMPTOM_FIELDS),
    *((s, bool) for s in RESPIRATORY_FIELDS),
    ("smoker_status", SmokerStatus),
    ("height_bin", str),
    ("weight_bin", str),
    ("viral_load", ViralLoad),
    ("test_date", date),
    ("submission_date", date),
    ("test_type", TestType),
    ("lab_under_investigation", bool),
    ("metadata_complete", bool),
)

METADATA_COLUMN_NAMES = tuple(name for name, _ in METADATA_COLUMNS)


class ParseError(ValueError):
    """A malformed dataset file; carries the offending line and column."""

    def __init__(self, message: str, line: int | None = None, column: str | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column!r})" if column else ")")
        super().__init__(message + where)


def _parse_cell(raw: str, kind, line: int, column: str):
    if kind is str:
        if raw == "":
            raise ParseError("empty cell", line, column)
        return raw
    if kind is int:
        try:
            return int(raw)
        except ValueError:
            raise ParseError(f"not an integer: {raw!r}", line, column) from None
    if kind is bool:
        if raw == "true":
            return True
        if raw == "false":
            return False
        raise ParseError(f"not a boolean (expected true/false): {raw!r}", line, column)
    if kind is date:
        try:
            return date.fromisoformat(raw)
        except ValueError:
            raise ParseError(f"not an ISO date: {raw!r}", line, column) from None
    # enum kinds
    try:
        return kind(raw)
    except ValueError:
        allowed = ", ".join(m.value for m in kind)
        raise ParseError(
            f"invalid {kind.__name__} value {raw!r} (allowed: {allowed})", line, column
        ) from None


def parse_dataset(path: str | Path) -> Dataset:
    """Read a schema=1 CSV file into a Dataset.

    Raises ParseError on malformed headers or rows (reporting line and
    column), duplicate ids and half-empty audio vectors.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            schema_row = next(reader)
        except StopIteration:
            raise ParseError("empty file", line=1) from None
        if schema_row != [SCHEMA_LINE]:
            raise ParseError(f"first line must be {SCHEMA_LINE!r}", line=1)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("missing column header", line=2) from None

        n_meta = len(METADATA_COLUMN_NAMES)
        if tuple(header[:n_meta]) != METADATA_COLUMN_NAMES:
            for i, expected in enumerate(METADATA_COLUMN_NAMES):
                got = header[i] if i < len(header) else "<missing>"
                if got != expected:
                    raise ParseError(
                        f"header column {i} is {got!r}, expected {expected!r}", line=2
                    )
        audio_cols = header[n_meta:]
        expected_audio = [f"audio_{i}" for i in range(len(audio_cols))]
        if audio_cols != expected_audio:
            raise ParseError(
                "audio columns must be audio_0..audio_{D-1} in order", line=2
            )
        feature_dim = len(audio_cols)

        records: list[SubmissionRecord] = []
        seen_ids: set[str] = set()
        for lineno, row in enumerate(reader, start=3):
            if len(row) != n_meta + feature_dim:
                raise ParseError(
                    f"row has {len(row)} cells, expected {n_meta + feature_dim}", lineno
                )
            kwargs = {}
            for (name, kind), raw in zip(METADATA_COLUMNS, row):
                kwargs[name] = _parse_cell(raw, kind, lineno, name)
            if kwargs["height_bin"] not in HEIGHT_BINS:
                raise ParseError(
                    f"unknown height bin {kwargs['height_bin']!r}", lineno, "height_bin"
                )
            if kwargs["weight_bin"] not in WEIGHT_BINS:
                raise ParseError(
                    f"unknown weight bin {kwargs['weight_bin']!r}", lineno, "weight_bin"
                )
            audio_raw = row[n_meta:]
            empties = sum(1 for c in audio_raw if c == "")
            if empties == feature_dim:
                audio = None
            elif empties == 0:
                try:
                    audio = tuple(float(c) for c in audio_raw)
                except ValueError:
                    raise ParseError("non-numeric audio cell", lineno, "audio") from None
            else:
                raise ParseError(
                    f"audio vector has {empties} empty of {feature_dim} cells;"
                    " must be all present or all empty",
                    lineno,
                    "audio",
                )
            if kwargs["id"] in seen_ids:
                raise ParseError(f"duplicate id {kwargs['id']!r}", lineno, "id")
            seen_ids.add(kwargs["id"])
            records.append(SubmissionRecord(audio_features=audio, **kwargs))

    return Dataset(tuple(records), feature_dim, provenance=str(path))


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, date):
        return value.isoformat()
    if hasattr(value, "value"):  # enum
        return value.value
    return str(value)


def write_dataset(ds: Dataset, path: str | Path) -> None:
    """Write a Dataset in the schema=1 layout (round-trips with parse_dataset)."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([SCHEMA_LINE])
        header = list(METADATA_COLUMN_NAMES) + [f"audio_{i}" for i in range(ds.feature_dim)]
        writer.writerow(header)
        for r in ds:
            cells = [_format_cell(getattr(r, name)) for name in METADATA_COLUMN_NAMES]
            if r.audio_features is None:
                cells.extend([""] * ds.feature_dim)
            else:
                cells.extend(repr(x) for x in r.audio_features)
            writer.writerow(cells)
