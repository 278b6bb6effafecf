"""Eligibility filtering and missing-data partitioning.

The filter applies the study inclusion rules in a fixed precedence order so a
record failing several rules is counted exactly once, under the first rule it
fails. The submission window is inclusive on both ends: a recording made on
the test date or up to 10 days after it is in-window.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import timedelta

from .records import Dataset, SubmissionRecord, SYMPTOM_FIELDS, TestType

SUBMISSION_WINDOW_DAYS = 10
MINIMUM_AGE = 18

# Precedence order; a record is counted under its first failing rule.
EXCLUSION_REASONS = (
    "underage",
    "non_pcr",
    "out_of_window",
    "flagged_lab",
    "symptom_contradiction",
    "missing_audio",
    "missing_metadata",
)


def _symptom_contradiction(r: SubmissionRecord) -> bool:
    if not r.no_symptoms:
        return False
    return any(getattr(r, s) for s in SYMPTOM_FIELDS if s != "no_symptoms")


def exclusion_reason(r: SubmissionRecord) -> str | None:
    """First failing eligibility rule, or None for an eligible record."""
    if r.age < MINIMUM_AGE:
        return "underage"
    if r.test_type is not TestType.PCR:
        return "non_pcr"
    delta = (r.submission_date - r.test_date).days
    if delta < 0 or delta > SUBMISSION_WINDOW_DAYS:
        return "out_of_window"
    if r.lab_under_investigation:
        return "flagged_lab"
    if _symptom_contradiction(r):
        return "symptom_contradiction"
    if r.audio_features is None:
        return "missing_audio"
    if not r.metadata_complete:
        return "missing_metadata"
    return None


@dataclass(frozen=True)
class ExclusionReport:
    """Per-reason exclusion counts for one filter pass."""

    input_size: int
    surviving: int
    counts: dict[str, int]

    def __post_init__(self):
        total = self.surviving + sum(self.counts.values())
        if total != self.input_size:
            raise ValueError(
                f"exclusion counts ({sum(self.counts.values())}) plus survivors"
                f" ({self.surviving}) != input size ({self.input_size})"
            )

    def to_dict(self) -> dict:
        return {
            "input_size": self.input_size,
            "surviving": self.surviving,
            "excluded": dict(self.counts),
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)


def apply_eligibility_filter(ds: Dataset) -> tuple[Dataset, ExclusionReport]:
    """Keep records satisfying every inclusion rule with complete data.

    Returns the surviving dataset (original order preserved) and the
    per-reason exclusion tally.
    """
    counts = {reason: 0 for reason in EXCLUSION_REASONS}
    kept = []
    for r in ds:
        reason = exclusion_reason(r)
        if reason is None:
            kept.append(r)
        else:
            counts[reason] += 1
    report = ExclusionReport(
        input_size=len(ds),
        surviving=len(kept),
        counts={k: v for k, v in counts.items() if v},
    )
    return Dataset(tuple(kept), ds.feature_dim, ds.provenance), report


def missing_data_partition(ds: Dataset) -> dict[str, Dataset]:
    """Split into missing_audio / missing_meta / complete, in that precedence.

    A record missing both its audio vector and metadata lands in
    missing_audio. The three parts are disjoint and cover the input.
    """
    missing_audio = []
    missing_meta = []
    complete = []
    for r in ds:
        if r.audio_features is None:
            missing_audio.append(r)
        elif not r.metadata_complete:
            missing_meta.append(r)
        else:
            complete.append(r)
    mk = lambda rs, tag: Dataset(tuple(rs), ds.feature_dim, f"{ds.provenance}:{tag}")
    return {
        "missing_audio": mk(missing_audio, "missing_audio"),
        "missing_meta": mk(missing_meta, "missing_meta"),
        "complete": mk(complete, "complete"),
    }
