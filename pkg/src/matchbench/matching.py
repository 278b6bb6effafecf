"""Exact 1:1 matched test-set construction.

Records are grouped into strata defined by nine matching variables; each
stratum contributes min(#positives, #negatives) records of each class,
drawn uniformly without replacement. The resulting subset is exactly
balanced: the joint distribution of the nine variables is identical for
selected positives and negatives, so any classifier signal that survives
cannot come from those variables.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .records import CovidStatus, Dataset, SubmissionRecord
from .seeding import substream

MATCHING_VARIABLES = (
    "recruitment_source",
    "age_bin",
    "gender",
    "cough_any",
    "sore_throat",
    "asthma",
    "shortness_of_breath",
    "runny_blocked_nose",
    "at_least_one_symptom",
)

AGE_BIN_WIDTH = 10


@dataclass(frozen=True, order=True)
class StratumKey:
    """The nine matching variables of one record.

    age_bin is floor(age / 10), so 39 and 40 fall in different strata
    while 30 and 39 share one. at_least_one_symptom is the derived flag
    (any concrete symptom, ignoring no_symptoms / prefer_not_to_say).
    """

    recruitment_source: str
    age_bin: int
    gender: str
    cough_any: bool
    sore_throat: bool
    asthma: bool
    shortness_of_breath: bool
    runny_blocked_nose: bool
    at_least_one_symptom: bool

    def to_dict(self) -> dict:
        return {
            "recruitment_source": self.recruitment_source,
            "age_bin": self.age_bin,
            "gender": self.gender,
            "cough_any": self.cough_any,
            "sore_throat": self.sore_throat,
            "asthma": self.asthma,
            "shortness_of_breath": self.shortness_of_breath,
            "runny_blocked_nose": self.runny_blocked_nose,
            "at_least_one_symptom": self.at_least_one_symptom,
        }


def stratum_key(r: SubmissionRecord) -> StratumKey:
    return StratumKey(
        recruitment_source=r.recruitment_source.value,
        age_bin=r.age // AGE_BIN_WIDTH,
        gender=r.gender.value,
        cough_any=r.cough_any,
        sore_throat=r.sore_throat,
        asthma=r.asthma,
        shortness_of_breath=r.shortness_of_breath,
        runny_blocked_nose=r.runny_blocked_nose,
        at_least_one_symptom=r.at_least_one_symptom,
    )


@dataclass(frozen=True)
class MatchedSet:
    """Selected ids plus the per-stratum bookkeeping behind them."""

    selected_ids: frozenset
    # stratum -> (selected positives, selected negatives); both equal by
    # construction, kept as a pair for the serialized balance table.
    stratum_counts: dict
    warnings: tuple = ()

    @property
    def size(self) -> int:
        return len(self.selected_ids)

    def dataset(self, d: Dataset) -> Dataset:
        keep = [rec.id for rec in d if rec.id in self.selected_ids]
        return d.subset(keep, provenance=f"{d.provenance} | matched")

    def to_ids_csv(self) -> str:
        return "id\n" + "".join(f"{rid}\n" for rid in sorted(self.selected_ids))

    def balance_table_json(self) -> str:
        rows = []
        for key in sorted(self.stratum_counts):
            pos, neg = self.stratum_counts[key]
            row = key.to_dict()
            row["selected_positives"] = pos
            row["selected_negatives"] = neg
            rows.append(row)
        return json.dumps(rows, indent=2, sort_keys=True)


def build_matched_set(test: Dataset, seed: int) -> MatchedSet:
    """Exact-match the test set 1:1 on the nine stratum variables.

    Strata lacking one of the classes contribute nothing. An entirely
    empty result is reported through warnings rather than an exception so
    callers can decide whether a degenerate comparison is still useful.
    """
    strata: dict[StratumKey, dict] = {}
    for rec in test:
        key = stratum_key(rec)
        bucket = strata.setdefault(key, {"pos": [], "neg": []})
        side = "pos" if rec.covid_status is CovidStatus.POSITIVE else "neg"
        bucket[side].append(rec.id)

    selected: list[str] = []
    counts: dict[StratumKey, tuple] = {}
    for key in sorted(strata):
        bucket = strata[key]
        m = min(len(bucket["pos"]), len(bucket["neg"]))
        if m == 0:
            continue
        rng = substream(seed, "stratum", *_key_labels(key))
        for side in ("pos", "neg"):
            pool = sorted(bucket[side])
            if m >= len(pool):
                chosen = pool
            else:
                idx = rng.choice(len(pool), size=m, replace=False)
                chosen = [pool[i] for i in sorted(idx)]
            selected.extend(chosen)
        counts[key] = (m, m)

    warnings = ()
    if not selected:
        warnings = ("matched set is empty: no stratum contains both classes",)
    return MatchedSet(
        selected_ids=frozenset(selected),
        stratum_counts=counts,
        warnings=warnings,
    )


def _key_labels(key: StratumKey) -> tuple:
    return (
        key.recruitment_source,
        key.age_bin,
        key.gender,
        int(key.cough_any),
        int(key.sore_throat),
        int(key.asthma),
        int(key.shortness_of_breath),
        int(key.runny_blocked_nose),
        int(key.at_least_one_symptom),
    )
