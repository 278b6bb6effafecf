"""Designed and random train/test splits.

The designed split runs twelve ordered steps, each moving records from the
remaining pool into the test set: language and ethnicity holdouts,
authority holdouts, all asymptomatic positives, age-skewed samples around
gender-specific medians, recruitment-channel holdouts, viral-load top-ups,
and a final fill from viral-load-unrecorded records to hit the target test
fraction. The steps deliberately concentrate hard or confound-revealing
cases in the test set; a uniform random split is provided as the baseline.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field

import numpy as np

from .records import CovidStatus, Dataset, RecruitmentSource, ViralLoad
from .seeding import substream

STEP_LABELS = ("a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l")

# Steps whose membership is a pure predicate of the record (given the
# drawn category sets); provenance marks every test record they cover.
# The sampled steps (g, h, k, l) mark only the records they actually drew.
_PREDICATE_STEPS = ("a", "b", "c", "d", "e", "f", "i", "j")

FRACTION_TOLERANCE = 0.005  # |test|/n may differ from test_fraction by this much


class InfeasibleSplitError(ValueError):
    """The designed steps cannot land within tolerance of the target fraction."""


@dataclass(frozen=True)
class SplitConfig:
    """Knobs for the designed split, one per step.

    negative_holdout_authorities drives step (c): all negatives of those
    authorities enter the test set. Pass a tuple of authority names, or an
    integer k to auto-select the k authorities with the most positives
    (the adversarial rule: hold out negatives where positives abound).
    positive_holdout_authorities mirrors it for step (d), auto-selecting
    by negative counts. reference_language / reference_ethnicity name the
    majority category excluded from the (a)/(b) holdout draws.
    """

    n_holdout_languages: int = 5
    n_holdout_ethnicities: int = 5
    negative_holdout_authorities: tuple | int = 2
    positive_holdout_authorities: tuple | int = 2
    n_random_authorities: int = 4
    older_positive_fraction: float = 0.5
    younger_negative_fraction: float = 0.5
    viral_load_target_per_category: int = 598
    test_fraction: float = 0.30
    reference_language: str = "English"
    reference_ethnicity: str = "White British"
    seed: int = 0

    def validate(self) -> None:
        errors = []
        for name in ("n_holdout_languages", "n_holdout_ethnicities", "n_random_authorities"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                errors.append(f"{name}: expected a non-negative integer, got {v!r}")
        for name in ("older_positive_fraction", "younger_negative_fraction", "test_fraction"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                errors.append(f"{name}: fraction {v!r} outside [0, 1]")
        if not 0.0 < self.test_fraction < 1.0:
            errors.append(f"test_fraction: must be strictly inside (0, 1), got {self.test_fraction!r}")
        if not isinstance(self.viral_load_target_per_category, int) or self.viral_load_target_per_category < 0:
            errors.append("viral_load_target_per_category: expected a non-negative integer")
        for name in ("negative_holdout_authorities", "positive_holdout_authorities"):
            v = getattr(self, name)
            if isinstance(v, int):
                if v < 0:
                    errors.append(f"{name}: auto-count must be >= 0, got {v}")
            elif isinstance(v, (tuple, list)):
                if any(not isinstance(a, str) for a in v):
                    errors.append(f"{name}: authority names must be strings")
            else:
                errors.append(f"{name}: expected an int auto-count or a tuple of names, got {v!r}")
        if errors:
            raise ValueError("invalid split config:\n  " + "\n  ".join(errors))

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        for name in ("negative_holdout_authorities", "positive_holdout_authorities"):
            if isinstance(d[name], tuple):
                d[name] = list(d[name])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SplitConfig":
        kwargs = dict(d)
        for name in ("negative_holdout_authorities", "positive_holdout_authorities"):
            if name in kwargs and isinstance(kwargs[name], list):
                kwargs[name] = tuple(kwargs[name])
        return cls(**kwargs)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


@dataclass(frozen=True)
class SplitAssignment:
    """A train/test partition with per-test-record step provenance."""

    ids: tuple  # every record id, dataset order
    test_ids: frozenset
    provenance: dict  # test id -> tuple of step labels, ascending
    warnings: tuple = ()
    # Realized draws, for reporting: held-out languages/ethnicities and
    # the three authority groups.
    choices: dict = field(default_factory=dict)

    def __post_init__(self):
        unknown = self.test_ids - set(self.ids)
        if unknown:
            raise ValueError(f"test ids not in dataset: {sorted(unknown)[:5]}")
        for tid in self.test_ids:
            if not self.provenance.get(tid):
                raise ValueError(f"test record {tid} has empty provenance")

    @property
    def train_ids(self) -> frozenset:
        return frozenset(i for i in self.ids if i not in self.test_ids)

    def assignment_of(self, record_id: str) -> str:
        return "Test" if record_id in self.test_ids else "Train"

    def test_dataset(self, d: Dataset) -> Dataset:
        keep = [i for i in self.ids if i in self.test_ids]
        return d.subset(keep, provenance=f"{d.provenance} | test")

    def train_dataset(self, d: Dataset) -> Dataset:
        keep = [i for i in self.ids if i not in self.test_ids]
        return d.subset(keep, provenance=f"{d.provenance} | train")

    def step_counts(self) -> dict:
        counts = {label: 0 for label in STEP_LABELS}
        for labels in self.provenance.values():
            for lab in labels:
                if lab in counts:
                    counts[lab] += 1
        return counts

    def to_csv(self) -> str:
        lines = ["id,assignment,provenance"]
        for rid in self.ids:
            prov = "|".join(self.provenance.get(rid, ()))
            lines.append(f"{rid},{self.assignment_of(rid)},{prov}")
        return "\n".join(lines) + "\n"


def _draw(rng: np.random.Generator, pool: list, k: int) -> list:
    """k distinct elements from a sorted pool, in stable order."""
    if k >= len(pool):
        return list(pool)
    idx = rng.choice(len(pool), size=k, replace=False)
    return [pool[i] for i in sorted(idx)]


def _top_authorities(d: Dataset, status: CovidStatus, k: int) -> tuple:
    counts: dict[str, int] = {}
    for rec in d:
        if rec.covid_status is status:
            counts[rec.local_authority] = counts.get(rec.local_authority, 0) + 1
    ranked = sorted(counts, key=lambda a: (-counts[a], a))
    return tuple(ranked[:k])


def build_designed_split(d: Dataset, cfg: SplitConfig) -> SplitAssignment:
    """Run the twelve designed steps in order and return the assignment.

    Raises InfeasibleSplitError when the mandatory steps already blow past
    the target fraction (plus tolerance) or the final fill pool runs dry.
    Viral-load categories that cannot reach their target are filled to
    availability and reported via warnings.
    """
    cfg.validate()
    n = len(d)
    if n == 0:
        raise ValueError("cannot split an empty dataset")
    seed = cfg.seed
    warnings: list[str] = []

    test: set[str] = set()
    sampled_by: dict[str, list] = {}

    def add(rid: str, label: str, sampled: bool) -> None:
        test.add(rid)
        if sampled:
            sampled_by.setdefault(rid, []).append(label)

    # -- category draws ---------------------------------------------------
    languages = sorted({r.first_language for r in d} - {cfg.reference_language})
    if len(languages) < cfg.n_holdout_languages:
        raise ValueError(
            f"step (a): need {cfg.n_holdout_languages} non-{cfg.reference_language} "
            f"languages, dataset has {len(languages)}"
        )
    held_languages = _draw(substream(seed, "step-a"), languages, cfg.n_holdout_languages)

    ethnicities = sorted({r.ethnicity for r in d} - {cfg.reference_ethnicity})
    if len(ethnicities) < cfg.n_holdout_ethnicities:
        raise ValueError(
            f"step (b): need {cfg.n_holdout_ethnicities} non-{cfg.reference_ethnicity} "
            f"groups, dataset has {len(ethnicities)}"
        )
    held_ethnicities = _draw(substream(seed, "step-b"), ethnicities, cfg.n_holdout_ethnicities)

    if isinstance(cfg.negative_holdout_authorities, int):
        neg_holdout_auths = _top_authorities(d, CovidStatus.POSITIVE, cfg.negative_holdout_authorities)
    else:
        neg_holdout_auths = tuple(cfg.negative_holdout_authorities)
    if isinstance(cfg.positive_holdout_authorities, int):
        pos_holdout_auths = _top_authorities(d, CovidStatus.NEGATIVE, cfg.positive_holdout_authorities)
    else:
        pos_holdout_auths = tuple(cfg.positive_holdout_authorities)

    all_auths = sorted({r.local_authority for r in d})
    remaining_auths = [a for a in all_auths if a not in neg_holdout_auths and a not in pos_holdout_auths]
    if len(remaining_auths) < cfg.n_random_authorities:
        raise ValueError(
            f"step (e): need {cfg.n_random_authorities} authorities beyond the "
            f"holdouts, dataset has {len(remaining_auths)}"
        )
    random_auths = _draw(substream(seed, "step-e"), remaining_auths, cfg.n_random_authorities)

    # Gender-specific age medians over the full dataset, fixed up front.
    by_gender: dict = {}
    for rec in d:
        by_gender.setdefault(rec.gender, []).append(rec.age)
    median_age = {g: float(np.median(ages)) for g, ages in by_gender.items()}

    # -- predicates for the deterministic steps ---------------------------
    held_lang_set = set(held_languages)
    held_eth_set = set(held_ethnicities)
    neg_holdout_set = set(neg_holdout_auths)
    pos_holdout_set = set(pos_holdout_auths)
    random_auth_set = set(random_auths)

    predicates = {
        "a": lambda r: r.first_language in held_lang_set,
        "b": lambda r: r.ethnicity in held_eth_set,
        "c": lambda r: r.covid_status is CovidStatus.NEGATIVE and r.local_authority in neg_holdout_set,
        "d": lambda r: r.covid_status is CovidStatus.POSITIVE and r.local_authority in pos_holdout_set,
        "e": lambda r: r.local_authority in random_auth_set,
        "f": lambda r: r.covid_status is CovidStatus.POSITIVE and r.no_symptoms,
        "i": lambda r: r.covid_status is CovidStatus.POSITIVE
        and r.recruitment_source is RecruitmentSource.REACT,
        "j": lambda r: r.covid_status is CovidStatus.NEGATIVE
        and r.recruitment_source is RecruitmentSource.TEST_AND_TRACE,
    }

    # -- steps (a)-(f) -----------------------------------------------------
    for label in ("a", "b", "c", "d", "e", "f"):
        pred = predicates[label]
        for rec in d:
            if pred(rec):
                add(rec.id, label, sampled=False)

    # -- steps (g)/(h): age-skewed samples --------------------------------
    def age_sample(label: str, status: CovidStatus, above: bool, fraction: float) -> None:
        pool = sorted(
            rec.id
            for rec in d
            if rec.covid_status is status
            and rec.id not in test
            and (rec.age > median_age[rec.gender] if above else rec.age < median_age[rec.gender])
        )
        k = int(fraction * len(pool) + 0.5)
        for rid in _draw(substream(seed, f"step-{label}"), pool, k):
            add(rid, label, sampled=True)

    age_sample("g", CovidStatus.POSITIVE, above=True, fraction=cfg.older_positive_fraction)
    age_sample("h", CovidStatus.NEGATIVE, above=False, fraction=cfg.younger_negative_fraction)

    # -- steps (i)/(j) ------------------------------------------------------
    for label in ("i", "j"):
        pred = predicates[label]
        for rec in d:
            if pred(rec):
                add(rec.id, label, sampled=False)

    # -- step (k): viral-load top-up ---------------------------------------
    for cat in (ViralLoad.HIGH, ViralLoad.MEDIUM, ViralLoad.LOW):
        have = sum(1 for rec in d if rec.id in test and rec.viral_load is cat)
        need = cfg.viral_load_target_per_category - have
        if need <= 0:
            continue
        pool = sorted(rec.id for rec in d if rec.id not in test and rec.viral_load is cat)
        if need > len(pool):
            warnings.append(
                f"step (k): viral-load {cat.value}: wanted {need} more, only {len(pool)} available"
            )
        for rid in _draw(substream(seed, f"step-k-{cat.value}"), pool, min(need, len(pool))):
            add(rid, "k", sampled=True)

    # -- step (l): fill from unrecorded ------------------------------------
    target_total = int(cfg.test_fraction * n + 0.5)
    need = target_total - len(test)
    if need < 0 and len(test) / n > cfg.test_fraction + FRACTION_TOLERANCE:
        raise InfeasibleSplitError(
            f"steps (a)-(k) selected {len(test)} of {n} records "
            f"({len(test) / n:.4f}), above the target fraction {cfg.test_fraction}"
        )
    if need > 0:
        pool = sorted(
            rec.id for rec in d if rec.id not in test and rec.viral_load is ViralLoad.UNRECORDED
        )
        for rid in _draw(substream(seed, "step-l"), pool, min(need, len(pool))):
            add(rid, "l", sampled=True)

    realized = len(test) / n
    if abs(realized - cfg.test_fraction) > FRACTION_TOLERANCE:
        raise InfeasibleSplitError(
            f"final test fraction {realized:.4f} outside "
            f"{cfg.test_fraction} ± {FRACTION_TOLERANCE} (|test| = {len(test)}, n = {n})"
        )

    provenance: dict[str, tuple] = {}
    for rec in d:
        if rec.id not in test:
            continue
        labels = [lab for lab in _PREDICATE_STEPS if predicates[lab](rec)]
        labels.extend(sampled_by.get(rec.id, ()))
        provenance[rec.id] = tuple(sorted(labels))

    return SplitAssignment(
        ids=tuple(rec.id for rec in d),
        test_ids=frozenset(test),
        provenance=provenance,
        warnings=tuple(warnings),
        choices={
            "held_languages": list(held_languages),
            "held_ethnicities": list(held_ethnicities),
            "negative_holdout_authorities": list(neg_holdout_auths),
            "positive_holdout_authorities": list(pos_holdout_auths),
            "random_authorities": list(random_auths),
            "median_age_by_gender": {g.value: m for g, m in median_age.items()},
        },
    )


def build_random_split(d: Dataset, test_fraction: float, seed: int) -> SplitAssignment:
    """Uniform random split: round(n * fraction) records become the test set."""
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must be inside (0, 1), got {test_fraction!r}")
    n = len(d)
    k = int(round(n * test_fraction))
    pool = sorted(rec.id for rec in d)
    chosen = _draw(substream(seed, "random-split"), pool, k)
    return SplitAssignment(
        ids=tuple(rec.id for rec in d),
        test_ids=frozenset(chosen),
        provenance={rid: ("random",) for rid in chosen},
        warnings=(),
        choices={},
    )
