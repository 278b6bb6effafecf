"""Shared fixture builders for the test suite.

make_record gives every field a valid default so tests override only what
they exercise. random_records draws varied-but-valid records from a seeded
generator for oracle comparisons. Nothing in here re-implements package
logic; oracles live next to the tests that use them.
"""

from __future__ import annotations

import dataclasses
from datetime import date, timedelta

import numpy as np

from matchbench.records import (
    HEIGHT_BINS,
    SYMPTOM_FIELDS,
    WEIGHT_BINS,
    CovidStatus,
    Dataset,
    Gender,
    RecruitmentSource,
    SmokerStatus,
    SubmissionRecord,
    TestType,
    ViralLoad,
)

_DEFAULTS = dict(
    age=40,
    gender=Gender.FEMALE,
    ethnicity="White British",
    first_language="English",
    local_authority="LA-001",
    recruitment_source=RecruitmentSource.TEST_AND_TRACE,
    covid_status=CovidStatus.NEGATIVE,
    cough_any=False,
    fatigue=False,
    headache=False,
    smell_taste_change=False,
    runny_blocked_nose=False,
    fever=False,
    loss_of_taste=False,
    shortness_of_breath=False,
    sore_throat=False,
    new_continuous_cough=False,
    diarrhoea=False,
    abdominal_pain=False,
    other_symptom=False,
    no_symptoms=True,
    prefer_not_to_say=False,
    asthma=False,
    copd=False,
    other_resp=False,
    none_resp=True,
    smoker_status=SmokerStatus.NEVER,
    height_bin="160_169",
    weight_bin="65_79",
    viral_load=ViralLoad.UNRECORDED,
    test_date=date(2021, 5, 10),
    submission_date=date(2021, 5, 12),
    test_type=TestType.PCR,
    lab_under_investigation=False,
    metadata_complete=True,
)


def make_record(id: str = "r0", audio: tuple | None = (0.0, 0.0), **overrides) -> SubmissionRecord:
    """A valid eligible record; override any field by name.

    Symptom overrides that set a real symptom automatically clear
    no_symptoms unless the test overrides it explicitly, keeping the
    default record contradiction-free.
    """
    kwargs = dict(_DEFAULTS)
    real_symptoms = [s for s in SYMPTOM_FIELDS if s not in ("no_symptoms", "prefer_not_to_say")]
    if any(overrides.get(s) for s in real_symptoms) and "no_symptoms" not in overrides:
        kwargs["no_symptoms"] = False
    kwargs.update(overrides)
    return SubmissionRecord(id=id, audio_features=audio, **kwargs)


def make_dataset(records, feature_dim: int = 2, provenance: str = "test") -> Dataset:
    return Dataset(tuple(records), feature_dim=feature_dim, provenance=provenance)


LANGUAGE_POOL = ("English", "Polish", "Urdu", "Welsh", "French", "Bengali", "Punjabi", "Romanian")
ETHNICITY_POOL = (
    "White British",
    "White Other",
    "Indian",
    "Pakistani",
    "Chinese",
    "Black African",
    "Mixed",
)
AUTHORITY_POOL = tuple(f"LA-{i:03d}" for i in range(1, 13))


def random_records(seed: int, n: int, feature_dim: int = 2, id_prefix: str = "r"):
    """n varied valid records drawn from a seeded generator."""
    rng = np.random.default_rng(seed)
    records = []
    genders = tuple(Gender)
    smokers = tuple(SmokerStatus)
    heights = tuple(HEIGHT_BINS)
    weights = tuple(WEIGHT_BINS)
    for i in range(n):
        positive = bool(rng.random() < 0.5)
        no_symptoms = bool(rng.random() < 0.4)
        flags = {}
        for name in SYMPTOM_FIELDS:
            if name in ("no_symptoms", "prefer_not_to_say"):
                continue
            flags[name] = (not no_symptoms) and bool(rng.random() < 0.3)
        if not no_symptoms and not any(flags.values()):
            flags["other_symptom"] = True
        viral = ViralLoad.UNRECORDED
        if positive and rng.random() < 0.6:
            viral = (ViralLoad.HIGH, ViralLoad.MEDIUM, ViralLoad.LOW)[int(rng.integers(3))]
        test_day = date(2021, 4, 1) + timedelta(days=int(rng.integers(0, 120)))
        records.append(
            make_record(
                id=f"{id_prefix}{i:04d}",
                audio=tuple(float(v) for v in rng.normal(size=feature_dim)),
                age=int(rng.integers(18, 90)),
                gender=genders[int(rng.integers(len(genders)))],
                ethnicity=ETHNICITY_POOL[int(rng.integers(len(ETHNICITY_POOL)))],
                first_language=LANGUAGE_POOL[int(rng.integers(len(LANGUAGE_POOL)))],
                local_authority=AUTHORITY_POOL[int(rng.integers(len(AUTHORITY_POOL)))],
                recruitment_source=RecruitmentSource.TEST_AND_TRACE
                if rng.random() < 0.5
                else RecruitmentSource.REACT,
                covid_status=CovidStatus.POSITIVE if positive else CovidStatus.NEGATIVE,
                no_symptoms=no_symptoms,
                viral_load=viral,
                smoker_status=smokers[int(rng.integers(len(smokers)))],
                height_bin=heights[int(rng.integers(len(heights)))],
                weight_bin=weights[int(rng.integers(len(weights)))],
                asthma=bool(rng.random() < 0.15),
                test_date=test_day,
                submission_date=test_day + timedelta(days=int(rng.integers(0, 11))),
                **flags,
            )
        )
    return records


def build_filter_fixture() -> Dataset:
    """39850 records, 2832 of them planted ineligible in disjoint slices.

    Slice layout (by index): 300 underage, 250 non-PCR, 400 out-of-window,
    257 flagged-lab, 250 symptom contradictions, 1213 missing audio, 162
    incomplete metadata; the remaining 37018 are eligible.
    """
    n = 39850
    records = []
    for i in range(n):
        over = {}
        if i < 300:
            over["age"] = 17
        elif i < 550:
            over["test_type"] = TestType.OTHER
        elif i < 950:
            over["test_date"] = date(2021, 5, 1)
            over["submission_date"] = date(2021, 5, 12)  # 11 days, one past the window
        elif i < 1207:
            over["lab_under_investigation"] = True
        elif i < 1457:
            over["no_symptoms"] = True
            over["cough_any"] = True
        rec = make_record(id=f"f{i:05d}", **over)
        if 1457 <= i < 2670:
            rec = dataclasses.replace(rec, audio_features=None)
        elif 2670 <= i < 2832:
            rec = dataclasses.replace(rec, metadata_complete=False)
        records.append(rec)
    return make_dataset(records, feature_dim=2, provenance="filter-fixture")


FILTER_FIXTURE_EXPECTED = {
    "underage": 300,
    "non_pcr": 250,
    "out_of_window": 400,
    "flagged_lab": 257,
    "symptom_contradiction": 250,
    "missing_audio": 1213,
    "missing_metadata": 162,
}


def small_mimic_config(seed: int, n: int = 2000, feature_dim: int = 8):
    """The stock generator shrunk for fast tests."""
    from matchbench import default_paper_mimic_config

    return default_paper_mimic_config(seed, n=n, feature_dim=feature_dim)


def small_split_config(seed: int, viral_target: int = 30):
    from matchbench import SplitConfig

    return SplitConfig(seed=seed, viral_load_target_per_category=viral_target)
