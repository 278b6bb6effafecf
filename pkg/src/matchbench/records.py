"""Submission schema: enums, record/dataset containers and the variable registry.

One row of study data is a :class:`SubmissionRecord`. A :class:`Dataset` is an
immutable ordered collection of records with a declared audio-feature
dimension. The variable registry at the bottom gives every analysable column a
name, a kind and (for categoricals) a fixed category order, so that audits,
feature encoders and the CSV layer all agree on what a "variable" is.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, fields
from datetime import date


class Gender(enum.Enum):
    MALE = "Male"
    FEMALE = "Female"
    OTHER = "Other"
    PREFER_NOT_TO_SAY = "PreferNotToSay"


class RecruitmentSource(enum.Enum):
    TEST_AND_TRACE = "TestAndTrace"
    REACT = "React"


class CovidStatus(enum.Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"


class SmokerStatus(enum.Enum):
    NEVER = "Never"
    EX = "Ex"
    CURRENT = "Current"
    PREFER_NOT_TO_SAY = "PreferNotToSay"


class ViralLoad(enum.Enum):
    HIGH = "High"
    MEDIUM = "Medium"
    LOW = "Low"
    UNRECORDED = "Unrecorded"


class TestType(enum.Enum):
    PCR = "PCR"
    OTHER = "Other"


# Self-reported symptom flags, in schema order. The order is load-bearing:
# it fixes CSV column order and the bit positions of symptom-combination masks.
SYMPTOM_FIELDS = (
    "cough_any",
    "fatigue",
    "headache",
    "smell_taste_change",
    "runny_blocked_nose",
    "fever",
    "loss_of_taste",
    "shortness_of_breath",
    "sore_throat",
    "new_continuous_cough",
    "diarrhoea",
    "abdominal_pain",
    "other_symptom",
    "no_symptoms",
    "prefer_not_to_say",
)

RESPIRATORY_FIELDS = ("asthma", "copd", "other_resp", "none_resp")

# Flags that count as an actual symptom ("at least one symptom" excludes the
# no-symptoms and prefer-not-to-say options).
REAL_SYMPTOM_FIELDS = tuple(
    s for s in SYMPTOM_FIELDS if s not in ("no_symptoms", "prefer_not_to_say")
)

# Height and weight are captured as bins; midpoints (cm / kg) are the declared
# numeric readings for each label. The lowest bin is kept as-is even though
# form-first-option artifacts inflate it.
HEIGHT_BINS = {
    "under_150": 145.0,
    "150_159": 154.5,
    "160_169": 164.5,
    "170_179": 174.5,
    "180_189": 184.5,
    "190_plus": 194.5,
}

WEIGHT_BINS = {
    "under_50": 45.0,
    "50_64": 57.0,
    "65_79": 72.0,
    "80_94": 87.0,
    "95_109": 102.0,
    "110_plus": 117.0,
}


class SchemaError(ValueError):
    """Raised when a record or dataset violates the declared schema."""


@dataclass(frozen=True, slots=True)
class SubmissionRecord:
    """One study submission: demographics, symptoms, test outcome, audio vector."""

    id: str
    age: int
    gender: Gender
    ethnicity: str
    first_language: str
    local_authority: str
    recruitment_source: RecruitmentSource
    covid_status: CovidStatus
    # symptom flags
    cough_any: bool
    fatigue: bool
    headache: bool
    smell_taste_change: bool
    runny_blocked_nose: bool
    fever: bool
    loss_of_taste: bool
    shortness_of_breath: bool
    sore_throat: bool
    new_continuous_cough: bool
    diarrhoea: bool
    abdominal_pain: bool
    other_symptom: bool
    no_symptoms: bool
    prefer_not_to_say: bool
    # respiratory conditions
    asthma: bool
    copd: bool
    other_resp: bool
    none_resp: bool
    smoker_status: SmokerStatus
    height_bin: str
    weight_bin: str
    viral_load: ViralLoad
    test_date: date
    submission_date: date
    test_type: TestType
    lab_under_investigation: bool
    metadata_complete: bool
    audio_features: tuple[float, ...] | None = None

    def symptom_flags(self) -> tuple[bool, ...]:
        """All 15 symptom flags in schema order."""
        return tuple(getattr(self, s) for s in SYMPTOM_FIELDS)

    def symptom_bitmask(self) -> int:
        """Symptom combination as an integer; bit i is SYMPTOM_FIELDS[i]."""
        mask = 0
        for i, name in enumerate(SYMPTOM_FIELDS):
            if getattr(self, name):
                mask |= 1 << i
        return mask

    @property
    def at_least_one_symptom(self) -> bool:
        """True iff any flag other than no_symptoms / prefer_not_to_say is set."""
        return any(getattr(self, s) for s in REAL_SYMPTOM_FIELDS)

    @property
    def symptomatic(self) -> bool:
        """Symptomatic / no-symptoms dichotomy used by the cross-tabulations."""
        return not self.no_symptoms

    @property
    def height_cm(self) -> float:
        return HEIGHT_BINS[self.height_bin]

    @property
    def weight_kg(self) -> float:
        return WEIGHT_BINS[self.weight_bin]

    def validate(self) -> None:
        """Raise SchemaError on any field outside the declared domain."""
        if not self.id:
            raise SchemaError("record id must be non-empty")
        if self.age < 0 or self.age > 130:
            raise SchemaError(f"record {self.id}: implausible age {self.age}")
        if self.height_bin not in HEIGHT_BINS:
            raise SchemaError(f"record {self.id}: unknown height_bin {self.height_bin!r}")
        if self.weight_bin not in WEIGHT_BINS:
            raise SchemaError(f"record {self.id}: unknown weight_bin {self.weight_bin!r}")


@dataclass(frozen=True)
class Dataset:
    """Immutable ordered collection of records with one audio-feature dimension.

    Records are validated on construction: ids must be unique, and every
    present audio vector must have exactly `feature_dim` entries.
    """

    records: tuple[SubmissionRecord, ...]
    feature_dim: int
    provenance: str = ""

    def __post_init__(self):
        seen: set[str] = set()
        for r in self.records:
            if r.id in seen:
                raise SchemaError(f"duplicate record id {r.id!r}")
            seen.add(r.id)
            if r.audio_features is not None and len(r.audio_features) != self.feature_dim:
                raise SchemaError(
                    f"record {r.id!r}: audio vector has {len(r.audio_features)} entries,"
                    f" dataset declares {self.feature_dim}"
                )

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def by_id(self) -> dict[str, SubmissionRecord]:
        return {r.id: r for r in self.records}

    def subset(self, ids, provenance: str | None = None) -> "Dataset":
        """Records whose id is in `ids`, preserving dataset order."""
        wanted = set(ids)
        kept = tuple(r for r in self.records if r.id in wanted)
        missing = wanted - {r.id for r in kept}
        if missing:
            raise KeyError(f"ids not in dataset: {sorted(missing)[:5]}")
        return Dataset(kept, self.feature_dim, provenance or self.provenance)


@dataclass(frozen=True)
class Variable:
    """One analysable column: how to read it and what values it can take."""

    name: str
    kind: str  # "categorical" | "bool" | "numeric"
    getter: object
    categories: tuple[str, ...] | None = None

    def value(self, record: SubmissionRecord):
        return self.getter(record)

    def category_of(self, record: SubmissionRecord) -> str:
        v = self.getter(record)
        if isinstance(v, enum.Enum):
            return v.value
        if isinstance(v, bool):
            return "true" if v else "false"
        return str(v)


def _enum_var(name: str, enum_cls) -> Variable:
    return Variable(
        name,
        "categorical",
        lambda r, n=name: getattr(r, n),
        tuple(m.value for m in enum_cls),
    )


def _bool_var(name: str) -> Variable:
    return Variable(name, "bool", lambda r, n=name: getattr(r, n), ("true", "false"))


def _build_registry() -> dict[str, Variable]:
    reg: dict[str, Variable] = {}
    reg["age"] = Variable("age", "numeric", lambda r: float(r.age))
    reg["gender"] = _enum_var("gender", Gender)
    reg["ethnicity"] = Variable("ethnicity", "categorical", lambda r: r.ethnicity)
    reg["first_language"] = Variable("first_language", "categorical", lambda r: r.first_language)
    reg["local_authority"] = Variable("local_authority", "categorical", lambda r: r.local_authority)
    reg["recruitment_source"] = _enum_var("recruitment_source", RecruitmentSource)
    reg["covid_status"] = _enum_var("covid_status", CovidStatus)
    for s in SYMPTOM_FIELDS:
        reg[s] = _bool_var(s)
    for s in RESPIRATORY_FIELDS:
        reg[s] = _bool_var(s)
    reg["smoker_status"] = _enum_var("smoker_status", SmokerStatus)
    reg["height_bin"] = Variable(
        "height_bin", "categorical", lambda r: r.height_bin, tuple(HEIGHT_BINS)
    )
    reg["weight_bin"] = Variable(
        "weight_bin", "categorical", lambda r: r.weight_bin, tuple(WEIGHT_BINS)
    )
    reg["viral_load"] = _enum_var("viral_load", ViralLoad)
    reg["test_type"] = _enum_var("test_type", TestType)
    reg["height_cm"] = Variable("height_cm", "numeric", lambda r: r.height_cm)
    reg["weight_kg"] = Variable("weight_kg", "numeric", lambda r: r.weight_kg)
    # derived dichotomies
    reg["symptomatic"] = Variable(
        "symptomatic", "bool", lambda r: r.symptomatic, ("true", "false")
    )
    reg["at_least_one_symptom"] = Variable(
        "at_least_one_symptom", "bool", lambda r: r.at_least_one_symptom, ("true", "false")
    )
    return reg


VARIABLES: dict[str, Variable] = _build_registry()


def variable(name: str) -> Variable:
    try:
        return VARIABLES[name]
    except KeyError:
        raise KeyError(f"unknown variable {name!r}; known: {sorted(VARIABLES)}") from None


def observed_categories(ds: Dataset, var: Variable) -> list[str]:
    """Category order for reports: declared schema order first, then any
    extra observed values lexicographically (open categoricals)."""
    observed = {var.category_of(r) for r in ds}
    if var.categories is None:
        return sorted(observed)
    extras = sorted(observed - set(var.categories))
    return list(var.categories) + extras


_RECORD_FIELD_NAMES = tuple(f.name for f in fields(SubmissionRecord))
