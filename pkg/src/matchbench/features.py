"""Feature encoding for the two comparison models.

MetadataOnly encodes age, gender, the fifteen symptom flags, smoker
status, respiratory conditions, and height/weight bin midpoints.
recruitment_source and viral_load are deliberately excluded: source is
nearly deterministic in status by construction, and viral load exists
only for positives, so either would make every comparison trivial.
AudioOnly passes the raw audio vector through per-dimension
standardization. All statistics (means, sds, category vocabularies) come
from the training set alone.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .records import (
    RESPIRATORY_FIELDS,
    SYMPTOM_FIELDS,
    Dataset,
    Gender,
    SmokerStatus,
    SubmissionRecord,
)

METADATA_ONLY = "MetadataOnly"
AUDIO_ONLY = "AudioOnly"

_GENDER_ORDER = tuple(g.value for g in Gender)
_SMOKER_ORDER = tuple(s.value for s in SmokerStatus)

# Numeric metadata channels, read off the record in this order before
# standardization.
_NUMERIC_FIELDS = ("age", "height_cm", "weight_kg")


@dataclass(frozen=True)
class FeatureSpec:
    """A fitted encoding plan.

    mode selects the covariate family; means/sds hold the training-set
    statistics for the numeric block (metadata) or every dimension
    (audio). Encoding never looks at the evaluation records' statistics.
    """

    mode: str
    dimension: int
    means: tuple
    sds: tuple
    feature_names: tuple

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "dimension": self.dimension,
            "means": list(self.means),
            "sds": list(self.sds),
            "feature_names": list(self.feature_names),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureSpec":
        return cls(
            mode=d["mode"],
            dimension=d["dimension"],
            means=tuple(d["means"]),
            sds=tuple(d["sds"]),
            feature_names=tuple(d["feature_names"]),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _metadata_raw(r: SubmissionRecord) -> np.ndarray:
    """Unstandardized metadata row: numerics first, then the binary blocks."""
    parts = [float(r.age), r.height_cm, r.weight_kg]
    parts.extend(1.0 if r.gender.value == g else 0.0 for g in _GENDER_ORDER)
    parts.extend(1.0 if r.smoker_status.value == s else 0.0 for s in _SMOKER_ORDER)
    parts.extend(float(getattr(r, name)) for name in SYMPTOM_FIELDS)
    parts.extend(float(getattr(r, name)) for name in RESPIRATORY_FIELDS)
    return np.array(parts, dtype=np.float64)


def _metadata_names() -> tuple:
    names = list(_NUMERIC_FIELDS)
    names.extend(f"gender={g}" for g in _GENDER_ORDER)
    names.extend(f"smoker_status={s}" for s in _SMOKER_ORDER)
    names.extend(SYMPTOM_FIELDS)
    names.extend(RESPIRATORY_FIELDS)
    return tuple(names)


def _audio_raw(r: SubmissionRecord) -> np.ndarray:
    if r.audio_features is None:
        raise ValueError(f"record {r.id} has no audio features")
    return np.asarray(r.audio_features, dtype=np.float64)


def fit_feature_spec(train: Dataset, mode: str) -> FeatureSpec:
    """Fit means and sds on the training set.

    Metadata mode standardizes only the numeric block (one-hot and flag
    channels stay 0/1); audio mode standardizes every dimension. Constant
    dimensions get sd 1 so they encode to exactly zero instead of NaN.
    """
    if len(train) == 0:
        raise ValueError("cannot fit a feature spec on an empty dataset")
    if mode == METADATA_ONLY:
        raw = np.stack([_metadata_raw(r) for r in train])
        names = _metadata_names()
        n_numeric = len(_NUMERIC_FIELDS)
        means = np.zeros(raw.shape[1])
        sds = np.ones(raw.shape[1])
        means[:n_numeric] = raw[:, :n_numeric].mean(axis=0)
        sd = raw[:, :n_numeric].std(axis=0)
        sds[:n_numeric] = np.where(sd > 0, sd, 1.0)
    elif mode == AUDIO_ONLY:
        raw = np.stack([_audio_raw(r) for r in train])
        names = tuple(f"audio_{i}" for i in range(raw.shape[1]))
        means = raw.mean(axis=0)
        sd = raw.std(axis=0)
        sds = np.where(sd > 0, sd, 1.0)
    else:
        raise ValueError(f"unknown feature mode {mode!r}")
    return FeatureSpec(
        mode=mode,
        dimension=raw.shape[1],
        means=tuple(float(v) for v in means),
        sds=tuple(float(v) for v in sds),
        feature_names=names,
    )


def encode_record(r: SubmissionRecord, spec: FeatureSpec) -> np.ndarray:
    if spec.mode == METADATA_ONLY:
        raw = _metadata_raw(r)
    elif spec.mode == AUDIO_ONLY:
        raw = _audio_raw(r)
    else:
        raise ValueError(f"unknown feature mode {spec.mode!r}")
    if raw.shape[0] != spec.dimension:
        raise ValueError(
            f"record {r.id}: expected {spec.dimension} raw features, got {raw.shape[0]}"
        )
    return (raw - np.asarray(spec.means)) / np.asarray(spec.sds)


def encode_dataset(d: Dataset, spec: FeatureSpec) -> np.ndarray:
    """(n, dimension) design matrix, C-contiguous float64."""
    if len(d) == 0:
        return np.zeros((0, spec.dimension))
    return np.ascontiguousarray(np.stack([encode_record(r, spec) for r in d]))
