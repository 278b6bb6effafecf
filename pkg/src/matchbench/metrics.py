"""ROC-AUC and the three-way split comparison report.

roc_auc is the Mann-Whitney statistic with midrank tie handling, computed
in O(n log n); run_comparison trains both model families and scores them
on the Randomized / Designed / Matched test variants, producing a report
whose shape mirrors a two-row, three-column AUC table.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .features import AUDIO_ONLY, METADATA_ONLY
from .matching import MatchedSet
from .models import (
    LinearModel,
    TrainingParams,
    labels_pm1,
    predict_scores,
    train_logistic,
    train_max_margin,
)
from .records import Dataset
from .splits import SplitAssignment

VARIANTS = ("Randomized", "Designed", "Matched")

CLASSIFIERS = (
    ("max_margin", AUDIO_ONLY),
    ("logistic", METADATA_ONLY),
)


def roc_auc(scores, labels) -> float:
    """Probability a positive outscores a negative, ties counted half.

    labels are binary (1 = positive class); both classes must appear.
    Equals (#{pairs with score_pos > score_neg} + 0.5 * #ties) / (P * N),
    evaluated through midranks rather than the quadratic pair sweep.
    """
    scores = np.ascontiguousarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape[0] != labels.shape[0]:
        raise ValueError(f"length mismatch: {scores.shape[0]} scores vs {labels.shape[0]} labels")
    uniq = set(int(v) for v in np.unique(labels))
    if not uniq <= {0, 1}:
        raise ValueError(f"labels must be binary 0/1, got values {sorted(uniq)}")
    if uniq != {0, 1}:
        raise ValueError("both classes must be present to compute AUC")
    y01 = np.ascontiguousarray(labels, dtype=np.int64)
    return float(_kernels.roc_auc_kernel(scores, y01))


@dataclass(frozen=True)
class EvalCell:
    classifier: str  # family name
    feature_mode: str
    variant: str
    auc: float
    n_positive: int
    n_negative: int
    # Reserved for a future bootstrap interval; always None in v1.
    ci_low: float | None = None
    ci_high: float | None = None


@dataclass(frozen=True)
class EvalReport:
    """AUC per (classifier, variant) plus identifying context."""

    cells: tuple
    dataset_fingerprint: str
    seeds: dict

    def cell(self, classifier: str, variant: str) -> EvalCell:
        for c in self.cells:
            if c.classifier == classifier and c.variant == variant:
                return c
        raise KeyError(f"no cell for ({classifier}, {variant})")

    def auc(self, classifier: str, variant: str) -> float:
        return self.cell(classifier, variant).auc

    def to_dict(self) -> dict:
        return {
            "cells": [
                {
                    "classifier": c.classifier,
                    "feature_mode": c.feature_mode,
                    "variant": c.variant,
                    "auc": c.auc,
                    "n_positive": c.n_positive,
                    "n_negative": c.n_negative,
                    "ci_low": c.ci_low,
                    "ci_high": c.ci_high,
                }
                for c in self.cells
            ],
            "dataset_fingerprint": self.dataset_fingerprint,
            "seeds": self.seeds,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def render_markdown(self) -> str:
        lines = [
            "# Split comparison",
            "",
            f"Dataset fingerprint: `{self.dataset_fingerprint}`",
            "",
            "| classifier | " + " | ".join(VARIANTS) + " |",
            "|" + " --- |" * (len(VARIANTS) + 1),
        ]
        for family, mode in CLASSIFIERS:
            row = [f"{family} ({mode})"]
            for variant in VARIANTS:
                row.append(f"{self.auc(family, variant):.3f}")
            lines.append("| " + " | ".join(row) + " |")
        lines.append("")
        lines.append("Counts per variant:")
        lines.append("")
        seen = set()
        for c in self.cells:
            if c.variant in seen:
                continue
            seen.add(c.variant)
            lines.append(f"- {c.variant}: {c.n_positive} positive / {c.n_negative} negative")
        lines.append("")
        return "\n".join(lines)


def dataset_fingerprint(d: Dataset) -> str:
    """Order-sensitive sha256 over ids, statuses, and audio presence."""
    h = hashlib.sha256()
    h.update(str(d.feature_dim).encode())
    for rec in d:
        h.update(rec.id.encode())
        h.update(rec.covid_status.value.encode())
        h.update(b"1" if rec.audio_features is not None else b"0")
    return h.hexdigest()[:16]


def _evaluate(model: LinearModel, d: Dataset) -> tuple:
    scores = predict_scores(model, d)
    y = (labels_pm1(d) > 0).astype(np.int64)
    return roc_auc(scores, y), int(y.sum()), int((1 - y).sum())


def assemble_report(
    d: Dataset,
    designed: SplitAssignment,
    random_split: SplitAssignment,
    matched: MatchedSet,
    models: dict,
    seeds: dict | None = None,
) -> EvalReport:
    """Score pre-trained models on the three test variants.

    models maps (family, split) with split in {"random", "designed"} to a
    LinearModel. The Randomized column scores models["<family>",
    "random"] on the random test set; Designed and Matched both use the
    designed-split model, Matched narrowing evaluation to the matched
    subset of the designed test set.
    """
    rand_test = random_split.test_dataset(d)
    des_test = designed.test_dataset(d)
    matched_test = matched.dataset(des_test)

    cells = []
    for family, mode in CLASSIFIERS:
        for variant, model, subset in (
            ("Randomized", models[family, "random"], rand_test),
            ("Designed", models[family, "designed"], des_test),
            ("Matched", models[family, "designed"], matched_test),
        ):
            auc, n_pos, n_neg = _evaluate(model, subset)
            cells.append(
                EvalCell(
                    classifier=family,
                    feature_mode=mode,
                    variant=variant,
                    auc=auc,
                    n_positive=n_pos,
                    n_negative=n_neg,
                )
            )
    return EvalReport(
        cells=tuple(cells),
        dataset_fingerprint=dataset_fingerprint(d),
        seeds=dict(seeds or {}),
    )


def run_comparison(
    d: Dataset,
    designed: SplitAssignment,
    random_split: SplitAssignment,
    matched: MatchedSet,
    params: TrainingParams | None = None,
) -> EvalReport:
    """Train both classifiers and fill the three-variant AUC table.

    The Randomized column trains on the random split's training set;
    Designed and Matched share one model per classifier, trained on the
    designed training set.
    """
    params = params or TrainingParams()
    models = {}
    for family, mode in CLASSIFIERS:
        trainer = train_max_margin if family == "max_margin" else train_logistic
        models[family, "random"] = trainer(random_split.train_dataset(d), mode, params)
        models[family, "designed"] = trainer(designed.train_dataset(d), mode, params)
    return assemble_report(
        d, designed, random_split, matched, models, seeds={"training": params.seed}
    )
