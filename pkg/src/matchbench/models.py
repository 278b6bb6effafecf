"""From-scratch linear classifiers.

Two trainers over the same LinearModel artifact: L2-regularized logistic
regression by fixed-step batch gradient descent, and an L2-regularized
hinge-loss (maximum-margin) model by subgradient descent with a decaying
step and tail averaging. Labels are internally +1 for Positive, -1 for
Negative; the intercept is never regularized; scores are raw w.x + b.
The numeric inner loops live in the _kernels subpackage, which selects
a compiled implementation when available and pure numpy otherwise.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .features import FeatureSpec, encode_dataset, fit_feature_spec
from .records import CovidStatus, Dataset
from .seeding import substream


class SingleClassError(ValueError):
    """The training set contains only one covid status."""


@dataclass(frozen=True)
class TrainingParams:
    """Hyperparameters shared by both trainers.

    lam is the L2 strength on the weights. Logistic uses max_iter steps of
    size 1/L (L estimated by power iteration) and stops early at
    grad_tol on the joint gradient norm; hinge ignores grad_tol and runs
    the full schedule eta0 / (1 + lam * eta0 * t), averaging the second
    half of the iterates.
    """

    lam: float = 1e-2
    max_iter: int = 2000
    grad_tol: float = 1e-6
    eta0: float = 1.0
    seed: int = 0

    def validate(self) -> None:
        errors = []
        if self.lam < 0:
            errors.append(f"lam: must be >= 0, got {self.lam!r}")
        if not isinstance(self.max_iter, int) or self.max_iter < 1:
            errors.append(f"max_iter: expected a positive integer, got {self.max_iter!r}")
        if self.grad_tol <= 0:
            errors.append(f"grad_tol: must be > 0, got {self.grad_tol!r}")
        if self.eta0 <= 0:
            errors.append(f"eta0: must be > 0, got {self.eta0!r}")
        if errors:
            raise ValueError("invalid training params:\n  " + "\n  ".join(errors))

    def to_dict(self) -> dict:
        return {
            "lam": self.lam,
            "max_iter": self.max_iter,
            "grad_tol": self.grad_tol,
            "eta0": self.eta0,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class LinearModel:
    """An immutable trained linear scorer: score = w.x + b."""

    family: str  # "logistic" | "max_margin"
    weights: tuple
    bias: float
    feature_spec: FeatureSpec
    params: TrainingParams
    iterations: int
    final_grad_norm: float
    converged: bool

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "weights": list(self.weights),
            "bias": self.bias,
            "feature_spec": self.feature_spec.to_dict(),
            "params": self.params.to_dict(),
            "iterations": self.iterations,
            "final_grad_norm": self.final_grad_norm,
            "converged": self.converged,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "LinearModel":
        return cls(
            family=d["family"],
            weights=tuple(d["weights"]),
            bias=d["bias"],
            feature_spec=FeatureSpec.from_dict(d["feature_spec"]),
            params=TrainingParams(**d["params"]),
            iterations=d["iterations"],
            final_grad_norm=d["final_grad_norm"],
            converged=d["converged"],
        )

    @classmethod
    def from_json(cls, text: str) -> "LinearModel":
        return cls.from_dict(json.loads(text))


def labels_pm1(d: Dataset) -> np.ndarray:
    y = np.array(
        [1.0 if r.covid_status is CovidStatus.POSITIVE else -1.0 for r in d],
        dtype=np.float64,
    )
    return y


def _check_two_classes(y: np.ndarray) -> None:
    if len(y) == 0:
        raise SingleClassError("training set is empty")
    if np.all(y > 0) or np.all(y < 0):
        raise SingleClassError("training set contains a single covid status")


def _lipschitz_step(X: np.ndarray, lam: float, seed: int) -> float:
    """1 / L for the logistic objective via power iteration.

    The logistic loss Hessian is bounded by (1/4n) Xa.T Xa + lam I with
    Xa = [X, 1] (bias column included), so L = smax(Xa)^2 / (4n) + lam.
    """
    n = X.shape[0]
    xa = np.hstack([X, np.ones((n, 1))])
    rng = substream(seed, "power-iteration")
    v = rng.normal(size=xa.shape[1])
    v /= np.linalg.norm(v)
    smax_sq = 1.0
    for _ in range(60):
        u = xa.T @ (xa @ v)
        norm = float(np.linalg.norm(u))
        if norm == 0.0:
            smax_sq = 0.0
            break
        smax_sq = norm
        v = u / norm
    lipschitz = smax_sq / (4.0 * n) + lam
    if lipschitz <= 0:
        return 1.0
    return 1.0 / lipschitz


def fit_logistic_arrays(
    X: np.ndarray, y: np.ndarray, params: TrainingParams
) -> tuple:
    """(w, b, iterations, grad_norm) on pre-encoded arrays."""
    params.validate()
    _check_two_classes(y)
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    step = _lipschitz_step(X, params.lam, params.seed)
    w0 = np.zeros(X.shape[1])
    w, b, iters, gnorm = _kernels.logistic_gd(
        X, y, params.lam, step, params.grad_tol, params.max_iter, w0, 0.0
    )
    return np.asarray(w), float(b), int(iters), float(gnorm)


def fit_max_margin_arrays(
    X: np.ndarray, y: np.ndarray, params: TrainingParams
) -> tuple:
    """(w, b, iterations, grad_norm) for the hinge objective."""
    params.validate()
    _check_two_classes(y)
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    w0 = np.zeros(X.shape[1])
    w, b, iters, gnorm = _kernels.hinge_subgradient(
        X, y, params.lam, params.eta0, params.max_iter, w0, 0.0
    )
    return np.asarray(w), float(b), int(iters), float(gnorm)


def _train(d: Dataset, mode: str, family: str, params: TrainingParams) -> LinearModel:
    spec = fit_feature_spec(d, mode)
    X = encode_dataset(d, spec)
    y = labels_pm1(d)
    if family == "logistic":
        w, b, iters, gnorm = fit_logistic_arrays(X, y, params)
        converged = gnorm <= params.grad_tol
    else:
        w, b, iters, gnorm = fit_max_margin_arrays(X, y, params)
        # Subgradient descent has no gradient-norm stopping rule; the
        # schedule itself is the convergence guarantee.
        converged = True
    return LinearModel(
        family=family,
        weights=tuple(float(v) for v in w),
        bias=b,
        feature_spec=spec,
        params=params,
        iterations=iters,
        final_grad_norm=gnorm,
        converged=converged,
    )


def train_logistic(train: Dataset, mode: str, params: TrainingParams | None = None) -> LinearModel:
    """L2-regularized logistic regression on the given feature mode."""
    return _train(train, mode, "logistic", params or TrainingParams())


def train_max_margin(train: Dataset, mode: str, params: TrainingParams | None = None) -> LinearModel:
    """L2-regularized linear max-margin model on the given feature mode."""
    return _train(train, mode, "max_margin", params or TrainingParams())


def predict_scores(model: LinearModel, d: Dataset) -> np.ndarray:
    """Raw decision scores w.x + b, one per record, dataset order."""
    X = encode_dataset(d, model.feature_spec)
    return X @ np.asarray(model.weights) + model.bias


def tune_lam(
    train: Dataset,
    mode: str,
    family: str,
    params: TrainingParams,
    grid: tuple = (1e-4, 1e-3, 1e-2, 1e-1, 1.0),
    n_folds: int = 5,
) -> float:
    """Pick lam from grid by n-fold cross-validated AUC on the training set.

    Folds are deterministic given params.seed. Ties prefer the larger lam
    (stronger regularization at equal measured performance).
    """
    from .metrics import roc_auc

    y_all = labels_pm1(train)
    _check_two_classes(y_all)
    n = len(train)
    if n < n_folds:
        raise ValueError(f"need at least {n_folds} records to run {n_folds}-fold tuning")
    perm = substream(params.seed, "cv-folds").permutation(n)
    folds = np.array_split(perm, n_folds)
    ids = [r.id for r in train]

    best_lam = None
    best_auc = -1.0
    for lam in grid:
        aucs = []
        for fold in folds:
            fold_set = set(int(i) for i in fold)
            tr_ids = [ids[i] for i in range(n) if i not in fold_set]
            va_ids = [ids[i] for i in range(n) if i in fold_set]
            tr = train.subset(tr_ids, provenance="cv-train")
            va = train.subset(va_ids, provenance="cv-val")
            y_va = labels_pm1(va)
            if np.all(y_va > 0) or np.all(y_va < 0):
                continue
            p = replace(params, lam=lam)
            try:
                model = (
                    train_logistic(tr, mode, p)
                    if family == "logistic"
                    else train_max_margin(tr, mode, p)
                )
            except SingleClassError:
                continue
            aucs.append(roc_auc(predict_scores(model, va), (y_va > 0).astype(np.int64)))
        if not aucs:
            continue
        mean_auc = float(np.mean(aucs))
        if mean_auc > best_auc or (mean_auc == best_auc and best_lam is not None and lam > best_lam):
            best_auc = mean_auc
            best_lam = lam
    if best_lam is None:
        raise ValueError("cross-validation produced no scorable fold")
    return float(best_lam)
