"""Numpy implementations of the training and ranking kernels.

These are the reference semantics; the compiled module in ``_speedups.pyx``
mirrors every signature. Labels are float +/-1 vectors, X is a C-contiguous
float64 matrix. Objectives are means over rows plus an L2 term on the weights
(the intercept is never regularized):

  logistic:  mean(softplus(-y * (Xw + b))) + lam/2 * ||w||^2
  hinge:     mean(max(0, 1 - y * (Xw + b))) + lam/2 * ||w||^2

The hinge subgradient treats a margin exactly at 1 as inactive.
"""

from __future__ import annotations

import numpy as np

BACKEND = "pure"


def logistic_value_grad(X, y, w, b, lam):
    """Objective value and gradient of the regularized logistic loss."""
    n = X.shape[0]
    m = y * (X @ w + b)
    # softplus(-m) computed stably for large |m|
    value = float(np.mean(np.logaddexp(0.0, -m))) + 0.5 * lam * float(w @ w)
    s = y / (1.0 + np.exp(m))  # y * sigmoid(-m)
    grad_w = -(X.T @ s) / n + lam * w
    grad_b = -float(np.sum(s)) / n
    return value, grad_w, grad_b


def hinge_value_grad(X, y, w, b, lam):
    """Objective value and a subgradient of the regularized hinge loss."""
    n = X.shape[0]
    m = y * (X @ w + b)
    slack = 1.0 - m
    value = float(np.mean(np.maximum(slack, 0.0))) + 0.5 * lam * float(w @ w)
    active = slack > 0.0
    ya = np.where(active, y, 0.0)
    grad_w = -(X.T @ ya) / n + lam * w
    grad_b = -float(np.sum(ya)) / n
    return value, grad_w, grad_b


def logistic_gd(X, y, lam, step, tol, max_iter, w0, b0):
    """Fixed-step batch gradient descent on the logistic objective.

    Returns (w, b, iterations_run, final_gradient_norm). Stops when the
    gradient norm (weights and intercept jointly) drops to tol.
    """
    w = np.array(w0, dtype=np.float64, copy=True)
    b = float(b0)
    gnorm = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        _, gw, gb = logistic_value_grad(X, y, w, b, lam)
        gnorm = float(np.sqrt(gw @ gw + gb * gb))
        if gnorm <= tol:
            return w, b, it, gnorm
        w -= step * gw
        b -= step * gb
    return w, b, it, gnorm


def hinge_subgradient(X, y, lam, eta0, max_iter, w0, b0):
    """Subgradient descent with a decaying step on the hinge objective.

    Step at iteration t is eta0 / (1 + lam * eta0 * t). Returns the average
    of the second half of the iterates, which is far more stable than the
    last iterate: (w, b, iterations_run, final_subgradient_norm).
    """
    w = np.array(w0, dtype=np.float64, copy=True)
    b = float(b0)
    half = max_iter // 2
    w_acc = np.zeros_like(w)
    b_acc = 0.0
    n_acc = 0
    gnorm = np.inf
    for t in range(max_iter):
        _, gw, gb = hinge_value_grad(X, y, w, b, lam)
        gnorm = float(np.sqrt(gw @ gw + gb * gb))
        step = eta0 / (1.0 + lam * eta0 * t)
        w -= step * gw
        b -= step * gb
        if t >= half:
            w_acc += w
            b_acc += b
            n_acc += 1
    if n_acc:
        w, b = w_acc / n_acc, b_acc / n_acc
    return w, b, max_iter, gnorm


def midranks(values):
    """1-based ranks with ties assigned the mean rank of their run."""
    values = np.asarray(values, dtype=np.float64)
    n = values.shape[0]
    order = np.argsort(values, kind="stable")
    s = values[order]
    new_run = np.empty(n, dtype=bool)
    new_run[0] = True
    np.not_equal(s[1:], s[:-1], out=new_run[1:])
    run_ids = np.cumsum(new_run) - 1
    counts = np.bincount(run_ids)
    ends = np.cumsum(counts)
    starts = ends - counts + 1
    mid = (starts + ends) / 2.0
    ranks = np.empty(n, dtype=np.float64)
    ranks[order] = mid[run_ids]
    return ranks


def roc_auc_kernel(scores, labels):
    """Mann-Whitney AUC with midrank tie handling; O(n log n).

    labels is a 0/1 vector; both classes must be present (checked upstream).
    """
    labels = np.asarray(labels)
    ranks = midranks(scores)
    pos = labels == 1
    n_pos = int(np.count_nonzero(pos))
    n_neg = labels.shape[0] - n_pos
    rank_sum = float(np.sum(ranks[pos]))
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)
