"""Logistic regression (LR) and L1-regularized logistic regression (LLR).

Training minimizes the summed logistic loss plus ``l1_strength * ||w||_1``
with a monotone accelerated proximal-gradient method. The intercept is
never penalized. Features are standardized with statistics supplied by
the caller (the island's partition) or computed from the training rows.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatch, NoFeatures, SingleClassLabels, SingleClassPartition


@dataclass(frozen=True)
class TrainOptions:
    max_iter: int = 200
    tol: float = 1e-6
    record_trace: bool = False


@dataclass(frozen=True, eq=False)
class LinearModel:
    """Linear classifier over a subset of columns.

    ``center`` and ``scale`` standardize the selected raw columns before
    the weights apply.
    """

    weights: np.ndarray
    intercept: float
    selected_indices: np.ndarray
    center: np.ndarray
    scale: np.ndarray
    n_iter: int = 0
    loss_trace: tuple = field(default=(), repr=False)

    def decision_function(self, X):
        cols = take_columns(X, self.selected_indices)
        return ((cols - self.center) / self.scale) @ self.weights + self.intercept

    def restrict(self, keep):
        """Model using only the selected positions flagged in ``keep``."""
        keep = np.asarray(keep, dtype=bool)
        return LinearModel(
            weights=self.weights[keep],
            intercept=self.intercept,
            selected_indices=self.selected_indices[keep],
            center=self.center[keep],
            scale=self.scale[keep],
            n_iter=self.n_iter,
        )


class ConfusionCounts(NamedTuple):
    tp: int
    fn: int
    tn: int
    fp: int

    @property
    def total(self):
        return self.tp + self.fn + self.tn + self.fp


class AucResult(NamedTuple):
    counts: ConfusionCounts
    sensitivity: float
    specificity: float
    auc: float


def take_columns(X, indices):
    """Dense float copy of the given columns; works for arrays and sparse matrices."""
    indices = np.asarray(indices, dtype=np.intp)
    if indices.size and (indices.min() < 0 or indices.max() >= X.shape[1]):
        raise DimensionMismatch(f"feature index out of range for {X.shape[1]} columns")
    if sp.issparse(X):
        return np.asarray(X[:, indices].toarray(), dtype=float)
    return np.asarray(X[:, indices], dtype=float)


def column_stats(X):
    """Per-column mean and standard deviation (zero spread mapped to 1)."""
    if sp.issparse(X):
        mean = np.asarray(X.mean(axis=0)).ravel()
        sq = np.asarray(X.multiply(X).mean(axis=0)).ravel()
        std = np.sqrt(np.maximum(sq - mean * mean, 0.0))
    else:
        X = np.asarray(X, dtype=float)
        mean = X.mean(axis=0)
        std = X.std(axis=0)
    std = np.where(std > 1e-12, std, 1.0)
    return mean, std


def _softplus(z):
    return np.logaddexp(0.0, z)


def _expit(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def _objective(A, y, w, b, l1):
    z = A @ w + b
    return float(np.sum(_softplus(z) - y * z) + l1 * np.abs(w).sum())


def train_model(X, y, mask, l1_strength=0.0, opts=TrainOptions(), center=None, scale=None):
    """Fit LR (``l1_strength == 0``) or LLR on the columns set in ``mask``.

    Parameters
    ----------
    X : ndarray or sparse matrix, shape (n_samples, n_features)
    y : array of {0, 1}
    mask : bool array, length n_features
    l1_strength : float
        Penalty on the summed loss; 0 gives plain LR.
    center, scale : arrays of length n_features, optional
        Standardization statistics. Computed from ``X`` when omitted.

    Returns
    -------
    LinearModel
    """
    y = np.asarray(y, dtype=float)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (X.shape[1],):
        raise DimensionMismatch("mask length does not match feature count")
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        raise NoFeatures("mask selects no features")
    pos = y.sum()
    if pos == 0 or pos == y.size:
        raise SingleClassPartition("training labels contain a single class")

    raw = take_columns(X, idx)
    if center is None or scale is None:
        mu, sd = column_stats(raw)
    else:
        mu, sd = np.asarray(center, dtype=float)[idx], np.asarray(scale, dtype=float)[idx]
    A = (raw - mu) / sd
    n, k = A.shape

    # Lipschitz constant of the smooth part's gradient, intercept column included
    L = 0.25 * (np.linalg.norm(np.hstack([A, np.ones((n, 1))]), 2) ** 2)
    L = max(L, 1e-12)
    step = 1.0 / L
    thresh = l1_strength * step

    w = np.zeros(k)
    b = float(np.log(pos / (n - pos)))
    f_x = _objective(A, y, w, b, l1_strength)
    trace = [f_x] if opts.record_trace else None
    yw, yb = w.copy(), b
    t = 1.0
    it = 0
    for it in range(1, opts.max_iter + 1):
        r = _expit(A @ yw + yb) - y
        zw = yw - step * (A.T @ r)
        zw = np.sign(zw) * np.maximum(np.abs(zw) - thresh, 0.0)
        zb = yb - step * r.sum()
        f_z = _objective(A, y, zw, zb, l1_strength)
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        if f_z <= f_x:
            decrease = f_x - f_z
            yw = zw + ((t - 1.0) / t_next) * (zw - w)
            yb = zb + ((t - 1.0) / t_next) * (zb - b)
            w, b, f_x = zw, zb, f_z
            t = t_next
            if trace is not None:
                trace.append(f_x)
            if decrease / n < opts.tol:
                break
        else:
            # momentum overshot: restart from the last accepted point
            yw, yb, t = w.copy(), b, 1.0
            if trace is not None:
                trace.append(f_x)

    return LinearModel(
        weights=w,
        intercept=float(b),
        selected_indices=idx,
        center=mu,
        scale=sd,
        n_iter=it,
        loss_trace=tuple(trace) if trace is not None else (),
    )


def predict_labels(model, X):
    """Label 1 iff the linear score is non-negative (sigmoid >= 0.5)."""
    return (model.decision_function(X) >= 0.0).astype(np.int8)


def evaluate_auc(predictions, labels):
    """Balanced-accuracy AUC: the mean of sensitivity and specificity.

    Ratios are formed from exact integer counts, so each returned value is
    the correctly rounded float of its rational value.
    """
    p = np.asarray(predictions).astype(bool)
    t = np.asarray(labels).astype(bool)
    if p.shape != t.shape:
        raise ValueError("predictions and labels differ in length")
    tp = int(np.count_nonzero(p & t))
    fn = int(np.count_nonzero(~p & t))
    tn = int(np.count_nonzero(~p & ~t))
    fp = int(np.count_nonzero(p & ~t))
    return auc_from_counts(ConfusionCounts(tp, fn, tn, fp))


def auc_from_counts(counts):
    tp, fn, tn, fp = counts
    pos, neg = tp + fn, tn + fp
    if pos == 0 or neg == 0:
        raise SingleClassLabels("labels contain a single class")
    auc = (tp * neg + tn * pos) / (2 * pos * neg)
    return AucResult(counts, tp / pos, tn / neg, auc)


def prune_by_coefficients(mask, model, eps=1e-6):
    """Clear mask bits whose trained |weight| is below ``eps``.

    If every bit would clear, the single largest-|weight| bit is kept.
    """
    mask = np.asarray(mask, dtype=bool).copy()
    mag = np.abs(model.weights)
    drop = mag < eps
    if drop.all():
        drop[np.argmax(mag)] = False
    mask[model.selected_indices[drop]] = False
    return mask
