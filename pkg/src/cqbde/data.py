"""Labeled datasets: ingestion (CSV, LIBSVM), splitting and synthetic generation."""

import csv
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import DataError, LabelDomainError, ParseError, SingleClassPartition, TooFewSamplesPerClass


@dataclass(eq=False)
class LabeledDataset:
    """Feature matrix with binary labels.

    ``X`` is a dense ndarray or a CSR matrix. ``informative`` is set by the
    synthetic generator to the ground-truth relevant columns.
    """

    X: object
    y: np.ndarray
    feature_names: list = None
    informative: tuple = field(default=None)

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=np.int8)
        if self.X.shape[0] != self.y.shape[0]:
            raise DataError("feature rows and labels differ in count")
        if self.feature_names is None:
            self.feature_names = [f"f{j}" for j in range(self.X.shape[1])]

    @property
    def n_samples(self):
        return self.X.shape[0]

    @property
    def n_features(self):
        return self.X.shape[1]

    @property
    def is_sparse(self):
        return sp.issparse(self.X)

    @property
    def storage(self):
        return "sparse" if self.is_sparse else "dense"

    def class_counts(self):
        pos = int(self.y.sum())
        return self.n_samples - pos, pos

    def subset(self, rows):
        rows = np.asarray(rows, dtype=np.intp)
        return LabeledDataset(self.X[rows], self.y[rows], list(self.feature_names), self.informative)

    def require_both_classes(self):
        neg, pos = self.class_counts()
        if neg == 0 or pos == 0:
            raise SingleClassPartition("dataset contains a single class")

    def dense(self):
        return self.X.toarray() if self.is_sparse else np.asarray(self.X)


def _map_labels(raw, line):
    try:
        v = float(raw)
    except ValueError:
        raise ParseError(f"label {raw!r} is not numeric", line) from None
    if v in (0.0, -1.0):
        return 0
    if v == 1.0:
        return 1
    raise LabelDomainError(f"line {line}: label {raw!r} outside {{0, 1}} / {{-1, +1}}")


def load_dataset(path, format="csv"):
    """Read a CSV (header row, last column = label) or LIBSVM file.

    CSV yields dense storage, LIBSVM sparse. Labels -1/+1 map to 0/1.
    """
    if format == "csv":
        return _load_csv(path)
    if format == "libsvm":
        return _load_libsvm(path)
    raise ValueError(f"unknown dataset format {format!r}")


def _load_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty file", 1) from None
        if len(header) < 2:
            raise ParseError("need at least one feature column and a label column", 1)
        width = len(header)
        rows, labels = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != width:
                raise ParseError(f"expected {width} fields, found {len(row)}", lineno)
            try:
                vals = [float(c) for c in row[:-1]]
            except ValueError:
                raise ParseError("non-numeric feature value", lineno) from None
            if any(math.isnan(v) for v in vals):
                raise ParseError("missing feature value", lineno)
            rows.append(vals)
            labels.append(_map_labels(row[-1].strip(), lineno))
    if not rows:
        raise ParseError("no data rows", 2)
    X = np.array(rows, dtype=float)
    return LabeledDataset(X, np.array(labels), [h.strip() for h in header[:-1]])


def _load_libsvm(path, n_features=None):
    data, indices, indptr, labels = [], [], [0], []
    width = 0
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            labels.append(_map_labels(parts[0], lineno))
            last = 0
            for tok in parts[1:]:
                try:
                    i, v = tok.split(":", 1)
                    i, v = int(i), float(v)
                except ValueError:
                    raise ParseError(f"malformed token {tok!r}", lineno) from None
                if i < 1:
                    raise ParseError("LIBSVM indices are 1-based", lineno)
                if i <= last:
                    raise ParseError("indices must be strictly increasing", lineno)
                if math.isnan(v):
                    raise ParseError("missing feature value", lineno)
                last = i
                indices.append(i - 1)
                data.append(v)
            width = max(width, last)
            indptr.append(len(indices))
    if not labels:
        raise ParseError("no data rows", 1)
    if n_features is not None:
        width = max(width, n_features)
    X = sp.csr_matrix((np.array(data, dtype=float), np.array(indices, dtype=np.int64), np.array(indptr)),
                      shape=(len(labels), width))
    return LabeledDataset(X, np.array(labels))


def save_dataset(data, path, format="csv"):
    """Write ``data`` in a format :func:`load_dataset` reads back exactly."""
    if format == "csv":
        X = data.dense()
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(list(data.feature_names) + ["label"])
            for row, label in zip(X, data.y):
                w.writerow([repr(float(v)) for v in row] + [int(label)])
    elif format == "libsvm":
        X = sp.csr_matrix(data.X)
        with open(path, "w") as fh:
            for i in range(X.shape[0]):
                lo, hi = X.indptr[i], X.indptr[i + 1]
                toks = [f"{j + 1}:{float(v)!r}" for j, v in zip(X.indices[lo:hi], X.data[lo:hi]) if v != 0]
                fh.write(" ".join([str(int(data.y[i]))] + toks) + "\n")
    else:
        raise ValueError(f"unknown dataset format {format!r}")


def stratified_split(data, train_fraction=0.8, seed=0):
    """Class-stratified random split into (train, test).

    Each class contributes ``round(train_fraction * count)`` rows to the
    training side, kept within [1, count - 1].
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    train_idx, test_idx = [], []
    for label in (0, 1):
        rows = np.flatnonzero(data.y == label)
        if rows.size < 2:
            raise TooFewSamplesPerClass(f"class {label} has {rows.size} rows; need at least 2")
        rows = rng.permutation(rows)
        n_train = min(max(int(round(train_fraction * rows.size)), 1), rows.size - 1)
        train_idx.append(rows[:n_train])
        test_idx.append(rows[n_train:])
    train = np.sort(np.concatenate(train_idx))
    test = np.sort(np.concatenate(test_idx))
    return data.subset(train), data.subset(test)


def generate_synthetic_dataset(n_samples=200, n_features=50, n_informative=5, noise=0.25, seed=0,
                               profile="decay"):
    """Gaussian features whose labels depend only on the first ``n_informative`` columns.

    The label logit is a weighted sum of the informative columns with
    alternating signs. ``profile="decay"`` gives informative column j the
    magnitude ``2 * 0.5**j`` (a few strong, several weak signals);
    ``profile="equal"`` draws every magnitude from [1, 2]. Labels are
    drawn as ``Bernoulli(sigmoid(logit / noise))``; ``noise = 0``
    thresholds the logit at zero.
    """
    if n_informative < 1:
        raise ValueError("n_informative must be at least 1")
    if n_informative > n_features:
        raise ValueError("n_informative cannot exceed n_features")
    if noise < 0:
        raise ValueError("noise must be non-negative")
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n_samples, n_features))
    signs = np.where(np.arange(n_informative) % 2 == 0, 1.0, -1.0)
    if profile == "decay":
        weights = signs * 2.0 * 0.5 ** np.arange(n_informative)
    elif profile == "equal":
        weights = signs * rng.uniform(1.0, 2.0, n_informative)
    else:
        raise ValueError(f"unknown weight profile {profile!r}")
    logit = X[:, :n_informative] @ weights
    if noise == 0:
        y = (logit > 0).astype(np.int8)
    else:
        p = 1.0 / (1.0 + np.exp(-logit / noise))
        y = (rng.random(n_samples) < p).astype(np.int8)
    return LabeledDataset(X, y, informative=tuple(range(n_informative)))
