from fractions import Fraction

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import minimize

from cqbde.classifiers import (
    ConfusionCounts,
    TrainOptions,
    auc_from_counts,
    column_stats,
    evaluate_auc,
    predict_labels,
    prune_by_coefficients,
    train_model,
)
from cqbde.data import generate_synthetic_dataset
from cqbde.errors import DimensionMismatch, NoFeatures, SingleClassLabels, SingleClassPartition


@pytest.fixture(scope="module")
def synth():
    return generate_synthetic_dataset(200, 20, 3, noise=0.5, seed=1)


def lbfgs_oracle(A, y, l2=1e-10):
    # independent fit of the unpenalized summed logistic loss
    def f(theta):
        z = A @ theta[:-1] + theta[-1]
        return np.sum(np.logaddexp(0, z) - y * z) + l2 * theta[:-1] @ theta[:-1]

    def g(theta):
        z = A @ theta[:-1] + theta[-1]
        r = 1 / (1 + np.exp(-z)) - y
        return np.concatenate([A.T @ r + 2 * l2 * theta[:-1], [r.sum()]])

    res = minimize(f, np.zeros(A.shape[1] + 1), jac=g, method="L-BFGS-B", options={"gtol": 1e-10, "maxiter": 5000})
    return res.x, res.fun


class TestTraining:
    def test_separable_scores_one(self):
        X = np.array([[-2.0], [-1.0], [1.0], [2.0]])
        y = np.array([0, 0, 1, 1])
        m = train_model(X, y, [True])
        assert evaluate_auc(predict_labels(m, X), y).auc == 1.0

    def test_lr_matches_lbfgs_objective(self, synth):
        mask = np.zeros(20, bool)
        mask[:5] = True
        m = train_model(synth.X, synth.y, mask, 0.0, TrainOptions(max_iter=5000, tol=1e-12, record_trace=True))
        mu, sd = column_stats(synth.X[:, :5])
        A = (synth.X[:, :5] - mu) / sd
        theta, fun = lbfgs_oracle(A, synth.y.astype(float))
        assert m.loss_trace[-1] == pytest.approx(fun, rel=1e-6)
        np.testing.assert_allclose(m.weights, theta[:-1], atol=1e-3)

    def test_loss_trace_non_increasing(self, synth):
        m = train_model(synth.X, synth.y, np.ones(20, bool), 2.0, TrainOptions(record_trace=True))
        tr = np.array(m.loss_trace)
        assert len(tr) > 2
        assert np.all(np.diff(tr) <= 0)

    def test_huge_penalty_zeroes_weights(self, synth):
        m = train_model(synth.X, synth.y, np.ones(20, bool), 1e6)
        assert np.all(m.weights == 0)

    def test_penalty_shrinks_l1_norm(self, synth):
        norms = [np.abs(train_model(synth.X, synth.y, np.ones(20, bool), l1).weights).sum()
                 for l1 in (0.0, 1.0, 5.0, 20.0)]
        assert all(a >= b for a, b in zip(norms, norms[1:]))

    def test_sparse_matches_dense(self, synth):
        mask = np.zeros(20, bool)
        mask[[0, 3, 7]] = True
        a = train_model(synth.X, synth.y, mask, 1.0)
        b = train_model(sp.csr_matrix(synth.X), synth.y, mask, 1.0)
        np.testing.assert_allclose(a.weights, b.weights, atol=1e-10)

    def test_errors(self, synth):
        with pytest.raises(NoFeatures):
            train_model(synth.X, synth.y, np.zeros(20, bool))
        with pytest.raises(DimensionMismatch):
            train_model(synth.X, synth.y, np.ones(5, bool))
        with pytest.raises(SingleClassPartition):
            train_model(synth.X, np.ones(200), np.ones(20, bool))

    def test_deterministic(self, synth):
        a = train_model(synth.X, synth.y, np.ones(20, bool), 3.0)
        b = train_model(synth.X, synth.y, np.ones(20, bool), 3.0)
        assert np.array_equal(a.weights, b.weights) and a.intercept == b.intercept


class TestAuc:
    def test_worked_examples(self):
        y = [1, 1, 1, 1, 0, 0, 0, 0]
        assert evaluate_auc([1, 1, 1, 1, 0, 0, 0, 0], y).auc == 1.0
        assert evaluate_auc([0, 0, 0, 0, 1, 1, 1, 1], y).auc == 0.0
        assert evaluate_auc([1] * 8, y).auc == 0.5
        r = evaluate_auc([1, 1, 1, 0, 0, 0, 0, 1], y)
        assert (r.sensitivity, r.specificity, r.auc) == (0.75, 0.75, 0.75)

    def test_single_class_rejected(self):
        with pytest.raises(SingleClassLabels):
            evaluate_auc([1, 0], [1, 1])

    @given(st.integers(0, 500), st.integers(0, 500), st.integers(0, 500), st.integers(0, 500))
    def test_exact_rational(self, tp, fn, tn, fp):
        if tp + fn == 0 or tn + fp == 0:
            return
        r = auc_from_counts(ConfusionCounts(tp, fn, tn, fp))
        want = (Fraction(tp, tp + fn) + Fraction(tn, tn + fp)) / 2
        assert Fraction(r.auc) == Fraction(float(want))
        assert 0.0 <= r.auc <= 1.0


class TestPruning:
    def test_drops_small_weights(self, synth):
        mask = np.ones(20, bool)
        m = train_model(synth.X, synth.y, mask, 0.0)
        w = m.weights.copy()
        w[[1, 4]] = 1e-8
        fake = type(m)(w, m.intercept, m.selected_indices, m.center, m.scale)
        pruned = prune_by_coefficients(mask, fake)
        assert pruned.sum() == 18 and not pruned[1] and not pruned[4]

    def test_floor_keeps_one(self, synth):
        m = train_model(synth.X, synth.y, np.ones(20, bool), 1e6)
        assert prune_by_coefficients(np.ones(20, bool), m).sum() == 1

    def test_restrict_same_scores(self, synth):
        m = train_model(synth.X, synth.y, np.ones(20, bool), 30.0)
        keep = np.abs(m.weights) >= 1e-6
        r = m.restrict(keep)
        np.testing.assert_allclose(r.decision_function(synth.X), m.decision_function(synth.X), atol=1e-12)
