"""Binary differential evolution operators."""

import numpy as np

from .errors import UnevaluatedSolution


def de_mutation(x1, x2, x3, f):
    """Real-valued mutant ``x1 + f * (x2 - x3)``."""
    x1, x2, x3 = (np.asarray(v, dtype=float) for v in (x1, x2, x3))
    return x1 + f * (x2 - x3)


def sigmoid(x):
    x = np.asarray(x, dtype=float)
    # split on sign so exp never overflows
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def sigmoid_discretize(m, rng):
    """Bit j is 1 iff a uniform draw falls below ``sigmoid(m_j)``."""
    m = np.atleast_1d(np.asarray(m, dtype=float))
    return rng.random(m.size) < sigmoid(m)


def binary_crossover(m, x, cr, randi, rng):
    """Bit j from mutant ``m`` when its draw is below ``cr`` and ``j != randi``, else from ``x``."""
    m = np.asarray(m, dtype=bool)
    x = np.asarray(x, dtype=bool)
    if m.shape != x.shape:
        raise ValueError("mutant and target lengths differ")
    take = rng.random(m.size) < cr
    take[randi] = False
    return np.where(take, m, x)


def select(x, u):
    """Pairwise survivor: the target only if strictly fitter, otherwise the trial."""
    if x.auc is None or u.auc is None:
        raise UnevaluatedSolution("selection needs evaluated solutions")
    return x if x.auc > u.auc else u
