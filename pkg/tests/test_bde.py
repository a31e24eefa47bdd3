import math

import numpy as np
import pytest

from cqbde.bde import binary_crossover, de_mutation, select, sigmoid, sigmoid_discretize
from cqbde.chaos import SequenceSource, UniformSource
from cqbde.engine import SolutionRecord
from cqbde.errors import UnevaluatedSolution


def rec(auc, key=0):
    return SolutionRecord(key, np.array([True]), auc=auc)


def test_mutation_equal_donors():
    x1 = np.array([1, 0, 1])
    np.testing.assert_array_equal(de_mutation(x1, [0, 1, 1], [0, 1, 1], 0.8), x1.astype(float))


def test_mutation_arithmetic():
    np.testing.assert_array_equal(de_mutation([1, 0], [1, 1], [0, 0], 0.5), [1.5, 0.5])
    np.testing.assert_array_equal(de_mutation([0, 1, 0], [1, 1, 0], [0, 0, 1], 1.0), [1, 2, -1])


def test_sigmoid_stable_extremes():
    s = sigmoid([-800.0, 0.0, 800.0])
    np.testing.assert_array_equal(s, [0.0, 0.5, 1.0])
    assert sigmoid([-20.0])[0] < 1e-8


def test_discretize_scripted():
    assert sigmoid_discretize([0.0], SequenceSource([0.4]))[0]
    assert not sigmoid_discretize([0.0], SequenceSource([0.6]))[0]


def test_discretize_rate():
    n = 100_000
    bits = sigmoid_discretize(np.ones(n), UniformSource(0))
    p = 1 / (1 + math.exp(-1))
    assert abs(bits.mean() - p) < 3 * math.sqrt(p * (1 - p) / n)
    assert bits.mean() == pytest.approx(0.731, abs=0.01)


def test_crossover_zero_rate():
    x = np.array([1, 0, 1, 0], bool)
    m = ~x
    np.testing.assert_array_equal(binary_crossover(m, x, 0.0, 1, UniformSource(0)), x)


def test_crossover_full_rate_keeps_randi_from_target():
    m = np.array([True, True])
    x = np.array([False, False])
    assert binary_crossover(m, x, 1.0, 0, UniformSource(0)).tolist() == [False, True]


def test_crossover_scripted():
    m = np.array([True, True])
    x = np.array([False, False])
    out = binary_crossover(m, x, 0.9, 1, SequenceSource([0.5, 0.95]))
    assert out.tolist() == [True, False]


def test_crossover_bits_positional():
    rng = UniformSource(4)
    for _ in range(100):
        m = rng.random(20) < 0.5
        x = rng.random(20) < 0.5
        u = binary_crossover(m, x, 0.5, rng.integers(20), rng)
        assert np.all((u == m) | (u == x))


@pytest.mark.parametrize("fx, fu, want", [(0.9, 0.8, "x"), (0.7, 0.7, "u"), (0.6, 0.8, "u")])
def test_select(fx, fu, want):
    x, u = rec(fx, 0), rec(fu, 1)
    assert select(x, u) is (x if want == "x" else u)


def test_select_requires_fitness():
    with pytest.raises(UnevaluatedSolution):
        select(rec(None), rec(0.5))
