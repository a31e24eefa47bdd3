import json
from dataclasses import replace

import numpy as np
import pytest

from cqbde.chaos import UniformSource
from cqbde.classifiers import LinearModel
from cqbde.data import LabeledDataset
from cqbde.engine import SolutionRecord, initialize_population, train_and_update
from cqbde.errors import TooFewSamplesPerClass, UnevaluatedSolution
from cqbde.islands import (
    key_stride,
    migrate,
    partition_data,
    run_islands,
    sample_local,
    test_phase as holdout_phase,
    worker_run,
)

from conftest import small_config


def rec(key, auc, card=1, n=10):
    mask = np.zeros(n, bool)
    mask[:card] = True
    return SolutionRecord(key, mask, auc=auc)


class TestPartition:
    def test_stratified_counts(self):
        y = np.array([1] * 30 + [0] * 70)
        plan = partition_data(LabeledDataset(np.zeros((100, 1)), y), 4, seed=0)
        sizes = [p.size for p in plan.partitions]
        pos = [int(y[p].sum()) for p in plan.partitions]
        assert sizes == [25, 25, 25, 25]
        assert all(c in (7, 8) for c in pos) and sum(pos) == 30

    def test_disjoint_cover(self):
        y = np.array([1] * 13 + [0] * 40)
        plan = partition_data(LabeledDataset(np.zeros((53, 1)), y), 3, seed=2)
        rows = np.concatenate(plan.partitions)
        assert sorted(rows.tolist()) == list(range(53))
        assert max(p.size for p in plan.partitions) - min(p.size for p in plan.partitions) <= 1

    def test_too_few(self):
        y = np.array([1, 1, 0, 0, 0, 0])
        with pytest.raises(TooFewSamplesPerClass):
            partition_data(LabeledDataset(np.zeros((6, 1)), y), 3)


class TestMigration:
    def test_example(self):
        islands = [[rec(0, 0.7), rec(1, 0.6)], [rec(2, 0.9), rec(3, 0.5)], [rec(4, 0.8), rec(5, 0.4)]]
        out = migrate([r for isl in islands for r in isl], 4)
        assert [r.auc for r in out] == [0.9, 0.8, 0.7, 0.6]
        assert [r.key for r in out] == [0, 1, 2, 3]

    def test_ties_prefer_fewer_features(self):
        out = migrate([rec(0, 0.8, card=3), rec(1, 0.8, card=2)], 1)
        assert out[0].cardinality == 2

    def test_requires_evaluated(self):
        with pytest.raises(UnevaluatedSolution):
            migrate([SolutionRecord(0, np.ones(3, bool))], 1)


class TestSampling:
    def test_duplicates_get_fresh_keys(self):
        pop = [rec(i, 0.5) for i in range(3)]
        keys = iter(range(100, 200))
        local = sample_local(pop, 10, UniformSource(0), keys)
        assert len(local) == 10 and len({r.key for r in local}) == 10
        assert all(r.key < 3 or r.key >= 100 for r in local)


class TestWorker:
    def test_deterministic_and_elitist(self, small_split):
        train, _ = small_split
        cfg = small_config("CLQBDE-II", generations=5)
        pop = train_and_update(initialize_population(cfg, 15, UniformSource(0)), train, cfg)
        a, trace = worker_run(pop, train, cfg, 11, return_trace=True)
        b = worker_run(pop, train, cfg, 11)
        assert [(r.key, r.mask_string(), r.auc) for r in a] == [(r.key, r.mask_string(), r.auc) for r in b]
        assert len(trace) == 6 and all(x <= y for x, y in zip(trace, trace[1:]))

    def test_keys_stay_in_range(self, small_split):
        train, _ = small_split
        cfg = small_config("CQIEA")
        pop = train_and_update(initialize_population(cfg, 15, UniformSource(0)), train, cfg)
        local = worker_run(pop, train, cfg, 3, key_start=1000)
        fresh = [r.key for r in local if r.key >= 1000]
        assert all(k < 1000 + key_stride(cfg) for k in fresh)


class TestTestPhase:
    def test_fitness_example(self):
        # 10 positives (8 scored positive) and 10 negatives (all scored negative)
        x = np.array([1.0] * 8 + [-1.0] * 2 + [-1.0] * 10)
        data = LabeledDataset(x[:, None].repeat(50, axis=1), [1] * 10 + [0] * 10)
        model = LinearModel(np.array([1.0]), 0.0, np.array([0]), np.zeros(1), np.ones(1))
        mask = np.zeros(50, bool)
        mask[:10] = True
        (score,) = holdout_phase([SolutionRecord(7, mask, model=model, auc=1.0)], data)
        assert score.auc == pytest.approx(0.9)
        assert score.test_fitness == pytest.approx(0.72)

    def test_needs_model(self):
        data = LabeledDataset(np.zeros((2, 1)), [0, 1])
        with pytest.raises(UnevaluatedSolution):
            holdout_phase([SolutionRecord(0, np.ones(1, bool))], data)


class TestDriver:
    @pytest.mark.parametrize("variant", ["BDE", "CLQBDE-I", "CTQIEA"])
    def test_elitism_and_shape(self, variant, small_split):
        train, _ = small_split
        cfg = small_config(variant, migrations=2)
        res = run_islands(cfg, train, seed=3)
        assert len(res.reports) == 3 and len(res.traces) == 3
        assert [r.key for r in res.population] == list(range(cfg.pop_size))
        bests = [r.best_auc_after for r in res.reports]
        assert all(x <= y for x, y in zip(bests, bests[1:]))
        for epoch in res.traces:
            for trace in epoch:
                assert all(x <= y for x, y in zip(trace, trace[1:]))
        json.loads(res.reports[0].to_json())

    def test_parallel_matches_serial(self, small_split):
        train, _ = small_split
        cfg = small_config("CQBDE-II")
        a = run_islands(cfg, train, seed=8)
        b = run_islands(replace(cfg, parallel=False), train, seed=8)
        assert [(r.mask_string(), r.auc) for r in a.population] == [(r.mask_string(), r.auc) for r in b.population]
