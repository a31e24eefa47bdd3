"""Driver/worker island runtime.

The driver initializes a global population, splits the training rows into
``k`` stratified islands and runs ``migrations + 1`` epochs. In each epoch
every island independently samples ``local_pop`` records (with
replacement) from the global population, evolves them on its own rows,
and hands them back. The migration barrier pools the island outputs with
the current global population, sorts by fitness and keeps the top ``N``.

Islands share nothing between barriers: each gets its own data slice,
RNG stream and key range, so thread scheduling cannot change a result.
"""

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional

import numpy as np

from .chaos import UniformSource
from .classifiers import evaluate_auc, predict_labels
from .engine import Evaluator, evolve_generation, generation_source, initialize_population, sort_population, train_and_update
from .errors import TooFewSamplesPerClass, UnevaluatedSolution


@dataclass
class IslandPlan:
    k: int
    partitions: list
    seed: int = 0

    def island_data(self, train, i):
        return train.subset(self.partitions[i])


class MigrationReport(NamedTuple):
    migration: int
    incoming: int
    carried: int
    retained: int
    best_auc_before: Optional[float]
    best_auc_after: float

    def to_json(self):
        return json.dumps(self._asdict(), sort_keys=True)


class HoldoutScore(NamedTuple):
    key: int
    auc: float
    cardinality: int
    test_fitness: float


@dataclass
class DriverResult:
    population: list
    reports: list
    # traces[epoch][island] -> best AUC after each generation (index 0 = sampled start)
    traces: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)


def partition_data(train, k, seed=0):
    """Stratified, disjoint split of the training rows into ``k`` islands.

    Rows of each class are shuffled and dealt round-robin, continuing from
    where the previous class stopped, so class counts and island sizes
    each differ by at most one.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    rng = np.random.default_rng(seed)
    buckets = [[] for _ in range(k)]
    offset = 0
    for label in (0, 1):
        rows = np.flatnonzero(train.y == label)
        if rows.size < k:
            raise TooFewSamplesPerClass(f"class {label} has {rows.size} rows for {k} islands")
        for j, r in enumerate(rng.permutation(rows)):
            buckets[(offset + j) % k].append(r)
        offset += rows.size
    return IslandPlan(k, [np.sort(np.array(b, dtype=np.intp)) for b in buckets], seed)


def sample_local(global_pop, size, rng, keys):
    """Draw ``size`` records with replacement; repeated draws get fresh keys."""
    picks = rng.integers(len(global_pop), size)
    seen = set()
    local = []
    for p in picks:
        rec = global_pop[int(p)]
        if rec.key in seen:
            rec = replace(rec, key=next(keys))
        else:
            seen.add(rec.key)
            rec = replace(rec)
        local.append(rec)
    return local


def _counter(start):
    i = start
    while True:
        yield i
        i += 1


def key_stride(config):
    """Upper bound on the keys one island can mint in an epoch."""
    return config.local_pop * (config.generations + 2)


def worker_run(global_pop, island_data, config, island_seed, key_start=None, return_trace=False):
    """Evolve one island for ``config.generations`` generations.

    Returns the final ``local_pop`` records (and, if requested, the island
    best AUC after sampling and after each generation).
    """
    rng = UniformSource(island_seed)
    gen_rng = generation_source(config, rng)
    if key_start is None:
        key_start = max(r.key for r in global_pop) + 1
    keys = _counter(key_start)
    evaluate = Evaluator(island_data, config)
    local = sample_local(global_pop, config.local_pop, rng, keys)
    local = train_and_update(local, evaluate, config)
    trace = [max(r.auc for r in local)]
    for _ in range(config.generations):
        local = evolve_generation(local, evaluate, config, gen_rng, keys)
        trace.append(max(r.auc for r in local))
    return (local, trace) if return_trace else local


def migrate(collected, n_keep):
    """Sort by AUC (ties: fewer features, lower key), keep ``n_keep``, rekey 0..n_keep-1."""
    if not collected:
        raise ValueError("nothing to migrate")
    if any(r.auc is None for r in collected):
        raise UnevaluatedSolution("migration needs evaluated records")
    ranked = sort_population(collected)[:n_keep]
    return [replace(r, key=i) for i, r in enumerate(ranked)]


def test_phase(pop, test_data, n_features=None):
    """Score each record's stored model on held-out data.

    ``test_fitness = auc * (1 - cardinality / n_features)``.
    """
    m = test_data.n_features if n_features is None else n_features
    out = []
    for rec in pop:
        if rec.model is None:
            raise UnevaluatedSolution(f"record {rec.key} has no trained model")
        score = evaluate_auc(predict_labels(rec.model, test_data.X), test_data.y).auc
        card = rec.cardinality
        out.append(HoldoutScore(rec.key, score, card, score * (1.0 - card / m)))
    return out


test_phase.__test__ = False  # keep pytest from collecting it on import


def _best(pop):
    evaluated = [r.auc for r in pop if r.auc is not None]
    return max(evaluated) if evaluated else None


def run_islands(config, train, seed=0, initial_population=None):
    """Full driver loop: initialize, partition, evolve and migrate.

    Each (epoch, island) pair draws its seed from a ``SeedSequence`` tree
    rooted at ``seed``; islands run on a thread pool when
    ``config.parallel`` is set.
    """
    root = np.random.SeedSequence(seed)
    init_ss, part_ss, epochs_ss = root.spawn(3)
    if initial_population is None:
        pop = initialize_population(config, train.n_features, UniformSource(init_ss))
    else:
        pop = list(initial_population)
    plan = partition_data(train, config.islands, int(part_ss.generate_state(1)[0]))
    islands = [plan.island_data(train, i) for i in range(plan.k)]
    for d in islands:
        d.require_both_classes()

    result = DriverResult(pop, [])
    stride = key_stride(config)
    for epoch, ess in enumerate(epochs_ss.spawn(config.migrations + 1)):
        seeds = ess.spawn(plan.k)
        base = max(r.key for r in pop) + 1

        def job(i):
            return worker_run(pop, islands[i], config, seeds[i], key_start=base + i * stride, return_trace=True)

        if config.parallel and plan.k > 1:
            with ThreadPoolExecutor(max_workers=plan.k) as ex:
                outputs = list(ex.map(job, range(plan.k)))
        else:
            outputs = [job(i) for i in range(plan.k)]

        collected = [rec for local, _ in outputs for rec in local]
        carried = [r for r in pop if r.auc is not None]
        before = _best(pop)
        pop = migrate(collected + carried, config.pop_size)
        result.reports.append(
            MigrationReport(epoch, len(collected), len(carried), len(pop), before, _best(pop))
        )
        result.traces.append([trace for _, trace in outputs])
        result.snapshots.append(pop)
    result.population = pop
    return result


def write_population_csv(pop, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["key", "mask", "cardinality", "auc"])
        for r in pop:
            w.writerow([r.key, r.mask_string(), r.cardinality, "" if r.auc is None else repr(r.auc)])


def write_migration_reports(reports, path):
    with open(path, "w") as fh:
        for rep in reports:
            fh.write(rep.to_json() + "\n")
