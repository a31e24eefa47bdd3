"""Multi-run, multi-variant experiments, reporting and diagnostics export."""

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy import stats

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .chaos import DEFAULT_BURN_IN, UniformSource, estimate_lyapunov, histogram_counts, make_lyapunov_guided_stream
from .data import generate_synthetic_dataset, load_dataset, stratified_split
from .engine import AlgorithmConfig, Classifier, Variant
from .errors import ConfigError
from .islands import run_islands, test_phase

SYNTH_KEYS = {
    "synth_samples": "n_samples", "synth_features": "n_features", "synth_informative": "n_informative",
    "synth_noise": "noise", "synth_seed": "seed", "synth_profile": "profile",
}
EXPERIMENT_KEYS = {
    "runs", "seed", "dataset", "dataset_format", "train_fraction", "select_by", "jobs",
    "synth_samples", "synth_features", "synth_informative", "synth_noise", "synth_seed", "synth_profile",
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Algorithm settings plus the experiment protocol.

    ``variants`` and ``classifiers`` form a grid; every cell runs
    ``runs`` times with master seeds ``seed + run``. All cells of one run
    share the same train/test split.
    """

    algorithm: AlgorithmConfig
    variants: tuple
    classifiers: tuple
    runs: int = 20
    seed: int = 0
    dataset: Optional[str] = None
    dataset_format: str = "csv"
    train_fraction: float = 0.8
    select_by: str = "test_auc"
    jobs: int = 1
    synthetic: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if self.select_by not in ("test_auc", "train_auc"):
            raise ConfigError("select_by must be 'test_auc' or 'train_auc'")
        if self.dataset_format not in ("csv", "libsvm"):
            raise ConfigError("dataset_format must be 'csv' or 'libsvm'")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError("train_fraction must lie in (0, 1)")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")

    def cells(self):
        return [(v, c) for v in self.variants for c in self.classifiers]

    def algorithm_for(self, variant, classifier):
        d = self.algorithm.to_dict()
        d.update(variant=variant, classifier=classifier)
        d["rotation_table"] = self.algorithm.rotation_table
        return AlgorithmConfig.from_mapping(d)

    def to_dict(self):
        d = {k: getattr(self, k) for k in ("runs", "seed", "dataset", "dataset_format",
                                           "train_fraction", "select_by")}
        d["variants"] = [Variant(v).value for v in self.variants]
        d["classifiers"] = [Classifier(c).value for c in self.classifiers]
        d["algorithm"] = self.algorithm.to_dict()
        d["synthetic"] = dict(self.synthetic)
        return d


def _as_list(value):
    return list(value) if isinstance(value, (list, tuple)) else [value]


def config_from_mapping(mapping, base_dir="."):
    """Build an :class:`ExperimentConfig` from flat key/value settings."""
    mapping = dict(mapping)
    exp = {k: mapping.pop(k) for k in list(mapping) if k in EXPERIMENT_KEYS}
    variants = _as_list(mapping.pop("variant", Variant.CLQBDE_II.value))
    classifiers = _as_list(mapping.pop("classifier", Classifier.LLR.value))
    try:
        variants = tuple(Variant(v) for v in variants)
        classifiers = tuple(Classifier(c) for c in classifiers)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if isinstance(mapping.get("rotation_table"), str):
        mapping["rotation_table"] = os.path.join(base_dir, mapping["rotation_table"])
    algorithm = AlgorithmConfig.from_mapping({**mapping, "variant": variants[0], "classifier": classifiers[0]})
    synthetic = {SYNTH_KEYS[k]: exp.pop(k) for k in list(exp) if k in SYNTH_KEYS}
    if exp.get("dataset"):
        exp["dataset"] = os.path.join(base_dir, exp["dataset"])
    try:
        return ExperimentConfig(algorithm, variants, classifiers, synthetic=synthetic, **exp)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path):
    """Read a TOML config whose keys mirror the config dataclass fields."""
    try:
        with open(path, "rb") as fh:
            mapping = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return config_from_mapping(mapping, os.path.dirname(os.path.abspath(path)))


def load_experiment_dataset(config):
    if config.dataset:
        return load_dataset(config.dataset, config.dataset_format)
    try:
        return generate_synthetic_dataset(**config.synthetic)
    except ValueError as exc:
        raise ConfigError(f"synthetic dataset: {exc}") from None


class RunResult(NamedTuple):
    run: int
    seed: int
    key: int
    train_auc: float
    test_auc: float
    cardinality: int
    test_fitness: float
    features: list


@dataclass
class CellReport:
    variant: str
    classifier: str
    runs: list

    @property
    def mean_auc(self):
        return math.fsum(r.test_auc for r in self.runs) / len(self.runs)

    @property
    def mean_cardinality(self):
        return math.fsum(r.cardinality for r in self.runs) / len(self.runs)

    @property
    def label(self):
        return f"{self.variant}+{self.classifier}"

    def aucs(self):
        return [r.test_auc for r in self.runs]

    def to_dict(self):
        return {
            "variant": self.variant,
            "classifier": self.classifier,
            "mean_auc": self.mean_auc,
            "mean_cardinality": self.mean_cardinality,
            "runs": [r._asdict() for r in self.runs],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["variant"], d["classifier"], [RunResult(**r) for r in d["runs"]])


@dataclass
class ExperimentReport:
    config: dict
    cells: list
    # (variant, classifier, run, epoch, island, generation, best_auc); not serialized
    traces: list = field(default_factory=list, repr=False)
    migration_reports: list = field(default_factory=list, repr=False)
    # (cell, run, migration, key, mask, cardinality, auc); not serialized
    snapshots: list = field(default_factory=list, repr=False)

    def cell(self, label=None):
        if label is None:
            return self.cells[0]
        for c in self.cells:
            if c.label == label:
                return c
        raise KeyError(f"no cell {label!r}; have {[c.label for c in self.cells]}")

    def to_json(self):
        payload = {"config": self.config, "cells": [c.to_dict() for c in self.cells]}
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        return cls(d["config"], [CellReport.from_dict(c) for c in d["cells"]])

    def to_text(self):
        rows = [("variant", "classifier", "mean_auc", "mean_cardinality", "runs")]
        for c in self.cells:
            rows.append((c.variant, c.classifier, f"{c.mean_auc:.3f}", f"{c.mean_cardinality:.2f}", str(len(c.runs))))
        widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
        lines = ["  ".join(v.ljust(w) if i < 2 else v.rjust(w) for i, (v, w) in enumerate(zip(r, widths)))
                 for r in rows]
        lines.insert(1, "  ".join("-" * w for w in widths))
        return "\n".join(lines) + "\n"


def _one_run(config, dataset, run):
    seed = config.seed + run
    train, test = stratified_split(dataset, config.train_fraction, seed=seed)
    out = []
    for variant, classifier in config.cells():
        alg = config.algorithm_for(variant, classifier)
        driver = run_islands(alg, train, seed=seed)
        scores = test_phase(driver.population, test, dataset.n_features)
        if config.select_by == "test_auc":
            pick = min(range(len(scores)), key=lambda i: (-scores[i].auc, scores[i].cardinality, scores[i].key))
        else:
            pick = 0  # population is already sorted by training AUC
        rec, sc = driver.population[pick], scores[pick]
        result = RunResult(run, seed, rec.key, rec.auc, sc.auc, sc.cardinality, sc.test_fitness,
                           [int(j) for j in np.flatnonzero(rec.mask)])
        traces = [
            (Variant(variant).value, Classifier(classifier).value, run, epoch, island, g, best)
            for epoch, per_island in enumerate(driver.traces)
            for island, trace in enumerate(per_island)
            for g, best in enumerate(trace)
        ]
        snapshots = [
            (epoch, r.key, r.mask_string(), r.cardinality, r.auc)
            for epoch, pop in enumerate(driver.snapshots)
            for r in pop
        ]
        out.append((result, traces, driver.reports, snapshots))
    return out


def run_experiment(config, dataset, jobs=None):
    """Run every (variant, classifier) cell ``config.runs`` times.

    Per run, the test-phase winner (highest AUC, ties to fewer features)
    is recorded. Output depends only on ``config`` and ``dataset``.
    """
    dataset.require_both_classes()
    jobs = config.jobs if jobs is None else jobs
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            per_run = list(ex.map(lambda r: _one_run(config, dataset, r), range(config.runs)))
    else:
        per_run = [_one_run(config, dataset, r) for r in range(config.runs)]

    cells, traces, migrations, snapshots = [], [], [], []
    for ci, (variant, classifier) in enumerate(config.cells()):
        runs = [per_run[r][ci][0] for r in range(config.runs)]
        cells.append(CellReport(Variant(variant).value, Classifier(classifier).value, runs))
        for r in range(config.runs):
            traces.extend(per_run[r][ci][1])
            migrations.extend((cells[-1].label, r, rep) for rep in per_run[r][ci][2])
            snapshots.extend((cells[-1].label, r) + row for row in per_run[r][ci][3])
    return ExperimentReport(config.to_dict(), cells, traces, migrations, snapshots)


class TTestResult(NamedTuple):
    t_statistic: float
    p_value: float
    df: int


def two_sample_t_test(a, b):
    """Two-tailed pooled-variance t-test with ``len(a) + len(b) - 2`` degrees of freedom.

    Two constant, identical samples give ``t = 0, p = 1``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na, nb = a.size, b.size
    if na < 2 or nb < 2:
        raise ValueError("each sample needs at least 2 values")
    df = na + nb - 2
    diff = a.mean() - b.mean()
    pooled = ((na - 1) * a.var(ddof=1) + (nb - 1) * b.var(ddof=1)) / df
    if pooled == 0.0:
        if diff == 0.0:
            return TTestResult(0.0, 1.0, df)
        return TTestResult(math.copysign(math.inf, diff), 0.0, df)
    t = diff / math.sqrt(pooled * (1.0 / na + 1.0 / nb))
    p = 2.0 * stats.t.sf(abs(t), df)
    return TTestResult(float(t), float(min(p, 1.0)), df)


def chaos_histograms(seed_state=0.3, samples=100_000, bins=50, burn_in=DEFAULT_BURN_IN, uniform_seed=0, lam=4.0):
    """Histogram counts of a burned-in logistic stream next to a uniform sample.

    Returns ``(edges, chaotic_counts, uniform_counts)``.
    """
    chaotic = make_lyapunov_guided_stream(seed_state, lam, burn_in).take(samples)
    uniform = UniformSource(uniform_seed).random(samples)
    edges = np.linspace(0.0, 1.0, bins + 1)
    return edges, histogram_counts(chaotic, bins), histogram_counts(uniform, bins)


def write_histogram_csv(path, edges, chaotic_counts, uniform_counts):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["bin_lo", "bin_hi", "chaotic", "uniform"])
        for i in range(len(chaotic_counts)):
            w.writerow([repr(float(edges[i])), repr(float(edges[i + 1])), int(chaotic_counts[i]), int(uniform_counts[i])])


def lyapunov_summary(seed_states=(0.1, 0.2, 0.3, 0.4, 0.6), lam=4.0, horizon=1_000_000):
    return {repr(s): estimate_lyapunov(make_lyapunov_guided_stream(s, lam, 0), horizon) for s in seed_states}


def write_convergence_csv(path, traces):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["variant", "classifier", "run", "epoch", "island", "generation", "best_auc"])
        for row in traces:
            w.writerow(list(row[:-1]) + [repr(row[-1])])


def write_summary_csv(path, report):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["variant", "classifier", "mean_auc", "mean_cardinality"])
        for c in report.cells:
            w.writerow([c.variant, c.classifier, repr(c.mean_auc), repr(c.mean_cardinality)])


def export_diagnostics(out_dir, report=None, histogram=None):
    """Write diagnostic CSVs into ``out_dir``.

    ``histogram`` is an ``(edges, chaotic, uniform)`` triple as returned by
    :func:`chaos_histograms`; when ``report`` is given its convergence
    traces, migration reports and variant summary are written too.
    Returns the paths written.
    """
    os.makedirs(out_dir, exist_ok=True)
    written = []
    if histogram is not None:
        p = os.path.join(out_dir, "histogram.csv")
        write_histogram_csv(p, *histogram)
        written.append(p)
    if report is not None:
        p = os.path.join(out_dir, "convergence.csv")
        write_convergence_csv(p, report.traces)
        written.append(p)
        p = os.path.join(out_dir, "summary.csv")
        write_summary_csv(p, report)
        written.append(p)
        p = os.path.join(out_dir, "migrations.jsonl")
        with open(p, "w") as fh:
            for label, run, rep in report.migration_reports:
                fh.write(json.dumps({"cell": label, "run": run, **rep._asdict()}, sort_keys=True) + "\n")
        written.append(p)
        p = os.path.join(out_dir, "populations.csv")
        with open(p, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["cell", "run", "migration", "key", "mask", "cardinality", "auc"])
            for row in report.snapshots:
                w.writerow(list(row[:-1]) + [repr(row[-1])])
        written.append(p)
    return written
