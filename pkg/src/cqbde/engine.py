"""Algorithm variants and the per-island generation loop.

Every variant shares one code path; they differ only in the flags of
:class:`VariantSpec`:

=========  ======  ====  =========  =========
variant    family  gate  init       collapse
=========  ======  ====  =========  =========
BDE        bde     -     uniform    -
QBDE-I     qde     no    uniform    threshold
QBDE-II    qde     yes   uniform    threshold
CQBDE-I    qde     no    chaotic    threshold
CQBDE-II   qde     yes   chaotic    threshold
CLQBDE-I   qde     no    lyapunov   threshold
CLQBDE-II  qde     yes   lyapunov   threshold
CQIEA      qiea    yes   chaotic    standard
CTQIEA     qiea    yes   chaotic    threshold
CLTQIEA    qiea    yes   lyapunov   threshold
=========  ======  ====  =========  =========

``chaotic`` streams start emitting at the first iterate; ``lyapunov``
streams discard ``burn_in`` iterates (5000 by default) first.
"""

import itertools
from dataclasses import asdict, dataclass, field, fields, replace
from enum import Enum
from typing import Optional

import numpy as np

from . import bde, quantum
from .chaos import DEFAULT_BURN_IN, DEFAULT_LAMBDA, ChaoticSource, draw_chaotic_seed
from .classifiers import LinearModel, TrainOptions, column_stats, evaluate_auc, predict_labels, prune_by_coefficients, train_model
from .errors import ConfigError
from .quantum import QuantumMatrix, RotationTable


class Variant(str, Enum):
    BDE = "BDE"
    QBDE_I = "QBDE-I"
    QBDE_II = "QBDE-II"
    CQBDE_I = "CQBDE-I"
    CQBDE_II = "CQBDE-II"
    CLQBDE_I = "CLQBDE-I"
    CLQBDE_II = "CLQBDE-II"
    CQIEA = "CQIEA"
    CTQIEA = "CTQIEA"
    CLTQIEA = "CLTQIEA"

    @property
    def spec(self):
        return VARIANT_SPECS[self]


@dataclass(frozen=True)
class VariantSpec:
    family: str
    gate: bool
    init: str
    collapse: str


VARIANT_SPECS = {
    Variant.BDE: VariantSpec("bde", False, "uniform", "none"),
    Variant.QBDE_I: VariantSpec("qde", False, "uniform", "threshold"),
    Variant.QBDE_II: VariantSpec("qde", True, "uniform", "threshold"),
    Variant.CQBDE_I: VariantSpec("qde", False, "chaotic", "threshold"),
    Variant.CQBDE_II: VariantSpec("qde", True, "chaotic", "threshold"),
    Variant.CLQBDE_I: VariantSpec("qde", False, "lyapunov", "threshold"),
    Variant.CLQBDE_II: VariantSpec("qde", True, "lyapunov", "threshold"),
    Variant.CQIEA: VariantSpec("qiea", True, "chaotic", "standard"),
    Variant.CTQIEA: VariantSpec("qiea", True, "chaotic", "threshold"),
    Variant.CLTQIEA: VariantSpec("qiea", True, "lyapunov", "threshold"),
}


class Classifier(str, Enum):
    LR = "LR"
    LLR = "LLR"


@dataclass(frozen=True)
class AlgorithmConfig:
    """Variant selector plus every hyperparameter of one search.

    ``generations`` is the number of generations each island runs between
    two barriers; ``migrations`` is the number of migrations, so islands
    run ``migrations + 1`` epochs in total. ``l1_strength=None`` means
    ``0.01 * n_samples`` of the island partition.
    """

    variant: Variant = Variant.CLQBDE_II
    classifier: Classifier = Classifier.LLR
    pop_size: int = 30
    local_pop: int = 15
    generations: int = 10
    migrations: int = 1
    cr: float = 0.9
    f: float = 0.8
    theta: float = 0.1
    lam: float = DEFAULT_LAMBDA
    burn_in: int = DEFAULT_BURN_IN
    islands: int = 4
    l1_strength: Optional[float] = None
    l1_per_sample: float = 0.01
    prune_eps: float = 1e-6
    max_iter: int = 200
    tol: float = 1e-6
    chaos_everywhere: bool = False
    parallel: bool = True
    rotation_table: object = field(default=None, compare=False)

    def __post_init__(self):
        try:
            object.__setattr__(self, "variant", Variant(self.variant))
            object.__setattr__(self, "classifier", Classifier(self.classifier))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        table = self.rotation_table
        if table is not None and not isinstance(table, RotationTable):
            try:
                if isinstance(table, dict):
                    table = RotationTable(table)
                elif isinstance(table, (list, tuple)):
                    table = RotationTable({(x, b, f): a for x, b, f, a in table})
                else:
                    table = RotationTable.from_file(table)
            except (OSError, ValueError, KeyError) as exc:
                raise ConfigError(f"bad rotation table: {exc}") from None
            object.__setattr__(self, "rotation_table", table)
        self.validate()

    def validate(self):
        checks = [
            (self.pop_size >= 1, "pop_size must be >= 1"),
            (4 <= self.local_pop <= self.pop_size, "local_pop must satisfy 4 <= local_pop <= pop_size"),
            (self.generations >= 0, "generations must be >= 0"),
            (self.migrations >= 0, "migrations must be >= 0"),
            (0.0 <= self.cr <= 1.0, "cr must lie in [0, 1]"),
            (0.0 <= self.f <= 1.0, "f must lie in [0, 1]"),
            (0.0 <= self.theta <= 1.0, "theta must lie in [0, 1]"),
            (0.0 <= self.lam <= 4.0, "lam must lie in [0, 4]"),
            (self.burn_in >= 0, "burn_in must be >= 0"),
            (self.islands >= 1, "islands must be >= 1"),
            (self.l1_strength is None or self.l1_strength >= 0, "l1_strength must be >= 0"),
            (self.l1_per_sample >= 0, "l1_per_sample must be >= 0"),
            (self.prune_eps >= 0, "prune_eps must be >= 0"),
            (self.max_iter >= 1, "max_iter must be >= 1"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)
        if self.variant.spec.init == "lyapunov" and self.burn_in < 5000:
            raise ConfigError("Lyapunov-guided variants need burn_in >= 5000")

    @classmethod
    def from_mapping(cls, mapping):
        known = {f.name for f in fields(cls)}
        unknown = set(mapping) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**mapping)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    def to_dict(self):
        d = asdict(self)
        d["variant"] = self.variant.value
        d["classifier"] = self.classifier.value
        if self.rotation_table is not None:
            d["rotation_table"] = [[x, b, int(f), v] for (x, b, f), v in sorted(self.rotation_table.entries.items())]
        return d

    def l1_for(self, n_samples):
        if self.classifier is Classifier.LR:
            return 0.0
        if self.l1_strength is not None:
            return float(self.l1_strength)
        return self.l1_per_sample * n_samples

    def table(self):
        return self.rotation_table or quantum.DEFAULT_ROTATION_TABLE


@dataclass(eq=False)
class SolutionRecord:
    """One population member: key, feature mask, amplitudes, model, fitness."""

    key: int
    mask: np.ndarray
    qmatrix: Optional[QuantumMatrix] = None
    model: Optional[LinearModel] = None
    auc: Optional[float] = None

    @property
    def cardinality(self):
        return int(np.count_nonzero(self.mask))

    @property
    def evaluated(self):
        return self.auc is not None

    def mask_string(self):
        return "".join("1" if b else "0" for b in self.mask)


def rank_key(record):
    """Sort key: AUC descending, then fewer features, then lower key."""
    return (-record.auc, record.cardinality, record.key)


def sort_population(pop):
    return sorted(pop, key=rank_key)


def best_of(pop):
    return min(pop, key=rank_key)


class Evaluator:
    """Wrapper fitness on one data partition.

    Trains the configured classifier on a mask's columns, prunes
    near-zero LLR coefficients out of the mask, and scores the AUC on the
    same partition. Results are cached per mask; training is
    deterministic so the cache never changes an outcome.
    """

    def __init__(self, data, config):
        data.require_both_classes()
        self.data = data
        self.X = data.X.tocsc() if data.is_sparse else np.asarray(data.X, dtype=float)
        self.y = data.y
        self.center, self.scale = column_stats(self.X)
        self.l1 = config.l1_for(data.n_samples)
        self.prune = config.classifier is Classifier.LLR
        self.prune_eps = config.prune_eps
        self.opts = TrainOptions(max_iter=config.max_iter, tol=config.tol)
        self._cache = {}

    def __call__(self, mask):
        mask = np.asarray(mask, dtype=bool)
        token = np.packbits(mask).tobytes()
        hit = self._cache.get(token)
        if hit is None:
            hit = self._fit(mask)
            self._cache[token] = hit
        pruned, model, auc = hit
        return pruned.copy(), model, auc

    def _fit(self, mask):
        model = train_model(self.X, self.y, mask, self.l1, self.opts, self.center, self.scale)
        if self.prune:
            pruned = prune_by_coefficients(mask, model, self.prune_eps)
            model = model.restrict(pruned[model.selected_indices])
        else:
            pruned = mask.copy()
        auc = evaluate_auc(predict_labels(model, self.X), self.y).auc
        return pruned, model, auc


def _evaluator(island_data, config):
    return island_data if isinstance(island_data, Evaluator) else Evaluator(island_data, config)


def _key_counter(pop, keys):
    if keys is None:
        keys = itertools.count(max((r.key for r in pop), default=-1) + 1)
    return keys


def alpha_source_for(config, seed_state, rng):
    """The source that draws initial alphas for ``config.variant``."""
    init = config.variant.spec.init
    if init == "uniform":
        return rng
    burn = 0 if init == "chaotic" else config.burn_in
    return ChaoticSource.from_seed(seed_state, config.lam, burn)


def generation_source(config, rng):
    """Source for intra-generation draws: ``rng`` unless chaos is enabled everywhere."""
    if not config.chaos_everywhere or config.variant.spec.init == "uniform":
        return rng
    burn = 0 if config.variant.spec.init == "chaotic" else config.burn_in
    return ChaoticSource.from_seed(draw_chaotic_seed(rng), config.lam, burn)


def _collapse(q, config, rng):
    if config.variant.spec.collapse == "standard":
        return quantum.repair_empty(quantum.collapse_standard(q, rng), rng)
    return quantum.collapse_threshold(q, rng, config.theta)


def initialize_population(config, n_features, rng, alpha_source=None):
    """Unevaluated population of ``config.pop_size`` records keyed 0..N-1.

    One chaotic seed is always drawn from ``rng`` first, so variants that
    differ only in their alpha source consume ``rng`` identically.
    """
    if n_features < 1:
        raise ConfigError("need at least one feature")
    seed_state = draw_chaotic_seed(rng)
    N = config.pop_size
    if config.variant.spec.family == "bde":
        pop = []
        for i in range(N):
            mask = quantum.repair_empty(rng.random(n_features) < config.theta, rng)
            pop.append(SolutionRecord(i, mask))
        return pop
    if alpha_source is None:
        alpha_source = alpha_source_for(config, seed_state, rng)
    qms = [QuantumMatrix.from_alpha(alpha_source.random(n_features)) for _ in range(N)]
    return [SolutionRecord(i, _collapse(q, config, rng), q) for i, q in enumerate(qms)]


def train_and_update(pop, island_data, config):
    """Train each record's classifier and store model, AUC and (for LLR) the pruned mask."""
    evaluate = _evaluator(island_data, config)
    out = []
    for rec in pop:
        mask, model, auc = evaluate(rec.mask)
        out.append(replace(rec, mask=mask, model=model, auc=auc))
    return out


def _merge_truncate(parents, offspring, size):
    return sort_population(list(parents) + list(offspring))[:size]


def evolve_generation_de_family(pop, island_data, config, rng, keys=None):
    """One generation of BDE or a QBDE-family variant.

    BDE applies mutation, sigmoid discretization, crossover and pairwise
    selection per slot. Quantum variants build a trial amplitude matrix
    per slot (DE mutation for suffix I, rotation toward the island best
    for suffix II), cross it with the target, collapse, train, then keep
    the best ``len(pop)`` of parents and offspring.
    """
    evaluate = _evaluator(island_data, config)
    keys = _key_counter(pop, keys)
    spec = config.variant.spec
    size = len(pop)
    n = pop[0].mask.size

    if spec.family == "bde":
        trials = []
        for i, x in enumerate(pop):
            d = rng.distinct(size, 3, exclude=i)
            m = bde.de_mutation(pop[d[0]].mask, pop[d[1]].mask, pop[d[2]].mask, config.f)
            mb = bde.sigmoid_discretize(m, rng)
            randi = rng.integers(n)
            u = bde.binary_crossover(mb, x.mask, config.cr, randi, rng)
            trials.append(SolutionRecord(next(keys), quantum.repair_empty(u, rng)))
        trials = train_and_update(trials, evaluate, config)
        return [bde.select(x, u) for x, u in zip(pop, trials)]

    if spec.family != "qde":
        raise ConfigError(f"{config.variant.value} is not a DE-family variant")
    best = best_of(pop)
    table = config.table()
    offspring = []
    for i, x in enumerate(pop):
        if spec.gate:
            qm = quantum.rotate_toward(x.qmatrix, x.mask, best.mask, x.auc > best.auc, table)
        else:
            d = rng.distinct(size, 3, exclude=i)
            qm = quantum.quantum_mutation(pop[d[0]].qmatrix, pop[d[1]].qmatrix, pop[d[2]].qmatrix, config.f)
        randi = rng.integers(n)
        qt = quantum.quantum_crossover(qm, x.qmatrix, config.cr, randi, rng)
        offspring.append(SolutionRecord(next(keys), _collapse(qt, config, rng), qt))
    offspring = train_and_update(offspring, evaluate, config)
    return _merge_truncate(pop, offspring, size)


def evolve_generation_qiea(pop, island_data, config, rng, keys=None):
    """One rotation-gate QIEA sweep.

    Each record's qubits rotate toward the best-so-far mask, which under
    elitist truncation is the island population's best. The rotated
    matrix is collapsed and trained; the best ``len(pop)`` of parents and
    offspring survive.
    """
    evaluate = _evaluator(island_data, config)
    keys = _key_counter(pop, keys)
    best = best_of(pop)
    table = config.table()
    offspring = []
    for x in pop:
        q = quantum.rotate_toward(x.qmatrix, x.mask, best.mask, x.auc > best.auc, table)
        offspring.append(SolutionRecord(next(keys), _collapse(q, config, rng), q))
    offspring = train_and_update(offspring, evaluate, config)
    return _merge_truncate(pop, offspring, len(pop))


def evolve_generation(pop, island_data, config, rng, keys=None):
    """Dispatch one generation to the variant's family."""
    if config.variant.spec.family == "qiea":
        return evolve_generation_qiea(pop, island_data, config, rng, keys)
    return evolve_generation_de_family(pop, island_data, config, rng, keys)
