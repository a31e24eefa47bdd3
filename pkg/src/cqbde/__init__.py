"""Chaotic, quantum-inspired binary differential evolution for wrapper feature selection."""

from .chaos import (
    ChaoticSource,
    LogisticMapStream,
    SequenceSource,
    UniformSource,
    estimate_lyapunov,
    histogram_counts,
    logistic_step,
    make_lyapunov_guided_stream,
)
from .classifiers import LinearModel, evaluate_auc, predict_labels, prune_by_coefficients, train_model
from .data import LabeledDataset, generate_synthetic_dataset, load_dataset, save_dataset, stratified_split
from .engine import (
    AlgorithmConfig,
    Classifier,
    Evaluator,
    SolutionRecord,
    Variant,
    evolve_generation,
    initialize_population,
    train_and_update,
)
from .experiments import ExperimentConfig, load_config, run_experiment, two_sample_t_test
from .islands import migrate, partition_data, run_islands, test_phase, worker_run
from .quantum import QuantumMatrix, QubitPair, RotationTable, collapse_standard, collapse_threshold, rotate

__version__ = "0.1.0"
