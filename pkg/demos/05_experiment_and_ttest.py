"""
Comparing variants
==================

An experiment runs a grid of variants several times with seeds
``seed + run``. Two cells are then compared with a pooled two-sample
t-test.
"""

from cqbde import generate_synthetic_dataset, run_experiment, two_sample_t_test
from cqbde.experiments import config_from_mapping

config = config_from_mapping(dict(
    variant=["BDE", "QBDE-II", "CLQBDE-II"], classifier="LLR", runs=4, seed=0,
    pop_size=20, local_pop=10, generations=5, migrations=1, islands=2, theta=0.2,
))
data = generate_synthetic_dataset(200, 50, 5, noise=0.25, seed=0)
report = run_experiment(config, data)
print(report.to_text())

a, b = report.cell("CLQBDE-II+LLR"), report.cell("BDE+LLR")
res = two_sample_t_test(a.aucs(), b.aucs())
print(f"CLQBDE-II vs BDE: t={res.t_statistic:.3f} p={res.p_value:.3g} df={res.df}")
print(f"mean cardinality: {a.mean_cardinality:.1f} vs {b.mean_cardinality:.1f}")
