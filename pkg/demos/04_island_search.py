"""
Island search with migration
============================

Islands evolve samples of one global population on disjoint slices of
the training rows. At each barrier the best records from all islands
(and the current global population) are kept.
"""

from cqbde import AlgorithmConfig, generate_synthetic_dataset, run_islands, stratified_split, test_phase

data = generate_synthetic_dataset(200, 50, 5, noise=0.25, seed=3)
train, test = stratified_split(data, 0.8, seed=3)

config = AlgorithmConfig(variant="CLQBDE-II", classifier="LLR", pop_size=20, local_pop=10,
                         generations=10, migrations=1, islands=2, theta=0.2)
result = run_islands(config, train, seed=3)

for rep in result.reports:
    print(rep.to_json())

# best AUC per generation, per island, in the first epoch
for i, trace in enumerate(result.traces[0]):
    print("island", i, [round(v, 3) for v in trace])

scores = test_phase(result.population, test)
best = max(scores, key=lambda s: (s.auc, -s.cardinality))
features = result.population[best.key].mask.nonzero()[0].tolist()
print(f"best held-out AUC {best.auc:.3f} with features {features} (fitness {best.test_fitness:.3f})")
