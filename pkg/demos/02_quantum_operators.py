"""
Qubit matrices and their operators
==================================

A feature mask is sampled from a 2 x n matrix of amplitudes. Each column
(alpha, beta) has beta**2 as the chance that the feature is picked.
"""

import numpy as np

from cqbde import QuantumMatrix, UniformSource, collapse_standard, collapse_threshold
from cqbde.quantum import quantum_crossover, quantum_mutation, rotate_toward

rng = UniformSource(1)
q = QuantumMatrix.uniform_superposition(1000)

# plain collapse picks about half the features, the threshold trick about theta of that
print("standard collapse picks", collapse_standard(q, rng).sum(), "of 1000")
print("threshold collapse (theta=0.1) picks", collapse_threshold(q, rng, 0.1).sum(), "of 1000")

# DE mutation on amplitudes: clamp to [0, 1], then renormalize each column
q1 = QuantumMatrix([[0.6], [0.8]])
q2 = QuantumMatrix([[1.0], [0.0]])
q3 = QuantumMatrix([[0.0], [1.0]])
m = quantum_mutation(q1, q2, q3, 0.5)
print("mutant column:", np.round(m.amplitudes[:, 0], 4))

# crossover keeps column randi from the target
target = QuantumMatrix.uniform_superposition(1)
print("crossover column:", np.round(quantum_crossover(m, target, 1.0, 0, rng).amplitudes[:, 0], 4))

# the rotation gate pushes beta toward the best solution's bits
q = QuantumMatrix.uniform_superposition(3)
for sweep in range(4):
    q = rotate_toward(q, [0, 1, 1], [1, 0, 1], x_is_fitter=False)
    print("sweep", sweep + 1, "beta^2 =", np.round(q.prob_one(), 3))
