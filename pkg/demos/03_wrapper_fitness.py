"""
Wrapper fitness with L1 logistic regression
===========================================

A mask's fitness is the balanced-accuracy AUC of a classifier trained on
the selected columns. With the L1 penalty, weak coefficients go to zero
and drop out of the mask.
"""

import numpy as np

from cqbde import AlgorithmConfig, Evaluator, generate_synthetic_dataset, stratified_split
from cqbde.classifiers import evaluate_auc, predict_labels, train_model

data = generate_synthetic_dataset(200, 50, 5, noise=0.25, seed=0)
train, test = stratified_split(data, 0.8, seed=0)
everything = np.ones(data.n_features, bool)

# stronger penalties leave fewer nonzero weights
for l1 in (0.5, 2.0, 8.0, 32.0):
    model = train_model(train.X, train.y, everything, l1)
    auc = evaluate_auc(predict_labels(model, test.X), test.y).auc
    print(f"l1={l1:5.1f}  nonzero={np.count_nonzero(model.weights):2d}  test AUC={auc:.3f}")

# the evaluator trains, prunes the mask and scores in one call
ev = Evaluator(train, AlgorithmConfig(classifier="LLR"))
pruned, model, auc = ev(everything)
print("pruned mask keeps", np.flatnonzero(pruned).tolist(), "with training AUC", round(auc, 3))
print("true informative features:", list(data.informative))
