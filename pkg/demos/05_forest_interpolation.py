"""Interpolating random forests with the total leaf count as capacity.

Below one leaf per training row the budget buys a single greedy tree.
Past it, the budget buys multiple trees, each grown to interpolation on
the full data (no bootstrap); members differ only through seeded tie
breaking, and averaging them keeps the training fit exact while smoothing
the test predictions.
"""

import numpy as np

from narxdd import (
    ChenConfig, ForestModel, LagSpec, build_regressors, fit_forest,
    make_datasets, one_step_mse,
)

train, test = make_datasets(
    ChenConfig(0.1, 0.7, 500, seed=5), ChenConfig(0.1, 0.7, 100, seed=6)
)
lags = LagSpec(2, 2)
regs = build_regressors(train, lags)
rows = regs.n_rows

print(f"{rows} training rows")
print(f"{'budget':>7} {'trees':>6} {'leaves':>7} {'train osa':>10} {'test osa':>9}")
for ratio in (0.2, 1, 3, 10):
    budget = int(ratio * rows)
    forest = fit_forest(regs, budget, seed=7)
    model = ForestModel(forest, lags)
    train_mse = one_step_mse(model, train).mse
    test_mse = one_step_mse(model, test).mse
    print(f"{budget:>7} {len(forest.trees):>6} {forest.total_leaves:>7} "
          f"{train_mse:>10.4g} {test_mse:>9.4f}")
