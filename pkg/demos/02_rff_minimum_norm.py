"""Fit random-Fourier-feature models below, at, and above the threshold.

The design matrix has one column per random feature; once the feature
count m passes the number of training rows, the pseudo-inverse solution
interpolates the data and its norm starts to fall again. Watch the
condition number explode at m = T.
"""

import numpy as np

from narxdd import (
    ChenConfig, FeatureModel, LagSpec, apply_map, build_regressors,
    free_run_mse, make_datasets, min_norm_ls, new_rff, one_step_mse,
)

train, test = make_datasets(
    ChenConfig(0.1, 0.7, 400, seed=1), ChenConfig(0.1, 0.7, 100, seed=2)
)
lags = LagSpec(2, 2)
regs = build_regressors(train, lags)
T = len(train)

print(f"{'m':>6} {'m/T':>6} {'cond':>9} {'|theta|':>9} "
      f"{'train osa':>10} {'test osa':>10} {'test free':>10}")
for m in (40, 200, 400, 1600, 8000):
    fmap = new_rff(lags.dim, m, gamma=0.6, seed=m)
    report = min_norm_ls(apply_map(fmap, regs))
    model = FeatureModel(fmap, report.theta, lags)
    osa = one_step_mse(model, test)
    free = free_run_mse(model, test)
    free_txt = "diverged" if free.diverged else f"{free.mse:10.3g}"
    print(f"{m:>6} {m / T:>6.2f} {report.cond:>9.2g} {report.theta.norm2:>9.3g} "
          f"{report.train_residual_mse:>10.3g} {osa.mse:>10.3g} {free_txt:>10}")
