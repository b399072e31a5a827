"""Model evaluation: one-step-ahead and free-run-simulation errors.

One-step prediction always sees observed lags. The free run seeds the first
lag-horizon outputs with observations, then feeds its own predictions back
while still reading the observed input sequence, which is how a simulation
model is exercised in practice. A guard turns runaway simulations into an
infinite-MSE result instead of an exception, because unstable free runs are
an expected outcome near the interpolation threshold.
"""

from dataclasses import dataclass

import numpy as np

from .estimators import ParameterVector
from .features import FeatureMap, LagSpec, build_regressors
from .forest import Forest
from .sysdata import TimeSeries

__all__ = [
    "Predictor",
    "FeatureModel",
    "ForestModel",
    "EvalResult",
    "one_step_mse",
    "free_run_mse",
    "param_norm",
]

FREE_RUN_LIMIT = 1.0e6


class Predictor:
    """Anything with a LagSpec and a per-row prediction.

    Subclasses override predict_one (and ideally predict_rows, vectorized).
    """

    lags: LagSpec

    def predict_one(self, x) -> float:
        raise NotImplementedError

    def predict_rows(self, X: np.ndarray) -> np.ndarray:
        return np.asarray([self.predict_one(x) for x in X], dtype=float)


@dataclass(frozen=True)
class FeatureModel(Predictor):
    """Linear-in-the-parameters model: dot(theta, phi(x))."""

    feature_map: FeatureMap
    params: ParameterVector
    lags: LagSpec

    def __post_init__(self):
        if len(self.params) != self.feature_map.m:
            raise ValueError("parameter count does not match the feature count")

    def predict_rows(self, X: np.ndarray) -> np.ndarray:
        return self.feature_map.apply(X) @ self.params.theta

    def predict_one(self, x) -> float:
        return float(self.predict_rows(np.atleast_2d(np.asarray(x, dtype=float)))[0])


@dataclass(frozen=True)
class ForestModel(Predictor):
    """Regression forest (or single tree) behind the Predictor interface."""

    forest: Forest
    lags: LagSpec

    def predict_rows(self, X: np.ndarray) -> np.ndarray:
        return self.forest.predict_rows(np.atleast_2d(np.asarray(X, dtype=float)))

    def predict_one(self, x) -> float:
        return self.forest.predict_one(x)


@dataclass(frozen=True)
class EvalResult:
    """MSE plus divergence flag; diverged runs report mse = +inf."""

    mse: float
    diverged: bool = False
    trajectory: np.ndarray | None = None


def one_step_mse(model: Predictor, series: TimeSeries) -> EvalResult:
    """Mean squared error of predictions from fully observed lags."""
    regs = build_regressors(series, model.lags)
    preds = model.predict_rows(regs.X)
    err = preds - regs.targets
    return EvalResult(mse=float(np.mean(err * err)), trajectory=preds)


def free_run_mse(model: Predictor, series: TimeSeries) -> EvalResult:
    """Mean squared error of the closed-loop simulation.

    The first max(n_u, n_y) outputs are copied from the data to start the
    recursion (and are excluded from the error); afterwards predicted
    outputs replace observed ones in the lag vector while inputs stay
    observed, matching the lag convention the model was trained with.
    """
    u, y = series.u.values, series.y.values
    lags = model.lags
    p = lags.horizon
    if len(series) <= p:
        raise ValueError(
            f"series of length {len(series)} too short for lag horizon {p}"
        )
    traj = np.empty(len(series))
    traj[:p] = y[:p]
    x = np.empty(lags.dim)
    for t in range(p, len(series)):
        for k in range(1, lags.n_u + 1):
            x[k - 1] = u[t - k]
        for k in range(1, lags.n_y + 1):
            x[lags.n_u + k - 1] = traj[t - k]
        traj[t] = model.predict_one(x)
        if abs(traj[t]) > FREE_RUN_LIMIT:
            return EvalResult(mse=float("inf"), diverged=True, trajectory=traj[: t + 1].copy())
    err = traj[p:] - y[p:]
    return EvalResult(mse=float(np.mean(err * err)), trajectory=traj)


def param_norm(model: Predictor) -> float | None:
    """Euclidean norm of the coefficients; None for models without any."""
    if isinstance(model, FeatureModel):
        return model.params.norm2
    return None
