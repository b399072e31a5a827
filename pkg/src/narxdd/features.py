"""Lagged regressors and randomized feature maps.

A regressor row collects past inputs and outputs,

    x_t = (u_{t-1}, ..., u_{t-n_u}, y_{t-1}, ..., y_{t-n_y}),

and a feature map turns it into the design-matrix row (phi_1(x_t), ...,
phi_m(x_t)). Map parameters are drawn once at construction and frozen, so a
map is fully reconstructible from (kind, dims, gamma, eta, seed).
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .sysdata import TimeSeries

__all__ = [
    "LagSpec",
    "RegressorSet",
    "FeatureMap",
    "DesignMatrix",
    "build_regressors",
    "new_rff",
    "new_rbf",
    "new_linear",
    "apply_map",
]


@dataclass(frozen=True)
class LagSpec:
    """Number of input and output lags in a regressor row."""

    n_u: int = 2
    n_y: int = 2

    def __post_init__(self):
        if self.n_u < 1 or self.n_y < 1:
            raise ValueError("lag orders must be >= 1")

    @property
    def dim(self) -> int:
        return self.n_u + self.n_y

    @property
    def horizon(self) -> int:
        return max(self.n_u, self.n_y)


@dataclass(frozen=True)
class RegressorSet:
    """Lag-vector rows with aligned targets.

    t_index is the array index of the first target, i.e. targets[i] is
    series.y[t_index + i].
    """

    X: np.ndarray
    targets: np.ndarray
    t_index: int

    def __post_init__(self):
        if self.X.ndim != 2 or self.targets.ndim != 1:
            raise ValueError("X must be 2-D and targets 1-D")
        if self.X.shape[0] != self.targets.size:
            raise ValueError("row count and target count differ")

    @property
    def n_rows(self) -> int:
        return self.X.shape[0]


def build_regressors(series: TimeSeries, lags: LagSpec) -> RegressorSet:
    """Stack lag vectors for every step where all lags are observed.

    Row i predicts y at array index horizon+i; the target itself is never
    part of its own row.
    """
    u, y = series.u.values, series.y.values
    p = lags.horizon
    n_rows = len(series) - p
    if n_rows < 1:
        raise ValueError(
            f"series of length {len(series)} too short for lag horizon {p}"
        )
    cols = [u[p - k : p - k + n_rows] for k in range(1, lags.n_u + 1)]
    cols += [y[p - k : p - k + n_rows] for k in range(1, lags.n_y + 1)]
    X = np.column_stack(cols)
    return RegressorSet(X=X, targets=y[p:].copy(), t_index=p)


@dataclass(frozen=True)
class FeatureMap:
    """Frozen nonlinear (or linear) feature map.

    kind "rff":    phi_i(x) = sqrt(2/m) * cos(freqs_i . x + offsets_i),
                   freqs ~ N(0, 2*gamma), offsets ~ U[0, 2*pi).
    kind "rbf":    phi_i(x) = exp(-gamma * ||x - centers_i||) with the
                   plain (unsquared) Euclidean norm; centers ~ N(0, eta).
    kind "linear": the raw regressor entries plus a constant bias 1.
    """

    kind: str
    m: int
    input_dim: int
    gamma: float = 0.0
    eta: float = 0.0
    seed: int = 0
    freqs: np.ndarray | None = field(default=None, repr=False)
    offsets: np.ndarray | None = field(default=None, repr=False)
    centers: np.ndarray | None = field(default=None, repr=False)

    def apply(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.input_dim:
            raise ValueError(
                f"regressor dimension {X.shape[1]} != map input_dim {self.input_dim}"
            )
        if self.kind == "rff":
            return np.sqrt(2.0 / self.m) * np.cos(X @ self.freqs.T + self.offsets)
        if self.kind == "rbf":
            return np.exp(-self.gamma * cdist(X, self.centers))
        if self.kind == "linear":
            return np.hstack([X, np.ones((X.shape[0], 1))])
        raise ValueError(f"unknown feature map kind {self.kind!r}")


@dataclass(frozen=True)
class DesignMatrix:
    """Feature matrix with phi_i(x_t) at (t, i), plus the aligned targets."""

    phi: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        if self.phi.shape[0] != self.targets.size:
            raise ValueError("row count and target count differ")
        if not np.all(np.isfinite(self.phi)):
            raise ValueError("design matrix contains non-finite entries")

    @property
    def n_rows(self) -> int:
        return self.phi.shape[0]

    @property
    def n_features(self) -> int:
        return self.phi.shape[1]


def new_rff(input_dim: int, m: int, gamma: float, seed: int) -> FeatureMap:
    """Random cosine features approximating the Gaussian kernel
    exp(-gamma * ||x - x'||^2)."""
    if m < 1 or input_dim < 1:
        raise ValueError("m and input_dim must be >= 1")
    if gamma <= 0:
        raise ValueError("gamma must be > 0")
    rng = np.random.default_rng(seed)
    freqs = rng.normal(0.0, np.sqrt(2.0 * gamma), size=(m, input_dim))
    offsets = rng.uniform(0.0, 2.0 * np.pi, size=m)
    return FeatureMap(
        kind="rff", m=m, input_dim=input_dim, gamma=gamma, seed=seed,
        freqs=freqs, offsets=offsets,
    )


def new_rbf(input_dim: int, m: int, gamma: float, eta: float, seed: int) -> FeatureMap:
    """Radial basis features with centers drawn from N(0, eta * I)."""
    if m < 1 or input_dim < 1:
        raise ValueError("m and input_dim must be >= 1")
    if gamma <= 0 or eta <= 0:
        raise ValueError("gamma and eta must be > 0")
    rng = np.random.default_rng(seed)
    centers = rng.normal(0.0, np.sqrt(eta), size=(m, input_dim))
    return FeatureMap(
        kind="rbf", m=m, input_dim=input_dim, gamma=gamma, eta=eta, seed=seed,
        centers=centers,
    )


def new_linear(input_dim: int) -> FeatureMap:
    """Raw regressors plus a bias term; m = input_dim + 1."""
    if input_dim < 1:
        raise ValueError("input_dim must be >= 1")
    return FeatureMap(kind="linear", m=input_dim + 1, input_dim=input_dim)


def apply_map(feature_map: FeatureMap, regs: RegressorSet) -> DesignMatrix:
    """Evaluate the map on every regressor row."""
    return DesignMatrix(phi=feature_map.apply(regs.X), targets=regs.targets)
