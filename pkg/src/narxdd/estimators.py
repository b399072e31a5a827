"""Least-squares estimators for linear-in-the-parameters models.

All solvers minimize (1/T)||y - Phi theta||^2 in some variant: the
pseudo-inverse picks the minimum-norm interpolant once the column count
exceeds the row count, ridge shrinks toward it as lambda -> 0+, plain
gradient descent started at zero converges to it, and the subset ensemble
averages stabilized solutions built on random size-T column subsets.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .features import DesignMatrix
from .seeding import rng_from

__all__ = [
    "ParameterVector",
    "SolveReport",
    "min_norm_ls",
    "ridge",
    "gradient_descent",
    "subset_ensemble",
    "condition_number",
]

THETA_DIVERGENCE_LIMIT = 1.0e12


@dataclass(frozen=True)
class ParameterVector:
    """Estimated coefficients with their cached Euclidean norm."""

    theta: np.ndarray
    norm2: float = field(init=False)

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=float)
        if theta.ndim != 1:
            raise ValueError("theta must be 1-D")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "norm2", float(np.linalg.norm(theta)))

    def __len__(self) -> int:
        return self.theta.size


@dataclass(frozen=True)
class SolveReport:
    """Solution plus diagnostics of one least-squares solve.

    cond and rank refer to the design matrix; solvers that never factor it
    (the ensemble) leave them None. iters is set by gradient descent only.
    """

    theta: ParameterVector
    train_residual_mse: float
    method: str
    cond: float | None = None
    rank: int | None = None
    iters: int | None = None


def _residual_mse(phi: np.ndarray, y: np.ndarray, theta: np.ndarray) -> float:
    r = phi @ theta - y
    return float(np.mean(r * r))


def _rank_cutoff(s_max: float, shape: tuple[int, int]) -> float:
    return np.finfo(float).eps * max(shape) * s_max


def _cond_from_singular(s: np.ndarray, shape: tuple[int, int]) -> tuple[float, int]:
    """Condition number over the numerically nonzero singular values.

    Rank deficiency at working precision reports +inf, mirroring the fact
    that the matrix maps some direction to (numerical) zero.
    """
    if s.size == 0 or s[0] == 0.0:
        return float("inf"), 0
    cutoff = _rank_cutoff(s[0], shape)
    rank = int(np.count_nonzero(s > cutoff))
    if rank < min(shape):
        return float("inf"), rank
    return float(s[0] / s[rank - 1]), rank


def min_norm_ls(phi: DesignMatrix) -> SolveReport:
    """Pseudo-inverse least squares: the minimum-norm solution.

    Computed from the SVD of the design matrix with singular values below
    eps * max(T, m) * s_max treated as zero. In the overparametrized
    full-row-rank case this is exactly the least-norm interpolant.
    """
    A, y = phi.phi, phi.targets
    if A.size == 0:
        raise ValueError("empty design matrix")
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    cond, rank = _cond_from_singular(s, A.shape)
    if rank == 0:
        theta = np.zeros(A.shape[1])
    else:
        coeffs = (U[:, :rank].T @ y) / s[:rank]
        theta = Vt[:rank].T @ coeffs
    return SolveReport(
        theta=ParameterVector(theta),
        train_residual_mse=_residual_mse(A, y, theta),
        method="min-norm",
        cond=cond,
        rank=rank,
    )


def _ridge_theta(A: np.ndarray, y: np.ndarray, lam: float) -> np.ndarray:
    """Ridge coefficients via the smaller of the two gram systems."""
    T, m = A.shape
    lam_t = lam * T
    if m <= T:
        gram = A.T @ A + lam_t * np.eye(m)
        return scipy.linalg.solve(gram, A.T @ y, assume_a="pos")
    gram = A @ A.T + lam_t * np.eye(T)
    return A.T @ scipy.linalg.solve(gram, y, assume_a="pos")


def ridge(phi: DesignMatrix, lam: float) -> SolveReport:
    """Unique minimizer of (1/T)||y - Phi theta||^2 + lam ||theta||^2.

    Solved spectrally on the smaller gram matrix, which also yields the
    design matrix's singular values for the diagnostics at no extra cost.
    """
    if lam <= 0:
        raise ValueError("lam must be > 0")
    A, y = phi.phi, phi.targets
    T, m = A.shape
    lam_t = lam * T
    if m <= T:
        w, V = scipy.linalg.eigh(A.T @ A)
        theta = V @ ((V.T @ (A.T @ y)) / (np.maximum(w, 0.0) + lam_t))
    else:
        w, V = scipy.linalg.eigh(A @ A.T)
        alpha = V @ ((V.T @ y) / (np.maximum(w, 0.0) + lam_t))
        theta = A.T @ alpha
    s = np.sqrt(np.maximum(w, 0.0))[::-1]  # descending singular values
    cond, rank = _cond_from_singular(s, A.shape)
    return SolveReport(
        theta=ParameterVector(theta),
        train_residual_mse=_residual_mse(A, y, theta),
        method=f"ridge(lam={lam:g})",
        cond=cond,
        rank=rank,
    )


def gradient_descent(
    phi: DesignMatrix,
    theta0: np.ndarray | ParameterVector | None = None,
    step: float | None = None,
    max_iters: int = 100_000,
    tol: float | None = None,
) -> SolveReport:
    """Plain gradient descent on V(theta) = 0.5 ||Phi theta - y||^2.

    Defaults: start at zero, step 1/s_max^2 (half the stability bound),
    stop when ||grad|| <= 1e-10 ||Phi^T y||. Started in the row space of
    the design matrix (zero qualifies), the limit is the minimum-norm
    solution.
    """
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    A, y = phi.phi, phi.targets
    s = scipy.linalg.svdvals(A)
    cond, rank = _cond_from_singular(s, A.shape)
    s_max_sq = float(s[0]) ** 2 if s.size else 0.0
    if s_max_sq == 0.0:
        raise ValueError("design matrix is zero; nothing to descend")
    if step is None:
        step = 1.0 / s_max_sq
    if not 0.0 < step < 2.0 / s_max_sq:
        raise ValueError(
            f"step {step:g} outside the stable range (0, {2.0 / s_max_sq:g})"
        )
    if theta0 is None:
        theta = np.zeros(A.shape[1])
    elif isinstance(theta0, ParameterVector):
        theta = theta0.theta.copy()
    else:
        theta = np.asarray(theta0, dtype=float).copy()
    if theta.size != A.shape[1]:
        raise ValueError("theta0 dimension does not match the design matrix")
    if tol is None:
        tol = 1e-10 * float(np.linalg.norm(A.T @ y))
    iters = 0
    for iters in range(1, max_iters + 1):
        grad = A.T @ (A @ theta - y)
        if np.linalg.norm(grad) <= tol:
            iters -= 1
            break
        theta -= step * grad
        if np.linalg.norm(theta) > THETA_DIVERGENCE_LIMIT:
            raise RuntimeError(
                f"gradient descent diverged with step {step:g} after {iters} iterations"
            )
    return SolveReport(
        theta=ParameterVector(theta),
        train_residual_mse=_residual_mse(A, y, theta),
        method="gd",
        cond=cond,
        rank=rank,
        iters=iters,
    )


def subset_ensemble(
    phi: DesignMatrix, n_members: int, lambda_stab: float, seed: int
) -> SolveReport:
    """Average of near-interpolating solutions on random size-T column subsets.

    Each member solves the square system on a uniformly drawn subset of T
    of the m columns as a ridge problem with the small stabilizer
    lambda_stab, is lifted back to m dimensions by zero filling, and the
    members are averaged. The stabilizer matters beyond numerics: these
    square subsets are so ill-conditioned that an exact member solve
    amplifies the noise carried by the weakest directions and the averaged
    test error never descends with growing m, while the ridge term caps
    that amplification (at the price of leaving a small training residual
    in those directions). Defined only at or past the interpolation
    threshold (m >= T). Member draws use independent streams keyed by
    (seed, member), so results do not depend on evaluation order.
    """
    if n_members < 1:
        raise ValueError("n_members must be >= 1")
    if lambda_stab <= 0:
        raise ValueError("lambda_stab must be > 0")
    A, y = phi.phi, phi.targets
    T, m = A.shape
    if m < T:
        raise ValueError(
            f"ensemble needs m >= T (overparametrized regime); got m={m}, T={T}"
        )
    theta = np.zeros(m)
    for b in range(n_members):
        idx = rng_from(seed, b).choice(m, size=T, replace=False)
        theta_b = _ridge_theta(A[:, idx], y, lambda_stab)
        theta[idx] += theta_b  # idx has no repeats, so fancy += is exact
    theta /= n_members
    return SolveReport(
        theta=ParameterVector(theta),
        train_residual_mse=_residual_mse(A, y, theta),
        method=f"ensemble(B={n_members}, lam={lambda_stab:g})",
    )


def condition_number(phi: DesignMatrix) -> float:
    """s_max / s_min over the numerically nonzero singular values."""
    cond, _ = _cond_from_singular(scipy.linalg.svdvals(phi.phi), phi.phi.shape)
    return cond
