"""Gradient descent started at zero finds the minimum-norm solution.

Zero lies in the row space of the design matrix, and plain gradient
descent never leaves that subspace, so on an overparametrized problem it
converges to the same interpolant the pseudo-inverse returns. A null-space
offset in the starting point survives untouched.
"""

import numpy as np

from narxdd import DesignMatrix, gradient_descent, min_norm_ls
from scipy.linalg import null_space

rng = np.random.default_rng(0)
design = DesignMatrix(phi=rng.standard_normal((20, 60)),
                      targets=rng.standard_normal(20))

mn = min_norm_ls(design)
gd = gradient_descent(design)  # theta0 = 0, step = 1 / s_max^2
rel = np.linalg.norm(gd.theta.theta - mn.theta.theta) / mn.theta.norm2
print(f"pseudo-inverse norm {mn.theta.norm2:.6f}")
print(f"gradient descent    {gd.theta.norm2:.6f}  "
      f"({gd.iters} iterations, relative distance {rel:.2e})")

z = null_space(design.phi)[:, 0] * 5.0
shifted = gradient_descent(design, theta0=mn.theta.theta + z)
drift = np.linalg.norm(shifted.theta.theta - (mn.theta.theta + z))
print(f"started at min-norm + null-space offset: offset preserved to {drift:.2e}")
