"""Generate identification data from the Chen benchmark system.

The input is unit-variance white noise through a low-pass filter; the
output follows the two-lag nonlinear difference equation with additive
process noise. Everything is a pure function of the seed.
"""

import numpy as np

from narxdd import ChenConfig, make_datasets, write_table

train, test = make_datasets(
    ChenConfig(sigma_v=0.1, omega_c=0.7, length=400, seed=1),
    ChenConfig(sigma_v=0.1, omega_c=0.7, length=100, seed=2),
)

print(f"train: {len(train)} samples   u std {train.u.values.std():.3f}   "
      f"y std {train.y.values.std():.3f}")
print(f"test:  {len(test)} samples   u std {test.u.values.std():.3f}   "
      f"y std {test.y.values.std():.3f}")
print("first five outputs:", np.round(train.y.values[:5], 4))

write_table(train, "chen_train.csv")
print("wrote chen_train.csv (two-column u,y table, same format the CE8 loader reads)")
