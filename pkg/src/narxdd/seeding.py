"""Deterministic seed derivation for independent RNG streams.

Everything in this package that draws random numbers takes an explicit
integer seed. When one seeded component needs several independent streams
(e.g. a sweep cell needs a feature draw and an ensemble draw), sub-seeds
are derived here so that results never depend on call order or scheduling.
"""

import numpy as np

__all__ = ["derive_seed", "rng_from"]


def derive_seed(seed: int, *key: int) -> int:
    """Stable 64-bit sub-seed for the stream identified by (seed, *key).

    Built on numpy's SeedSequence entropy hashing, which is documented to be
    stable across platforms and numpy versions. Adding new keys never
    perturbs the streams of existing ones.
    """
    ss = np.random.SeedSequence([int(seed), *[int(k) for k in key]])
    return int(ss.generate_state(1, np.uint64)[0])


def rng_from(seed: int, *key: int) -> np.random.Generator:
    """Generator seeded with derive_seed(seed, *key)."""
    return np.random.default_rng(derive_seed(seed, *key))
