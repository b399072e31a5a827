"""Identification data: Chen's nonlinear benchmark system and the CE8 loader.

The synthetic route drives Chen's two-lag difference equation with low-pass
filtered Gaussian noise and additive process noise. The real-data route reads
the coupled-electric-drives (CE8) records from a plain two-column table. All
generators are pure functions of their configuration, seed included.
"""

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .seeding import derive_seed

__all__ = [
    "Signal",
    "TimeSeries",
    "ChenConfig",
    "FILTER_TAPS",
    "lowpass_taps",
    "chen_step",
    "gen_filtered_input",
    "simulate_chen",
    "realize_chen",
    "make_datasets",
    "load_ce8",
    "write_table",
]

FILTER_TAPS = 64

# Divergence guard for the simulator; Chen's system is bounded for
# sensibly scaled inputs, so crossing this means the input is wrong.
DIVERGENCE_LIMIT = 1.0e6


@dataclass(frozen=True)
class Signal:
    """A finite scalar sequence plus the seed that generated it (None if measured)."""

    values: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("signal must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(values)):
            raise ValueError("signal contains non-finite values")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class TimeSeries:
    """Paired input/output sequences of equal length."""

    u: Signal
    y: Signal

    def __post_init__(self):
        if len(self.u) != len(self.y):
            raise ValueError(
                f"input length {len(self.u)} != output length {len(self.y)}"
            )

    def __len__(self) -> int:
        return len(self.u)


@dataclass(frozen=True)
class ChenConfig:
    """Configuration for one synthetic realization.

    sigma_v  -- process noise standard deviation (>= 0)
    omega_c  -- input low-pass cutoff, fraction of Nyquist, in (0, 1]
    length   -- number of samples (>= 3: two initial lags plus one step)
    seed     -- master seed for this realization
    """

    sigma_v: float
    omega_c: float
    length: int
    seed: int

    def __post_init__(self):
        if self.sigma_v < 0:
            raise ValueError("sigma_v must be >= 0")
        if not 0.0 < self.omega_c <= 1.0:
            raise ValueError("omega_c must lie in (0, 1]")
        if self.length < 3:
            raise ValueError("length must be >= 3")


def lowpass_taps(omega_c: float, num_taps: int = FILTER_TAPS) -> np.ndarray:
    """Hamming-windowed sinc low-pass FIR taps, unit DC gain.

    `omega_c` is the normalized cutoff as a fraction of Nyquist; 1.0 is
    allowed and yields a (near-)allpass fractional-delay filter.
    """
    if not 0.0 < omega_c <= 1.0:
        raise ValueError("omega_c must lie in (0, 1]")
    center = (num_taps - 1) / 2.0
    k = np.arange(num_taps) - center
    taps = omega_c * np.sinc(omega_c * k) * np.hamming(num_taps)
    return taps / taps.sum()


def gen_filtered_input(length: int, omega_c: float, seed: int) -> Signal:
    """Unit-variance Gaussian white noise through the low-pass filter.

    Causal filtering with zero initial state, so the output has the same
    length as the input and the first samples see a zero-padded warm-up.
    The filtered signal is not rescaled.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    taps = lowpass_taps(omega_c)
    white = np.random.default_rng(seed).standard_normal(length)
    filtered = lfilter(taps, [1.0], white)
    return Signal(values=filtered, seed=seed)


def chen_step(y1: float, y2: float, u1: float, u2: float) -> float:
    """One noise-free step of the benchmark difference equation.

    Arguments are the lagged outputs y_{t-1}, y_{t-2} and inputs u_{t-1},
    u_{t-2}; returns y_t without process noise.
    """
    decay = np.exp(-y1 * y1)
    return (
        (0.8 - 0.5 * decay) * y1
        - (0.3 + 0.9 * decay) * y2
        + u1
        + 0.2 * u2
        + 0.1 * u1 * u2
    )


def simulate_chen(input_signal: Signal, sigma_v: float, seed: int) -> TimeSeries:
    """Simulate Chen's system over the given input with N(0, sigma_v^2) noise.

    The first two outputs are the zero initial condition. Raises if the
    trajectory diverges, which indicates badly scaled input.
    """
    u = input_signal.values
    if u.size < 3:
        raise ValueError("input must have at least 3 samples")
    if sigma_v < 0:
        raise ValueError("sigma_v must be >= 0")
    v = np.random.default_rng(seed).normal(0.0, sigma_v, size=u.size)
    y = np.zeros(u.size)
    for t in range(2, u.size):
        y[t] = chen_step(y[t - 1], y[t - 2], u[t - 1], u[t - 2]) + v[t]
        if abs(y[t]) > DIVERGENCE_LIMIT:
            raise RuntimeError(
                f"simulation diverged at step {t} (|y|={abs(y[t]):.3g} > "
                f"{DIVERGENCE_LIMIT:.0e}); check the input scaling"
            )
    return TimeSeries(u=Signal(u, seed=input_signal.seed), y=Signal(y, seed=seed))


def realize_chen(cfg: ChenConfig) -> TimeSeries:
    """One seeded realization: filtered input plus the noisy simulation."""
    input_signal = gen_filtered_input(
        cfg.length, cfg.omega_c, derive_seed(cfg.seed, 0)
    )
    return simulate_chen(input_signal, cfg.sigma_v, derive_seed(cfg.seed, 1))


def make_datasets(cfg_train: ChenConfig, cfg_test: ChenConfig) -> tuple[TimeSeries, TimeSeries]:
    """Two independent realizations for estimation and hold-out evaluation.

    Input noise and process noise are both fresh per realization; identical
    seeds are rejected because they would leak the train data into the test.
    """
    if cfg_train.seed == cfg_test.seed:
        raise ValueError("train and test configs must use different seeds")
    return realize_chen(cfg_train), realize_chen(cfg_test)


def load_ce8(path, split_fraction: float = 0.6) -> tuple[TimeSeries, TimeSeries]:
    """Read a two-column (u, y) table and split it in temporal order.

    Accepts comma or whitespace delimiters and an optional single header
    row. The first floor(split_fraction * N) samples become the training
    series, the remainder the test series.
    """
    if not 0.0 < split_fraction < 1.0:
        raise ValueError("split_fraction must lie in (0, 1)")
    rows = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected two columns, got {len(parts)}")
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except ValueError:
                if lineno == 1 and not rows:
                    continue  # header row
                raise ValueError(f"{path}:{lineno}: non-numeric row {line!r}") from None
    if len(rows) < 10:
        raise ValueError(f"{path}: need at least 10 samples, found {len(rows)}")
    data = np.asarray(rows)
    n_train = int(np.floor(split_fraction * len(rows)))
    if n_train < 1 or n_train >= len(rows):
        raise ValueError("split leaves an empty train or test set")
    train = TimeSeries(u=Signal(data[:n_train, 0]), y=Signal(data[:n_train, 1]))
    test = TimeSeries(u=Signal(data[n_train:, 0]), y=Signal(data[n_train:, 1]))
    return train, test


def write_table(series: TimeSeries, path) -> None:
    """Write a series in the same two-column format load_ce8 reads."""
    with open(path, "w") as fh:
        fh.write("u,y\n")
        for u_t, y_t in zip(series.u.values, series.y.values):
            fh.write(f"{float(u_t)!r},{float(y_t)!r}\n")
