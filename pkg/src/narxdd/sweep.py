"""Capacity sweeps: the engine that produces the double-descent curves.

A sweep fixes one train/test dataset, walks a log-uniform grid of model
capacities (feature count, or total leaves for forests), repeats every grid
point with freshly drawn feature randomness, and records the four error
metrics plus diagnostics per cell. Cell seeds are stable hashes of
(master_seed, capacity index, repeat), so results are reproducible and
independent of execution order or worker count.
"""

import hashlib
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .estimators import min_norm_ls, ridge, subset_ensemble
from .evaluation import FeatureModel, ForestModel, free_run_mse
from .features import LagSpec, apply_map, build_regressors, new_linear, new_rbf, new_rff
from .forest import fit_forest
from .seeding import derive_seed
from .sysdata import ChenConfig, TimeSeries, load_ce8, make_datasets

__all__ = [
    "EXPERIMENTS",
    "BASELINE_TAG",
    "SweepConfig",
    "SweepRecord",
    "SummaryRow",
    "SweepSummary",
    "build_grid",
    "run_sweep",
    "run_single",
    "summarize",
    "write_csv",
    "read_records_csv",
    "read_summary_csv",
    "data_checksum",
]

log = logging.getLogger(__name__)

EXPERIMENTS = (
    "rff-minnorm",
    "rff-ridge",
    "rff-ensemble",
    "rbf-ensemble",
    "forest",
    "ce8-rff",
)
BASELINE_TAG = "linear-baseline"

RECORD_COLUMNS = (
    "experiment", "capacity", "ratio", "repeat", "seed",
    "train_mse_osa", "test_mse_osa", "train_mse_free", "test_mse_free",
    "param_norm", "cond", "diverged", "wall_time_s",
)
SUMMARY_COLUMNS = ("capacity", "ratio", "metric", "median", "q25", "q75")
SUMMARY_METRICS = (
    "train_mse_osa", "test_mse_osa", "train_mse_free", "test_mse_free",
    "param_norm", "cond",
)


@dataclass(frozen=True)
class SweepConfig:
    """Everything one sweep needs; see the CLI for flag-level documentation.

    For ensemble experiments `lambda_stab` stabilizes the member solves and
    `ridge_lambda` is ignored; for "rff-ridge" it is the ridge penalty.
    """

    experiment: str
    lo_ratio: float
    hi_ratio: float
    points: int
    repeats: int
    master_seed: int
    train_cfg: ChenConfig | None = None
    test_cfg: ChenConfig | None = None
    ce8_path: str | None = None
    split_fraction: float = 0.6
    gamma: float = 0.6
    eta: float = 5.0
    ridge_lambda: float | None = None
    ensemble_size: int = 1000
    lambda_stab: float = 1e-7
    baseline: bool = True
    lags: LagSpec = LagSpec()

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if not 0 < self.lo_ratio < self.hi_ratio:
            raise ValueError("need 0 < lo_ratio < hi_ratio")
        if self.points < 2:
            raise ValueError("points must be >= 2")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if self.experiment == "ce8-rff":
            if self.ce8_path is None:
                raise ValueError("ce8-rff needs ce8_path")
        elif self.train_cfg is None or self.test_cfg is None:
            raise ValueError(f"{self.experiment} needs train_cfg and test_cfg")
        if self.experiment == "rff-ridge":
            if self.ridge_lambda is None or self.ridge_lambda <= 0:
                raise ValueError("rff-ridge needs ridge_lambda > 0")
        if "ensemble" in self.experiment or self.experiment == "ce8-rff":
            if self.ensemble_size < 1 or self.lambda_stab <= 0:
                raise ValueError("ensemble experiments need ensemble_size >= 1 "
                                 "and lambda_stab > 0")


@dataclass(frozen=True)
class SweepRecord:
    """One (capacity, repeat) cell of a sweep."""

    experiment: str
    capacity: int
    ratio: float
    repeat: int
    seed: int
    train_mse_osa: float
    test_mse_osa: float
    train_mse_free: float
    test_mse_free: float
    param_norm: float | None
    cond: float | None
    diverged: bool
    wall_time_s: float


@dataclass(frozen=True)
class SummaryRow:
    capacity: int
    ratio: float
    metric: str
    median: float
    q25: float
    q75: float


@dataclass(frozen=True)
class SweepSummary:
    """Per-capacity quartiles plus the linear baseline, when it was fit."""

    rows: tuple
    baseline_test_mse_osa: float | None = None
    baseline_test_mse_free: float | None = None


def build_grid(T: int, lo_ratio: float, hi_ratio: float, points: int) -> list[int]:
    """Log-uniform capacity grid in [lo_ratio*T, hi_ratio*T].

    Rounded to integers, de-duplicated, ascending; the exact threshold
    capacity T is inserted whenever the ratio range brackets 1, because the
    interpolation threshold must be sampled.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    if not 0 < lo_ratio <= hi_ratio:
        raise ValueError("need 0 < lo_ratio <= hi_ratio")
    if points < 2:
        raise ValueError("points must be >= 2")
    ratios = np.geomspace(lo_ratio, hi_ratio, points)
    caps = np.unique(np.maximum(1, np.rint(ratios * T).astype(int)))
    if lo_ratio <= 1.0 <= hi_ratio and T not in caps:
        caps = np.sort(np.append(caps, T))
    return [int(c) for c in caps]


def data_checksum(train: TimeSeries, test: TimeSeries) -> str:
    """SHA-256 over the raw bytes of both series; pins data fixity of a sweep."""
    h = hashlib.sha256()
    for arr in (train.u.values, train.y.values, test.u.values, test.y.values):
        h.update(np.ascontiguousarray(arr).tobytes())
    return h.hexdigest()


def _load_data(cfg: SweepConfig) -> tuple[TimeSeries, TimeSeries]:
    if cfg.experiment == "ce8-rff":
        return load_ce8(cfg.ce8_path, cfg.split_fraction)
    return make_datasets(cfg.train_cfg, cfg.test_cfg)


def _fit_features_cell(cfg, phi_train, capacity, T, seed):
    """Pick the estimation mechanism the experiment binds to this regime."""
    if cfg.experiment == "rff-minnorm":
        return min_norm_ls(phi_train)
    if cfg.experiment == "rff-ridge":
        return ridge(phi_train, cfg.ridge_lambda)
    # ensemble experiments: minimum norm up to the threshold, the subset
    # ensemble strictly past it
    if capacity > T:
        return subset_ensemble(
            phi_train, cfg.ensemble_size, cfg.lambda_stab, derive_seed(seed, 1)
        )
    return min_norm_ls(phi_train)


def _run_cell(cfg, train, test, regs_train, regs_test, T, capacity, ci, repeat,
              measure_time):
    seed = derive_seed(cfg.master_seed, ci, repeat)
    t0 = time.perf_counter()
    dim = cfg.lags.dim
    if cfg.experiment == "forest":
        model = ForestModel(fit_forest(regs_train, capacity, seed), cfg.lags)
        preds_train = model.predict_rows(regs_train.X)
        train_mse_osa = float(np.mean((preds_train - regs_train.targets) ** 2))
        norm = None
        cond = None
    else:
        map_seed = derive_seed(seed, 0)
        if cfg.experiment == "rbf-ensemble":
            fmap = new_rbf(dim, capacity, cfg.gamma, cfg.eta, map_seed)
        else:
            fmap = new_rff(dim, capacity, cfg.gamma, map_seed)
        phi_train = apply_map(fmap, regs_train)
        report = _fit_features_cell(cfg, phi_train, capacity, T, seed)
        model = FeatureModel(fmap, report.theta, cfg.lags)
        train_mse_osa = report.train_residual_mse
        norm = report.theta.norm2
        cond = report.cond
    preds_test = model.predict_rows(regs_test.X)
    test_mse_osa = float(np.mean((preds_test - regs_test.targets) ** 2))
    fr_train = free_run_mse(model, train)
    fr_test = free_run_mse(model, test)
    elapsed = time.perf_counter() - t0 if measure_time else 0.0
    return SweepRecord(
        experiment=cfg.experiment,
        capacity=capacity,
        ratio=capacity / T,
        repeat=repeat,
        seed=seed,
        train_mse_osa=train_mse_osa,
        test_mse_osa=test_mse_osa,
        train_mse_free=fr_train.mse,
        test_mse_free=fr_test.mse,
        param_norm=norm,
        cond=cond,
        diverged=fr_train.diverged or fr_test.diverged,
        wall_time_s=elapsed,
    )


def _baseline_record(cfg, train, test, regs_train, regs_test, T, measure_time):
    t0 = time.perf_counter()
    fmap = new_linear(cfg.lags.dim)
    report = min_norm_ls(apply_map(fmap, regs_train))
    model = FeatureModel(fmap, report.theta, cfg.lags)
    preds_test = model.predict_rows(regs_test.X)
    fr_train = free_run_mse(model, train)
    fr_test = free_run_mse(model, test)
    elapsed = time.perf_counter() - t0 if measure_time else 0.0
    return SweepRecord(
        experiment=BASELINE_TAG,
        capacity=fmap.m,
        ratio=fmap.m / T,
        repeat=0,
        seed=cfg.master_seed,
        train_mse_osa=report.train_residual_mse,
        test_mse_osa=float(np.mean((preds_test - regs_test.targets) ** 2)),
        train_mse_free=fr_train.mse,
        test_mse_free=fr_test.mse,
        param_norm=report.theta.norm2,
        cond=report.cond,
        diverged=fr_train.diverged or fr_test.diverged,
        wall_time_s=elapsed,
    )


def run_sweep(cfg: SweepConfig, jobs: int = 1, measure_time: bool = False) -> list[SweepRecord]:
    """Run every (capacity, repeat) cell and return records in grid order.

    The dataset is generated (or loaded) once and shared by all cells; only
    the feature or tree randomness is redrawn per repeat. With the default
    measure_time=False the output is bit-reproducible; enabling it fills
    wall_time_s with real timings at the cost of byte-identical reruns.
    Failures inside a cell surface as exceptions; free-run divergence is
    not a failure (it is a flagged record).
    """
    train, test = _load_data(cfg)
    T = len(train)
    log.info("sweep %s: T=%d T'=%d data checksum %s",
             cfg.experiment, T, len(test), data_checksum(train, test))
    regs_train = build_regressors(train, cfg.lags)
    regs_test = build_regressors(test, cfg.lags)
    grid = build_grid(T, cfg.lo_ratio, cfg.hi_ratio, cfg.points)
    cells = [(ci, capacity, r)
             for ci, capacity in enumerate(grid) for r in range(cfg.repeats)]

    def work(cell):
        ci, capacity, repeat = cell
        return _run_cell(cfg, train, test, regs_train, regs_test, T,
                         capacity, ci, repeat, measure_time)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(work, cells))
    else:
        records = [work(cell) for cell in cells]
    if cfg.baseline:
        records.append(
            _baseline_record(cfg, train, test, regs_train, regs_test, T, measure_time)
        )
    return records


def run_single(cfg: SweepConfig, capacity: int, repeat: int = 0,
               measure_time: bool = False) -> SweepRecord:
    """Fit and evaluate one cell at an explicit capacity (the CLI `eval` path)."""
    train, test = _load_data(cfg)
    T = len(train)
    regs_train = build_regressors(train, cfg.lags)
    regs_test = build_regressors(test, cfg.lags)
    return _run_cell(cfg, train, test, regs_train, regs_test, T,
                     capacity, 0, repeat, measure_time)


def _quantile(sorted_vals: list[float], q: float) -> float:
    """Linear-interpolation quantile that keeps +inf sentinels exact."""
    n = len(sorted_vals)
    if n == 1:
        return sorted_vals[0]
    pos = q * (n - 1)
    lo = int(np.floor(pos))
    hi = int(np.ceil(pos))
    if sorted_vals[lo] == sorted_vals[hi]:
        return sorted_vals[lo]
    return sorted_vals[lo] + (pos - lo) * (sorted_vals[hi] - sorted_vals[lo])


def summarize(records: list[SweepRecord]) -> SweepSummary:
    """Median and quartiles per capacity and metric.

    +inf sentinel values participate as ordinary order statistics (they
    sort above every finite value). Metrics that some repeat left unset
    (param_norm for forests, cond for ensembles) are omitted for that
    capacity.
    """
    if not records:
        raise ValueError("no records to summarize")
    grid_records = [r for r in records if r.experiment != BASELINE_TAG]
    baseline = [r for r in records if r.experiment == BASELINE_TAG]
    by_capacity: dict[int, list[SweepRecord]] = {}
    for rec in grid_records:
        by_capacity.setdefault(rec.capacity, []).append(rec)
    rows = []
    for capacity in sorted(by_capacity):
        cell = by_capacity[capacity]
        for metric in SUMMARY_METRICS:
            vals = [getattr(r, metric) for r in cell]
            if any(v is None for v in vals):
                continue
            vals = sorted(vals)
            rows.append(SummaryRow(
                capacity=capacity,
                ratio=cell[0].ratio,
                metric=metric,
                median=_quantile(vals, 0.5),
                q25=_quantile(vals, 0.25),
                q75=_quantile(vals, 0.75),
            ))
    base_osa = base_free = None
    if baseline:
        base_osa = baseline[0].test_mse_osa
        base_free = baseline[0].test_mse_free
        for metric, val in (("baseline_test_mse_osa", base_osa),
                            ("baseline_test_mse_free", base_free)):
            rows.append(SummaryRow(
                capacity=baseline[0].capacity,
                ratio=baseline[0].ratio,
                metric=metric,
                median=val, q25=val, q75=val,
            ))
    return SweepSummary(
        rows=tuple(rows),
        baseline_test_mse_osa=base_osa,
        baseline_test_mse_free=base_free,
    )


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(obj, path) -> None:
    """Write records (list) or a summary to CSV with the fixed column order."""
    if isinstance(obj, SweepSummary):
        lines = [",".join(SUMMARY_COLUMNS)]
        for row in obj.rows:
            lines.append(",".join(
                _fmt(getattr(row, col)) for col in SUMMARY_COLUMNS
            ))
    else:
        lines = [",".join(RECORD_COLUMNS)]
        for rec in obj:
            lines.append(",".join(
                _fmt(getattr(rec, col)) for col in RECORD_COLUMNS
            ))
    try:
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def _parse_optional_float(text: str) -> float | None:
    return None if text == "" else float(text)


def read_records_csv(path) -> list[SweepRecord]:
    """Inverse of write_csv for record files."""
    with open(path) as fh:
        header = fh.readline().strip()
        if header != ",".join(RECORD_COLUMNS):
            raise ValueError(f"{path}: unexpected header {header!r}")
        records = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != len(RECORD_COLUMNS):
                raise ValueError(f"{path}: malformed row {line!r}")
            records.append(SweepRecord(
                experiment=parts[0],
                capacity=int(parts[1]),
                ratio=float(parts[2]),
                repeat=int(parts[3]),
                seed=int(parts[4]),
                train_mse_osa=float(parts[5]),
                test_mse_osa=float(parts[6]),
                train_mse_free=float(parts[7]),
                test_mse_free=float(parts[8]),
                param_norm=_parse_optional_float(parts[9]),
                cond=_parse_optional_float(parts[10]),
                diverged=parts[11] == "true",
                wall_time_s=float(parts[12]),
            ))
    return records


def read_summary_csv(path) -> SweepSummary:
    """Inverse of write_csv for summary files."""
    with open(path) as fh:
        header = fh.readline().strip()
        if header != ",".join(SUMMARY_COLUMNS):
            raise ValueError(f"{path}: unexpected header {header!r}")
        rows = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != len(SUMMARY_COLUMNS):
                raise ValueError(f"{path}: malformed row {line!r}")
            rows.append(SummaryRow(
                capacity=int(parts[0]),
                ratio=float(parts[1]),
                metric=parts[2],
                median=float(parts[3]),
                q25=float(parts[4]),
                q75=float(parts[5]),
            ))
    base = {row.metric: row.median for row in rows
            if row.metric.startswith("baseline_")}
    return SweepSummary(
        rows=tuple(rows),
        baseline_test_mse_osa=base.get("baseline_test_mse_osa"),
        baseline_test_mse_free=base.get("baseline_test_mse_free"),
    )
