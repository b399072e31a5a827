"""Command-line interface.

Subcommands:
    generate  -- simulate one Chen-system dataset and write it as a two
                 column (u, y) table
    sweep     -- run a capacity sweep on synthetic data, writing records
                 and summary CSVs into --out
    eval      -- fit a single model at one capacity and print its metrics
    ce8       -- capacity sweep on a coupled-electric-drives data file

`--preset` expands to the exact parameter set behind each published curve;
explicit flags override preset values. The master seed falls back to the
NARXDD_SEED environment variable when --seed is omitted.
"""

import argparse
import logging
import os
import sys
from pathlib import Path

from .sweep import SweepConfig, run_single, run_sweep, summarize, write_csv
from .sysdata import ChenConfig, realize_chen, write_table
from .seeding import derive_seed

__all__ = ["run_command", "main"]

# Parameter sets behind the published curves. "lambda_list" presets fan out
# into one sweep per value.
PRESETS = {
    "fig2": dict(experiment="rff-minnorm", gamma=0.6, sigma_v=0.1, omega_c=0.7,
                 train_len=400, test_len=100, lo_ratio=0.1, hi_ratio=1000.0,
                 points=100, repeats=10),
    "fig3": dict(experiment="rff-ridge", gamma=0.6, sigma_v=0.1, omega_c=0.7,
                 train_len=400, test_len=100, lo_ratio=0.1, hi_ratio=1000.0,
                 points=100, repeats=10, lambda_list=(1e-2, 1e-5, 1e-8)),
    "fig4": dict(experiment="rff-ensemble", gamma=0.6, sigma_v=0.1, omega_c=0.7,
                 train_len=400, test_len=100, lo_ratio=0.1, hi_ratio=1000.0,
                 points=100, repeats=10, ensemble_size=1000, lambda_stab=1e-7),
    "rbf": dict(experiment="rbf-ensemble", gamma=0.25, eta=5.0, sigma_v=0.1,
                omega_c=0.7, train_len=400, test_len=100, lo_ratio=0.1,
                hi_ratio=1000.0, points=100, repeats=10, ensemble_size=2000,
                lambda_stab=1e-14),
    "fig5": dict(experiment="forest", sigma_v=0.1, omega_c=0.7,
                 train_len=3000, test_len=100, lo_ratio=0.1, hi_ratio=100.0,
                 points=30, repeats=5),
    "ce8": dict(experiment="ce8-rff", gamma=0.2, lo_ratio=0.1, hi_ratio=1000.0,
                points=100, repeats=10, ensemble_size=2000, lambda_stab=1e-14),
}

DEFAULTS = dict(experiment="rff-minnorm", gamma=0.6, eta=5.0, sigma_v=0.1,
                omega_c=0.7, train_len=400, test_len=100, lo_ratio=0.1,
                hi_ratio=100.0, points=30, repeats=5, ensemble_size=1000,
                lambda_stab=1e-7, split=0.6)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {value}")
    return value


def _min_two_int(text: str) -> int:
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError(f"must be >= 2, got {value}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {value}")
    return value


def _nonneg_float(text: str) -> float:
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _fraction(text: str) -> float:
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {value}")
    return value


def _add_data_flags(p):
    p.add_argument("--sigma-v", type=_nonneg_float, help="process noise std dev")
    p.add_argument("--omega-c", type=_positive_float,
                   help="input low-pass cutoff, fraction of Nyquist in (0, 1]")
    p.add_argument("--train-len", type=_positive_int, help="training samples T")
    p.add_argument("--test-len", type=_positive_int, help="test samples T'")


def _add_model_flags(p):
    p.add_argument("--gamma", type=_positive_float, help="feature bandwidth")
    p.add_argument("--eta", type=_positive_float, help="RBF center variance")
    p.add_argument("--lambda", dest="lam", type=_positive_float,
                   help="ridge penalty (rff-ridge) or ensemble stabilizer")
    p.add_argument("--ensemble-size", type=_positive_int,
                   help="number of ensemble members B")


def _add_grid_flags(p):
    p.add_argument("--lo-ratio", type=_positive_float, help="smallest capacity/T")
    p.add_argument("--hi-ratio", type=_positive_float, help="largest capacity/T")
    p.add_argument("--points", type=_min_two_int, help="grid points (>= 2)")
    p.add_argument("--repeats", type=_positive_int, help="repeats per grid point")
    p.add_argument("--config", help="key=value file with the same names as the flags")
    p.add_argument("--jobs", type=_positive_int, default=1,
                   help="worker threads for sweep cells")
    p.add_argument("--timing", action="store_true",
                   help="record real wall times (off by default so reruns are byte-identical)")
    p.add_argument("--no-baseline", action="store_true",
                   help="skip the linear ARX baseline fit")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="narxdd",
        description="Nonlinear ARX estimation across a capacity sweep.",
    )
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="log sweep progress")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="simulate a Chen dataset to a file")
    p_gen.add_argument("--length", type=_positive_int, required=True)
    p_gen.add_argument("--sigma-v", type=_nonneg_float, default=0.1)
    p_gen.add_argument("--omega-c", type=_positive_float, default=0.7)
    p_gen.add_argument("--seed", type=int, default=None)
    p_gen.add_argument("--out", required=True, help="output table path")

    p_sweep = sub.add_parser("sweep", help="run a capacity sweep")
    p_sweep.add_argument("--experiment",
                         choices=["rff-minnorm", "rff-ridge", "rff-ensemble",
                                  "rbf-ensemble", "forest"])
    p_sweep.add_argument("--preset", choices=sorted(PRESETS))
    _add_data_flags(p_sweep)
    _add_model_flags(p_sweep)
    _add_grid_flags(p_sweep)
    p_sweep.add_argument("--seed", type=int, default=None, help="master seed")
    p_sweep.add_argument("--out", required=True, help="output directory")

    p_eval = sub.add_parser("eval", help="fit one model at one capacity")
    p_eval.add_argument("--experiment",
                        choices=["rff-minnorm", "rff-ridge", "rff-ensemble",
                                 "rbf-ensemble", "forest"])
    p_eval.add_argument("--capacity", type=_positive_int, required=True,
                        help="feature count, or total leaves for forest")
    _add_data_flags(p_eval)
    _add_model_flags(p_eval)
    p_eval.add_argument("--seed", type=int, default=None, help="master seed")

    p_ce8 = sub.add_parser("ce8", help="capacity sweep on a CE8 data file")
    p_ce8.add_argument("--data", required=True, help="two-column (u, y) table")
    p_ce8.add_argument("--split", type=_fraction, help="train fraction in (0, 1)")
    _add_model_flags(p_ce8)
    _add_grid_flags(p_ce8)
    p_ce8.add_argument("--seed", type=int, default=None, help="master seed")
    p_ce8.add_argument("--out", required=True, help="output directory")
    return parser


def _resolve_seed(seed) -> int:
    if seed is not None:
        return seed
    return int(os.environ.get("NARXDD_SEED", "0"))


# how to parse each key=value entry of a --config file
_CONFIG_PARSERS = {
    "experiment": str, "gamma": _positive_float, "eta": _positive_float,
    "lambda": _positive_float, "ensemble_size": _positive_int,
    "sigma_v": _nonneg_float, "omega_c": _positive_float,
    "train_len": _positive_int, "test_len": _positive_int,
    "lo_ratio": _positive_float, "hi_ratio": _positive_float,
    "points": _min_two_int, "repeats": _positive_int, "seed": int,
    "split": _fraction,
}


def _load_config_file(path) -> dict:
    """Plain key=value sweep configuration, same names as the CLI flags."""
    settings = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in _CONFIG_PARSERS:
                raise ValueError(f"{path}:{lineno}: unknown setting {key!r}")
            try:
                settings[key] = _CONFIG_PARSERS[key](value)
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise ValueError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    return settings


def _setting(args, preset: dict, name: str, attr: str | None = None):
    value = getattr(args, attr or name, None)
    if value is not None:
        return value
    if name in preset:
        return preset[name]
    return DEFAULTS.get(name)


def _chen_pair(args, preset, seed) -> tuple[ChenConfig, ChenConfig]:
    sigma_v = _setting(args, preset, "sigma_v")
    omega_c = _setting(args, preset, "omega_c")
    train = ChenConfig(sigma_v, omega_c, _setting(args, preset, "train_len"),
                       derive_seed(seed, 1001))
    test = ChenConfig(sigma_v, omega_c, _setting(args, preset, "test_len"),
                      derive_seed(seed, 1002))
    return train, test


def _sweep_config(args, preset, seed, experiment, lam,
                  train_cfg=None, test_cfg=None, ce8_path=None) -> SweepConfig:
    return SweepConfig(
        experiment=experiment,
        lo_ratio=_setting(args, preset, "lo_ratio"),
        hi_ratio=_setting(args, preset, "hi_ratio"),
        points=_setting(args, preset, "points"),
        repeats=_setting(args, preset, "repeats"),
        master_seed=seed,
        train_cfg=train_cfg,
        test_cfg=test_cfg,
        ce8_path=ce8_path,
        split_fraction=_setting(args, preset, "split") if ce8_path else 0.6,
        gamma=_setting(args, preset, "gamma"),
        eta=_setting(args, preset, "eta"),
        ridge_lambda=lam if experiment == "rff-ridge" else None,
        ensemble_size=_setting(args, preset, "ensemble_size"),
        lambda_stab=lam if "ensemble" in experiment or experiment == "ce8-rff"
                    else _setting(args, preset, "lambda_stab"),
        baseline=not getattr(args, "no_baseline", False),
    )


def _write_outputs(records, out_dir: Path, suffix: str = "") -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    write_csv(records, out_dir / f"records{suffix}.csv")
    write_csv(summarize(records), out_dir / f"summary{suffix}.csv")


def _cmd_generate(args) -> int:
    cfg = ChenConfig(args.sigma_v, args.omega_c, args.length,
                     _resolve_seed(args.seed))
    write_table(realize_chen(cfg), args.out)
    print(f"wrote {args.length} samples to {args.out}")
    return 0


def _lambda_plan(args, layer, experiment):
    """Which penalty values to sweep: flag, config file, preset list, default."""
    if args.lam is not None:
        return [args.lam], [""]
    if "lambda" in layer:
        return [layer["lambda"]], [""]
    if "lambda_list" in layer:
        lams = list(layer["lambda_list"])
        return lams, [f"_lam{lam:.0e}" for lam in lams]
    if experiment == "rff-ridge":
        return [1e-2], [""]
    return [_setting(args, layer, "lambda_stab")], [""]


def _settings_layer(args, preset: dict) -> dict:
    """Preset values overridden by --config file entries."""
    config = _load_config_file(args.config) if getattr(args, "config", None) else {}
    return {**preset, **config}


def _cmd_sweep(args) -> int:
    layer = _settings_layer(args, PRESETS.get(args.preset, {}))
    experiment = args.experiment or layer.get("experiment") or DEFAULTS["experiment"]
    seed = args.seed if args.seed is not None else layer.get("seed")
    seed = _resolve_seed(seed)
    train_cfg, test_cfg = _chen_pair(args, layer, seed)
    lams, suffixes = _lambda_plan(args, layer, experiment)
    for lam, suffix in zip(lams, suffixes):
        cfg = _sweep_config(args, layer, seed, experiment, lam,
                            train_cfg=train_cfg, test_cfg=test_cfg)
        records = run_sweep(cfg, jobs=args.jobs, measure_time=args.timing)
        _write_outputs(records, Path(args.out), suffix)
        print(f"{experiment}{suffix}: {len(records)} records -> {args.out}")
    return 0


def _cmd_eval(args) -> int:
    preset: dict = {}
    experiment = args.experiment or DEFAULTS["experiment"]
    seed = _resolve_seed(args.seed)
    train_cfg, test_cfg = _chen_pair(args, preset, seed)
    cfg = _sweep_config(args, preset, seed, experiment, args.lam or
                        (1e-2 if experiment == "rff-ridge" else DEFAULTS["lambda_stab"]),
                        train_cfg=train_cfg, test_cfg=test_cfg)
    rec = run_single(cfg, args.capacity)
    for name in ("experiment", "capacity", "ratio", "train_mse_osa",
                 "test_mse_osa", "train_mse_free", "test_mse_free",
                 "param_norm", "cond", "diverged"):
        print(f"{name}={getattr(rec, name)}")
    return 0


def _cmd_ce8(args) -> int:
    layer = _settings_layer(args, PRESETS["ce8"])
    seed = args.seed if args.seed is not None else layer.get("seed")
    seed = _resolve_seed(seed)
    lam = args.lam if args.lam is not None else layer.get("lambda", layer["lambda_stab"])
    cfg = _sweep_config(args, layer, seed, "ce8-rff", lam, ce8_path=args.data)
    records = run_sweep(cfg, jobs=args.jobs, measure_time=args.timing)
    _write_outputs(records, Path(args.out))
    print(f"ce8-rff: {len(records)} records -> {args.out}")
    return 0


def run_command(argv: list[str]) -> int:
    """Parse argv and run one command; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage or an error
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    handler = {"generate": _cmd_generate, "sweep": _cmd_sweep,
               "eval": _cmd_eval, "ce8": _cmd_ce8}[args.command]
    try:
        return handler(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
