"""Command-line entry point.

    rlsbias run --scenario e2 --out runs/e2
    rlsbias run --scenario e1 --r-grid 1e-1,1e-3,1e-5 --out runs/e1
    rlsbias run --scenario e3 --config my_run.cfg --out runs/e3

Flags override values from --config (a flat ``key = value`` file).  Exit
codes: 0 success, 2 configuration error, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import (
    ConfigError,
    EigenConvergenceError,
    NotPersistentlyExcitingError,
    NotPSDError,
    NotSPDError,
    RankDeficientError,
    SimulationDivergenceError,
)
from .experiments import (
    DEFAULT_R_GRID,
    DEFAULT_SEED,
    make_config,
    run_r_grid,
    run_scenario,
)

_NUMERICAL_ERRORS = (
    NotSPDError,
    NotPSDError,
    EigenConvergenceError,
    RankDeficientError,
    NotPersistentlyExcitingError,
    SimulationDivergenceError,
)

# Keys accepted in config files, with their parsers.
_CONFIG_KEYS = {
    "scenario": str,
    "steps": int,
    "trials": int,
    "r": float,
    "seed": int,
    "out": str,
    "r_grid": lambda s: [float(x) for x in str(s).split(",") if x.strip()],
    "per_trial": None,  # bool, parsed below
    "kappa_every": int,
    "workers": int,
    "n": int,
}


def _parse_bool(text: str) -> bool:
    lowered = str(text).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"cannot parse boolean value {text!r}")


def parse_config_file(path) -> dict:
    """Read a flat ``key = value`` file; '#' starts a comment."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key == "per_trial":
            values[key] = _parse_bool(value)
        else:
            try:
                values[key] = _CONFIG_KEYS[key](value)
            except ValueError as exc:
                raise ConfigError(
                    f"{path}:{lineno}: bad value for {key}: {value!r}"
                ) from exc
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rlsbias",
        description="Run regularized recursive least-squares experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one scenario and write trace CSVs")
    run.add_argument(
        "--scenario",
        choices=["e1", "e2", "e3", "e4", "custom"],
        help="which preset stream to drive",
    )
    run.add_argument("--steps", type=int, help="horizon K; trace covers k = 0..K")
    run.add_argument("--trials", type=int, help="number of independent trials")
    run.add_argument("--r", type=float, help="regularization weight (R = r I)")
    run.add_argument("--seed", type=int, help="base seed (64-bit unsigned)")
    run.add_argument("--out", help="output directory")
    run.add_argument(
        "--r-grid",
        help="comma-separated r values; runs each into its own subdirectory",
    )
    run.add_argument(
        "--per-trial",
        action="store_true",
        default=None,
        help="also write one CSV per trial",
    )
    run.add_argument(
        "--kappa-every",
        type=int,
        help="compute the condition number only every S steps",
    )
    run.add_argument("--workers", type=int, help="trial-level process parallelism")
    run.add_argument("--n", type=int, help="parameter dimension (custom scenario)")
    run.add_argument("--config", help="flat key = value config file")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        settings = parse_config_file(args.config) if args.config else {}
        for key in (
            "scenario",
            "steps",
            "trials",
            "r",
            "seed",
            "out",
            "per_trial",
            "kappa_every",
            "workers",
            "n",
        ):
            flag = getattr(args, key)
            if flag is not None:
                settings[key] = flag
        if args.r_grid is not None:
            settings["r_grid"] = _CONFIG_KEYS["r_grid"](args.r_grid)

        scenario = settings.pop("scenario", None)
        if scenario is None:
            raise ConfigError("no scenario given (use --scenario or a config file)")
        out = settings.pop("out", None)
        if out is None:
            raise ConfigError("no output directory given (use --out)")
        r_grid = settings.pop("r_grid", None)
        explicit_r = "r" in settings
        settings.setdefault("seed", DEFAULT_SEED)
        # The r sweep is the default shape of the random-regressor scenario.
        if r_grid is None and not explicit_r and scenario == "e1":
            r_grid = list(DEFAULT_R_GRID)

        overrides = {k: v for k, v in settings.items() if v is not None}
        config = make_config(scenario, out_dir=str(out), **overrides)

        if r_grid:
            results = run_r_grid(config, r_grid)
            for r, result in results.items():
                print(f"r={r:g}: wrote {result.out_dir}")
        else:
            result = run_scenario(config)
            final = result.records[-1]
            print(
                f"{scenario}: {config.trials} trials x {config.steps} steps, "
                f"final error {final.error_norm:.6g}, wrote {result.out_dir}"
            )
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
