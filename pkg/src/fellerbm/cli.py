"""Command-line front end.

Commands::

    fellerbm simulate  --mode sticky --gamma 1 --t-max 1 --steps 10000 --paths 1 --seed 7
    fellerbm kernel    --mode sticky --gamma 1 --time 1 [--out table.csv]
    fellerbm resolvent --mode elastic --beta 1 --lambda 1 [--out table.csv]
    fellerbm interval  --mode elastic --beta 1 --mode1 reflecting --start 0.3 ...
    fellerbm validate  [--suite acceptance|analytic] [--paths N] [--out report.json]

Configuration may also come from a file of ``key = value`` lines with
``#`` comments (keys are the flag names with ``-`` replaced by ``_``);
command-line flags override file values.  The default seed may be set via
the ``FELLERBM_SEED`` environment variable (a flag or file value wins).

The CLI emits data (CSV or JSON) for external plotting and never renders
anything itself.  Exit codes: 0 success, 1 a validation check failed,
2 usage or I/O error.
"""

from __future__ import annotations

import io
import json
import os
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import interval as interval_mod
from . import kernels, validation
from .engine import TimeGrid, build_process, write_path_csv
from .errors import (
    ConfigError,
    FellerBMError,
    MissingRequired,
    TypeMismatch,
    UnknownKey,
)
from .model import BoundaryModel, Mode, Side

COMMANDS = ("simulate", "kernel", "resolvent", "interval", "validate")

_FLOAT_KEYS = {
    "a0", "b0", "c0", "a1", "b1", "c1",
    "beta", "gamma", "beta1", "gamma1",
    "start", "t_max", "lambda", "time",
}
_INT_KEYS = {"steps", "paths", "seed"}
_STR_KEYS = {"command", "mode", "mode1", "out", "format", "suite"}
KNOWN_KEYS = _FLOAT_KEYS | _INT_KEYS | _STR_KEYS

_NONNEGATIVE = {"a0", "b0", "c0", "a1", "b1", "c1", "beta", "gamma", "beta1", "gamma1"}
_POSITIVE = {"t_max", "lambda", "time"}

ENV_SEED = "FELLERBM_SEED"


@dataclass(frozen=True)
class RunConfig:
    """Validated invocation: one command plus everything it may need."""

    command: str
    model: Optional[BoundaryModel] = None
    model1: Optional[BoundaryModel] = None
    start: float = 0.0
    grid: TimeGrid = TimeGrid(1.0, 10_000)
    n_paths: int = 1
    seed: int = 0
    lam: Optional[float] = None
    time: Optional[float] = None
    out: Optional[str] = None
    fmt: str = "csv"
    suite: str = "acceptance"


# ---------------------------------------------------------------------------
# parsing


def _parse_file(text: str) -> dict[str, str]:
    """Line-oriented `key = value` grammar with # comments."""
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected `key = value`, got {raw!r}")
        key, value = line.split("=", 1)
        entries[key.strip()] = value.strip()
    return entries


def _parse_flags(argv: Sequence[str]) -> tuple[Optional[str], dict[str, str]]:
    command: Optional[str] = None
    entries: dict[str, str] = {}
    i = 0
    args = list(argv)
    if args and not args[0].startswith("-"):
        command = args[0]
        i = 1
    while i < len(args):
        tok = args[i]
        if not tok.startswith("--"):
            raise ConfigError(f"expected a --flag, got {tok!r}")
        body = tok[2:]
        if "=" in body:
            key, value = body.split("=", 1)
        else:
            if i + 1 >= len(args):
                raise ConfigError(f"flag {tok} is missing a value")
            key, value = body, args[i + 1]
            i += 1
        entries[key.replace("-", "_")] = value
        i += 1
    return command, entries


def _convert(key: str, raw: str):
    if key in _FLOAT_KEYS:
        try:
            val = float(raw)
        except ValueError:
            raise TypeMismatch(f"key {key!r}: expected a number, got {raw!r}") from None
        if key in _NONNEGATIVE and val < 0:
            raise TypeMismatch(f"key {key!r}: must be nonnegative, got {val:g}")
        if key in _POSITIVE and val <= 0:
            raise TypeMismatch(f"key {key!r}: must be positive, got {val:g}")
        return val
    if key in _INT_KEYS:
        try:
            val = int(raw)
        except ValueError:
            raise TypeMismatch(f"key {key!r}: expected an integer, got {raw!r}") from None
        if key in ("steps", "paths") and val <= 0:
            raise TypeMismatch(f"key {key!r}: must be a positive count, got {val}")
        return val
    return raw


def _build_model(entries: dict, suffix: str = "") -> Optional[BoundaryModel]:
    """Model from mode/beta/gamma keys or a raw Wentzell triple."""
    k = lambda name: f"{name}{suffix}"
    triple_keys = [k("a"), k("b"), k("c")] if suffix else ["a0", "b0", "c0"]
    if any(tk in entries for tk in triple_keys):
        side = Side.AT_ONE if suffix else Side.AT_ZERO
        from .model import normalize_wentzell

        return normalize_wentzell(
            entries.get(triple_keys[0], 0.0),
            entries.get(triple_keys[1], 0.0),
            entries.get(triple_keys[2], 0.0),
            side,
        )
    mode_key = k("mode")
    if mode_key not in entries:
        return None
    raw = str(entries[mode_key]).replace("-", "_")
    try:
        mode = Mode(raw)
    except ValueError:
        raise TypeMismatch(
            f"key {mode_key!r}: unknown mode {entries[mode_key]!r}; "
            f"expected one of {[m.value for m in Mode]}"
        ) from None
    side = Side.AT_ONE if suffix else Side.AT_ZERO
    beta = entries.get(k("beta"), None)
    gamma = entries.get(k("gamma"), None)
    if mode is Mode.REFLECTING:
        return BoundaryModel.reflecting(side)
    if mode is Mode.ABSORBING:
        return BoundaryModel.absorbing(side)
    if mode is Mode.ELASTIC:
        if beta is None:
            raise MissingRequired(f"mode elastic requires key {k('beta')!r}")
        return BoundaryModel.elastic(beta, side)
    if mode is Mode.STICKY:
        if gamma is None:
            raise MissingRequired(f"mode sticky requires key {k('gamma')!r}")
        return BoundaryModel.sticky(gamma, side)
    if mode is Mode.GENERAL:
        if beta is None or gamma is None:
            raise MissingRequired(
                f"mode general requires keys {k('beta')!r} and {k('gamma')!r}"
            )
        return BoundaryModel.general(beta, gamma, side)
    if beta is None:
        raise MissingRequired(f"mode trap_kill requires key {k('beta')!r}")
    return BoundaryModel.trap_kill(beta, side)


def parse_config(argv: Sequence[str], config_text: Optional[str] = None) -> RunConfig:
    """Merge file values and flags (flags win) into a validated RunConfig."""
    command, flag_entries = _parse_flags(argv)
    raw: dict[str, str] = {}
    if config_text is not None:
        raw.update(_parse_file(config_text))
    raw.update(flag_entries)

    for key in raw:
        if key not in KNOWN_KEYS:
            raise UnknownKey(f"unknown key {key!r}")

    entries = {key: _convert(key, str(val)) for key, val in raw.items()}
    command = command or entries.get("command")
    if command is None:
        raise MissingRequired("missing required key 'command'")
    if command not in COMMANDS:
        raise TypeMismatch(
            f"key 'command': unknown command {command!r}; expected one of {COMMANDS}"
        )

    fmt = entries.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise TypeMismatch(f"key 'format': expected csv or json, got {fmt!r}")
    suite = entries.get("suite", "acceptance")
    if suite not in validation.SUITES:
        raise TypeMismatch(
            f"key 'suite': expected one of {sorted(validation.SUITES)}, got {suite!r}"
        )

    start = entries.get("start", 0.0)
    t_max = entries.get("t_max", 1.0)
    steps = entries.get("steps", 10_000)
    if "seed" in entries:
        seed = entries["seed"]
    elif os.environ.get(ENV_SEED):
        seed = _convert("seed", os.environ[ENV_SEED])
    else:
        seed = 0

    model = _build_model(entries)
    model1 = _build_model(entries, suffix="1")
    if command in ("simulate", "kernel", "resolvent", "interval") and model is None:
        raise MissingRequired("missing required key 'mode' (or a Wentzell triple a0/b0/c0)")
    if command == "interval" and model1 is None:
        model1 = BoundaryModel.reflecting(Side.AT_ONE)
    if command == "resolvent" and "lambda" not in entries:
        raise MissingRequired("missing required key 'lambda'")

    return RunConfig(
        command=command,
        model=model,
        model1=model1,
        start=start,
        grid=TimeGrid(t_max, steps),
        n_paths=entries.get("paths", 1),
        seed=seed,
        lam=entries.get("lambda"),
        time=entries.get("time"),
        out=entries.get("out"),
        fmt=fmt,
        suite=suite,
    )


# ---------------------------------------------------------------------------
# execution

_KERNEL_XS = (0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0)
_KERNEL_YS = tuple(np.linspace(0.0, 3.0, 61))


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigError(f"cannot write {out!r}: {exc}") from exc


def _simulate_text(config: RunConfig) -> str:
    buf = io.StringIO()
    paths = [
        build_process(config.model, config.start, config.grid, config.seed + i)
        for i in range(config.n_paths)
    ]
    if config.fmt == "json":
        doc = {
            "model": config.model.to_config(),
            "t": [repr(v) for v in config.grid.times()],
            "paths": [
                {
                    "values": [repr(float(v)) for v in aug.path.values],
                    "local_time": [repr(float(v)) for v in aug.local_time],
                    "lifetime": None if aug.path.lifetime is None else float(aug.path.lifetime),
                }
                for aug in paths
            ],
        }
        json.dump(doc, buf, indent=2)
        buf.write("\n")
    elif config.n_paths == 1:
        write_path_csv(paths[0], buf)
    else:
        buf.write("t," + ",".join(f"path{i}" for i in range(config.n_paths)) + "\n")
        t = config.grid.times()
        cols = [aug.path.values for aug in paths]
        for j, tj in enumerate(t):
            buf.write(repr(float(tj)) + "," + ",".join(repr(float(c[j])) for c in cols) + "\n")
    return buf.getvalue()


def _kernel_text(config: RunConfig, kind: str) -> str:
    buf = io.StringIO()
    value = config.time if kind == "transition" else config.lam
    if value is None:
        value = 1.0
    kernels.write_kernel_table(
        config.model, buf, kind=kind, value=float(value), xs=_KERNEL_XS, ys=_KERNEL_YS
    )
    return buf.getvalue()


def _interval_text(config: RunConfig) -> str:
    record = interval_mod.build_interval_path(
        config.start, config.model, config.model1, config.grid, config.seed
    )
    buf = io.StringIO()
    if config.fmt == "json":
        interval_mod.write_record_json(record, buf)
    else:
        interval_mod.write_record_csv(record, buf)
        buf.write(f"# sidecar: {json.dumps(interval_mod.record_sidecar(record))}\n")
    return buf.getvalue()


def execute(config: RunConfig) -> int:
    """Run one validated command; returns the process exit code."""
    if config.command == "simulate":
        _emit(_simulate_text(config), config.out)
        return 0
    if config.command == "kernel":
        _emit(_kernel_text(config, "transition"), config.out)
        return 0
    if config.command == "resolvent":
        _emit(_kernel_text(config, "resolvent"), config.out)
        return 0
    if config.command == "interval":
        _emit(_interval_text(config), config.out)
        return 0
    # validate
    cfg = validation.SuiteConfig(
        suite=config.suite,
        n_paths=config.n_paths if config.n_paths > 1 else validation.DESK_PATHS,
        dt=config.grid.dt,
        master_seed=config.seed if config.seed else validation.DEFAULT_SEED,
    )
    report = validation.run_suite(cfg)
    sys.stdout.write(report.table() + "\n")
    sys.stdout.write(report.body_json() + "\n")
    if config.out is not None:
        _emit(report.body_json() + "\n", config.out)
    return 0 if report.passed else 1


USAGE = __doc__


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = list(sys.argv[1:] if argv is None else argv)
    if not args or args[0] in ("-h", "--help", "help"):
        sys.stdout.write(USAGE)
        return 0
    config_text = None
    if "--config" in args:  # --config FILE: read key = value lines
        i = args.index("--config")
        if i + 1 >= len(args):
            sys.stderr.write("error: --config is missing a file path\n")
            return 2
        path = args[i + 1]
        try:
            with open(path) as fh:
                config_text = fh.read()
        except OSError as exc:
            sys.stderr.write(f"error: cannot read {path!r}: {exc}\n")
            return 2
        del args[i : i + 2]
    try:
        config = parse_config(args, config_text)
        return execute(config)
    except ConfigError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except FellerBMError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
