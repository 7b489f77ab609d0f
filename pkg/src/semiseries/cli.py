"""Command-line front end: partition functions, Table 1, specific heat, validation.

Rows go to ``--out`` (or stdout) as CSV with 17 significant digits, or as JSON
records; diagnostics go to stderr.  Exit codes: 0 ok, 1 configuration error,
2 numerical failure, 3 validation failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import oracle, series, validate
from .classical import PathError
from .fluctuations import FluctuationError
from .potential import make

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VALIDATION = 0, 1, 2, 3

TABLE1_G = (0.4, 1.2, 2.0, 4.0, 8.0)
DEFAULT_THETAS = (0.5, 1.0, 2.0, 5.0)
DEFAULT_TEMPERATURES = (0.1, 0.2, 0.3, 0.5, 1.0, 2.0, 3.0)

COLUMNS = {
    "partition": ("theta", "z2_q0", "z2_qt", "z_corrected", "k_theta", "qt_plus", "err_estimate"),
    "table1": ("g", "e0_semiclassical", "e0_exact", "error_percent"),
    "heat": ("T", "C_semiclassical", "C_classical", "C_exact"),
    "e0": ("g", "e0_semiclassical", "e0_exact", "error_percent"),
}

NUMERIC_ERRORS = (ArithmeticError, FluctuationError, PathError)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    potential: str = "quartic"
    g: float = 0.3
    theta_list: tuple[float, ...] = ()
    tolerances: series.QuadratureConfig = field(default_factory=series.QuadratureConfig)
    output_format: str = "csv"
    output_path: str = "-"
    only: tuple[str, ...] = ()
    jobs: int = 1
    green_offset: float = 0.0

    def __post_init__(self):
        if self.potential not in ("harmonic", "quartic"):
            raise ConfigError(f"potential must be harmonic or quartic, got {self.potential!r}")
        if not (self.g > 0 and math.isfinite(self.g)):
            raise ConfigError(f"g must be positive, got {self.g!r}")
        if any(not (t > 0 and math.isfinite(t)) for t in self.theta_list):
            raise ConfigError("every Theta must be positive and finite")
        if self.output_format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.output_format!r}")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")


# -- parsing ----------------------------------------------------------------------------

def parse_thetas(spec: str) -> list[float]:
    """``"1.5"``, ``"0.5,1,2"`` or the inclusive range ``"a:b:n"`` (n evenly spaced points)."""
    out: list[float] = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            bits = part.split(":")
            if len(bits) != 3:
                raise ConfigError(f"range must look like a:b:n, got {part!r}")
            try:
                a, b, n = float(bits[0]), float(bits[1]), int(bits[2])
            except ValueError as exc:
                raise ConfigError(f"bad range {part!r}: {exc}") from None
            if n < 1:
                raise ConfigError(f"range {part!r} needs n >= 1")
            out.extend(float(x) for x in np.linspace(a, b, n))
        else:
            try:
                out.append(float(part))
            except ValueError:
                raise ConfigError(f"bad Theta value {part!r}") from None
    return out


def read_config_file(path: str) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment.  Keys use the long flag names."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    out: dict[str, str] = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="semiseries",
                 description="Semiclassical partition functions of one-dimensional single-well potentials.")
    ap.add_argument("command", choices=("partition", "table1", "heat", "e0", "validate"))
    ap.add_argument("--potential", choices=("harmonic", "quartic"))
    ap.add_argument("--g", type=float, help="dimensionless coupling (default 0.3)")
    ap.add_argument("--theta", action="append",
                    help="Theta = 1/T; repeatable, comma lists and a:b:n ranges allowed")
    ap.add_argument("--temperature", action="append",
                    help="T values (heat); converted to Theta = 1/T")
    ap.add_argument("--tol-abs", type=float)
    ap.add_argument("--tol-rel", type=float)
    ap.add_argument("--format", choices=("csv", "json"))
    ap.add_argument("--out", help="output file (default stdout)")
    ap.add_argument("--only", action="append", help="validation suite to run; repeatable")
    ap.add_argument("--jobs", type=int, help="worker processes for independent points")
    ap.add_argument("--config", help="key=value file; command-line flags take precedence")
    ap.add_argument("--inject-green-offset", type=float, help=argparse.SUPPRESS)
    return ap


def make_config(args: argparse.Namespace) -> RunConfig:
    merged: dict[str, str | list[str]] = read_config_file(args.config) if args.config else {}
    for key in ("potential", "g", "theta", "temperature", "tol_abs", "tol_rel", "format", "out",
                "only", "jobs", "inject_green_offset"):
        val = getattr(args, key)
        if val is not None:
            merged[key] = val

    def as_list(key) -> list[str]:
        v = merged.get(key, [])
        return [v] if isinstance(v, str) else list(v)

    def num(key, cast, default):
        try:
            return cast(merged[key]) if key in merged else default
        except (TypeError, ValueError):
            raise ConfigError(f"{key}: cannot parse {merged[key]!r}") from None

    thetas = [t for s in as_list("theta") for t in parse_thetas(s)]
    temps = [t for s in as_list("temperature") for t in parse_thetas(s)]
    if any(t <= 0 for t in temps):
        raise ConfigError("temperatures must be positive")
    thetas += [1.0 / t for t in temps]
    if not thetas:
        thetas = [1.0 / t for t in DEFAULT_TEMPERATURES] if args.command == "heat" else list(DEFAULT_THETAS)
    only = [o for s in as_list("only") for o in s.split(",") if o]

    base = series.QuadratureConfig()
    try:
        tol = replace(base, abs_tol=num("tol_abs", float, base.abs_tol),
                      rel_tol=num("tol_rel", float, base.rel_tol))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return RunConfig(
        command=args.command,
        potential=str(merged.get("potential", "quartic")),
        g=num("g", float, 0.3),
        theta_list=tuple(thetas),
        tolerances=tol,
        output_format=str(merged.get("format", "csv")),
        output_path=str(merged.get("out", "-")),
        only=tuple(only),
        jobs=num("jobs", int, 1),
        green_offset=num("inject_green_offset", float, 0.0),
    )


# -- output --------------------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _json_value(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def render(columns: Sequence[str], rows: Sequence[Sequence], fmt: str) -> str:
    if fmt == "json":
        recs = [{c: _json_value(v) for c, v in zip(columns, r)} for r in rows]
        return json.dumps(recs, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def emit(cfg: RunConfig, text: str) -> None:
    if cfg.output_path == "-":
        sys.stdout.write(text)
    else:
        Path(cfg.output_path).write_text(text, encoding="utf-8")


def _map(fn: Callable, items: Sequence, jobs: int) -> list:
    # results come back in input order either way
    if jobs == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# -- commands --------------------------------------------------------------------------------

def _partition_row(args) -> tuple:
    potential, g, theta, tol = args
    p = make(potential, g)
    a = series.z2_over_q0(p, theta, tol)
    b = series.z2_over_qt(p, theta, tol)
    c = series.z_corrected(p, theta, tol)
    return (theta, a.value, b.value, c.value, a.k_theta, a.qt_plus, max(a.err_estimate, b.err_estimate))


def cmd_partition(cfg: RunConfig) -> int:
    items = [(cfg.potential, cfg.g, t, cfg.tolerances) for t in cfg.theta_list]
    emit(cfg, render(COLUMNS["partition"], _map(_partition_row, items, cfg.jobs), cfg.output_format))
    return EXIT_OK


def _e0_row(g: float) -> tuple:
    semi = series.ground_state_energy(g)
    exact = oracle.ground_state_energy(make("quartic", g))
    return (g, semi, exact, 100.0 * (semi - exact) / exact)


def cmd_table1(cfg: RunConfig) -> int:
    if cfg.potential != "quartic":
        raise ConfigError("table1 is defined for the quartic potential")
    emit(cfg, render(COLUMNS["table1"], _map(_e0_row, list(TABLE1_G), cfg.jobs), cfg.output_format))
    return EXIT_OK


def cmd_e0(cfg: RunConfig) -> int:
    """Ground-state energy at the configured ``--g``."""
    if cfg.potential != "quartic":
        raise ConfigError("e0 is defined for the quartic potential")
    emit(cfg, render(COLUMNS["e0"], [_e0_row(cfg.g)], cfg.output_format))
    return EXIT_OK


def _heat_row(args) -> tuple:
    potential, g, theta, tol, spec = args
    p = make(potential, g)
    semi = series.specific_heat(p, theta, tol, provider="z2_over_q0")
    return (1.0 / theta, semi, series.classical_specific_heat(p, theta, tol),
            oracle.exact_specific_heat(spec, theta))


def cmd_heat(cfg: RunConfig) -> int:
    p = make(cfg.potential, cfg.g)
    spec = oracle.spectrum_for(p, min(cfg.theta_list))
    items = [(cfg.potential, cfg.g, t, cfg.tolerances, spec) for t in cfg.theta_list]
    emit(cfg, render(COLUMNS["heat"], _map(_heat_row, items, cfg.jobs), cfg.output_format))
    return EXIT_OK


def cmd_validate(cfg: RunConfig) -> int:
    try:
        checks = validate.run(list(cfg.only) or None, green_offset=cfg.green_offset)
    except KeyError as exc:
        raise ConfigError(exc.args[0]) from None
    lines = [f"{'PASS' if c.passed else 'FAIL'}  {c.suite}: {c.name} ({c.detail})" for c in checks]
    failed = [c for c in checks if not c.passed]
    lines.append(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    emit(cfg, "\n".join(lines) + "\n")
    if failed:
        for c in failed:
            print(f"failed: {c.suite}: {c.name}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


COMMANDS = {"partition": cmd_partition, "table1": cmd_table1, "heat": cmd_heat,
            "e0": cmd_e0, "validate": cmd_validate}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = make_config(args)
        return COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"semiseries: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NUMERIC_ERRORS as exc:
        print(f"semiseries: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"semiseries: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
