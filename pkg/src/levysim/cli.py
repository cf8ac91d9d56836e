"""Command-line front end: ``simulate``, ``cf`` and ``validate``.

Exit codes: 0 success, 1 validation failure, 2 usage or configuration
error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError, InvalidModelError, MartingaleCorrectionUnavailable
from .models import DEFAULT_PARAMS, MODELS, make_model
from .pathsim import PathGrid, asset_path, simulate_batch
from .validate import run_suite

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3

# config-file key -> (attribute, parser)
_SCALAR_KEYS = {
    "model": ("model", str),
    "T": ("T", float),
    "N": ("N", int),
    "paths": ("paths", int),
    "seed": ("seed", int),
    "s0": ("s0", float),
    "rate": ("rate", float),
    "risk_neutral": ("risk_neutral", None),
    "mode": ("mode", str),
    "out": ("out", str),
    "format": ("format", str),
    "workers": ("workers", int),
    "t": ("t", float),
    "u_min": ("u_min", float),
    "u_max": ("u_max", float),
    "u_steps": ("u_steps", int),
    "n": ("n", int),
}


class ConfigError(Exception):
    """Invalid configuration; ``field`` names the offending key."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass
class RunConfig:
    model: str = "bm"
    params: dict = field(default_factory=dict)
    T: float = 1.0
    N: int = 252
    paths: int = 1
    seed: int = 0
    s0: float = 100.0
    rate: float = 0.0
    risk_neutral: bool = False
    mode: str = "process"
    out: Optional[str] = None
    format: str = "csv"
    workers: int = 1
    t: float = 1.0
    u_min: float = -10.0
    u_max: float = 10.0
    u_steps: int = 201
    n: int = 100_000


def _parse_bool(key, text):
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(key, f"expected a boolean, got {text!r}")


def _set(cfg: RunConfig, key: str, value: str):
    if key.startswith("param."):
        cfg.params[key[len("param."):]] = _parse_number(key, value)
        return
    if key not in _SCALAR_KEYS:
        raise ConfigError(key, "unknown configuration key")
    attr, conv = _SCALAR_KEYS[key]
    if conv is None:
        setattr(cfg, attr, _parse_bool(key, value))
        return
    try:
        setattr(cfg, attr, conv(value))
    except ValueError:
        raise ConfigError(key, f"cannot parse {value!r}") from None


def _parse_number(key, text):
    try:
        return float(text)
    except ValueError:
        raise ConfigError(key, f"expected a number, got {text!r}") from None


def read_config(path: str) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment.  Model parameters use ``param.<name>``."""
    entries = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}", "expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            entries[key] = value
    return entries


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value file; flags override it")
    common.add_argument("--model", help=f"one of {', '.join(MODELS)}")
    common.add_argument("--param", action="append", default=[], metavar="K=V",
                        help="model parameter, repeatable")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--rate", type=float)
    common.add_argument("--risk-neutral", action="store_true", default=None)

    p = argparse.ArgumentParser(prog="levysim", description="Levy process simulation")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", parents=[common], help="simulate paths to CSV/JSON")
    s.add_argument("--T", type=float)
    s.add_argument("--N", type=int)
    s.add_argument("--paths", type=int)
    s.add_argument("--s0", type=float)
    s.add_argument("--mode", choices=("process", "asset"))
    s.add_argument("--workers", type=int)

    c = sub.add_parser("cf", parents=[common], help="characteristic function on a u grid")
    c.add_argument("--t", type=float, help="horizon (default 1)")
    c.add_argument("--u-min", type=float)
    c.add_argument("--u-max", type=float)
    c.add_argument("--u-steps", type=int)

    v = sub.add_parser("validate", parents=[common], help="run the sampler validation suite")
    v.add_argument("--n", type=int, help="samples per check (default 1e5)")
    return p


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        for key, value in read_config(args.config).items():
            _set(cfg, key, value)
    for key in _SCALAR_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            setattr(cfg, _SCALAR_KEYS[key][0], value)
    for item in args.param:
        if "=" not in item:
            raise ConfigError("param", f"expected K=V, got {item!r}")
        k, v = item.split("=", 1)
        cfg.params[k.strip()] = _parse_number(k.strip(), v.strip())
    return cfg


def _spec(cfg: RunConfig):
    if cfg.model not in MODELS:
        raise ConfigError("model", f"unknown model {cfg.model!r}")
    spec = make_model(cfg.model, cfg.params)
    problems = spec.validate(risk_neutral=cfg.risk_neutral)
    if problems:
        raise InvalidModelError(problems)
    return spec


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write(cfg: RunConfig, text: str):
    if cfg.out is None:
        sys.stdout.write(text)
        return
    with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _table(header, columns, cfg: RunConfig, meta: dict) -> str:
    if cfg.format == "json":
        payload = dict(meta)
        payload["columns"] = {h: [float(v) for v in col] for h, col in zip(header, columns)}
        return json.dumps(payload, indent=1) + "\n"
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in zip(*columns):
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def cmd_simulate(cfg: RunConfig) -> int:
    if cfg.N < 1:
        raise ConfigError("N", "must be >= 1")
    if cfg.paths < 1:
        raise ConfigError("paths", "must be >= 1")
    if not cfg.T > 0:
        raise ConfigError("T", "must be positive")
    if cfg.mode not in ("process", "asset"):
        raise ConfigError("mode", "expected process or asset")
    if cfg.mode == "asset" and not cfg.s0 > 0:
        raise ConfigError("s0", "must be positive")
    spec = _spec(cfg)
    grid = PathGrid(cfg.T, cfg.N)
    batch = simulate_batch(spec, grid, cfg.paths, cfg.seed, workers=cfg.workers)
    if cfg.mode == "asset":
        cols = [asset_path(p, cfg.s0, cfg.rate, cfg.risk_neutral).s_values for p in batch]
    else:
        cols = [p.l_values for p in batch]
    header = ["t"] + [f"path_{k}" for k in range(cfg.paths)]
    meta = {"model": spec.describe(), "seed": cfg.seed, "mode": cfg.mode, "T": cfg.T, "N": cfg.N}
    _write(cfg, _table(header, [grid.times] + cols, cfg, meta))
    return EXIT_OK


def cmd_cf(cfg: RunConfig) -> int:
    if not cfg.u_min < cfg.u_max:
        raise ConfigError("u_min", "must be below u_max")
    if cfg.u_steps < 2:
        raise ConfigError("u_steps", "must be >= 2")
    if cfg.t < 0:
        raise ConfigError("t", "must be non-negative")
    spec = _spec(cfg)
    u = np.linspace(cfg.u_min, cfg.u_max, cfg.u_steps)
    phi = np.asarray(spec.char_function(u, cfg.t, risk_neutral=cfg.risk_neutral, rate=cfg.rate))
    meta = {"model": spec.describe(), "t": cfg.t, "risk_neutral": cfg.risk_neutral}
    _write(cfg, _table(["u", "re", "im"], [u, phi.real, phi.imag], cfg, meta))
    return EXIT_OK


def cmd_validate(cfg: RunConfig) -> int:
    names = list(MODELS) if cfg.model == "all" else [m.strip() for m in cfg.model.split(",")]
    for name in names:
        if name not in MODELS:
            raise ConfigError("model", f"unknown model {name!r}")
    if cfg.n < 10_000:
        raise ConfigError("n", "must be >= 10000")
    params = {names[0]: cfg.params} if cfg.params and len(names) == 1 else None
    if cfg.params and not params:
        raise ConfigError("param", "parameters need a single model filter")
    reports = run_suite(names, n=cfg.n, seed=cfg.seed, rate=cfg.rate if cfg.rate else 0.05, params=params)
    _write(cfg, "".join(r.to_line() + "\n" for r in reports))
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def main(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        if args.command == "validate" and args.model is None and not args.config:
            cfg.model = "all"
        handler = {"simulate": cmd_simulate, "cf": cmd_cf, "validate": cmd_validate}[args.command]
        return handler(cfg)
    except ConfigError as exc:
        print(f"levysim: config error in {exc.field!r}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InvalidModelError, MartingaleCorrectionUnavailable, DomainError) as exc:
        print(f"levysim: invalid model: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"levysim: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


def default_config_text() -> str:
    """Bundled defaults as a config file, one model per section comment."""
    lines = []
    for name, params in DEFAULT_PARAMS.items():
        lines.append(f"# {name}: " + " ".join(f"param.{k}={v!r}" for k, v in params.items()))
    return "\n".join(lines) + "\n"


if __name__ == "__main__":
    sys.exit(main())
