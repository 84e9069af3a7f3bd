"""Options and config assembly shared by every subcommand."""

from __future__ import annotations

import argparse
import logging
from typing import Any, Awaitable, Callable

from ..config import Settings
from ..core.application import Application
from ..core.errors import ConfigError
from ..models.polytope import Polytope
from ..models.settings import RunConfig, SweepConfig
from ..services.container import ServiceContainer
from ..systems.base import ExampleSystem

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

Handler = Callable[[argparse.Namespace, Application], Awaitable[int]]


def run_options() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--system", help="registered system name")
    parent.add_argument("--config", help="key = value run file; flags override its values")
    parent.add_argument("--eps", type=float, nargs="+", help="strictly decreasing eps values")
    parent.add_argument("--tau0", type=float, help="start of the comparison window")
    parent.add_argument("--T", dest="T", type=float, help="end of the comparison window")
    parent.add_argument("--out", help="output directory")
    parent.add_argument("--seed", type=int, help="seed for every sampling step")
    parent.add_argument("--samples", type=int, help="samples per manifold axis")
    parent.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="NAME=VALUE",
        help="override a model parameter (repeatable)",
    )
    parent.add_argument("--force", action="store_true", help="run even if the checks fail")
    parent.add_argument(
        "--no-timing", action="store_true",
        help="record wall_ms as 0 so the CSV is byte-identical across runs",
    )
    return parent


def parse_overrides(items: list[str]) -> dict[str, float]:
    overrides: dict[str, float] = {}
    for item in items:
        name, sep, raw = item.partition("=")
        if not sep or not name.strip():
            raise ConfigError(f"--set expects name=value, got {item!r}")
        try:
            overrides[name.strip()] = float(raw)
        except ValueError:
            raise ConfigError(f"--set {name.strip()}: {raw!r} is not a number") from None
    return overrides


def parse_box(text: str) -> Polytope:
    """``lo:hi,lo:hi,...`` into an axis-aligned box."""

    try:
        bounds = [tuple(float(v) for v in part.split(":")) for part in text.split(",")]
        if any(len(b) != 2 for b in bounds):
            raise ValueError("each axis needs lo:hi")
        return Polytope.box([b[0] for b in bounds], [b[1] for b in bounds], label="user-box")
    except ValueError as exc:
        raise ConfigError(f"bad --box {text!r}: {exc}") from exc


def build_config(args: argparse.Namespace, settings: Settings) -> RunConfig:
    """File values first, then flags; settings fill what neither gives."""

    if args.config:
        try:
            base = RunConfig.read(args.config)
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        data: dict[str, Any] = base.model_dump()
    else:
        data = {
            "output_dir": settings.output_dir,
            "seed": settings.seed,
            "sweep": SweepConfig(max_workers=settings.max_workers).model_dump(),
        }
    flags = {
        "system": args.system,
        "eps_list": args.eps,
        "tau0": args.tau0,
        "T": args.T,
        "output_dir": args.out,
        "seed": args.seed,
        "n_samples": args.samples,
    }
    data.update({k: v for k, v in flags.items() if v is not None})
    if args.overrides:
        data["overrides"] = {**data.get("overrides", {}), **parse_overrides(args.overrides)}
    if args.force:
        data["force"] = True
    if args.no_timing:
        data["timing"] = False
    if not data.get("system"):
        raise ConfigError("--system is required (or a config file naming one)")
    try:
        return RunConfig.model_validate(data)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def prepare(args: argparse.Namespace, app: Application) -> tuple[RunConfig, ServiceContainer, ExampleSystem]:
    config = build_config(args, app.settings)
    services = app.initialize(config)
    example = services.registry.get(config.system, config.overrides)
    logging.info("running %s on %s (seed %d)", args.command, example.name, config.seed)
    return config, services, example
