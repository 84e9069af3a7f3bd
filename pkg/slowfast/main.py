"""Entry point for the ``slowfast`` command."""

from __future__ import annotations

import argparse
import asyncio
import logging
import sys
from typing import Sequence

from . import __version__
from .config import get_settings
from .core.application import Application
from .core.errors import ConfigError, SlowFastError, UnknownSystem
from .handlers import register_handlers
from .handlers.common import EXIT_FAILED, EXIT_USAGE
from .systems.registry import ExampleRegistry


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slowfast", description="Tikhonov-Fenichel reduction with convergence checks."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    register_handlers(subparsers)
    return parser


async def main(argv: Sequence[str] | None = None, registry: ExampleRegistry | None = None) -> int:
    """Configure logging, parse arguments and dispatch to the subcommand handler."""

    settings = get_settings()
    logging.basicConfig(
        level=settings.log_level,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
    )
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    app = Application(settings=settings, registry=registry)
    try:
        return await args.handler(args, app)
    except (ConfigError, UnknownSystem) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SlowFastError as exc:
        logging.warning("%s failed", args.command, exc_info=exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except Exception as exc:  # noqa: BLE001
        logging.error("%s crashed", args.command, exc_info=exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED


def run() -> None:
    """Synchronous wrapper used by CLI."""

    sys.exit(asyncio.run(main()))


if __name__ == "__main__":
    run()
