"""Register all subcommands with the argument parser."""

from __future__ import annotations

import argparse

from . import catalog, conditions, convergence, reduction


def register_handlers(subparsers: argparse._SubParsersAction) -> None:
    catalog.register(subparsers)
    reduction.register(subparsers)
    conditions.register(subparsers)
    convergence.register(subparsers)
