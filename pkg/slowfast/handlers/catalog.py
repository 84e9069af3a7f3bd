"""``list``: the registered example systems."""

from __future__ import annotations

import argparse

from ..core.application import Application
from .common import EXIT_OK

HEADER = ("name", "m", "r", "chart", "description")


def format_catalog(rows: list[tuple[str, int, int, str, str]]) -> str:
    table = [HEADER, *((name, str(m), str(r), chart, text) for name, m, r, chart, text in rows)]
    widths = [max(len(row[i]) for row in table) for i in range(len(HEADER) - 1)]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)) + "  " + row[-1] for row in table]
    return "\n".join(line.rstrip() for line in lines) + "\n"


async def handle_list(args: argparse.Namespace, app: Application) -> int:
    print(format_catalog(app.registry.rows()), end="")
    return EXIT_OK


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("list", help="list registered systems")
    parser.set_defaults(handler=handle_list)
