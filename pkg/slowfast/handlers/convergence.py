"""``converge``: full-versus-reduced sweeps over eps."""

from __future__ import annotations

import argparse

from ..core.application import Application
from ..services.report_service import (
    render_csv,
    render_report,
    render_summary,
    run_metadata,
    table_summary,
)
from .common import EXIT_FAILED, EXIT_OK, prepare, run_options


async def handle_converge(args: argparse.Namespace, app: Application) -> int:
    config, services, example = prepare(args, app)
    if not config.force:
        report = services.conditions.run_all(example, config.eps_list, config.n_samples, config.seed)
        services.store.write_text("report.txt", render_report(report))
        if not report.ok:
            failed = ", ".join(v.condition for v in report.failures)
            print(f"checks failed ({failed}); rerun with --force to sweep anyway")
            return EXIT_FAILED

    table = await services.convergence.sweep_example(
        example.system, example.reduced_field, example.manifold, example.initial_state,
        config.eps_list, config.tau0, config.T, timing=config.timing,
    )
    services.store.write_text("convergence.csv", render_csv(table))
    summary = render_summary(table)
    services.store.write_text("convergence.txt", summary)
    services.store.write_json("converge.json", run_metadata(config, "converge", table_summary(table)))
    print(summary, end="")
    return EXIT_OK if table.ok else EXIT_FAILED


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(
        "converge",
        parents=[run_options()],
        help="sweep eps and compare full and reduced flows",
        description=(
            "Sweep eps and compare full and reduced flows on [tau0, T]. "
            "The CSV records wall_ms, so repeated runs give identical bytes only with --no-timing."
        ),
    )
    parser.set_defaults(handler=handle_converge)
