"""``reduce``: build the reduced field and compare it with the closed form."""

from __future__ import annotations

import argparse

import numpy as np

from ..core.application import Application
from ..core.result import ConditionReport
from ..core.verdicts import Certified, Failed, Skipped
from ..services.reduction_service import check_projection, compare_oracle, reduced_rhs
from ..services.report_service import render_report, report_summary, run_metadata
from .common import EXIT_FAILED, EXIT_OK, prepare, run_options


async def handle_reduce(args: argparse.Namespace, app: Application) -> int:
    config, services, example = prepare(args, app)
    rng = np.random.default_rng(config.seed)
    mf = example.manifold
    field = services.reduction.reduce(example.system, example.decomposition)
    points = services.manifolds.sample(mf, config.n_samples, rng).points

    report = ConditionReport(system=example.name, seed=config.seed)
    check = services.reduction.verify(example.decomposition, example.system, points)
    if check.ok:
        report.add(Certified(
            condition="decomposition", samples=check.samples,
            detail=f"rank {check.rank_p}, residual {check.max_residual:.3e}",
        ))
    else:
        report.add(Failed(condition="decomposition", witness=check.worst_point, reason=check.reason))
    ambient = mf.region.sample_interior(min(100, max(2, config.n_samples)), rng)
    report.add(check_projection(field, ambient))
    if example.reduced_oracle is not None:
        report.add(compare_oracle(field, example.reduced_oracle, points))
    else:
        report.add(Skipped(condition="oracle", reason="no closed-form reduced system"))

    start = services.manifolds.project(example.system, mf, example.initial_state)
    q0 = reduced_rhs(field, start)
    print(f"{example.name}: m={example.dim}, r={example.r}, decomposition {example.decomposition.source}")
    print(f"projected initial state {start.tolist()}, q = {q0.tolist()}")
    services.store.write_text("reduce.txt", render_report(report))
    services.store.write_json("reduce.json", run_metadata(config, "reduce", report_summary(report)))
    for verdict in report.failures:
        print(f"{verdict.condition}: {verdict.detail} at {verdict.witness}")
    return EXIT_OK if report.ok else EXIT_FAILED


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(
        "reduce", parents=[run_options()], help="compute the reduced system and check it"
    )
    parser.set_defaults(handler=handle_reduce)
