"""``check`` and ``lyapunov``: hypothesis checks and stability certificates."""

from __future__ import annotations

import argparse
import logging

import numpy as np

from ..core.application import Application
from ..core.errors import CertificateError, MultipleEquilibria, NotLinearlyStable
from ..core.result import ConditionReport
from ..core.verdicts import Certified, Failed, Skipped
from ..services.lyapunov_service import check_envelope
from ..services.reduction_service import reduced_rhs
from ..services.report_service import render_report, report_summary, run_metadata
from .common import EXIT_FAILED, EXIT_OK, parse_box, prepare, run_options


def _print_failures(report: ConditionReport) -> None:
    for verdict in report.failures:
        print(f"{verdict.condition} {verdict.status}: {verdict.detail}")
        if verdict.witness is not None:
            print(f"  witness: {list(verdict.witness)}")
            face = verdict.extra.get("face")
            if face:
                print(f"  face: {face}")


async def handle_check(args: argparse.Namespace, app: Application) -> int:
    config, services, example = prepare(args, app)
    region = parse_box(args.box) if args.box else None
    report = services.conditions.run_all(
        example, config.eps_list, n_samples=config.n_samples, seed=config.seed, cis_region=region
    )
    services.store.write_text("report.txt", render_report(report))
    services.store.write_json("check.json", run_metadata(config, "check", report_summary(report)))
    for verdict in report.verdicts:
        if verdict.status == "skipped":
            print(f"{verdict.condition} skipped: {verdict.detail}")
    _print_failures(report)
    logging.info("check %s: %s", example.name, "ok" if report.ok else "failed")
    return EXIT_OK if report.ok else EXIT_FAILED


async def handle_lyapunov(args: argparse.Namespace, app: Application) -> int:
    config, services, example = prepare(args, app)
    rng = np.random.default_rng(config.seed)
    mf = example.manifold
    field = example.reduced_field
    report = ConditionReport(system=example.name, seed=config.seed)
    points = services.manifolds.sample(mf, config.n_samples, rng).points
    roots = services.conditions.stationary_points(example, points)
    if len(roots) != 1:
        report.add(Failed(
            condition="stationary", witness=roots[1] if roots else example.initial_state,
            reason=f"{len(roots)} stationary points, expected exactly one",
        ))
    else:
        z = roots[0]
        report.add(Certified(condition="stationary", detail=f"z = {z.tolist()}"))
        try:
            cert = services.conditions.certificate(example, field, z, config.n_samples, rng)
        except (NotLinearlyStable, CertificateError) as exc:
            report.add(Failed(condition="LC", witness=z, reason=str(exc)))
            cert = None
        except MultipleEquilibria as exc:
            report.add(Failed(condition="LC", witness=exc.witness, reason=str(exc)))
            cert = None
        else:
            if cert is None:
                report.add(Skipped(condition="LC", reason="no Lyapunov candidate"))
        if cert is not None:
            report.add(services.lyapunov.verify(cert, field, mf, config.n_samples, rng))
            start = services.manifolds.project(example.system, mf, example.initial_state)
            trajectory = services.integration.run(
                lambda x: reduced_rhs(field, x), start, (0.0, config.T), method="explicit"
            )
            report.add(check_envelope(cert, trajectory))
            print(
                f"certificate ({cert.source}): nu={cert.nu:.6g}, a={cert.a}, k={cert.k:g}, "
                f"c1={cert.c1:.6g}, c2={cert.c2:.6g}, rho={cert.rho:.6g}"
            )
    services.store.write_text("lyapunov.txt", render_report(report))
    services.store.write_json("lyapunov.json", run_metadata(config, "lyapunov", report_summary(report)))
    _print_failures(report)
    return EXIT_OK if report.ok else EXIT_FAILED


def register(subparsers: argparse._SubParsersAction) -> None:
    check = subparsers.add_parser(
        "check", parents=[run_options()], help="check TF0/TFI/TFII, GP, CIS and LC at samples"
    )
    check.add_argument("--box", help="replace the invariant region by lo:hi,lo:hi,... for CIS")
    check.set_defaults(handler=handle_check)
    lyapunov = subparsers.add_parser(
        "lyapunov", parents=[run_options()], help="build and verify a Lyapunov certificate"
    )
    lyapunov.set_defaults(handler=handle_lyapunov)
