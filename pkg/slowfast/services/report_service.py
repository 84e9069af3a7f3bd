"""Plain-text reports, CSV tables and run metadata."""

from __future__ import annotations

import csv
import io
import math
from typing import Any

from .. import __version__
from ..core.result import ConditionReport
from ..core.verdicts import Verdict
from ..models.settings import RunConfig
from ..models.trajectory import ConvergenceTable

CSV_COLUMNS = ("eps", "sup_err", "tail_err", "n_steps_full", "n_steps_reduced", "wall_ms")


def _number(value: float) -> str:
    return repr(float(value))


def _verdict_block(verdict: Verdict) -> list[str]:
    lines = [f"[{verdict.condition}]", f"status = {verdict.status}"]
    if verdict.samples:
        lines.append(f"samples = {verdict.samples}")
    if verdict.witness is not None:
        lines.append("witness = " + ", ".join(_number(v) for v in verdict.witness))
    for key, value in sorted(verdict.margins.items()):
        lines.append(f"margin.{key} = {_number(value)}")
    if verdict.detail:
        label = "detail" if verdict.passed else "reason"
        lines.append(f"{label} = {verdict.detail}")
    return lines


def render_report(report: ConditionReport) -> str:
    """One block per condition, then a ``[summary]`` key = value section."""

    blocks = [f"# condition report for {report.system}", ""]
    for verdict in report.verdicts:
        blocks.extend(_verdict_block(verdict))
        blocks.append("")
    skipped = [v.condition for v in report.verdicts if v.status == "skipped"]
    blocks.extend([
        "[summary]",
        f"system = {report.system}",
        f"seed = {report.seed}",
        f"ok = {str(report.ok).lower()}",
        f"failed = {', '.join(v.condition for v in report.failures)}",
        f"skipped = {', '.join(skipped)}",
        f"version = {__version__}",
    ])
    return "\n".join(blocks) + "\n"


def render_csv(table: ConvergenceTable) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in table.rows:
        writer.writerow([
            _number(row.eps), _number(row.sup_err), _number(row.tail_err),
            row.n_steps_full, row.n_steps_reduced, _number(row.wall_ms),
        ])
    return buffer.getvalue()


def render_summary(table: ConvergenceTable) -> str:
    slope = table.empirical_slope()
    lines = [
        f"# convergence summary for {table.system}",
        f"window = [{table.tau0!r}, {table.T!r}]",
        f"monotone = {str(table.monotone).lower()}",
        f"empirical_slope = {'nan' if math.isnan(slope) else repr(slope)}",
        "",
    ]
    for row in table.rows:
        if row.failed:
            lines.append(f"eps = {row.eps!r}: failed ({row.reason})")
        else:
            verdict = "ok" if table.row_ok(row) else "tail error grows"
            lines.append(
                f"eps = {row.eps!r}: sup {row.sup_err:.3e}, head {row.head_err:.3e}, "
                f"tail {row.tail_err:.3e} [{verdict}]"
            )
    lines.extend(["", f"ok = {str(table.ok).lower()}"])
    return "\n".join(lines) + "\n"


def run_metadata(config: RunConfig, command: str, summary: dict[str, Any]) -> dict[str, Any]:
    return {
        "command": command,
        "config": config.model_dump(),
        "seed": config.seed,
        "version": __version__,
        "summary": summary,
    }


def report_summary(report: ConditionReport) -> dict[str, Any]:
    return {
        "ok": report.ok,
        "verdicts": {v.condition: v.status for v in report.verdicts},
        "margins": report.margins,
    }


def table_summary(table: ConvergenceTable) -> dict[str, Any]:
    slope = table.empirical_slope()
    return {
        "ok": table.ok,
        "monotone": table.monotone,
        "empirical_slope": None if math.isnan(slope) else slope,
        "failed_rows": [row.eps for row in table.rows if row.failed],
    }
