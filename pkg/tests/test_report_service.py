from pathlib import Path

import numpy as np
import pytest

from slowfast.core.result import ConditionReport
from slowfast.core.verdicts import Certified, Failed, Skipped
from slowfast.data.storage import OutputStore
from slowfast.models.settings import RunConfig
from slowfast.models.trajectory import ConvergenceRow, ConvergenceTable
from slowfast.services.report_service import (
    render_csv,
    render_report,
    render_summary,
    report_summary,
    run_metadata,
    table_summary,
)


def sample_report() -> ConditionReport:
    report = ConditionReport(system="demo", seed=4)
    report.add(Certified(condition="TF0", margins={"rank_gap": 0.5}, samples=10, detail="rank 1 of 2"))
    report.add(Failed(
        condition="CIS", witness=[0.25, 0.5], reason="outward flux through face x2>=0.5",
        margins={"inward_flux": -0.5}, samples=32, extra={"face": "x2>=0.5"},
    ))
    report.add(Skipped(condition="LC", reason="no candidate"))
    return report


def test_report_blocks_and_summary():
    text = render_report(sample_report())
    assert text.startswith("# condition report for demo\n")
    assert "[CIS]\nstatus = failed\nsamples = 32\nwitness = 0.25, 0.5\nmargin.inward_flux = -0.5\n" in text
    assert "reason = outward flux through face x2>=0.5" in text
    assert "detail = rank 1 of 2" in text
    summary = text.split("[summary]\n")[1]
    assert "ok = false" in summary
    assert "failed = CIS" in summary
    assert "skipped = LC" in summary


def test_report_summary_collects_margins():
    summary = report_summary(sample_report())
    assert summary["ok"] is False
    assert summary["verdicts"] == {
        "TF0": "certified-at-samples", "CIS": "failed", "LC": "skipped",
    }
    assert summary["margins"] == {"TF0.rank_gap": 0.5, "CIS.inward_flux": -0.5}


def sample_table() -> ConvergenceTable:
    return ConvergenceTable(
        system="demo",
        rows=[
            ConvergenceRow(eps=0.1, sup_err=0.125, tail_err=1e-3, head_err=0.125, n_steps_full=40, n_steps_reduced=12),
            ConvergenceRow(eps=0.01, sup_err=0.0125, tail_err=1e-4, head_err=0.0125, n_steps_full=55, n_steps_reduced=12),
        ],
        tau0=0.1,
        T=5.0,
    )


def test_csv_uses_repr_floats():
    assert render_csv(sample_table()).splitlines() == [
        "eps,sup_err,tail_err,n_steps_full,n_steps_reduced,wall_ms",
        "0.1,0.125,0.001,40,12,0.0",
        "0.01,0.0125,0.0001,55,12,0.0",
    ]


def test_summary_text():
    text = render_summary(sample_table())
    assert "monotone = true" in text
    assert "empirical_slope = " in text
    assert text.rstrip().endswith("ok = true")
    summary = table_summary(sample_table())
    assert summary["failed_rows"] == []
    assert summary["empirical_slope"] == pytest.approx(1.0)


def test_store_writes_metadata(tmp_path):
    config = RunConfig(system="demo", eps_list=[0.1, 0.01])
    with OutputStore(tmp_path / "out") as store:
        path = store.write_json("meta.json", run_metadata(config, "check", {"z": np.array([1.0, 2.0])}))
        assert store.written == [path]
        data = store.read_json("meta.json")
    assert data["command"] == "check"
    assert data["config"]["eps_list"] == [0.1, 0.01]
    assert data["summary"]["z"] == [1.0, 2.0]
    assert data["version"]
    assert path.read_bytes().endswith(b"\n")


def test_store_serializes_tuples_and_paths(tmp_path):
    store = OutputStore(tmp_path)
    store.write_json("misc.json", {"witness": (0.5, 1.0), "where": Path("a/b")})
    assert store.read_json("misc.json") == {"witness": [0.5, 1.0], "where": "a/b"}
