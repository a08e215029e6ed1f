import io
import json
import re

import pytest

from triality import campaigns, reporting
from triality.campaigns import EXHAUSTIVE, Campaign


@pytest.fixture(scope="module")
def result():
    return campaigns.run_campaign(Campaign("triality", 10_000, seed=21))


def test_version_stamp():
    stamp = reporting.version_stamp()
    assert re.fullmatch(r"\d+\.\d+\.\d+(\+g[0-9a-f]+)?", stamp)


def test_report_structure(result):
    buf = io.StringIO()
    reporting.write_report(buf, "verify triality", result)
    lines = buf.getvalue().strip().splitlines()
    records = [json.loads(line) for line in lines]
    kinds = [r["kind"] for r in records]
    assert kinds[0] == "header"
    assert kinds[1] == "campaign"
    assert kinds[-1] == "footer"
    assert all(k == "detail" for k in kinds[2:-1])
    header = records[0]
    assert header["command"] == "verify triality"
    assert header["seed"] == 21
    assert "timestamp" in header
    campaign = records[1]
    assert campaign["target"] == "triality"
    assert campaign["passed"] is True
    footer = records[-1]
    assert footer["status"] == "pass"
    assert footer["elapsed_s"] >= 0


def test_report_body_reproducible(result):
    # timestamps live only in the header/footer; bodies must match bytewise
    first = [json.dumps(r) for r in reporting.body_records(result)]
    again = campaigns.run_campaign(Campaign("triality", 10_000, seed=21))
    second = [json.dumps(r) for r in reporting.body_records(again)]
    assert first == second


def test_summary_csv(result):
    buf = io.StringIO()
    reporting.write_summary_csv(buf, result.detail)
    lines = buf.getvalue().strip().splitlines()
    header = lines[0].split(",")
    assert header[:4] == ["name", "mode", "checked", "failures"]
    assert len(lines) == len(result.detail) + 1
    empty = io.StringIO()
    reporting.write_summary_csv(empty, [])
    assert empty.getvalue() == ""


def test_summary_csv_flattens_structures():
    buf = io.StringIO()
    rows = [{"name": "x", "vals": [1, 2, 3], "extra": {"a": 1}}]
    reporting.write_summary_csv(buf, rows)
    body = buf.getvalue()
    assert "1;2;3" in body
    assert '"{""a"":1}"' in body


def test_emit_to_stdout(result):
    buf = io.StringIO()
    files = reporting.emit(result, "verify triality", None, buf)
    assert files == []
    assert buf.getvalue().count("\n") == len(result.detail) + 3


def test_emit_to_directory(tmp_path, result):
    files = reporting.emit(result, "verify triality", tmp_path / "out", io.StringIO())
    names = [p.name for p in files]
    assert names == ["report.jsonl", "summary.csv", "checked.png"]
    for p in files:
        assert p.exists() and p.stat().st_size > 0
    # png signature
    with open(files[2], "rb") as fh:
        assert fh.read(8) == b"\x89PNG\r\n\x1a\n"


def test_sweep_figure_rendered(tmp_path):
    result = campaigns.run_campaign(Campaign("codeloop-sweep", EXHAUSTIVE))
    files = reporting.emit(result, "codeloop sweep", tmp_path, io.StringIO())
    assert [p.name for p in files] == [
        "report.jsonl", "summary.csv", "checked.png", "sweep.png"
    ]
    rows = result.detail
    assert len(rows) == 127
    assert sum(1 for r in rows if r["is_group"]) == 63
