"""Report files: JSON lines, CSV summaries, and rendered figures.

A report is a JSON-lines file with three kinds of records:

    {"kind": "header", ...}    command, seed, version stamp, timestamp
    {"kind": "campaign", ...}  one record: scope, totals, pass/fail
    {"kind": "detail", ...}    one record per law / relation / subspace
    {"kind": "footer", ...}    elapsed seconds and final status

The header and footer carry everything that varies between runs
(timestamps, timing); the campaign and detail records in between are the
report body, and for a fixed command line and seed they are byte
identical across runs.  Summaries additionally land in a CSV with one row
per detail record, and a small set of matplotlib figures is rendered next
to the report when an output directory is used.
"""

from __future__ import annotations

import csv
import json
import subprocess
from datetime import datetime, timezone
from pathlib import Path
from typing import IO

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from . import __version__
from .campaigns import CampaignResult

REPORT_NAME = "report.jsonl"
SUMMARY_NAME = "summary.csv"


def version_stamp() -> str:
    """Package version, with the git commit appended when available."""
    root = Path(__file__).resolve().parents[2]
    try:
        head = subprocess.run(
            ["git", "-C", str(root), "rev-parse", "--short", "HEAD"],
            capture_output=True, text=True, timeout=5,
        )
        if head.returncode == 0:
            return f"{__version__}+g{head.stdout.strip()}"
    except OSError:
        pass
    return __version__


def _dump(record: dict) -> str:
    return json.dumps(record, separators=(", ", ": "), sort_keys=False)


def header_record(command: str, seed: int) -> dict:
    return {
        "kind": "header",
        "command": command,
        "seed": seed,
        "version": version_stamp(),
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }


def body_records(result: CampaignResult) -> list[dict]:
    c = result.campaign
    records = [{
        "kind": "campaign",
        "target": c.target,
        "scope": c.scope,
        "n": c.n,
        "mode": c.mode,
        "seed": c.seed,
        "jobs": c.jobs,
        "checked": result.checked,
        "failures": result.failures,
        "passed": result.passed,
        "counterexample": result.counterexample,
    }]
    for row in result.detail:
        records.append({"kind": "detail", **row})
    return records


def footer_record(result: CampaignResult) -> dict:
    return {
        "kind": "footer",
        "elapsed_s": round(result.elapsed, 3),
        "status": "pass" if result.passed else "fail",
    }


def write_report(fh: IO[str], command: str, result: CampaignResult) -> None:
    fh.write(_dump(header_record(command, result.campaign.seed)) + "\n")
    for record in body_records(result):
        fh.write(_dump(record) + "\n")
    fh.write(_dump(footer_record(result)) + "\n")


def write_summary_csv(fh: IO[str], detail: list[dict]) -> None:
    """One CSV row per detail record; columns follow first appearance."""
    if not detail:
        return
    fields: list[str] = []
    for row in detail:
        for key in row:
            if key not in fields:
                fields.append(key)
    writer = csv.DictWriter(fh, fieldnames=fields)
    writer.writeheader()
    for row in detail:
        flat = {}
        for key in fields:
            val = row.get(key)
            if isinstance(val, (list, tuple)):
                val = ";".join(str(v) for v in val)
            elif isinstance(val, dict):
                val = json.dumps(val, separators=(",", ":"))
            flat[key] = val
        writer.writerow(flat)


# --- figures ----------------------------------------------------------------


def _checked_figure(result: CampaignResult, path: Path) -> None:
    rows = result.detail
    names = [r["name"] for r in rows]
    checked = [r["checked"] for r in rows]
    colors = ["#2a7e43" if r["failures"] == 0 else "#b03030" for r in rows]
    height = max(2.5, 0.45 * len(rows) + 1.2)
    fig, ax = plt.subplots(figsize=(8, height))
    ypos = range(len(rows))
    ax.barh(ypos, checked, color=colors)
    ax.set_yticks(list(ypos), names, fontsize=8)
    ax.invert_yaxis()
    if max(checked) > 100 * max(1, min(checked)):
        ax.set_xscale("log")
    ax.set_xlabel("cases checked")
    c = result.campaign
    status = "pass" if result.passed else "FAIL"
    ax.set_title(f"{c.target} (scope={c.scope}, seed={c.seed}): {status}")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _sweep_figure(result: CampaignResult, path: Path) -> None:
    """Group / non-group counts of the quotients, by weight of lambda."""
    rows = result.detail
    weights = sorted({r["name"].count("1") for r in rows})
    groups = [sum(1 for r in rows if r["name"].count("1") == w and r["is_group"])
              for w in weights]
    others = [sum(1 for r in rows if r["name"].count("1") == w and not r["is_group"])
              for w in weights]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(weights, groups, label="group quotients", color="#2a7e43")
    ax.bar(weights, others, bottom=groups, label="proper loop quotients",
           color="#5470b0")
    ax.set_xlabel("weight of the characteristic vector")
    ax.set_ylabel("subspaces")
    ax.set_title(
        f"codimension-1 sweep: {sum(groups)} groups / "
        f"{sum(groups) + sum(others)} subspaces"
    )
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_figures(result: CampaignResult, outdir: Path) -> list[Path]:
    paths = []
    checked_path = outdir / "checked.png"
    _checked_figure(result, checked_path)
    paths.append(checked_path)
    if result.campaign.target == "codeloop-sweep":
        sweep_path = outdir / "sweep.png"
        _sweep_figure(result, sweep_path)
        paths.append(sweep_path)
    return paths


def emit(result: CampaignResult, command: str, outdir: Path | None,
         stdout: IO[str]) -> list[Path]:
    """Write the report where asked; returns the files created.

    With an output directory: report.jsonl, summary.csv, and figures land
    there.  Without one, the JSON lines go to stdout and nothing renders.
    """
    if outdir is None:
        write_report(stdout, command, result)
        return []
    outdir.mkdir(parents=True, exist_ok=True)
    report_path = outdir / REPORT_NAME
    with open(report_path, "w") as fh:
        write_report(fh, command, result)
    summary_path = outdir / SUMMARY_NAME
    with open(summary_path, "w", newline="") as fh:
        write_summary_csv(fh, result.detail)
    return [report_path, summary_path] + render_figures(result, outdir)
