# app/harness/reports.py
"""
Report files of one experiment. Everything is UTF-8 with LF line endings and
contains no timestamps, so the same config and master seed give byte-identical
files.

  curves.csv    method,sample_size,rate,stderr  (floats with 17 significant digits)
  runs.jsonl    one RunRecord per line, keys sorted
  config.json   the experiment config as run
  summary.json  experiment-specific summary, when there is one
  curves.svg    line chart of the curves, when requested
"""
import json
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Union

import pandas as pd

from app.harness.schema import ExperimentResult, RejectionCurve, RunRecord
from app.harness.svg import render_curves
from app.utils.logger import get_logger

logger = get_logger()

CURVE_COLUMNS = ["method", "sample_size", "rate", "stderr"]
FLOAT_FORMAT = "%.17g"


def curves_frame(curves: Iterable[RejectionCurve]) -> pd.DataFrame:
    rows = [
        (curve.method, n, rate, se)
        for curve in curves
        for n, rate, se in zip(curve.sample_sizes, curve.rejection_rates, curve.stderr)
    ]
    return pd.DataFrame(rows, columns=CURVE_COLUMNS)


def write_curves_csv(curves: Iterable[RejectionCurve], path: Union[str, Path]) -> Path:
    path = Path(path)
    curves_frame(curves).to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n",
                                encoding="utf-8")
    return path


def read_curves_csv(path: Union[str, Path]) -> pd.DataFrame:
    return pd.read_csv(path, dtype={"method": str, "sample_size": "int64", "rate": float, "stderr": float})


def _dumps(payload) -> str:
    return json.dumps(payload, sort_keys=True, ensure_ascii=False)


def write_runs_jsonl(runs: Iterable[RunRecord], path: Union[str, Path]) -> Path:
    """The per-run ledger; a run's batch rows carry lambda, log increment, log E and rejection"""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for run in runs:
            f.write(_dumps(run.model_dump(mode="json")) + "\n")
    return path


def _write_json(payload, path: Path) -> Path:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n")
    return path


def emit_reports(result: ExperimentResult, output_dir: Union[str, Path],
                 svg: Optional[bool] = None) -> Dict[str, Path]:
    """Write all report files of ``result``; returns them by kind"""
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "curves": write_curves_csv(result.curves, out / "curves.csv"),
        "runs": write_runs_jsonl(result.runs, out / "runs.jsonl"),
        "config": _write_json(result.config.model_dump(mode="json"), out / "config.json"),
    }
    if result.summary:
        files["summary"] = _write_json(result.summary, out / "summary.json")
    if (result.config.svg if svg is None else svg) and result.curves:
        x_label = "batches" if result.config.kind == "inflation_demo" else "sample size"
        chart = render_curves(result.curves, title=result.config.kind, x_label=x_label, alpha=result.config.alpha)
        files["svg"] = out / "curves.svg"
        with open(files["svg"], "w", encoding="utf-8", newline="\n") as f:
            f.write(chart)
    for kind, path in files.items():
        logger.info(f"Wrote {kind} report to {path}")
    return files


def curves_from_frame(frame: pd.DataFrame, replications: int) -> List[RejectionCurve]:
    """Rebuild curves from a re-parsed curves.csv"""
    curves = []
    for method, group in frame.groupby("method", sort=False):
        curves.append(RejectionCurve(
            method=method,
            sample_sizes=[int(n) for n in group["sample_size"]],
            rejection_rates=[float(r) for r in group["rate"]],
            stderr=[float(s) for s in group["stderr"]],
            replications=replications,
        ))
    return curves
