"""Estimate reports: per-block ratio tables with a declared pass criterion."""
from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from pathlib import Path


@dataclass
class EstimateReport:
    """Outcome of one numerical-estimate check.

    slope is the decay rate sigma in value ~ 2^{-sigma j} fitted on the log2
    scale (so the s=1 weighted-L2 bound 2^{-j/4} reports slope +1/4 and the
    s=0 bound 2^{+j/4} reports -1/4).
    """

    estimate_id: str
    rows: list = field(default_factory=list)     # dicts, one per j / case
    sup_ratio: float = float("nan")
    slope: float | None = None
    intercept: float | None = None
    slope_claimed: float | None = None
    slope_tol: float | None = None
    passed: bool = False
    criterion: str = ""
    runtime_s: float = 0.0
    extras: dict = field(default_factory=dict)

    def verdict(self) -> dict:
        return {
            "id": self.estimate_id,
            "sup_ratio": self.sup_ratio,
            "slope": self.slope,
            "pass": bool(self.passed),
        }

    def write(self, directory, stem: str | None = None) -> tuple:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        stem = stem or self.estimate_id.replace("/", "_")
        csv_path = d / f"{stem}.csv"
        if self.rows:
            keys = list(self.rows[0].keys())
            with open(csv_path, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(keys)
                for r in self.rows:
                    w.writerow([_fmt(r.get(k)) for k in keys])
        json_path = d / f"{stem}.json"
        payload = dict(self.verdict(), criterion=self.criterion,
                       slope_claimed=self.slope_claimed, slope_tol=self.slope_tol,
                       intercept=self.intercept, runtime_s=self.runtime_s,
                       extras=_jsonable(self.extras))
        json_path.write_text(json.dumps(payload, indent=1, sort_keys=True))
        return csv_path, json_path


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


def _jsonable(obj):
    import numpy as np

    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


class timed:
    """Context manager stamping runtime_s onto a report."""

    def __init__(self, report: EstimateReport):
        self.report = report

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self.report

    def __exit__(self, *exc):
        self.report.runtime_s = time.perf_counter() - self.t0
        return False
