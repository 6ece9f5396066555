"""Experiment reports: metrics with standard errors, named verdicts, file emission."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
from dataclasses import dataclass, field


@dataclass
class Verdict:
    passed: bool
    criterion: str          # human-readable statement with the tolerance pinned
    observed: float | None = None
    tolerance: float | None = None

    def as_dict(self):
        return {"passed": bool(self.passed), "criterion": self.criterion,
                "observed": _jsonable(self.observed), "tolerance": _jsonable(self.tolerance)}


@dataclass
class ExperimentReport:
    experiment: str
    config: dict
    seed: int
    metrics: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)  # name -> {"columns": [...], "rows": [...]}

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts.values())

    @property
    def config_hash(self) -> str:
        blob = json.dumps(self.config, sort_keys=True, default=_jsonable).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def add_metric(self, name, value, se=None):
        entry = {"value": _jsonable(value)}
        if se is not None:
            entry["se"] = _jsonable(se)
        self.metrics[name] = entry

    def add_verdict(self, name, passed, criterion, observed=None, tolerance=None):
        self.verdicts[name] = Verdict(bool(passed), criterion, observed, tolerance)

    def add_table(self, name, columns, rows):
        self.tables[name] = {"columns": list(columns),
                             "rows": [[_jsonable(v) for v in r] for r in rows]}

    def as_dict(self):
        return {
            "experiment": self.experiment,
            "config": {k: _jsonable(v) for k, v in sorted(self.config.items())},
            "config_hash": self.config_hash,
            "seed": self.seed,
            "passed": self.passed,
            "metrics": dict(sorted(self.metrics.items())),
            "verdicts": {k: v.as_dict() for k, v in sorted(self.verdicts.items())},
        }


def _jsonable(v):
    import numpy as np
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, float) and v != v:
        return "nan"
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def atomic_write(path: str, data: bytes):
    """Write via a temp file and rename so readers never see partial output."""
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_report(report: ExperimentReport, out_dir: str, timing: dict | None = None):
    """Emit report.json (stable key order) and one CSV per table."""
    payload = report.as_dict()
    if timing:
        payload["timing"] = timing  # excluded from determinism comparisons
    blob = json.dumps(payload, indent=2, sort_keys=True).encode()
    atomic_write(os.path.join(out_dir, "%s_report.json" % report.experiment), blob)
    for name, tab in report.tables.items():
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")  # RFC 4180
        w.writerow(tab["columns"])
        w.writerows(tab["rows"])
        atomic_write(os.path.join(out_dir, "%s_%s.csv" % (report.experiment, name)),
                     buf.getvalue().encode())


def merge_reports(reports, out_dir: str, timing: dict | None = None) -> dict:
    """Combined report.json over several experiments, with per-table CSVs."""
    payload = {
        "experiments": {r.experiment: r.as_dict() for r in reports},
        "passed": all(r.passed for r in reports),
    }
    if timing:
        payload["timing"] = timing
    blob = json.dumps(payload, indent=2, sort_keys=True).encode()
    atomic_write(os.path.join(out_dir, "report.json"), blob)
    for r in reports:
        write_report(r, out_dir)
    return payload
