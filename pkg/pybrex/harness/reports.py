"""
Machine-readable run reports: trial rows for report.csv and the certificate summary.
"""
import csv
import logging
import math
import os
from dataclasses import dataclass, field, asdict
from typing import Optional

import numpy as np

from pybrex.harness.configmanager import ConfigManager
from pybrex.harness.matrix_io import FLOAT_FORMAT

logger = logging.getLogger(__name__)

REPORT_COLUMNS = (
    "trial", "seed", "lambda0", "certified", "interval_lo", "interval_hi",
    "bf_support", "bf_objective", "oracle_match", "solver_objective", "solver_critical",
)

SKIPPED = "skipped"
PASSED = "passed"
VIOLATED = "violated"


@dataclass(frozen=True)
class TrialRow:
    trial: int
    seed: int
    lambda0: float
    certified: bool
    interval_lo: float
    interval_hi: float
    bf_support: Optional[tuple] = None
    bf_objective: Optional[float] = None
    oracle_match: Optional[bool] = None
    solver_objective: Optional[float] = None
    solver_critical: Optional[bool] = None

    def as_record(self):
        def fmt(v):
            if v is None:
                return ""
            if isinstance(v, bool):
                return int(v)
            if isinstance(v, float):
                return FLOAT_FORMAT % v
            if isinstance(v, tuple):
                return " ".join(str(i) for i in v)
            return v
        return {k: fmt(v) for k, v in asdict(self).items()}


@dataclass
class RunReport:
    command: str
    seed: int
    certificate: dict = field(default_factory=dict)
    interval: Optional[object] = None
    lambda0_values: list = field(default_factory=list)
    rows: list = field(default_factory=list)
    solver_results: list = field(default_factory=list)
    conditions: list = field(default_factory=list)
    status: str = PASSED
    timings: dict = field(default_factory=dict)

    @property
    def violations(self):
        return [r for r in self.rows if r.certified and r.oracle_match is False]


def write_report_csv(path, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=REPORT_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row.as_record())
    logger.info(f"wrote {len(rows)} rows to {path}")


def read_report_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def _flat(value):
    if isinstance(value, np.ndarray):
        return ",".join(FLOAT_FORMAT % v for v in value.ravel())
    if isinstance(value, float):
        return FLOAT_FORMAT % value if math.isfinite(value) else str(value)
    return str(value)


def write_certificate_ini(path, report):
    """certificate.ini: the BRSC summary, the interval and each checked condition."""
    cm = ConfigManager(path, sections={})
    for key, value in report.certificate.items():
        if isinstance(value, (dict, list, tuple)) or value is None:
            continue
        cm.set("certificate", key, _flat(value))
    if report.interval is not None:
        cm.set("interval", "lower", _flat(float(report.interval.lower)))
        cm.set("interval", "upper", _flat(float(report.interval.upper)))
        cm.set("interval", "nonempty", report.interval.nonempty)
        for key, value in report.interval.diagnostics.items():
            if isinstance(value, (int, float, str)):
                cm.set("interval", key, _flat(value))
    for k, cond in enumerate(report.conditions):
        section = f"conditions.{k}"
        cm.set(section, "lambda0", _flat(float(cond.lambda0)))
        cm.set(section, "verdict", cond.verdict)
        for name, result in cond.conditions.items():
            cm.set(section, name, f"{'pass' if result.passed else 'fail'} margin={_flat(float(result.margin))}")
        if cond.oracle_in_region is not None:
            cm.set(section, "oracle_in_region", cond.oracle_in_region)
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    cm.save_config()
    return path


def write_solution_csv(path, result):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "x"])
        for i, v in enumerate(result.x):
            writer.writerow([i, FLOAT_FORMAT % v])
    logger.info(f"solution written to {path}")
