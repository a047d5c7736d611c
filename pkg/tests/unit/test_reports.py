"""
Unit tests for report rows, report.csv and certificate.ini.
"""
import math

import pytest

from pybrex.harness.configmanager import ConfigManager
from pybrex.harness.reports import (
    REPORT_COLUMNS, RunReport, TrialRow, read_report_csv, write_certificate_ini, write_report_csv,
)
from pybrex.landscape.conditions import ConditionReport, ConditionResult
from pybrex.landscape.intervals import LambdaInterval
from tests.fixtures.test_fixtures import make_trial_row as make_row


@pytest.mark.unit
class TestTrialRow:

    def test_as_record(self):
        record = make_row().as_record()
        assert tuple(record) == REPORT_COLUMNS
        assert record["bf_support"] == "0 2"
        assert record["certified"] == 1
        assert record["lambda0"] == "0.5"
        assert record["seed"] == 11

    def test_missing_values_blank(self):
        row = TrialRow(trial=1, seed=3, lambda0=0.5, certified=False, interval_lo=math.inf, interval_hi=0.0)
        record = row.as_record()
        assert record["bf_support"] == "" and record["oracle_match"] == ""
        assert record["interval_lo"] == "inf"

    def test_violations(self):
        report = RunReport(command="verify", seed=0,
                           rows=[make_row(0.3), make_row(0.6, match=False), make_row(2.0, certified=False, match=False)])
        assert [r.lambda0 for r in report.violations] == [0.6]


@pytest.mark.unit
class TestReportFiles:

    def test_report_csv(self, tmp_path):
        path = str(tmp_path / "report.csv")
        write_report_csv(path, [make_row(0.3), make_row(0.6)])
        records = read_report_csv(path)
        assert len(records) == 2
        assert records[1]["lambda0"] == "0.59999999999999998"
        assert records[0]["oracle_match"] == "1"

    def test_certificate_ini(self, tmp_path):
        condition = ConditionReport(verdict=True, lambda0=0.5, C_K=0.81,
                                    conditions={"lambda_threshold": ConditionResult("lambda_threshold", True, 0.25)},
                                    oracle_in_region=True)
        report = RunReport(command="certify", seed=0,
                           certificate={"K": 4, "C_K": 0.81, "provenance": "LS_LRIP", "details": {"skip": 1}},
                           interval=LambdaInterval(0.1, 1.0, {"radius": 0.5, "work": object()}),
                           conditions=[condition])
        path = write_certificate_ini(str(tmp_path / "out" / "certificate.ini"), report)
        cm = ConfigManager(path)
        assert cm.get_int("certificate", "K") == 4
        assert cm.get_float("certificate", "C_K") == pytest.approx(0.81)
        assert cm.get("certificate", "provenance") == "LS_LRIP"
        assert not cm.has("certificate", "details")
        assert cm.get_bool("interval", "nonempty") is True
        assert cm.get_float("interval", "radius") == 0.5
        assert not cm.has("interval", "work")
        assert cm.get("conditions.0", "lambda_threshold") == "pass margin=0.25"
        assert cm.get_bool("conditions.0", "verdict") is True
