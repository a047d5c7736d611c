"""
Integration tests for pybrex.
Runs the command-line workflow end to end on the demo configurations.
"""
import asyncio
import os

import pytest

from pybrex.harness.cli import EXIT_OK, EXIT_SKIPPED, main
from pybrex.harness.configmanager import ConfigManager
from pybrex.harness.reports import read_report_csv
from pybrex.harness.result_store import ResultStore
from tests.fixtures.test_fixtures import write_ini


async def read_store(path):
    store = ResultStore(path)
    await store.initialize()
    try:
        runs = await store.list_runs()
        return runs, await store.get_trials(runs[0][0])
    finally:
        await store.close()


@pytest.mark.integration
class TestDemoWorkflow:

    def test_ls_gen_certify_verify(self, demo_config_dir, tmp_path):
        config = os.path.join(demo_config_dir, "ls_demo.ini")
        assert main(["--config", config, "--out", str(tmp_path / "gen"), "gen"]) == EXIT_OK
        assert main(["--config", config, "--out", str(tmp_path / "certify"), "certify"]) == EXIT_OK
        certificate = ConfigManager(str(tmp_path / "certify" / "certificate.ini"))
        assert certificate.get("certificate", "provenance") == "LS_LRIP"
        assert certificate.get_float("certificate", "C_K") > 0

        code = main(["--config", config, "--out", str(tmp_path / "verify"), "--threads", "2", "verify"])
        assert code in (EXIT_OK, EXIT_SKIPPED)
        rows = read_report_csv(str(tmp_path / "verify" / "report.csv"))
        if code == EXIT_OK:
            assert len(rows) == 5
        assert all(r["oracle_match"] == "1" for r in rows if r["certified"] == "1")

    def test_kl_verify(self, demo_config_dir, tmp_path):
        config = os.path.join(demo_config_dir, "kl_demo.ini")
        code = main(["--config", config, "--out", str(tmp_path), "verify"])
        assert code in (EXIT_OK, EXIT_SKIPPED)
        rows = read_report_csv(str(tmp_path / "report.csv"))
        assert all(r["oracle_match"] == "1" for r in rows if r["certified"] == "1")

    def test_file_instance_round_trip(self, demo_config_dir, tmp_path):
        """An instance written by gen can be read back through [problem] matrix / y and [truth] x_star."""
        gen_dir = tmp_path / "instance"
        assert main(["--config", os.path.join(demo_config_dir, "ls_demo.ini"), "--out", str(gen_dir), "gen"]) == EXIT_OK
        config = write_ini(tmp_path / "file.ini", {
            "problem": {"fidelity": "ls", "matrix": "instance/A.csv", "y": "instance/y.csv"},
            "truth": {"x_star": "instance/x_star.csv"},
            "certify": {"K": 4},
            "relaxation": {"lambda0": 0.05},
            "logging": {"level": "WARNING"},
        })
        assert main(["--config", config, "--out", str(tmp_path / "certify"), "certify"]) == EXIT_OK
        assert main(["--config", config, "--out", str(tmp_path / "solve"), "solve"]) == EXIT_OK
        assert os.path.exists(tmp_path / "solve" / "solution.csv")

    def test_verify_records_rows(self, demo_config_dir, tmp_path):
        cm = ConfigManager(os.path.join(demo_config_dir, "ls_demo.ini"))
        cm.set("output", "store", str(tmp_path / "trials.db"))
        cm.set("verify", "lambda0_list", "0.01, 0.02")
        config = str(tmp_path / "store.ini")
        cm.save_config(config)
        assert main(["--config", config, "--out", str(tmp_path / "out"), "verify"]) == EXIT_OK
        runs, trials = asyncio.run(read_store(str(tmp_path / "trials.db")))
        assert [r[1] for r in runs] == ["verify"]
        assert len(trials) == 2


@pytest.mark.integration
@pytest.mark.slow
class TestDemoSweep:

    def test_ls_sweep(self, demo_config_dir, tmp_path):
        config = os.path.join(demo_config_dir, "ls_demo.ini")
        assert main(["--config", config, "--out", str(tmp_path), "--threads", "4", "sweep"]) == EXIT_OK
        assert os.path.exists(tmp_path / "trials.csv")
        rows = read_report_csv(str(tmp_path / "report.csv"))
        assert all(r["oracle_match"] == "1" for r in rows if r["certified"] == "1")
