from contextlib import redirect_stderr, redirect_stdout
import io
import json
import os
from pathlib import Path
import tempfile
import unittest
from unittest import mock

from startail.cli import EXIT_OK, EXIT_USAGE, run
from startail.const import ENV_OUTPUT_DIR
from startail.montecarlo import SWEEP_HEADER


class CliTest(unittest.TestCase):

    def setUp(self):
        patcher = mock.patch.dict(os.environ, {ENV_OUTPUT_DIR: ""})
        patcher.start()
        self.addCleanup(patcher.stop)

    def invoke(self, *argv):
        out, err = io.StringIO(), io.StringIO()
        with redirect_stdout(out), redirect_stderr(err):
            status = run(list(argv))
        return status, out.getvalue(), err.getvalue()

    def test_tail_exact(self):
        status, out, _ = self.invoke(
            "tail", "--exact", "--n", "3", "--p", "0.5", "--r", "2",
            "--threshold", "1")
        self.assertEqual(status, EXIT_OK)
        self.assertEqual(out, "0.5\n")

    def test_tail_json(self):
        status, out, _ = self.invoke(
            "tail", "--n", "3", "--p", "1/2", "--threshold", "3",
            "--format", "json")
        self.assertEqual(status, EXIT_OK)
        record = json.loads(out)
        self.assertEqual(record["tail"], 0.125)
        self.assertEqual(record["method"], "exact")

    def test_tail_mc(self):
        status, out, _ = self.invoke(
            "tail", "--estimator", "mc", "--n", "5", "--p", "1",
            "--threshold", "30", "--reps", "20", "--format", "json")
        self.assertEqual(status, EXIT_OK)
        record = json.loads(out)
        self.assertEqual(record["method"], "mc")
        self.assertEqual(record["estimate"]["hits"], 20)

    def test_sample(self):
        status, out, _ = self.invoke("sample", "--n", "5", "--p", "1")
        self.assertEqual(status, EXIT_OK)
        record = json.loads(out)
        self.assertEqual((record["edges"], record["stars"]), (10, 30))
        status, out, _ = self.invoke(
            "sample", "--n", "5", "--p", "0", "--format", "text")
        self.assertEqual(out, "5 0\n")

    def test_bounds(self):
        status, out, _ = self.invoke(
            "bounds", "--n", "50", "--p", "0.5", "--eps", "1")
        self.assertEqual(status, EXIT_OK)
        report = json.loads(out)
        self.assertEqual(report["kind"], "const_eps")
        self.assertIn("gate_passed", report["flags"])
        status, out, _ = self.invoke(
            "bounds", "--n", "50", "--p", "0.1", "--t", "20",
            "--format", "csv")
        self.assertEqual(status, EXIT_OK)
        self.assertEqual(out.splitlines()[0], "name,value,log_value,formula")

    def test_peel(self):
        status, out, _ = self.invoke(
            "peel", "--n", "6", "--p", "0", "--D", "1", "--t", "10")
        self.assertEqual(status, EXIT_OK)
        record = json.loads(out)
        self.assertEqual(record["verdict"], "holds")
        self.assertEqual(record["X"], 0)

    def test_peel_graph_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "star.txt"
            path.write_text("6 5\n0 1\n0 2\n0 3\n0 4\n0 5\n", encoding="utf-8")
            status, out, _ = self.invoke(
                "peel", "--graph", str(path), "--D", "2", "--t", "1000000")
        self.assertEqual(status, EXIT_OK)
        record = json.loads(out)
        self.assertEqual((record["X"], record["X_D"]), (10, 1))

    def test_construct(self):
        status, out, _ = self.invoke(
            "construct", "--n", "100", "--x", "10", "--p", "0.5")
        self.assertEqual(status, EXIT_OK)
        record = json.loads(out)
        self.assertEqual(record["construction"]["case"], "complete_n0")
        self.assertIn("log_lower_bound", record)

    def test_iidsum(self):
        status, out, _ = self.invoke(
            "iidsum", "--n", "2", "--p", "1/2", "--threshold", "1")
        self.assertEqual(status, EXIT_OK)
        record = json.loads(out)
        self.assertEqual(record["tail"], 0.4375)
        self.assertEqual(record["mean"], 0.5)

    def test_sweep_to_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "sweep.csv"
            status, out, _ = self.invoke(
                "sweep", "--ns", "5,6", "--ps", "1/2", "--epss", "0.5",
                "--exact", "--out", str(path))
            text = path.read_text(encoding="utf-8")
        self.assertEqual(status, EXIT_OK)
        self.assertEqual(out, "")
        lines = text.splitlines()
        self.assertEqual(lines[0], ",".join(SWEEP_HEADER))
        self.assertEqual(len(lines), 3)

    def test_output_dir(self):
        with tempfile.TemporaryDirectory() as tmp:
            with mock.patch.dict(os.environ, {ENV_OUTPUT_DIR: tmp}):
                status, _, _ = self.invoke(
                    "tail", "--exact", "--n", "3", "--p", "0.5",
                    "--threshold", "1")
            text = (Path(tmp) / "tail.txt").read_text(encoding="utf-8")
        self.assertEqual(status, EXIT_OK)
        self.assertEqual(text, "0.5\n")

    def test_config_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "run.cfg"
            path.write_text("n=3\np=1/2\nthreshold=3\n", encoding="utf-8")
            status, out, _ = self.invoke(
                "--config", str(path), "tail", "--exact")
        self.assertEqual(status, EXIT_OK)
        self.assertEqual(out, "0.125\n")

    def test_usage_errors(self):
        status, _, err = self.invoke("tail", "--exact", "--n", "3")
        self.assertEqual(status, EXIT_USAGE)
        self.assertIn("--p", err)
        status, _, _ = self.invoke("tail", "--n", "3", "--p", "2",
                                   "--threshold", "1")
        self.assertEqual(status, EXIT_USAGE)
        status, _, _ = self.invoke("nonsense")
        self.assertEqual(status, EXIT_USAGE)
        status, _, _ = self.invoke("tail", "--estimator", "magic", "--n", "3",
                                   "--p", "0.5", "--threshold", "1")
        self.assertEqual(status, EXIT_USAGE)
