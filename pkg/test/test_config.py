from fractions import Fraction
import os
from pathlib import Path
import tempfile
import unittest
from unittest import mock

from startail import Constants, Format, ParameterError, RunConfig, make_constants
from startail.config import parse_config_text, parse_probability
from startail.const import ENV_OUTPUT_DIR


class ProbabilityTest(unittest.TestCase):

    def test_parse(self):
        self.assertEqual(parse_probability("1/3"), Fraction(1, 3))
        self.assertIsInstance(parse_probability("1/3"), Fraction)
        self.assertEqual(parse_probability("0.25"), 0.25)
        self.assertEqual(parse_probability("1"), 1.0)

    def test_invalid(self):
        for text in ("x", "1/0", "3/2", "-0.1", ""):
            with self.assertRaises(ParameterError):
                parse_probability(text)


class ConstantsTest(unittest.TestCase):

    def test_defaults(self):
        self.assertEqual(Constants(), (1.0, 1.0, 1.0, 1.0, 1.0))
        self.assertEqual(make_constants(b=2).b, 2.0)

    def test_invalid(self):
        with self.assertRaises(ParameterError):
            make_constants(e=1.0)
        with self.assertRaises(ParameterError):
            make_constants(c=0)


class ConfigTextTest(unittest.TestCase):

    def test_parse(self):
        text = "# run\nn = 10\n\np=1/2  # exact\nns=5,6\n"
        self.assertEqual(parse_config_text(text),
                         {"n": "10", "p": "1/2", "ns": "5,6"})

    def test_missing_separator(self):
        with self.assertRaises(ParameterError):
            parse_config_text("n=3\nnonsense\n")


class RunConfigTest(unittest.TestCase):

    def test_defaults(self):
        config = RunConfig({})
        self.assertEqual(config.get("r"), 2)
        self.assertEqual(config.get("seed"), 0)
        self.assertEqual(config.get("reps"), 1000)
        self.assertEqual(config.get("estimator"), "auto")
        self.assertNotIn("n", config)
        self.assertEqual(config.constants, Constants())

    def test_conversion(self):
        config = RunConfig({
            "n": "12", "p": "1/4", "ps": "1/2, 0.3", "format": "csv",
            "exact": "yes", "b": "3"})
        self.assertEqual(config.get("n"), 12)
        self.assertEqual(config.get("p"), Fraction(1, 4))
        self.assertEqual(config.get("ps"), [Fraction(1, 2), 0.3])
        self.assertIs(config.get("format"), Format.CSV)
        self.assertTrue(config.get("exact"))
        self.assertEqual(config.constants.b, 3.0)

    def test_invalid(self):
        for values in ({"m": "1"}, {"n": "ten"}, {"eps": "0"}, {"p": "2"},
                       {"xi": "1"}, {"seed": "-1"}, {"format": "xml"}):
            with self.assertRaises(ParameterError):
                RunConfig(values)

    def test_require(self):
        config = RunConfig({"n": 5})
        self.assertEqual(config.require("n"), 5)
        with self.assertRaisesRegex(ParameterError, "--threshold"):
            config.require("threshold")

    def test_load_merges_file_and_flags(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "run.cfg"
            path.write_text("n=7\np=0.5\nseed=3\n", encoding="utf-8")
            config = RunConfig.load({"n": "9", "p": None}, path)
        self.assertEqual(config.get("n"), 9)
        self.assertEqual(config.get("p"), 0.5)
        self.assertEqual(config.get("seed"), 3)

    def test_load_missing_file(self):
        with self.assertRaises(ParameterError):
            RunConfig.load({}, "/nonexistent/startail.cfg")

    def test_output_path(self):
        with mock.patch.dict(os.environ, {ENV_OUTPUT_DIR: ""}):
            self.assertIsNone(RunConfig({}).output_path("a.json"))
            self.assertEqual(RunConfig({"out": "b.json"}).output_path("a.json"),
                             Path("b.json"))
        with mock.patch.dict(os.environ, {ENV_OUTPUT_DIR: "/tmp/st"}):
            self.assertEqual(RunConfig({}).output_path("a.json"),
                             Path("/tmp/st/a.json"))

    def test_to_text(self):
        config = RunConfig({"n": "5", "p": "1/2", "eps": "0.5", "ns": "5,6"})
        lines = config.to_text().splitlines()
        self.assertEqual(lines, sorted(lines))
        self.assertIn("n=5", lines)
        self.assertIn("p=1/2", lines)
        self.assertIn("eps=0.5", lines)
        self.assertIn("ns=5,6", lines)
        self.assertIn("estimator=auto", lines)
