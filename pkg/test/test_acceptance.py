from fractions import Fraction
import json
import unittest

from startail.acceptance import (
    CHECKS, CheckResult, check_cluster_grid, check_determinism, check_iid,
    check_packing_union, check_phi, check_planting, check_sandwich,
    check_theta_diagnostics, check_variance, check_zc_tail, results_to_json)


class CheckResultTest(unittest.TestCase):

    def test_passed(self):
        self.assertTrue(CheckResult("a", 3, 0, "").passed)
        failed = CheckResult("b", 3, 1, "x")
        self.assertFalse(failed.passed)
        self.assertEqual(failed.to_dict()["violations"], 1)

    def test_required_count(self):
        short = CheckResult("a", 3, 0, "", required=5)
        self.assertFalse(short.passed)
        self.assertEqual(short.to_dict()["required"], 5)
        self.assertTrue(CheckResult("a", 5, 0, "", required=5).passed)

    def test_json(self):
        report = json.loads(results_to_json([
            CheckResult("a", 3, 0, ""), CheckResult("b", 2, 1, "")]))
        self.assertFalse(report["passed"])
        self.assertEqual([check["name"] for check in report["checks"]],
                         ["a", "b"])
        self.assertTrue(json.loads(results_to_json([]))["passed"])

    def test_suite_names(self):
        names = [name for name, _ in CHECKS]
        self.assertEqual(len(names), len(set(names)))
        self.assertIn("determinism", names)


class SmallChecksTest(unittest.TestCase):

    def assertPassed(self, result):
        self.assertGreater(result.checked, 0, result.name)
        self.assertTrue(result.passed, result.to_dict())

    def test_sandwich(self):
        result = check_sandwich(instances=40, seed=1)
        self.assertPassed(result)
        self.assertEqual(result.checked, 40)
        self.assertEqual(result.required, 40)

    def test_sandwich_short_of_target(self):
        result = check_sandwich(instances=40, seed=1, max_draws=10)
        self.assertEqual(result.violations, 0)
        self.assertLessEqual(result.checked, 10)
        self.assertFalse(result.passed)
        self.assertTrue(result.detail.startswith("10 draws"))

    def test_zc_tail(self):
        self.assertPassed(check_zc_tail(instances=20, seed=2))

    def test_cluster_grid(self):
        result = check_cluster_grid(ns=(5, 50, 400), rs=(2,))
        self.assertPassed(result)
        self.assertIn("complete_n0", result.detail)

    def test_planting(self):
        self.assertPassed(check_planting(max_n=4))

    def test_variance(self):
        result = check_variance(max_n=4)
        self.assertPassed(result)
        self.assertEqual(result.detail, "anchor 0.9375")

    def test_packing_union(self):
        self.assertPassed(check_packing_union(max_n=4, ps=(Fraction(1, 2),)))

    def test_phi(self):
        self.assertPassed(check_phi(points=200))

    def test_iid(self):
        result = check_iid(max_exact_n=3, samples=50, seed=3)
        self.assertPassed(result)
        self.assertEqual(result.checked, 50)
        self.assertIn("9 exact comparisons", result.detail)

    def test_iid_short_of_target(self):
        result = check_iid(max_exact_n=1, samples=50, seed=3, max_draws=20)
        self.assertLessEqual(result.checked, 20)
        self.assertFalse(result.passed)
        self.assertFalse(json.loads(results_to_json([result]))["passed"])

    def test_theta_diagnostics(self):
        self.assertPassed(check_theta_diagnostics(
            ns=(20, 50), ps=(0.1, 0.5), iid_ns=(20,), iid_ps=(0.1,),
            epss=(1.0,)))

    def test_determinism(self):
        self.assertPassed(check_determinism(seed=5))
