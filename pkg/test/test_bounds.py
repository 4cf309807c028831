from fractions import Fraction
import json
import math
import unittest

from hypothesis import given, strategies as st

from startail import (
    BoundReport, GateStatus, ParameterError, RegimeCase, bounded_star_tail_bound,
    chernoff_phi, deviation_scale_M, exact_variance_bruteforce,
    exponent_const_eps, exponent_eps, exponent_psi, packing_gate,
    packing_tail_bound, packing_union_bound, phi_inequalities,
    pipeline_const_eps, pipeline_general, regime_simplify, star_mean,
    star_variance, zc_tail_bound)
from startail.bounds import (
    dyadic_levels, event_threshold, level_count, max_star_count,
    tier_boundary, variance_ratio)
from startail.config import Constants

H = Fraction(1, 2)


class MomentTest(unittest.TestCase):

    def test_mean(self):
        self.assertEqual(max_star_count(5, 2), 30)
        self.assertEqual(max_star_count(2, 2), 0)
        self.assertEqual(star_mean(3, H, 2), Fraction(3, 4))
        self.assertAlmostEqual(star_mean(10, 0.1, 3), 10 * 84 * 1e-3)

    def test_variance_anchor(self):
        self.assertEqual(star_variance(3, H, 2), Fraction(15, 16))

    def test_variance_matches_enumeration(self):
        for n in range(2, 7):
            for r in (2, 3):
                for p in (H, Fraction(1, 3), Fraction(9, 10)):
                    self.assertEqual(
                        star_variance(n, p, r),
                        exact_variance_bruteforce(n, p, r), (n, p, r))

    def test_variance_degenerate(self):
        self.assertEqual(star_variance(6, 0, 2), 0)
        self.assertEqual(star_variance(6, 1, 2), 0)

    def test_variance_ratio(self):
        self.assertAlmostEqual(variance_ratio(3, 0.5, 2), 1.0)
        with self.assertRaises(ParameterError):
            variance_ratio(3, 1, 2)
        with self.assertRaises(ParameterError):
            variance_ratio(3, 0, 2)


class PhiTest(unittest.TestCase):

    def test_values(self):
        self.assertEqual(chernoff_phi(0), 0)
        self.assertAlmostEqual(chernoff_phi(1), 2 * math.log(2) - 1)
        self.assertAlmostEqual(
            chernoff_phi(0.999e-3), chernoff_phi(1.001e-3), delta=1e-9)
        self.assertAlmostEqual(chernoff_phi(1e-4) / 5e-9, 1, places=4)
        with self.assertRaises(ParameterError):
            chernoff_phi(-1)

    def test_inequalities_grid(self):
        for exponent in range(-60, 61):
            x = 10 ** (exponent / 10)
            check = phi_inequalities(x)
            self.assertTrue(check.holds, check)
            self.assertEqual(check.log_lower is None, x < math.exp(2))

    @given(st.floats(1e-100, 1e9))
    def test_inequalities(self, x):
        self.assertTrue(phi_inequalities(x).holds)

    def test_small_eps(self):
        n, p, r, eps = 50, 0.5, 2, 1e-3
        mu = float(star_mean(n, p, r))
        var = float(star_variance(n, p, r))
        ratio = exponent_eps(n, p, r, eps) / (eps * eps * mu * mu / (2 * var))
        self.assertAlmostEqual(ratio, 1, places=3)


class ExponentTest(unittest.TestCase):

    def test_deviation_scale(self):
        self.assertAlmostEqual(deviation_scale_M(8, 10, 3), 2)
        self.assertAlmostEqual(deviation_scale_M(1000, 10, 2), 100)
        with self.assertRaises(ParameterError):
            deviation_scale_M(0, 10, 2)

    def test_const_eps(self):
        expected = min(0.75, math.sqrt(0.75) * math.log(2))
        self.assertAlmostEqual(exponent_const_eps(3, 0.5, 2), expected)
        self.assertEqual(exponent_const_eps(2, 0.5, 2), 0)
        with self.assertRaises(ParameterError):
            exponent_const_eps(3, 0, 2)

    def test_psi(self):
        self.assertAlmostEqual(exponent_psi(3, 0.5, 2, 1), 16 / 15)
        self.assertAlmostEqual(
            exponent_psi(3, 0.5, 2, 1, variance=100),
            min(1 / 100, 1 + math.log(2)))
        with self.assertRaises(ParameterError):
            exponent_psi(3, 0.5, 2, 1, variance=0)


class TailBoundTest(unittest.TestCase):

    def test_zc(self):
        bound = zc_tail_bound(1, 1, 1)
        self.assertAlmostEqual(bound.first, math.exp(1 - 2 * math.log(2)))
        self.assertAlmostEqual(bound.second, math.exp(-0.25))
        self.assertAlmostEqual(bound.log_second, -0.25)
        with self.assertRaises(ParameterError):
            zc_tail_bound(0, 1, 1)

    @given(st.floats(1e-3, 1e6), st.floats(1, 1e3), st.floats(1e-3, 1e6))
    def test_sharp_form_is_smaller(self, mu, C, t):
        bound = zc_tail_bound(mu, C, t)
        self.assertLessEqual(bound.log_first, bound.log_second)

    def test_bounded_star(self):
        bound = bounded_star_tail_bound(4, 2, 2, 2)
        self.assertAlmostEqual(bound.log_first, -chernoff_phi(0.5) * 4 / 32)
        self.assertAlmostEqual(bound.log_second, -1 / 96)
        self.assertLessEqual(bound.first, 1)

    def test_gate(self):
        gate = packing_gate(10, 0.01, 100)
        self.assertIs(gate.status, GateStatus.PASSED)
        self.assertAlmostEqual(gate.log_rhs, -8 * math.log(10))
        self.assertIs(packing_gate(10, 0.5, 2).status, GateStatus.FAILED)
        self.assertEqual(packing_gate(10, 0, 2).log_lhs, -math.inf)

    def test_packing_tail(self):
        failed = packing_tail_bound(10, 0.5, 2, 0, 1)
        self.assertIs(failed.gate, GateStatus.FAILED)
        self.assertIsNone(failed.value)
        beyond = packing_tail_bound(10, 0.01, 100, 0, 1)
        self.assertEqual(beyond.value, 0)
        inside = packing_tail_bound(1000, 0.001, 100, 1, 2)
        expected = (-3 * math.log(1000)
                    + 2 * 200 / 2 * (math.log(1) - 1 - math.log(200)))
        self.assertAlmostEqual(inside.log_value, expected)

    def test_union_bound(self):
        self.assertAlmostEqual(packing_union_bound(3, 0.5, 2, 1), 2.25)
        self.assertEqual(packing_union_bound(3, 0.5, 2, 0), 1)
        self.assertEqual(packing_union_bound(3, 0.5, 4, 1), 0)
        self.assertEqual(packing_union_bound(3, 0, 2, 1), 0)


class LevelTest(unittest.TestCase):

    def test_levels(self):
        self.assertEqual(dyadic_levels(3, 20), [3, 6, 12])
        self.assertEqual(dyadic_levels(30, 20), [])
        self.assertEqual(level_count(3, 20), 3)
        self.assertEqual(level_count(3, 2), 0)
        self.assertEqual(level_count(3, 12), 2)

    def test_thresholds(self):
        self.assertAlmostEqual(event_threshold(10, 2, 1 / 32), 10 / 64)
        self.assertAlmostEqual(event_threshold(10, 2, 1 / 32, 4, 5), 40 / 64)
        self.assertAlmostEqual(event_threshold(10, 8, 1 / 32, 4, 5), 10 / 256)
        self.assertAlmostEqual(tier_boundary(16, 4, 3), 8)


class BoundReportTest(unittest.TestCase):

    def test_scalars(self):
        report = BoundReport("demo", {"p": H})
        self.assertEqual(report.add("a", 2, "a = 2"), 2)
        report.add_log("b", -1000, "b = e^-1000")
        report.add("c", -1, "c = -1")
        self.assertIn("a", report)
        self.assertNotIn("d", report)
        self.assertEqual(report["b"], 0)
        self.assertEqual(report.log_value("b"), -1000)
        self.assertAlmostEqual(report.log_value("a"), math.log(2))
        self.assertIsNone(report.log_value("c"))
        data = json.loads(report.to_json())
        self.assertEqual(data["inputs"], {"p": 0.5})
        self.assertEqual([row["name"] for row in data["scalars"]],
                         ["a", "b", "c"])
        self.assertEqual(data["scalars"][0]["formula"], "a = 2")
        self.assertEqual(report.rows()[2], ["c", "-1", "", "c = -1"])


class ConstEpsPipelineTest(unittest.TestCase):

    def test_small_instance(self):
        report = pipeline_const_eps(3, 0.5, 2, 1.0)
        self.assertAlmostEqual(report["mu"], 0.75)
        self.assertAlmostEqual(report["gamma"], 1 / 32)
        self.assertAlmostEqual(report["A"], 256)
        self.assertAlmostEqual(report["s"], 1 + math.log(2) / 32)
        self.assertAlmostEqual(report["D"], 256)
        self.assertAlmostEqual(report["C"], 1024)
        self.assertEqual(report["J"], 0)
        self.assertAlmostEqual(
            report["total_unclamped"],
            report["term_bounded"] + report["term_event"])
        self.assertLessEqual(report["total"], 1)
        self.assertLessEqual(report["best"], report["markov"])
        self.assertAlmostEqual(report["markov"], 0.5)
        self.assertTrue(report.flags["range_lower"])
        self.assertTrue(report.flags["range_upper"])
        self.assertTrue(report.flags["n_at_least_n0"])

    def test_gate_and_rigorous_total(self):
        for n in (3, 100, 10 ** 4):
            report = pipeline_const_eps(n, 0.5, 2, 0.5)
            self.assertEqual(report.flags["gate_passed"],
                             "rigorous_total" in report)
            if "rigorous_total" in report:
                self.assertGreaterEqual(
                    report["rigorous_total_unclamped"],
                    report["term_bounded_sharp"])

    def test_constants(self):
        base = pipeline_const_eps(200, 0.1, 2, 1.0)
        scaled = pipeline_const_eps(
            200, 0.1, 2, 1.0, constants=Constants(c=2.0))
        self.assertAlmostEqual(
            scaled.log_value("combined") - math.log1p(200 ** -2),
            2 * (base.log_value("combined") - math.log1p(200 ** -2)))
        self.assertEqual(scaled.labels["constants"],
                         "c=2 d=1 b=1 n0=1 alpha=1")

    def test_total_decreases_in_n(self):
        totals = [pipeline_const_eps(n, 0.5, 2, 1.0).log_value("total")
                  for n in (10 ** 3, 10 ** 4, 10 ** 5)]
        self.assertEqual(totals, sorted(totals, reverse=True))

    def test_invalid(self):
        with self.assertRaises(ParameterError):
            pipeline_const_eps(10, 0.5, 1, 1.0)
        with self.assertRaises(ParameterError):
            pipeline_const_eps(10, 0, 2, 1.0)
        with self.assertRaises(ParameterError):
            pipeline_const_eps(10, 0.5, 2, 0)
        with self.assertRaises(ParameterError):
            pipeline_const_eps(10, 0.5, 2, 1.0, beta=0.5)
        with self.assertRaises(ParameterError):
            pipeline_const_eps(2, 0.5, 2, 1.0)


class GeneralPipelineTest(unittest.TestCase):

    def test_regimes(self):
        dense = pipeline_general(100, 0.5, 2, 100, 1 / 18)
        self.assertEqual(dense.labels["regime"], RegimeCase.LARGE_NP.value)
        self.assertTrue(dense.flags["covered"])
        sparse = pipeline_general(100, 1e-4, 2, 1, 1 / 18)
        self.assertEqual(sparse.labels["regime"], RegimeCase.SMALL_NP.value)

    def test_gamma_cap(self):
        report = pipeline_general(100, 0.5, 2, 100, 1.0)
        self.assertAlmostEqual(report["gamma_eff"], 1 / 32)
        self.assertGreaterEqual(report["A"], 256)

    def test_totals(self):
        report = pipeline_general(1000, 0.05, 3, 50.0, 1 / 27)
        self.assertAlmostEqual(
            report["total_unclamped"],
            report["term_bounded"] + report["term_event"])
        self.assertLessEqual(report["total"], 1)
        self.assertGreaterEqual(report["D"], report["A"] * (1 + 1000 * 0.05))
        self.assertTrue(report.flags["p_bounded_away"])
        self.assertIn("Psi", report)
        self.assertEqual(report.flags["gate_passed"],
                         "rigorous_total" in report)

    def test_invalid(self):
        with self.assertRaises(ParameterError):
            pipeline_general(100, 0.5, 2, 100, 0.1, xi=1.5)
        with self.assertRaises(ParameterError):
            pipeline_general(100, 0.5, 2, 100, 0.1, beta=1 / 32)
        with self.assertRaises(ParameterError):
            pipeline_general(100, 0.5, 2, -1, 0.1)
        with self.assertRaises(ParameterError):
            pipeline_general(100, 0.5, 2, 1, 0)


class RegimeSimplifyTest(unittest.TestCase):

    def test_bracket(self):
        for t in (0.01, 0.5, 3, 40, 900, 10 ** 5):
            comparison = regime_simplify(30, 0.2, 2, t, 0.1)
            self.assertTrue(comparison.bracket_holds, (t, comparison))
            self.assertEqual(comparison.small_deviation,
                             t <= float(star_mean(30, 0.2, 2)))

    def test_invalid(self):
        with self.assertRaises(ParameterError):
            regime_simplify(30, 0.95, 2, 1, 0.1)
        with self.assertRaises(ParameterError):
            regime_simplify(30, 0.5, 2, 1, 0)
