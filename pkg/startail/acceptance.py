""" Acceptance checks

Each check_* function runs one family of deterministic claims or diagnostic
windows and returns a CheckResult. Instances come from Philox generators
keyed by the check seed, so every result is reproducible. Hard claims are
counted as violations rather than raised, so a suite run always completes.
"""

from fractions import Fraction
import json
import logging
import math
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .bounds import (
    exponent_eps, max_star_count, packing_union_bound, phi_inequalities,
    star_variance, variance_ratio, zc_tail_bound)
from .common import LemmaViolation, Verdict
from .constructions import (
    build_cluster_graph, cluster_budget_factor, cluster_lower_bound,
    cluster_x0)
from .graphs import replicate_seed, sample_gnp
from .iidsum import (
    IidSumModel, iid_bruteforce_distribution, iid_exact_distribution,
    iid_peel_and_sandwich, sample_terms)
from .montecarlo import Estimator, GridSpec, rows_to_csv, sweep
from .oracles import (
    exact_packing_distribution, exact_star_distribution,
    exact_variance_bruteforce, exact_zc_tail, random_family)
from .peeling import PeelingParams, Variant, verify_sandwich

log = logging.getLogger(__name__)

# relative slack when an exact probability meets a floating point bound
_BOUND_RTOL = 1e-12
# window for the diagnostic ratios
_RATIO_WINDOW = (1e-2, 1e2)
# draws allowed per certified instance a sampling check must reach
_DRAWS_PER_TARGET = 20


class CheckResult(NamedTuple):
    """ Outcome of one acceptance check """
    name: str
    checked: int
    violations: int
    detail: str
    required: int = 0

    @property
    def passed(self) -> bool:
        """ No violation was found and at least `required` items were checked """
        return self.violations == 0 and self.checked >= self.required

    def to_dict(self) -> Dict[str, Any]:
        """ JSON compatible representation. """
        return {
            "name": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "violations": self.violations,
            "required": self.required,
            "detail": self.detail,
        }


def _rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=replicate_seed(seed, index)))


def _result(name: str, checked: int, violations: int, detail: str,
            required: int = 0) -> CheckResult:
    log.info("Check %s: %d checked, %d violations", name, checked, violations)
    if checked < required:
        log.error("Check %s reached %d of %d required instances",
                  name, checked, required)
    return CheckResult(name, checked, violations, detail, required)


def check_sandwich(instances: int = 1000, seed: int = 0,
                   max_draws: Optional[int] = None) -> CheckResult:
    """ Random graphs with n <= 8 against the peeling sandwich.

    Draws graphs until `instances` of them are certified, or until
    `max_draws` (by default 20 per required instance) are spent.
    """
    limit = _DRAWS_PER_TARGET * instances if max_draws is None else max_draws
    certified = 0
    peeled = 0
    violations = 0
    index = 0
    while certified < instances and index < limit:
        rng = _rng(seed, index)
        n = int(rng.integers(2, 9))
        p = Fraction(int(rng.integers(1, 10)), 10)
        r = int(rng.choice([2, 3]))
        D = float(rng.choice([0.5, 1.0, 2.0, 4.0]))
        t = float(rng.choice([1, 4, 16, 64, 256, 1024, 4096]))
        variant = Variant.T if index % 2 == 0 else Variant.TPLUS
        graph = sample_gnp(n, p, replicate_seed(seed, index))
        params = PeelingParams(
            r, n, D, t, beta=variant.max_beta,
            gamma=1 / (16 * r) if variant is Variant.TPLUS else None,
            p=p if variant is Variant.TPLUS else None)
        index += 1
        try:
            report = verify_sandwich(graph, params, variant)
        except LemmaViolation as ex:
            log.error("Sandwich violation on instance %d: %s", index - 1, ex)
            violations += 1
            continue
        if report.checked:
            certified += 1
            if report.stars > report.final_stars:
                peeled += 1
    return _result("sandwich", certified, violations,
                   f"{index} draws, {peeled} with X > X(G_0)", instances)


def check_zc_tail(instances: int = 200, seed: int = 0) -> CheckResult:
    """ Exact Pr(Z_C >= mu + t) against both concentration bounds. """
    violations = 0
    for index in range(instances):
        rng = _rng(seed, index)
        ground = int(rng.integers(1, 13))
        family = random_family(rng, ground, int(rng.integers(1, 9)),
                               max_set_size=3)
        C = int(rng.integers(1, 4))
        mu = float(family.expected_sum())
        t = float(rng.choice([0.25, 0.5, 1.0, 2.0, 4.0])) * mu
        tail = float(exact_zc_tail(family, C, mu + t))
        bound = zc_tail_bound(mu, C, t)
        if tail > bound.first * (1 + _BOUND_RTOL) or (
                bound.first > bound.second * (1 + _BOUND_RTOL)):
            log.error("Z_C violation on instance %d: tail %s, bounds %s",
                      index, tail, bound)
            violations += 1
    return _result("zc_tail", instances, violations, "")


def _cluster_targets(n: int, r: int) -> List[Fraction]:
    top = max_star_count(n, r)
    x0 = cluster_x0(r)
    large = Fraction(n ** (r + 1), cluster_budget_factor(r))
    candidates = {
        Fraction(1), Fraction(x0 - 1), Fraction(x0), Fraction(x0 + 1),
        large, large + 1, (x0 + large) / 2, Fraction(top), Fraction(top, 2),
        Fraction(5, 2)}
    return sorted(x for x in candidates if 0 < x <= top)


def check_cluster_grid(ns: Sequence[int] = (5, 50, 383, 384, 400, 1000, 10000),
                       rs: Sequence[int] = (2, 3)) -> CheckResult:
    """ The planted graph carries x stars within its edge budget. """
    checked = 0
    violations = 0
    cases = set()
    for r in rs:
        for n in ns:
            for x in _cluster_targets(n, r):
                checked += 1
                try:
                    construction = build_cluster_graph(n, r, x)
                except LemmaViolation as ex:
                    log.error("Cluster violation n=%d r=%d x=%s: %s",
                              n, r, x, ex)
                    violations += 1
                    continue
                cases.add(construction.case.value)
    return _result("cluster_grid", checked, violations,
                   "cases " + ",".join(sorted(cases)))


def check_planting(max_n: int = 6, r: int = 2) -> CheckResult:
    """ p^|E(F)| never exceeds the exact tail. """
    checked = 0
    violations = 0
    for n in range(r + 1, max_n + 1):
        for k in range(1, 10):
            p = Fraction(k, 10)
            law = exact_star_distribution(n, p, r)
            for x in range(1, max_star_count(n, r) + 1):
                checked += 1
                edges = cluster_lower_bound(n, p, r, x).construction.edge_count
                if p ** edges > law.tail(x):
                    violations += 1
    return _result("planting", checked, violations, "")


def check_variance(max_n: int = 5, rs: Sequence[int] = (2, 3)) -> CheckResult:
    """ Closed-form variance equals the enumerated one exactly. """
    checked = 0
    violations = 0
    for r in rs:
        for n in range(1, max_n + 1):
            for k in range(1, 10):
                p = Fraction(k, 10)
                checked += 1
                if star_variance(n, p, r) != exact_variance_bruteforce(n, p, r):
                    violations += 1
    anchor = star_variance(3, Fraction(1, 2), 2)
    if anchor != Fraction(15, 16):
        violations += 1
    return _result("variance", checked, violations, f"anchor {float(anchor)}")


def check_packing_union(max_n: int = 5,
                        ps: Sequence[Fraction] = (
                            Fraction(1, 10), Fraction(3, 10), Fraction(1, 2))
                        ) -> CheckResult:
    """ Exact Pr(N_k >= x) against the all-n union bound. """
    checked = 0
    violations = 0
    for n in range(2, max_n + 1):
        for k in range(1, n):
            for p in ps:
                law = exact_packing_distribution(n, p, k)
                for x in (1, 2, 3):
                    checked += 1
                    bound = packing_union_bound(n, p, k, x)
                    if float(law.tail(x)) > bound * (1 + _BOUND_RTOL):
                        violations += 1
    return _result("packing_union", checked, violations, "")


def check_phi(points: int = 10000, top: float = 1000.0) -> CheckResult:
    """ The elementary phi inequalities on a uniform grid. """
    violations = sum(
        1 for x in np.linspace(0.0, top, points)
        if not phi_inequalities(float(x)).holds)
    return _result("phi", points, violations, "")


def check_iid(max_exact_n: int = 4, samples: int = 10000, seed: int = 0,
              max_draws: Optional[int] = None) -> CheckResult:
    """ Convolution against enumeration, then the degree chain on samples.

    Samples are drawn until `samples` of them are certified, or until
    `max_draws` (by default 20 per required sample) are spent. The checked
    count is the number of certified samples.
    """
    violations = 0
    compared = 0
    for n in range(1, max_exact_n + 1):
        for p in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
            model = IidSumModel(n, p, 2)
            compared += 1
            if iid_exact_distribution(model) != iid_bruteforce_distribution(model):
                violations += 1
    limit = _DRAWS_PER_TARGET * samples if max_draws is None else max_draws
    certified = 0
    index = 0
    while certified < samples and index < limit:
        rng = _rng(seed, index)
        n = int(rng.integers(4, 13))
        model = IidSumModel(n, float(rng.choice([0.1, 0.3, 0.5])), 2)
        terms = sample_terms(model, replicate_seed(seed, index))
        D = float(rng.choice([1.0, 2.0, 4.0]))
        t = float(rng.choice([16, 64, 256, 1024, 4096]))
        index += 1
        try:
            report = iid_peel_and_sandwich(terms, D, t, r=2, n=n)
        except LemmaViolation as ex:
            log.error("Degree chain violation on sample %d: %s", index - 1, ex)
            violations += 1
            continue
        certified += report.checked
    return _result("iid", certified, violations,
                   f"{index} draws, {compared} exact comparisons", samples)


def _in_window(value: float) -> bool:
    return _RATIO_WINDOW[0] <= value <= _RATIO_WINDOW[1]


def check_theta_diagnostics(
        ns: Sequence[int] = (20, 50, 100, 200),
        ps: Sequence[float] = (0.01, 0.05, 0.1, 0.3, 0.5, 0.9),
        iid_ns: Sequence[int] = (20, 30, 40),
        iid_ps: Sequence[float] = (0.05, 0.1, 0.2),
        epss: Sequence[float] = (0.5, 1.0),
) -> CheckResult:
    """ Variance ratio and iid tail exponent ratio inside [1e-2, 1e2]. """
    checked = 0
    violations = 0
    ratios: List[float] = []
    for n in ns:
        for p in ps:
            checked += 1
            ratio = variance_ratio(n, p, 2)
            ratios.append(ratio)
            if not _in_window(ratio):
                violations += 1
    for n in iid_ns:
        for p in iid_ps:
            model = IidSumModel(n, p, 2)
            law = iid_exact_distribution(model)
            mu = float(model.mean)
            var = float(model.variance)
            for eps in epss:
                exponent = exponent_eps(n, p, 2, eps, mean=mu, variance=var)
                tail = float(law.tail((1 + eps) * mu))
                if exponent < 1 or tail <= 0:
                    continue
                checked += 1
                ratio = -math.log(tail) / exponent
                ratios.append(ratio)
                if not _in_window(ratio):
                    violations += 1
    window = f"ratios in [{min(ratios):.3g}, {max(ratios):.3g}]"
    return _result("theta_diagnostics", checked, violations, window)


def check_determinism(seed: int = 0) -> CheckResult:
    """ A Monte-Carlo sweep is byte-identical across runs and worker counts.
    """
    grid = GridSpec.create([6, 9], [Fraction(1, 2), 0.3], [2], [0.5])
    runs = [
        rows_to_csv(sweep(grid, Estimator.MC, replicates=200, seed=seed,
                          workers=workers))
        for workers in (1, 1, 2)]
    exact_grid = GridSpec.create([5, 6], [Fraction(1, 2), 0.3], [2], [0.5])
    exact_runs = [
        rows_to_csv(sweep(exact_grid, Estimator.EXACT, seed=seed))
        for _ in range(2)]
    violations = sum(1 for text in runs[1:] if text != runs[0])
    violations += exact_runs[0] != exact_runs[1]
    return _result("determinism", len(runs) + len(exact_runs), violations, "")


CHECKS: Tuple[Tuple[str, Callable[[], CheckResult]], ...] = (
    ("sandwich", check_sandwich),
    ("zc_tail", check_zc_tail),
    ("cluster_grid", check_cluster_grid),
    ("planting", check_planting),
    ("variance", check_variance),
    ("packing_union", check_packing_union),
    ("phi", check_phi),
    ("iid", check_iid),
    ("theta_diagnostics", check_theta_diagnostics),
    ("determinism", check_determinism),
)
""" Every acceptance check with its default size, in suite order """


def run_all() -> List[CheckResult]:
    """ Runs every check in suite order. """
    return [check() for _, check in CHECKS]


def results_to_json(results: Sequence[CheckResult]) -> str:
    """ Suite report with a pass flag per check and overall. """
    return json.dumps({
        "passed": all(result.passed for result in results),
        "checks": [result.to_dict() for result in results],
    }, indent=2) + "\n"

