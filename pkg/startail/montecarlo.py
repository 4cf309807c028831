""" Naive Monte-Carlo tail estimates and parameter sweeps

Replicate i of an estimate samples G(n, p) from seed XOR i, so any split of
the replicate range over workers gives the same hit count. Sweep grid points
take their base seeds from SeedSequence children of the sweep seed, so
different points never share replicates.
"""

from concurrent.futures import ProcessPoolExecutor
import csv
import enum
import io
from itertools import product
import logging
import math
from typing import Any, Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple

from scipy.stats import binomtest

from .bounds import (
    exponent_const_eps, exponent_eps, exponent_psi, pipeline_const_eps,
    pipeline_general, star_mean, star_variance)
from .common import (
    ParameterError, Prob, check_count, check_positive, check_probability,
    format_float)
from .config import Constants
from .const import GAMMA_EPS_DIV, MAX_ENUM_PAIRS
from .constructions import appendix_lower_bounds, const_eps_lower_bound
from .graphs import (
    count_stars_from_degrees, replicate_seed, sample_degrees, spawn_seed)
from .oracles import exact_star_tail

log = logging.getLogger(__name__)

# replicates per task handed to a worker process
_CHUNK_SIZE = 1000


class Estimator(enum.Enum):
    """ How a sweep obtains tail probabilities """
    EXACT = 'exact'
    """ Full enumeration; fails beyond the enumeration budget. """
    MC = 'mc'
    """ Naive Monte-Carlo with a Wilson interval. """
    AUTO = 'auto'
    """ Exact inside the enumeration budget, Monte-Carlo beyond it. """


class McEstimate(NamedTuple):
    """ Hit count of a Monte-Carlo run with its 95% Wilson interval """
    replicates: int
    hits: int
    seed: int
    ci_low: float
    ci_high: float

    @property
    def point(self) -> float:
        """ hits / replicates """
        return self.hits / self.replicates

    @property
    def ci95(self) -> Tuple[float, float]:
        """ Wilson interval at 95% """
        return self.ci_low, self.ci_high

    @property
    def below_resolution(self) -> bool:
        """ No hit was observed; the tail is below what this run resolves. """
        return self.hits == 0

    def to_dict(self) -> Dict[str, Any]:
        """ JSON compatible representation. """
        return {
            "replicates": self.replicates,
            "hits": self.hits,
            "point": self.point,
            "ci95": [self.ci_low, self.ci_high],
            "seed": self.seed,
            "below_resolution": self.below_resolution,
        }


def wilson_interval(hits: int, replicates: int) -> Tuple[float, float]:
    """ 95% Wilson score interval, widened to contain hits / replicates. """
    ci = binomtest(hits, replicates).proportion_ci(
        confidence_level=0.95, method='wilson')
    point = hits / replicates
    return (max(0.0, min(float(ci.low), point)),
            min(1.0, max(float(ci.high), point)))


def count_hits(n: int, p: Prob, r: int, threshold: float, seed: int,
               start: int, stop: int) -> int:
    """ Number of replicates i in [start, stop) with X >= threshold. """
    hits = 0
    for index in range(start, stop):
        degrees = sample_degrees(n, p, replicate_seed(seed, index))
        if count_stars_from_degrees(degrees.tolist(), r) >= threshold:
            hits += 1
    return hits


def _chunks(replicates: int) -> Iterator[Tuple[int, int]]:
    for start in range(0, replicates, _CHUNK_SIZE):
        yield start, min(start + _CHUNK_SIZE, replicates)


def mc_tail(
        n: int,
        p: Prob,
        r: int,
        threshold: float,
        replicates: int,
        seed: int,
        workers: int = 1,
) -> McEstimate:
    """ Estimates Pr(X >= threshold) from independent samples.

    :param workers: Number of worker processes; the result does not
        depend on it.
    """
    check_count(n, "n")
    check_probability(p)
    check_count(r, "r", 1)
    check_count(replicates, "replicates", 1)
    check_count(workers, "workers", 1)
    if workers == 1:
        hits = sum(count_hits(n, p, r, threshold, seed, start, stop)
                   for start, stop in _chunks(replicates))
    else:
        spans = list(_chunks(replicates))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(count_hits, n, p, r, threshold, seed, start, stop)
                for start, stop in spans]
            hits = sum(future.result() for future in futures)
    low, high = wilson_interval(hits, replicates)
    log.debug("MC tail n=%d p=%s r=%d threshold=%s: %d of %d",
              n, p, r, threshold, hits, replicates)
    return McEstimate(replicates, hits, seed, low, high)


class GridSpec(NamedTuple):
    """ Cartesian grid of (n, p, r, eps), iterated in that nesting order """
    ns: Tuple[int, ...]
    ps: Tuple[Prob, ...]
    rs: Tuple[int, ...]
    epss: Tuple[float, ...]

    @classmethod
    def create(cls, ns: Sequence[int], ps: Sequence[Prob], rs: Sequence[int],
               epss: Sequence[float]) -> 'GridSpec':
        """ Validates every axis.

        :raises ParameterError: on an empty axis or an invalid value.
        """
        for name, axis in (("ns", ns), ("ps", ps), ("rs", rs), ("epss", epss)):
            if not axis:
                raise ParameterError(f"Grid axis {name} is empty.")
        for r in rs:
            check_count(r, "r", 2)
        for n in ns:
            check_count(n, "n", max(rs) + 1)
        for p in ps:
            if check_probability(p) == 0:
                raise ParameterError("Grid probabilities must be positive.")
        for eps in epss:
            check_positive(eps, "eps")
        return cls(tuple(ns), tuple(ps), tuple(rs), tuple(epss))

    def points(self) -> Iterator[Tuple[int, Prob, int, float]]:
        """ Grid points in row order """
        return product(self.ns, self.ps, self.rs, self.epss)

    @property
    def size(self) -> int:
        """ Number of grid points """
        return len(self.ns) * len(self.ps) * len(self.rs) * len(self.epss)


SWEEP_HEADER = (
    "index", "n", "p", "r", "eps", "mu", "sigma2", "threshold", "estimator",
    "tail", "ci_low", "ci_high", "hits", "replicates", "M", "Phi", "Phi_eps",
    "Psi", "bound_total", "bound_best", "rigorous_total", "log_lower_cluster",
    "log_lower_disjoint", "disjoint_in_range", "log_lower_best",
    "general_total", "general_combined", "general_rigorous_total",
    "general_regime", "log_lower_refined",
)
""" Columns of the sweep CSV, in order """


def _use_exact(n: int, estimator: Estimator) -> bool:
    if estimator is Estimator.EXACT:
        return True
    return estimator is Estimator.AUTO and n * (n - 1) // 2 <= MAX_ENUM_PAIRS


def sweep_point(
        index: int,
        n: int,
        p: Prob,
        r: int,
        eps: float,
        estimator: Estimator,
        *,
        replicates: int,
        seed: int,
        workers: int = 1,
        constants: Constants = Constants(),
        xi: float = 0.1,
) -> Dict[str, Any]:
    """ One CSV row: tail estimate, exponents, upper and lower bounds.

    The general pipeline is evaluated at t = eps mu with gamma = 1/(9 r),
    the refined lower bounds at the same t.
    """
    mu = float(star_mean(n, p, r))
    var = float(star_variance(n, p, r))
    threshold = (1 + eps) * mu
    row: Dict[str, Any] = {
        "index": index, "n": n, "p": float(p), "r": r, "eps": eps,
        "mu": mu, "sigma2": var, "threshold": threshold}
    if _use_exact(n, estimator):
        tail = float(exact_star_tail(n, p, r, threshold))
        row.update(estimator=Estimator.EXACT.value, tail=tail, ci_low=tail,
                   ci_high=tail, hits=None, replicates=None)
    else:
        estimate = mc_tail(n, p, r, threshold, replicates,
                           spawn_seed(seed, index), workers)
        row.update(estimator=Estimator.MC.value, tail=estimate.point,
                   ci_low=estimate.ci_low, ci_high=estimate.ci_high,
                   hits=estimate.hits, replicates=replicates)

    report = pipeline_const_eps(n, p, r, eps, constants=constants)
    row["M"] = report["M"]
    row["Phi"] = exponent_const_eps(n, p, r)
    row["Phi_eps"] = (
        exponent_eps(n, p, r, eps, variance=var) if var > 0 else None)
    row["Psi"] = (
        exponent_psi(n, p, r, eps * mu, variance=var) if var > 0 else None)
    row["bound_total"] = report["total"]
    row["bound_best"] = report["best"]
    row["rigorous_total"] = (
        report["rigorous_total"] if "rigorous_total" in report else None)
    lower = const_eps_lower_bound(n, p, r, eps, constants)
    row["log_lower_cluster"] = (
        None if lower.cluster is None else lower.cluster.log_value)
    row["log_lower_disjoint"] = lower.log_disjoint
    row["disjoint_in_range"] = lower.disjoint_in_range
    row["log_lower_best"] = lower.log_best
    row.update(general_total=None, general_combined=None,
               general_rigorous_total=None, general_regime=None,
               log_lower_refined=None)
    if var > 0:
        general = pipeline_general(
            n, p, r, eps * mu, 1 / (GAMMA_EPS_DIV * r), constants=constants,
            xi=xi, mean=mu, variance=var)
        row["general_total"] = general["total"]
        row["general_combined"] = general["combined"]
        if "rigorous_total" in general:
            row["general_rigorous_total"] = general["rigorous_total"]
        row["general_regime"] = general.labels["regime"]
        row["log_lower_refined"] = appendix_lower_bounds(
            n, p, r, eps * mu, xi, constants).log_best
    log.info("Sweep point %d: n=%d p=%s r=%d eps=%s tail=%s",
             index, n, p, r, eps, row["tail"])
    return row


def sweep(
        grid: GridSpec,
        estimator: Estimator,
        *,
        replicates: int = 1000,
        seed: int = 0,
        workers: int = 1,
        constants: Constants = Constants(),
        xi: float = 0.1,
) -> List[Dict[str, Any]]:
    """ Evaluates every grid point, rows ordered by grid index.

    Grid point i uses spawn_seed(seed, i) as its Monte-Carlo base seed, so
    Monte-Carlo columns of different points are independent estimates.
    """
    return [
        sweep_point(index, n, p, r, eps, estimator, replicates=replicates,
                    seed=seed, workers=workers, constants=constants, xi=xi)
        for index, (n, p, r, eps) in enumerate(grid.points())]


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        if math.isinf(value):
            return "-inf" if value < 0 else "inf"
        return format_float(value)
    return str(value)


def rows_to_csv(rows: Sequence[Dict[str, Any]]) -> str:
    """ CSV text with SWEEP_HEADER; reals carry 17 significant digits. """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for row in rows:
        writer.writerow([_csv_cell(row.get(column)) for column in SWEEP_HEADER])
    return buffer.getvalue()


def check_monotone(points: Sequence[Tuple[Prob, McEstimate]]
                   ) -> List[Tuple[int, int]]:
    """ Index pairs of consecutive estimates, ordered by p, whose point
    estimates decrease with disjoint Wilson intervals.
    """
    ordered = sorted(range(len(points)), key=lambda i: float(points[i][0]))
    flagged = []
    for left, right in zip(ordered, ordered[1:]):
        low_p, high_p = points[left][1], points[right][1]
        if high_p.point < low_p.point and high_p.ci_high < low_p.ci_low:
            flagged.append((left, right))
    return flagged


def estimate_for(n: int, p: Prob, r: int, threshold: float,
                 replicates: int, seed: int, workers: int = 1,
                 estimator: Estimator = Estimator.AUTO
                 ) -> Tuple[float, Optional[McEstimate]]:
    """ Tail value by the chosen estimator, with the MC record if any. """
    if _use_exact(n, estimator):
        return float(exact_star_tail(n, p, r, threshold)), None
    estimate = mc_tail(n, p, r, threshold, replicates, seed, workers)
    return estimate.point, estimate
