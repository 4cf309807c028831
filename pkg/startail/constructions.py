""" Lower bounds by construction

The clustering gadget plants a small graph F carrying at least x copies of
K_{1,r}, so Pr(X >= x) >= p^|E(F)| holds exactly for every n. The other
evaluators are formula bounds with unspecified constants; they carry range
flags instead of guarantees.
"""

import enum
from fractions import Fraction
from itertools import combinations
import logging
import math
from typing import Any, Dict, NamedTuple, Optional, Union
import warnings

from scipy.special import gammaln, xlog1py, xlogy
from scipy.stats import binom

from .bounds import (
    chernoff_phi, deviation_scale_M, max_star_count, star_mean, star_variance)
from .common import (
    DiagnosticWarning, LemmaViolation, ParameterError, Prob, RangeWarning,
    check_count, check_positive, check_probability, comb0)
from .config import Constants
from .graphs import Graph

log = logging.getLogger(__name__)

Real = Union[int, float, Fraction]


class ClusterCase(enum.Enum):
    """ Which construction the case analysis picked """
    BIPARTITE = 'bipartite'
    """ x0 <= x <= n^(r+1)/D and n >= n0: F = K_{y,z}. """
    COMPLETE_N = 'complete_n'
    """ x > n^(r+1)/D and n >= n0: F = K_n. """
    COMPLETE_N0 = 'complete_n0'
    """ n < n0: F = K_n. """
    SMALL_X = 'small_x'
    """ x < x0 and n >= n0: F = K_{n0}. """


def cluster_x0(r: int) -> int:
    """ x0 = 2 (4r)^r """
    return 2 * (4 * r) ** r


def cluster_n0(r: int) -> int:
    """ n0 = (r + 1) x0 """
    return (r + 1) * cluster_x0(r)


def cluster_budget_factor(r: int) -> int:
    """ D(r) = n0^2 """
    return cluster_n0(r) ** 2


class ClusterConstruction(NamedTuple):
    """ A planted graph F inside K_n, described by its shape.

    Counts are computed from the degree sequence; graph() materializes F.
    """
    case: ClusterCase
    n: int
    r: int
    x_target: Real
    vertices: int
    y: Optional[int]
    z: Optional[int]
    edge_count: int
    star_count: int
    edge_budget: float
    side_conditions: Optional[bool]

    def graph(self) -> Graph:
        """ F as a graph on the n vertices of K_n. """
        if self.y is not None and self.z is not None:
            return Graph.complete_bipartite(self.y, self.z, self.n)
        return Graph(self.n, combinations(range(self.vertices), 2))

    def to_dict(self, with_graph: bool = False) -> Dict[str, Any]:
        """ JSON compatible representation. """
        data: Dict[str, Any] = {
            "case": self.case.value,
            "n": self.n,
            "r": self.r,
            "x": float(self.x_target),
            "y": self.y,
            "z": self.z,
            "vertices": self.vertices,
            "edges": self.edge_count,
            "stars": self.star_count,
            "budget": self.edge_budget,
            "side_conditions": self.side_conditions,
        }
        if with_graph:
            data["graph"] = self.graph().to_text()
        return data


def _ceil_root_quarter(x: Fraction, r: int) -> int:
    # smallest y with 4y >= x^(1/r), i.e. (4y)^r >= x
    y = max(1, math.ceil(float(x) ** (1 / r) / 4))
    while y > 1 and (4 * (y - 1)) ** r >= x:
        y -= 1
    while (4 * y) ** r < x:
        y += 1
    return y


def _within_budget(edges: int, x: Fraction, n: int, r: int, factor: int
                   ) -> bool:
    scaled = Fraction(edges, factor)
    return (scaled <= 1 or scaled <= x / Fraction(n) ** (r - 1)
            or scaled ** r <= x)


def build_cluster_graph(n: int, r: int, x: Real) -> ClusterConstruction:
    """ A graph F in K_n with at least x copies of K_{1,r} and at most
    D(r) max(x^(1/r), x/n^(r-1), 1) edges.

    Case boundaries are compared in exact rational arithmetic. The result
    is verified by counting before it is returned.

    :raises ParameterError: if x is outside (0, n C(n-1, r)].
    :raises LemmaViolation: if the verification fails.
    """
    check_count(n, "n", 1)
    check_count(r, "r", 1)
    exact_x = Fraction(x)
    top = max_star_count(n, r)
    if not 0 < exact_x <= top:
        raise ParameterError(f"x must lie in (0, {top}], got {x}")
    x0 = cluster_x0(r)
    n0 = cluster_n0(r)
    factor = cluster_budget_factor(r)
    y: Optional[int] = None
    z: Optional[int] = None
    side_conditions: Optional[bool] = None
    if n < n0:
        case, vertices = ClusterCase.COMPLETE_N0, n
    elif exact_x < x0:
        case, vertices = ClusterCase.SMALL_X, n0
    elif exact_x > Fraction(n ** (r + 1), factor):
        case, vertices = ClusterCase.COMPLETE_N, n
    else:
        case = ClusterCase.BIPARTITE
        if exact_x >= n ** r:
            y = math.ceil(Fraction(n, 4))
        else:
            y = _ceil_root_quarter(exact_x, r)
        z = math.ceil(r ** r * exact_x / y ** r)
        vertices = y + z
        side_conditions = 1 < y <= n / 2 and 1 < z <= n / 2
        if not side_conditions:
            log.warning("Side conditions 1 < y, z <= n/2 fail for n=%d r=%d "
                        "x=%s: y=%d z=%d", n, r, x, y, z)
            warnings.warn(
                f"Side conditions fail for n={n}, r={r}, x={x}: y={y}, z={z}",
                DiagnosticWarning, stacklevel=2)
        if vertices > n:
            raise LemmaViolation(f"K_{{{y},{z}}} does not fit in K_{n}.")

    if y is not None and z is not None:
        edges = y * z
        stars = y * comb0(z, r) + z * comb0(y, r)
    else:
        edges = vertices * (vertices - 1) // 2
        stars = vertices * comb0(vertices - 1, r)
    budget = factor * max(
        float(exact_x) ** (1 / r), float(exact_x) / float(n) ** (r - 1), 1.0)
    if stars < exact_x or not _within_budget(edges, exact_x, n, r, factor):
        raise LemmaViolation(
            f"Construction {case.value} for n={n}, r={r}, x={x} has {stars} "
            f"stars on {edges} edges.")
    return ClusterConstruction(
        case=case, n=n, r=r, x_target=x, vertices=vertices, y=y, z=z,
        edge_count=edges, star_count=stars, edge_budget=budget,
        side_conditions=side_conditions)


class ClusterBound(NamedTuple):
    """ p^|E(F)| with its logarithm """
    value: float
    log_value: float
    construction: ClusterConstruction


def cluster_lower_bound(n: int, p: Prob, r: int, x: Real) -> ClusterBound:
    """ Pr(X >= x) >= p^|E(F)| for the planted graph F. """
    p = check_probability(p)
    if p == 0:
        raise ParameterError("p must be positive.")
    construction = build_cluster_graph(n, r, x)
    log_value = construction.edge_count * math.log(float(p))
    return ClusterBound(math.exp(log_value), log_value, construction)


class DisjointBound(NamedTuple):
    """ The disjoint approximation factor and its range flag """
    m: int
    log_factor: float
    log_multiplier: float
    in_range: bool

    @property
    def factor(self) -> float:
        """ C(X1, m) p^(rm) (1 - p^r)^(X1 - m) """
        return math.exp(self.log_factor)

    @property
    def value(self) -> float:
        """ e^-b times the factor """
        return math.exp(self.log_factor + self.log_multiplier)


def _disjoint_range(n: int, p: float, r: int) -> bool:
    return p <= float(n) ** (-1 - 1 / (r + 1))


def disjoint_lower_bound(
        n: int,
        p: Prob,
        r: int,
        m: int,
        constants: Constants = Constants(),
) -> DisjointBound:
    """ Pr(X = m) >= e^-b C(X1, m) p^(rm) (1 - p^r)^(X1 - m), X1 = n C(n-1, r).

    The inequality is stated for p <= n^(-1-1/(r+1)) and
    m <= 99 max(mu, n^(1/(r+1))); elsewhere the factor is still evaluated
    and flagged out of range.
    """
    check_count(n, "n", 1)
    check_count(r, "r", 1)
    check_count(m, "m")
    float_p = float(check_probability(p))
    if float_p == 0:
        raise ParameterError("p must be positive.")
    top = max_star_count(n, r)
    if m > top:
        log_factor = -math.inf
    else:
        log_factor = float(
            gammaln(top + 1) - gammaln(m + 1) - gammaln(top - m + 1)
            + xlogy(r * m, float_p) + xlog1py(top - m, -float_p ** r))
    mu = top * float_p ** r
    in_range = _disjoint_range(n, float_p, r) and (
        m <= 99 * max(mu, float(n) ** (1 / (r + 1))))
    if not in_range:
        warnings.warn(
            f"Disjoint approximation evaluated outside its range: n={n}, "
            f"p={float_p}, r={r}, m={m}", RangeWarning, stacklevel=2)
    return DisjointBound(m, log_factor, -constants.b, in_range)


class DisjointTail(NamedTuple):
    """ The disjoint factor summed over m >= threshold """
    threshold: int
    log_sum: float
    log_multiplier: float
    in_range: bool

    @property
    def value(self) -> float:
        """ e^-b times the summed factor """
        return math.exp(self.log_sum + self.log_multiplier)


def disjoint_tail_factor(
        n: int,
        p: Prob,
        r: int,
        threshold: float,
        constants: Constants = Constants(),
) -> DisjointTail:
    """ Sum over m >= ceil(threshold) of the disjoint factor.

    The factor is the Bin(X1, p^r) law, so the sum is its survival
    function.
    """
    check_count(n, "n", 1)
    check_count(r, "r", 1)
    float_p = float(check_probability(p))
    start = max(0, math.ceil(threshold))
    top = max_star_count(n, r)
    log_sum = float(binom.logsf(start - 1, top, float_p ** r))
    return DisjointTail(
        start, log_sum, -constants.b, _disjoint_range(n, float_p, r))


class CombinedLowerBounds(NamedTuple):
    """ Formula lower bounds on Pr(X >= mu + t) with their range flags """
    log_cluster: float
    log_disjoint: float
    log_edges: float
    cluster_in_range: bool
    disjoint_in_range: bool
    edges_in_range: bool

    @property
    def log_best(self) -> Optional[float]:
        """ Largest in-range logarithm, None if no bound is in range """
        candidates = [
            value for value, ok in (
                (self.log_cluster, self.cluster_in_range),
                (self.log_disjoint, self.disjoint_in_range),
                (self.log_edges, self.edges_in_range)) if ok]
        return max(candidates, default=None)

    @property
    def best(self) -> float:
        """ Largest in-range bound; zero when none applies """
        log_best = self.log_best
        return 0.0 if log_best is None else math.exp(log_best)


def appendix_lower_bounds(
        n: int,
        p: Prob,
        r: int,
        t: float,
        xi: float,
        constants: Constants = Constants(),
        edge_beta: float = 1.0,
) -> CombinedLowerBounds:
    """ Evaluates the refined clustering, Chernoff-type and edge-deviation
    lower bounds.

    The terms are exp(-c M(t) log(1/p)), d exp(-c phi(t/mu) mu) and
    exp(-c phi(t/mu) mu^2 / Lambda). Their ranges are p <= 1 - xi with
    t >= sigma and 1 <= mu + t <= X1; p <= n^(-1-1/(r+1)) with
    1 <= mu + t <= 9 max(mu, n^(1/(r+1))); xi/n <= p <= 1 - xi with
    sigma <= t <= edge_beta mu.
    """
    check_count(n, "n", 1)
    check_positive(t, "t")
    check_positive(edge_beta, "edge_beta")
    if not 0 < xi < 1:
        raise ParameterError(f"xi must lie in (0, 1), got {xi}")
    float_p = float(check_probability(p))
    if float_p == 0:
        raise ParameterError("p must be positive.")
    mu = float(star_mean(n, float_p, r))
    check_positive(mu, "mu")
    sigma = math.sqrt(float(star_variance(n, float_p, r)))
    lam = mu * (1 + (n * float_p) ** (r - 1))
    phi = chernoff_phi(t / mu)
    c = constants.c
    top = max_star_count(n, r)
    log_cluster = -c * deviation_scale_M(t, n, r) * math.log(1 / float_p)
    log_disjoint = math.log(constants.d) - c * phi * mu
    log_edges = -c * phi * mu * mu / lam
    bounds = CombinedLowerBounds(
        log_cluster=log_cluster,
        log_disjoint=log_disjoint,
        log_edges=log_edges,
        cluster_in_range=(
            float_p <= 1 - xi and t >= sigma and 1 <= mu + t <= top),
        disjoint_in_range=(
            _disjoint_range(n, float_p, r)
            and 1 <= mu + t <= 9 * max(mu, float(n) ** (1 / (r + 1)))),
        edges_in_range=(
            xi / n <= float_p <= 1 - xi and sigma <= t <= edge_beta * mu),
    )
    if bounds.log_best is None:
        warnings.warn(
            f"No lower bound is in range for n={n}, p={float_p}, r={r}, t={t}",
            RangeWarning, stacklevel=2)
    return bounds


class ConstEpsLower(NamedTuple):
    """ Lower bounds on Pr(X >= (1 + eps) mu) """
    cluster: Optional[ClusterBound]
    m: int
    log_disjoint: float
    disjoint_in_range: bool

    @property
    def log_best(self) -> float:
        """ Planting always counts; the disjoint term only in range. """
        candidates = []
        if self.cluster is not None:
            candidates.append(self.cluster.log_value)
        if self.disjoint_in_range:
            candidates.append(self.log_disjoint)
        return max(candidates, default=-math.inf)


def const_eps_lower_bound(
        n: int,
        p: Prob,
        r: int,
        eps: float,
        constants: Constants = Constants(),
) -> ConstEpsLower:
    """ Planting with x = (1 + eps) mu, and e^-b (mu/m)^m e^(-2 mu) with
    m = ceil((1 + eps) mu).
    """
    check_positive(eps, "eps")
    float_p = float(check_probability(p))
    if float_p == 0:
        raise ParameterError("p must be positive.")
    mu = float(star_mean(n, float_p, r))
    check_positive(mu, "mu")
    target = (1 + eps) * mu
    cluster = None
    if target <= max_star_count(n, r):
        cluster = cluster_lower_bound(n, float_p, r, target)
    m = math.ceil(target)
    log_disjoint = -constants.b + m * math.log(mu / m) - 2 * mu
    in_range = _disjoint_range(n, float_p, r) and (
        m <= 99 * max(mu, float(n) ** (1 / (r + 1))))
    return ConstEpsLower(cluster, m, log_disjoint, in_range)
