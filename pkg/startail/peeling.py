""" Degree peeling and certification of the packing events

Peeling builds the chain G_J >= ... >= G_0: at level j the edges at the
centers of a maximal packing of K_{1, ceil(D_j)} are removed from G_{j+1}.
An event certificate checks, level by level, that the largest such packing
in G stays below its threshold. On a certified graph the star counts of G
and G_0 differ by at most t/2.
"""

import enum
import json
import logging
import math
from typing import Any, Dict, List, NamedTuple, Optional, Tuple

from .bounds import (
    deviation_scale_M, dyadic_levels, event_threshold, level_count,
    tier_boundary)
from .common import (
    LemmaViolation, ParameterError, Prob, Verdict, check_count,
    check_positive, check_probability, dyadic_ceil)
from .const import BETA_T, BETA_TPLUS, MAX_SEARCH_EDGES
from .graphs import (
    Graph, StarPacking, count_stars, greedy_star_packing, packing_upper_bound,
    remove_center_incident_edges)
from .oracles import exact_bounded_star_count, exact_max_star_packing

log = logging.getLogger(__name__)


class Variant(enum.Enum):
    """ Packing event """
    T = 'T'
    """ One threshold beta M / D_j at every level. """
    TPLUS = 'Tplus'
    """ Thresholds gain a factor s at levels below M_bar / s^(1/(r-1)). """

    @property
    def max_beta(self) -> float:
        """ Largest slack for which the sandwich is guaranteed """
        return BETA_T if self is Variant.T else BETA_TPLUS


class Method(enum.Enum):
    """ How the packing number of a level was established """
    DEGREE = 'degree'
    """ No vertex reaches the arm count, so the packing number is zero. """
    GREEDY = 'greedy'
    """ A greedy packing reaches the threshold. """
    UPPER_BOUND = 'upper_bound'
    """ The degree bound sum floor(deg / k) stays below the threshold. """
    EXACT = 'exact'
    """ Branch and bound over edge assignments. """
    NONE = 'none'
    """ Beyond the search budget. """


class PeelingParams:
    """ Parameters of the peeling chain and of the packing events.

    :param r: Arm count, at least 2.
    :param n: Number of vertices.
    :param D: Base degree cap, positive.
    :param t: Absolute deviation, positive.
    :param beta: Packing slack.
    :param gamma: Log tilt exponent, needed for the refined event only.
    :param p: Edge probability, needed for the refined event only.
    """

    def __init__(
            self,
            r: int,
            n: int,
            D: float,
            t: float,
            beta: float = BETA_T,
            gamma: Optional[float] = None,
            p: Optional[Prob] = None,
    ) -> None:
        self.r = check_count(r, "r", 2)
        self.n = check_count(n, "n", 1)
        self.D = float(check_positive(D, "D"))
        self.t = float(check_positive(t, "t"))
        self.beta = float(check_positive(beta, "beta"))
        if gamma is not None:
            check_positive(gamma, "gamma")
        if p is not None:
            p = check_probability(p)
            if p == 0:
                raise ParameterError("p must be positive.")
        self.gamma = gamma
        self.p = p

    @property
    def M(self) -> float:
        """ max(t^(1/r), t / n^(r-1)) """
        return deviation_scale_M(self.t, self.n, self.r)

    @property
    def mean_bar(self) -> float:
        """ min(M, n) """
        return min(self.M, self.n)

    @property
    def J(self) -> int:
        """ Smallest J >= 0 with D_J >= M_bar """
        return level_count(self.D, self.mean_bar)

    @property
    def s(self) -> float:
        """ log(e / p^gamma) """
        if self.gamma is None or self.p is None:
            raise ParameterError("The refined event needs gamma and p.")
        return 1 - self.gamma * math.log(float(self.p))

    def level(self, j: int) -> float:
        """ D_j = 2^j D """
        return self.D * 2 ** j

    def arm(self, j: int) -> int:
        """ ceil(D_j) """
        return dyadic_ceil(self.level(j))

    def threshold(self, j: int, variant: Variant) -> float:
        """ Upper bound the event puts on N_{D_j}. """
        if variant is Variant.T:
            return event_threshold(self.M, self.level(j), self.beta)
        s = self.s
        return event_threshold(
            self.M, self.level(j), self.beta, s,
            tier_boundary(self.mean_bar, s, self.r))

    def to_dict(self) -> Dict[str, Any]:
        """ JSON compatible representation. """
        return {
            "r": self.r, "n": self.n, "D": self.D, "t": self.t,
            "beta": self.beta, "gamma": self.gamma,
            "p": None if self.p is None else float(self.p),
            "M": self.M, "M_bar": self.mean_bar, "J": self.J,
        }


class PeelingLevel(NamedTuple):
    """ G_j together with the packing that produced it from G_{j+1} """
    j: int
    level: float
    arm: int
    packing: StarPacking
    graph: Graph
    max_degree: int
    removed_edges: int
    stars: int


class PeelingTrace(NamedTuple):
    """ The chain G_J >= ... >= G_0; levels are ordered by j ascending """
    params: PeelingParams
    top: Graph
    levels: Tuple[PeelingLevel, ...]

    @property
    def J(self) -> int:
        """ Number of peeling steps """
        return len(self.levels)

    @property
    def final_graph(self) -> Graph:
        """ G_0 """
        return self.levels[0].graph if self.levels else self.top

    @property
    def final_stars(self) -> int:
        """ Star count of G_0 """
        return count_stars(self.final_graph, self.params.r)

    def graph(self, j: int) -> Graph:
        """ G_j for 0 <= j <= J """
        if j == self.J:
            return self.top
        return self.levels[j].graph

    def to_dict(self) -> Dict[str, Any]:
        """ JSON compatible representation with graphs as edge-list text. """
        return {
            "params": self.params.to_dict(),
            "J": self.J,
            "top": self.top.to_text(),
            "levels": [
                {"j": level.j,
                 "D_j": level.level,
                 "arm": level.arm,
                 "packing": [
                     [star.center, sorted(star.leaves)]
                     for star in level.packing.stars],
                 "max_degree": level.max_degree,
                 "removed_edges": level.removed_edges,
                 "stars": level.stars,
                 "graph": level.graph.to_text()}
                for level in self.levels],
            "final_stars": self.final_stars,
        }

    def to_json(self) -> str:
        """ Serializes to JSON text. """
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _check_graph(graph: Graph, params: PeelingParams) -> None:
    if graph.n != params.n:
        raise ParameterError(
            f"Graph has {graph.n} vertices, parameters expect {params.n}.")


def peel(graph: Graph, params: PeelingParams) -> PeelingTrace:
    """ Runs the peeling chain from G_J = graph down to G_0.

    :raises LemmaViolation: if some G_j with j < J has a vertex of degree
        at least ceil(D_j), which maximality of the packing rules out.
    """
    _check_graph(graph, params)
    J = params.J
    current = graph
    levels: List[PeelingLevel] = []
    for j in range(J - 1, -1, -1):
        arm = params.arm(j)
        packing = greedy_star_packing(current, arm)
        peeled = remove_center_incident_edges(current, packing)
        if peeled.max_degree > arm - 1:
            raise LemmaViolation(
                f"Level {j}: degree {peeled.max_degree} after removing a "
                f"maximal K_{{1,{arm}}} packing.")
        levels.append(PeelingLevel(
            j=j,
            level=params.level(j),
            arm=arm,
            packing=packing,
            graph=peeled,
            max_degree=peeled.max_degree,
            removed_edges=current.num_edges - peeled.num_edges,
            stars=count_stars(peeled, params.r),
        ))
        log.debug("Peeled level %d: %d stars of %d arms, %d edges removed",
                  j, packing.size, arm, current.num_edges - peeled.num_edges)
        current = peeled
    levels.reverse()
    return PeelingTrace(params, graph, tuple(levels))


class LevelCertificate(NamedTuple):
    """ Outcome at one level D_j <= n """
    j: int
    level: float
    arm: int
    threshold: float
    value: Optional[int]
    method: Method
    certified: bool
    violated: bool


class EventCertificate(NamedTuple):
    """ Three valued certificate of a packing event """
    variant: Variant
    verdict: Verdict
    levels: Tuple[LevelCertificate, ...]

    def to_dict(self) -> Dict[str, Any]:
        """ JSON compatible representation. """
        return {
            "variant": self.variant.value,
            "verdict": self.verdict.value,
            "levels": [
                {"j": level.j, "D_j": level.level, "arm": level.arm,
                 "threshold": level.threshold, "value": level.value,
                 "method": level.method.value}
                for level in self.levels],
        }


def _certify_level(graph: Graph, j: int, level: float, arm: int,
                   threshold: float) -> LevelCertificate:
    def result(value: Optional[int], method: Method) -> LevelCertificate:
        certified = value is not None and method is not Method.GREEDY and (
            value < threshold)
        violated = value is not None and value >= threshold and method in (
            Method.GREEDY, Method.EXACT)
        return LevelCertificate(
            j, level, arm, threshold, value, method, certified, violated)

    if graph.max_degree < arm:
        return result(0, Method.DEGREE)
    greedy = greedy_star_packing(graph, arm).size
    if greedy >= threshold:
        return result(greedy, Method.GREEDY)
    upper = packing_upper_bound(graph, arm)
    if upper < threshold:
        return result(upper, Method.UPPER_BOUND)
    if graph.num_edges <= MAX_SEARCH_EDGES:
        return result(exact_max_star_packing(graph, arm), Method.EXACT)
    return result(None, Method.NONE)


def _certify(graph: Graph, params: PeelingParams, variant: Variant
             ) -> EventCertificate:
    _check_graph(graph, params)
    levels = []
    for j, level in enumerate(dyadic_levels(params.D, params.n)):
        levels.append(_certify_level(
            graph, j, level, params.arm(j), params.threshold(j, variant)))
    if any(level.violated for level in levels):
        verdict = Verdict.FAILS
    elif all(level.certified for level in levels):
        verdict = Verdict.HOLDS
    else:
        verdict = Verdict.UNKNOWN
    log.debug("Event %s on %d levels: %s",
              variant.value, len(levels), verdict.value)
    return EventCertificate(variant, verdict, tuple(levels))


def certify_event_T(graph: Graph, params: PeelingParams) -> EventCertificate:
    """ Certifies N_{D_j} < beta M / D_j at every level with D_j <= n.

    Levels with D_j > n hold trivially since no vertex has that many
    neighbors.
    """
    return _certify(graph, params, Variant.T)


def certify_event_Tplus(graph: Graph, params: PeelingParams
                        ) -> EventCertificate:
    """ Certifies the refined event with thresholds beta M s / D_j below
    M_bar / s^(1/(r-1)) and beta M / D_j from there on.
    """
    if params.gamma is None or params.p is None:
        raise ParameterError("The refined event needs gamma and p.")
    return _certify(graph, params, Variant.TPLUS)


class SandwichReport(NamedTuple):
    """ Star counts around a peeling chain """
    variant: Variant
    verdict: Verdict
    stars: int
    final_stars: int
    half_t: float
    bounded_stars: Optional[int]
    trace: PeelingTrace
    certificate: EventCertificate

    @property
    def checked(self) -> bool:
        """ True if the deterministic claims were asserted """
        return self.verdict is Verdict.HOLDS

    def to_dict(self) -> Dict[str, Any]:
        """ JSON compatible representation. """
        return {
            "variant": self.variant.value,
            "verdict": self.verdict.value,
            "X": self.stars,
            "X_G0": self.final_stars,
            "half_t": self.half_t,
            "X_D": self.bounded_stars,
            "certificate": self.certificate.to_dict(),
            "trace": self.trace.to_dict(),
        }


def verify_sandwich(graph: Graph, params: PeelingParams,
                    variant: Variant) -> SandwichReport:
    """ Peels the graph and, when the event is certified, asserts
    X(G_0) <= X(G) <= X(G_0) + t/2 and max degree of G_J <= D_J. Within the
    search budget it also asserts X_D(G) >= X(G_0) and X(G) <= X_D(G) + t/2.

    :raises ParameterError: if beta exceeds the slack of the variant.
    :raises LemmaViolation: if a claim fails on a certified graph.
    """
    if params.beta > variant.max_beta:
        raise ParameterError(
            f"beta must be at most {variant.max_beta} for event "
            f"{variant.value}, got {params.beta}")
    if variant is Variant.T:
        certificate = certify_event_T(graph, params)
    else:
        certificate = certify_event_Tplus(graph, params)
    trace = peel(graph, params)
    stars = count_stars(graph, params.r)
    final_stars = trace.final_stars
    half_t = params.t / 2
    bounded: Optional[int] = None
    if certificate.verdict is Verdict.HOLDS:
        if not final_stars <= stars <= final_stars + half_t:
            raise LemmaViolation(
                f"Sandwich fails: X(G_0)={final_stars}, X={stars}, "
                f"t/2={half_t}")
        if graph.max_degree > params.level(params.J):
            raise LemmaViolation(
                f"Top level degree {graph.max_degree} exceeds "
                f"D_J={params.level(params.J)}")
        if graph.num_edges <= MAX_SEARCH_EDGES:
            bounded = exact_bounded_star_count(graph, params.r, params.D)
            if bounded < final_stars or stars > bounded + half_t:
                raise LemmaViolation(
                    f"Bounded count X_D={bounded} is not within the "
                    f"sandwich of X(G_0)={final_stars}, X={stars}")
    return SandwichReport(
        variant=variant,
        verdict=certificate.verdict,
        stars=stars,
        final_stars=final_stars,
        half_t=half_t,
        bounded_stars=bounded,
        trace=trace,
        certificate=certificate,
    )
