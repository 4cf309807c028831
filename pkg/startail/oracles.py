""" Brute-force ground truth at tiny scale

Every function here enumerates a sample space or a search tree completely.
Budgets are enforced up front with BudgetExceededError.
"""

from collections import Counter
from fractions import Fraction
from functools import lru_cache
import json
import logging
import math
from typing import (
    Any, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple,
    Union,
)

import numpy as np

from .common import (
    BudgetExceededError, ParameterError, Prob, as_exact, check_count,
    check_positive, check_probability, comb0)
from .const import (
    ENUM_BLOCK_BITS, MASS_TOLERANCE, MAX_ENUM_PAIRS, MAX_FAMILY_GROUND,
    MAX_FAMILY_SETS, MAX_PACKING_ENUM_PAIRS, MAX_SEARCH_EDGES)
from .graphs import Graph, edge_pairs, greedy_star_packing

log = logging.getLogger(__name__)

Real = Union[int, float, Fraction]

# (value, edge count) -> number of graphs
EnumerationTable = Mapping[Tuple[int, int], int]


class Distribution:
    """ Finite distribution of an integer valued random variable.

    In exact mode every probability is a Fraction and the total mass is
    exactly one. Otherwise probabilities are floats and the total mass is
    within 1e-12 of one.

    :param support: Mapping from value to probability. Zero probabilities
        are dropped.
    """

    def __init__(self, support: Mapping[int, Real]) -> None:
        exact = all(isinstance(prob, (int, Fraction)) for prob in support.values())
        cleaned: Dict[int, Real] = {}
        for value, prob in sorted(support.items()):
            if prob < 0:
                raise ParameterError(
                    f"Negative probability {prob} at value {value}.")
            if prob:
                cleaned[int(value)] = Fraction(prob) if exact else float(prob)
        total = sum(cleaned.values()) if exact else math.fsum(cleaned.values())
        if exact and total != 1:
            raise ParameterError(f"Total mass {total} is not one.")
        if not exact and abs(total - 1) > MASS_TOLERANCE:
            raise ParameterError(f"Total mass {total} is not one.")
        self._support = cleaned
        self._exact = exact

    @property
    def exact(self) -> bool:
        """ True for rational probabilities """
        return self._exact

    @property
    def support(self) -> Dict[int, Real]:
        """ Copy of the value to probability mapping, ascending by value. """
        return dict(self._support)

    def probability(self, value: int) -> Real:
        """ Pr(X = value) """
        return self._support.get(value, Fraction(0) if self._exact else 0.0)

    def tail(self, threshold: float) -> Real:
        """ Pr(X >= threshold) """
        probs = [
            prob for value, prob in self._support.items() if value >= threshold]
        if self._exact:
            return sum(probs, Fraction(0))
        return min(1.0, math.fsum(probs))

    @property
    def total_mass(self) -> Real:
        """ Sum of all probabilities """
        if self._exact:
            return sum(self._support.values(), Fraction(0))
        return math.fsum(self._support.values())

    def _moment(self, power: int) -> Real:
        terms = [value ** power * prob for value, prob in self._support.items()]
        if self._exact:
            return sum(terms, Fraction(0))
        return math.fsum(terms)

    @property
    def mean(self) -> Real:
        """ Expectation """
        return self._moment(1)

    @property
    def variance(self) -> Real:
        """ Variance, computed about the mean. """
        mean = self.mean
        terms = [(value - mean) ** 2 * prob
                 for value, prob in self._support.items()]
        if self._exact:
            return sum(terms, Fraction(0))
        return math.fsum(terms)

    @property
    def max_value(self) -> int:
        """ Largest value with positive probability """
        return max(self._support)

    def to_dict(self) -> Dict[str, Any]:
        """ JSON compatible representation. """
        if self._exact:
            return {"support": [
                [value, prob.numerator, prob.denominator]  # type: ignore
                for value, prob in self._support.items()]}
        return {"support": [
            [value, prob] for value, prob in self._support.items()]}

    def to_json(self) -> str:
        """ Serializes to JSON text. """
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> 'Distribution':
        """ Parses the output of to_json. """
        try:
            rows = json.loads(text)["support"]
            support: Dict[int, Real] = {}
            for row in rows:
                if len(row) == 3:
                    support[int(row[0])] = Fraction(int(row[1]), int(row[2]))
                else:
                    support[int(row[0])] = float(row[1])
        except (KeyError, TypeError, ValueError) as ex:
            raise ParameterError("Malformed distribution JSON.") from ex
        return cls(support)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Distribution):
            return NotImplemented
        return self._support == other._support

    def __hash__(self) -> int:
        return hash(tuple(self._support.items()))

    def __repr__(self) -> str:
        return f"Distribution({self._support!r})"


def law_from_table(table: EnumerationTable, num_pairs: int, p: Prob
                   ) -> Distribution:
    """ Evaluates an enumeration table at edge probability p.

    Each entry counts graphs by (value, edge count); a graph with e edges
    has probability p^e (1-p)^(num_pairs-e). Rational arithmetic is used
    when p has a small exact fraction.
    """
    p = check_probability(p)
    exact_p = as_exact(p)
    if exact_p is not None:
        support: Dict[int, Real] = {}
        for (value, edges), count in table.items():
            weight = count * exact_p ** edges * (1 - exact_p) ** (num_pairs - edges)
            support[value] = support.get(value, Fraction(0)) + weight
        return Distribution(support)
    float_p = float(p)
    grouped: Dict[int, List[float]] = {}
    for (value, edges), count in table.items():
        grouped.setdefault(value, []).append(
            count * float_p ** edges * (1 - float_p) ** (num_pairs - edges))
    return Distribution({
        value: math.fsum(weights) for value, weights in grouped.items()})


def _check_enum_budget(n: int, budget: int) -> int:
    check_count(n, "n")
    num_pairs = n * (n - 1) // 2
    if num_pairs > budget:
        raise BudgetExceededError(
            f"Enumeration over C({n}, 2) = {num_pairs} pairs exceeds the "
            f"budget of {budget}.")
    return num_pairs


def enumerate_star_block(n: int, r: int, start: int, stop: int
                         ) -> Counter[Tuple[int, int]]:
    """ Counts graphs with bitmask in [start, stop) by (stars, edges).

    Blocks are independent, so a caller may partition the bitmask range
    across workers and add the returned counters in any order.
    """
    pairs = edge_pairs(n)
    masks = np.arange(start, stop, dtype=np.int64)
    degrees = np.zeros((len(masks), n), dtype=np.int64)
    edges = np.zeros(len(masks), dtype=np.int64)
    for index, (u, v) in enumerate(pairs):
        bit = (masks >> index) & 1
        degrees[:, u] += bit
        degrees[:, v] += bit
        edges += bit
    comb_table = np.array([comb0(deg, r) for deg in range(n)], dtype=np.int64)
    values = comb_table[degrees].sum(axis=1)
    keys = values * (len(pairs) + 1) + edges
    uniq, counts = np.unique(keys, return_counts=True)
    return Counter({
        (int(key) // (len(pairs) + 1), int(key) % (len(pairs) + 1)): int(count)
        for key, count in zip(uniq, counts)})


@lru_cache(maxsize=64)
def star_enumeration_table(n: int, r: int) -> Dict[Tuple[int, int], int]:
    """ Number of graphs on n vertices by (star count, edge count). """
    num_pairs = _check_enum_budget(n, MAX_ENUM_PAIRS)
    check_count(r, "r", 1)
    total = 1 << num_pairs
    block = 1 << ENUM_BLOCK_BITS
    table: Counter[Tuple[int, int]] = Counter()
    for start in range(0, total, block):
        stop = min(start + block, total)
        table.update(enumerate_star_block(n, r, start, stop))
        log.debug("Enumerated bitmasks [%d, %d) of %d for n=%d r=%d",
                  start, stop, total, n, r)
    return dict(table)


def exact_star_distribution(n: int, p: Prob, r: int) -> Distribution:
    """ Exact law of the K_{1,r} count over G(n, p).

    :raises BudgetExceededError: if C(n, 2) exceeds 24.
    """
    p = check_probability(p)
    table = star_enumeration_table(n, r)
    return law_from_table(table, n * (n - 1) // 2, p)


def exact_star_tail(n: int, p: Prob, r: int, threshold: float) -> Real:
    """ Exact Pr(X >= threshold) over G(n, p). """
    return exact_star_distribution(n, p, r).tail(threshold)


def exact_variance_bruteforce(n: int, p: Prob, r: int) -> Real:
    """ Var X from the enumerated law. """
    return exact_star_distribution(n, p, r).variance


def _check_search_budget(graph: Graph) -> None:
    if graph.num_edges > MAX_SEARCH_EDGES:
        raise BudgetExceededError(
            f"Search over {graph.num_edges} edges exceeds the budget of "
            f"{MAX_SEARCH_EDGES}.")


def _suffix_incidence(n: int, edges: Sequence[Tuple[int, int]]
                      ) -> List[List[int]]:
    # free[i][v]: edges with index >= i incident to v
    free = [[0] * n for _ in range(len(edges) + 1)]
    for index in range(len(edges) - 1, -1, -1):
        row = list(free[index + 1])
        u, v = edges[index]
        row[u] += 1
        row[v] += 1
        free[index] = row
    return free


def exact_bounded_star_count(graph: Graph, r: int, D: float) -> int:
    """ X_D(G): most K_{1,r} copies in a spanning subgraph with degree <= D.

    Include-first branch and bound over the edges, pruned with the
    monotone bound sum over v of C(min(deg_H(v) + free_v, floor(D)), r).

    :raises BudgetExceededError: if the graph has more than 20 edges.
    """
    check_count(r, "r", 1)
    check_positive(D, "D")
    cap = math.floor(D)
    if cap >= graph.max_degree:
        return sum(comb0(deg, r) for deg in graph.degrees)
    _check_search_budget(graph)
    if cap < r:
        return 0
    edges = graph.edges()
    free = _suffix_incidence(graph.n, edges)
    degrees = [0] * graph.n
    best = 0

    def bound(index: int) -> int:
        return sum(
            comb0(min(deg + extra, cap), r)
            for deg, extra in zip(degrees, free[index]))

    def search(index: int, current: int) -> None:
        nonlocal best
        if current > best:
            best = current
        if index == len(edges) or bound(index) <= best:
            return
        u, v = edges[index]
        if degrees[u] < cap and degrees[v] < cap:
            gain = comb0(degrees[u], r - 1) + comb0(degrees[v], r - 1)
            degrees[u] += 1
            degrees[v] += 1
            search(index + 1, current + gain)
            degrees[u] -= 1
            degrees[v] -= 1
        search(index + 1, current)

    search(0, 0)
    return best


def exact_max_star_packing(graph: Graph, k: int) -> int:
    """ N_k(G): maximum number of edge-disjoint copies of K_{1,k}.

    A packing is the same as an assignment of edges to endpoints, with
    floor(a_v / k) stars at every v. The search assigns edges one at a time
    and prunes with sum over v of floor((a_v + free_v) / k), starting from
    the greedy packing size.

    :raises BudgetExceededError: if the graph has more than 20 edges.
    """
    check_count(k, "k", 1)
    if k > graph.max_degree:
        return 0
    _check_search_budget(graph)
    assigned = [0] * graph.n
    edges: List[Tuple[int, int]] = []
    for u, v in graph.edges():
        u_ok = graph.degree(u) >= k
        v_ok = graph.degree(v) >= k
        if u_ok and v_ok:
            edges.append((u, v))
        elif u_ok:
            assigned[u] += 1
        elif v_ok:
            assigned[v] += 1
    free = _suffix_incidence(graph.n, edges)
    best = greedy_star_packing(graph, k).size

    def bound(index: int) -> int:
        return sum(
            (count + extra) // k for count, extra in zip(assigned, free[index]))

    def search(index: int) -> None:
        nonlocal best
        if index == len(edges):
            best = max(best, sum(count // k for count in assigned))
            return
        if bound(index) <= best:
            return
        for endpoint in edges[index]:
            assigned[endpoint] += 1
            search(index + 1)
            assigned[endpoint] -= 1

    search(0)
    return best


@lru_cache(maxsize=16)
def packing_enumeration_table(n: int, k: int) -> Dict[Tuple[int, int], int]:
    """ Number of graphs on n vertices by (N_k, edge count). """
    num_pairs = _check_enum_budget(n, MAX_PACKING_ENUM_PAIRS)
    check_count(k, "k", 1)
    table: Counter[Tuple[int, int]] = Counter()
    for mask in range(1 << num_pairs):
        graph = Graph.from_bitmask(n, mask)
        table[exact_max_star_packing(graph, k), graph.num_edges] += 1
    log.debug("Enumerated packings of %d graphs for n=%d k=%d",
              1 << num_pairs, n, k)
    return dict(table)


def exact_packing_distribution(n: int, p: Prob, k: int) -> Distribution:
    """ Exact law of N_k over G(n, p).

    :raises BudgetExceededError: if C(n, 2) exceeds 15.
    """
    p = check_probability(p)
    return law_from_table(
        packing_enumeration_table(n, k), n * (n - 1) // 2, p)


class IndicatorFamily:
    """ Independent 0/1 variables and a family of subsets of them.

    For a set alpha, Y_alpha is the product of the variables in alpha.

    :param probabilities: Success probability of each ground element,
        indexed from zero.
    :param sets: Nonempty subsets of the ground index range.
    """

    def __init__(
            self,
            probabilities: Sequence[Prob],
            sets: Iterable[Iterable[int]],
    ) -> None:
        self.probabilities: Tuple[Prob, ...] = tuple(
            check_probability(prob, "element probability")
            for prob in probabilities)
        ground = range(len(self.probabilities))
        family: List[FrozenSet[int]] = []
        for members in sets:
            frozen = frozenset(members)
            if not frozen:
                raise ParameterError("Family sets must be nonempty.")
            if not frozen.issubset(ground):
                raise ParameterError(
                    f"Set {sorted(frozen)} is not a subset of the ground set "
                    f"of size {len(self.probabilities)}.")
            family.append(frozen)
        self.sets: Tuple[FrozenSet[int], ...] = tuple(family)

    @property
    def exact(self) -> bool:
        """ True if every probability has a small exact fraction """
        return all(as_exact(prob) is not None for prob in self.probabilities)

    def _probs(self) -> List[Real]:
        if self.exact:
            return [as_exact(prob) for prob in self.probabilities]  # type: ignore
        return [float(prob) for prob in self.probabilities]

    def expected_sum(self) -> Real:
        """ Sum over the family of E Y_alpha """
        probs = self._probs()
        total: Real = Fraction(0) if self.exact else 0.0
        for members in self.sets:
            term: Real = Fraction(1) if self.exact else 1.0
            for element in members:
                term *= probs[element]
            total += term
        return total

    def overlap_degree(self, subfamily: Iterable[int]) -> int:
        """ Max over beta in the subfamily of the sets meeting beta.

        Each set meets itself, so a nonempty subfamily has degree >= 1.
        """
        chosen = [self.sets[index] for index in subfamily]
        return max(
            (sum(1 for alpha in chosen if alpha & beta) for beta in chosen),
            default=0)


def _admissible_best(family: IndicatorFamily, C: float) -> List[int]:
    # best[on]: largest admissible subfamily inside the on-mask
    num_sets = len(family.sets)
    meets = [
        sum(1 << other for other, alpha in enumerate(family.sets) if alpha & beta)
        for beta in family.sets]
    best = [0] * (1 << num_sets)
    for mask in range(1, 1 << num_sets):
        admissible = all(
            bin(mask & meets[index]).count("1") <= C
            for index in range(num_sets) if mask >> index & 1)
        if admissible:
            best[mask] = bin(mask).count("1")
        else:
            best[mask] = max(
                best[mask & ~(1 << index)]
                for index in range(num_sets) if mask >> index & 1)
    return best


def exact_zc_tail(family: IndicatorFamily, C: float, threshold: float
                  ) -> Real:
    """ Exact Pr(Z_C >= threshold).

    Z_C is the largest sum of Y_alpha over subfamilies whose overlap degree
    is at most C. Admissibility is hereditary, so Z_C is the size of the
    largest admissible subfamily of the sets whose variables are all on.
    The law of the on-sets is built by a dynamic program over the ground
    elements, keeping the mask of sets still alive.

    :raises BudgetExceededError: beyond 20 ground elements or 12 sets.
    """
    check_positive(C, "C")
    if len(family.probabilities) > MAX_FAMILY_GROUND:
        raise BudgetExceededError(
            f"Ground set of {len(family.probabilities)} exceeds the budget "
            f"of {MAX_FAMILY_GROUND}.")
    if len(family.sets) > MAX_FAMILY_SETS:
        raise BudgetExceededError(
            f"Family of {len(family.sets)} sets exceeds the budget of "
            f"{MAX_FAMILY_SETS}.")
    exact = family.exact
    if threshold <= 0:
        return Fraction(1) if exact else 1.0
    probs = family._probs()  # pylint: disable=protected-access
    num_sets = len(family.sets)
    states: Dict[int, Real] = {
        (1 << num_sets) - 1: Fraction(1) if exact else 1.0}
    for element, prob in enumerate(probs):
        containing = sum(
            1 << index for index, members in enumerate(family.sets)
            if element in members)
        if not containing:
            continue
        updated: Dict[int, Real] = {}
        for state, weight in states.items():
            updated[state] = updated.get(state, 0) + weight * prob
            dead = state & ~containing
            updated[dead] = updated.get(dead, 0) + weight * (1 - prob)
        states = updated
    best = _admissible_best(family, C)
    hits = [weight for state, weight in states.items()
            if best[state] >= threshold]
    if exact:
        return sum(hits, Fraction(0))
    return min(1.0, math.fsum(hits))


def random_family(
        rng: np.random.Generator,
        ground: int,
        num_sets: int,
        max_set_size: Optional[int] = None,
) -> IndicatorFamily:
    """ Random family with mixed element probabilities k/8.

    Used by the acceptance checks to generate validation instances.
    """
    max_set_size = max_set_size or ground
    probabilities = [
        Fraction(int(rng.integers(1, 8)), 8) for _ in range(ground)]
    sets = []
    for _ in range(num_sets):
        size = int(rng.integers(1, min(max_set_size, ground) + 1))
        sets.append(rng.choice(ground, size=size, replace=False).tolist())
    return IndicatorFamily(probabilities, sets)
