""" Graphs, seeded G(n,p) sampling, star counting and star packings """

from functools import lru_cache
from itertools import combinations
from typing import (
    AbstractSet, Dict, FrozenSet, Iterable, Iterator, List, NamedTuple,
    Optional, Set, Tuple,
)

import numpy as np
import numpy.typing as npt

from .common import (
    ParameterError, Prob, check_count, check_probability, comb0)
from .const import SEED_MASK

Edge = Tuple[int, int]


def ordered_edge(u: int, v: int) -> Edge:
    """ Returns the pair with the smaller endpoint first. """
    return (u, v) if u < v else (v, u)


@lru_cache(maxsize=32)
def edge_pairs(n: int) -> Tuple[Edge, ...]:
    """ All vertex pairs of K_n in ascending lexicographic order.

    Position i of this tuple is bit i of a graph bitmask.
    """
    return tuple(combinations(range(n), 2))


@lru_cache(maxsize=32)
def _pair_endpoints(n: int) -> Tuple[npt.NDArray[np.int64], npt.NDArray[np.int64]]:
    lower, upper = np.triu_indices(n, 1)
    return lower.astype(np.int64), upper.astype(np.int64)


class Graph:
    """ Immutable simple undirected graph on vertices 0 .. n-1.

    Adjacency is a tuple of frozensets, so neighbor iteration is O(deg) and
    edge membership O(1) expected. Degrees are cached at construction.

    :param n: The number of vertices.
    :param edges: Unordered vertex pairs. Loops, duplicates and endpoints
        outside [0, n) are rejected.
    """
    __slots__ = ('_n', '_adj', '_degrees', '_num_edges')

    _n: int
    _adj: Tuple[FrozenSet[int], ...]
    _degrees: Tuple[int, ...]
    _num_edges: int

    def __init__(self, n: int, edges: Iterable[Tuple[int, int]] = ()) -> None:
        check_count(n, "n")
        adj: List[Set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ParameterError(f"Edge ({u}, {v}) outside [0, {n}).")
            if u == v:
                raise ParameterError(f"Loop at vertex {u}.")
            if v in adj[u]:
                raise ParameterError(f"Duplicate edge ({u}, {v}).")
            adj[u].add(v)
            adj[v].add(u)
        self._set_adjacency(n, tuple(frozenset(nbrs) for nbrs in adj), None)

    def _set_adjacency(
            self,
            n: int,
            adj: Tuple[FrozenSet[int], ...],
            degrees: Optional[Tuple[int, ...]],
    ) -> None:
        self._n = n
        self._adj = adj
        if degrees is None:
            degrees = tuple(len(nbrs) for nbrs in adj)
        self._degrees = degrees
        self._num_edges = sum(degrees) // 2

    @classmethod
    def _from_adjacency(
            cls,
            n: int,
            adj: Tuple[FrozenSet[int], ...],
            degrees: Optional[Tuple[int, ...]] = None,
    ) -> 'Graph':
        graph = cls.__new__(cls)
        graph._set_adjacency(n, adj, degrees)
        return graph

    @classmethod
    def empty(cls, n: int) -> 'Graph':
        """ Graph on n vertices without edges. """
        return cls(n)

    @classmethod
    def complete(cls, n: int) -> 'Graph':
        """ The complete graph K_n. """
        check_count(n, "n")
        return cls._from_adjacency(
            n, tuple(frozenset(range(n)) - {v} for v in range(n)))

    @classmethod
    def star(cls, k: int) -> 'Graph':
        """ The star K_{1,k} with hub 0 and leaves 1 .. k. """
        check_count(k, "k")
        return cls(k + 1, ((0, leaf) for leaf in range(1, k + 1)))

    @classmethod
    def complete_bipartite(
            cls, y: int, z: int, n: Optional[int] = None) -> 'Graph':
        """ K_{y,z} on vertices 0 .. y-1 and y .. y+z-1, padded to n. """
        check_count(y, "y")
        check_count(z, "z")
        if n is None:
            n = y + z
        if y + z > n:
            raise ParameterError(f"K_{{{y},{z}}} does not fit in {n} vertices.")
        return cls(n, ((u, y + w) for u in range(y) for w in range(z)))

    @classmethod
    def from_bitmask(cls, n: int, mask: int) -> 'Graph':
        """ Graph whose edge set is the bits of mask over edge_pairs(n). """
        pairs = edge_pairs(n)
        if mask < 0 or mask >> len(pairs):
            raise ParameterError(f"Bitmask {mask} out of range for n={n}.")
        return cls(n, (pair for i, pair in enumerate(pairs) if mask >> i & 1))

    @classmethod
    def from_text(cls, text: str) -> 'Graph':
        """ Parses the edge-list text format produced by to_text. """
        lines = [line for line in text.split("\n") if line.strip()]
        if not lines:
            raise ParameterError("Empty edge-list text.")
        try:
            n, num_edges = (int(val) for val in lines[0].split())
            edges = [
                ordered_edge(*(int(val) for val in line.split()))
                for line in lines[1:num_edges + 1]]
        except (TypeError, ValueError) as ex:
            raise ParameterError("Malformed edge-list text.") from ex
        if len(edges) != num_edges:
            raise ParameterError("Edge-list text is truncated.")
        return cls(n, edges)

    @property
    def n(self) -> int:
        """ Number of vertices """
        return self._n

    @property
    def num_edges(self) -> int:
        """ Number of edges """
        return self._num_edges

    @property
    def degrees(self) -> Tuple[int, ...]:
        """ Degree of every vertex """
        return self._degrees

    @property
    def max_degree(self) -> int:
        """ Maximum degree, zero for graphs without vertices. """
        return max(self._degrees, default=0)

    def degree(self, v: int) -> int:
        """ Degree of vertex v """
        return self._degrees[v]

    def neighbors(self, v: int) -> FrozenSet[int]:
        """ Neighbors of vertex v """
        return self._adj[v]

    def has_edge(self, u: int, v: int) -> bool:
        """ Tests edge membership. """
        return 0 <= u < self._n and v in self._adj[u]

    def edges(self) -> Tuple[Edge, ...]:
        """ All edges (u, v), u < v, in ascending lexicographic order. """
        return tuple(
            (u, v) for u in range(self._n)
            for v in sorted(self._adj[u]) if u < v)

    def without_vertex_edges(self, centers: AbstractSet[int]) -> 'Graph':
        """ Removes every edge incident to a vertex in centers. """
        adj = list(self._adj)
        degrees = list(self._degrees)
        for center in centers:
            for nbr in adj[center]:
                if nbr not in centers:
                    adj[nbr] = adj[nbr] - {center}
                    degrees[nbr] -= 1
        for center in centers:
            adj[center] = frozenset()
            degrees[center] = 0
        return Graph._from_adjacency(self._n, tuple(adj), tuple(degrees))

    def to_text(self) -> str:
        """ Edge-list text: "n m", then one "u v" line per edge. """
        edges = self.edges()
        lines = [f"{self._n} {len(edges)}"]
        lines.extend(f"{u} {v}" for u, v in edges)
        return "\n".join(lines) + "\n"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._n == other._n and self._adj == other._adj

    def __hash__(self) -> int:
        return hash((self._n, self._adj))

    def __repr__(self) -> str:
        return f"Graph({self._n}, {list(self.edges())!r})"


def replicate_seed(seed: int, index: int) -> int:
    """ Seed of replicate `index` in a sweep with base seed `seed`. """
    return (seed ^ index) & SEED_MASK


def spawn_seed(seed: int, index: int) -> int:
    """ Base seed of child stream `index`, spawned from `seed`.

    Children of one seed get independent replicate ranges, where seed XOR
    index would let neighbouring children reuse each other's seeds.
    """
    child = np.random.SeedSequence(seed, spawn_key=(index,))
    return int(child.generate_state(1, np.uint64)[0]) & SEED_MASK


def _check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ParameterError(f"Seed must be an integer, got {seed!r}")
    if not 0 <= seed <= SEED_MASK:
        raise ParameterError(f"Seed must fit in 64 bits, got {seed}")
    return seed


def sample_edge_mask(n: int, p: Prob, seed: int) -> npt.NDArray[np.bool_]:
    """ Inclusion flags of all pairs of K_n, in edge_pairs order.

    The generator is Philox keyed by the seed, so every pair draw is a pure
    function of (seed, pair index) on every platform.
    """
    check_count(n, "n")
    p = check_probability(p)
    rng = np.random.Generator(np.random.Philox(key=_check_seed(seed)))
    return rng.random(n * (n - 1) // 2) < float(p)


def sample_degrees(n: int, p: Prob, seed: int) -> npt.NDArray[np.int64]:
    """ Degree sequence of sample_gnp(n, p, seed) without building it. """
    mask = sample_edge_mask(n, p, seed)
    lower, upper = _pair_endpoints(n)
    return (np.bincount(lower[mask], minlength=n)
            + np.bincount(upper[mask], minlength=n))


def sample_gnp(n: int, p: Prob, seed: int) -> Graph:
    """ Samples G(n, p) reproducibly from a 64 bit seed. """
    mask = sample_edge_mask(n, p, seed)
    lower, upper = _pair_endpoints(n)
    return Graph(n, zip(lower[mask].tolist(), upper[mask].tolist()))


def count_stars_from_degrees(degrees: Iterable[int], r: int) -> int:
    """ Sum of C(d, r) over a degree sequence. """
    check_count(r, "r", 1)
    return sum(comb0(int(deg), r) for deg in degrees)


def count_stars(graph: Graph, r: int) -> int:
    """ Number of copies of K_{1,r} in the graph. """
    return count_stars_from_degrees(graph.degrees, r)


def star_copies(graph: Graph, r: int) -> Iterator[Tuple[int, FrozenSet[int]]]:
    """ Enumerates every copy of K_{1,r} as (center, leaves). """
    check_count(r, "r", 1)
    for center in range(graph.n):
        for leaves in combinations(sorted(graph.neighbors(center)), r):
            yield center, frozenset(leaves)


class Star(NamedTuple):
    """ A star given by its center and its leaves. """
    center: int
    leaves: FrozenSet[int]

    def edges(self) -> Tuple[Edge, ...]:
        """ Edges of the star in ascending order. """
        return tuple(
            sorted(ordered_edge(self.center, leaf) for leaf in self.leaves))


class StarPacking(NamedTuple):
    """ A collection of K_{1,k} stars. """
    k: int
    stars: Tuple[Star, ...]

    @property
    def size(self) -> int:
        """ Number of stars in the packing """
        return len(self.stars)

    @property
    def centers(self) -> FrozenSet[int]:
        """ All center vertices """
        return frozenset(star.center for star in self.stars)

    def edges(self) -> List[Edge]:
        """ All star edges, with repetitions if stars overlap. """
        return [edge for star in self.stars for edge in star.edges()]

    def is_edge_disjoint(self) -> bool:
        """ Tests that no edge is used twice. """
        edges = self.edges()
        return len(edges) == len(set(edges))


def _free_neighbors(
        graph: Graph, vertex: int, used: AbstractSet[Edge]) -> List[int]:
    # sorting neighbors sorts the incident edges by (min, max) endpoint
    return [
        nbr for nbr in sorted(graph.neighbors(vertex))
        if ordered_edge(vertex, nbr) not in used]


def greedy_star_packing(graph: Graph, k: int) -> StarPacking:
    """ Maximal edge-disjoint collection of K_{1,k}.

    Centers are scanned in increasing order; at each center the k lowest
    unused incident edges are taken while at least k remain.
    """
    check_count(k, "k", 1)
    used: Set[Edge] = set()
    stars: List[Star] = []
    for center in range(graph.n):
        if graph.degree(center) < k:
            continue
        free = _free_neighbors(graph, center, used)
        while len(free) >= k:
            leaves, free = free[:k], free[k:]
            stars.append(Star(center, frozenset(leaves)))
            used.update(ordered_edge(center, leaf) for leaf in leaves)
    return StarPacking(k, tuple(stars))


def unused_degrees(graph: Graph, packing: StarPacking) -> Tuple[int, ...]:
    """ Number of incident edges per vertex not used by the packing. """
    used = set(packing.edges())
    return tuple(
        len(_free_neighbors(graph, v, used)) for v in range(graph.n))


def is_maximal_packing(graph: Graph, packing: StarPacking) -> bool:
    """ True if no further K_{1,k} fits on the unused edges. """
    return all(deg < packing.k for deg in unused_degrees(graph, packing))


def packing_upper_bound(graph: Graph, k: int) -> int:
    """ Sum of floor(deg(v) / k), an upper bound on any K_{1,k} packing. """
    check_count(k, "k", 1)
    return sum(deg // k for deg in graph.degrees)


def remove_center_incident_edges(
        graph: Graph, packing: StarPacking) -> Graph:
    """ Removes every edge incident to a center of the packing. """
    for star in packing.stars:
        for leaf in star.leaves:
            if not graph.has_edge(star.center, leaf):
                raise ParameterError(
                    f"Packing edge ({star.center}, {leaf}) is not in the "
                    "graph.")
    if not packing.stars:
        return graph
    return graph.without_vertex_edges(packing.centers)


def edge_copy_counts(graph: Graph, r: int) -> Dict[Edge, int]:
    """ Number of K_{1,r} copies containing each edge. """
    counts = {edge: 0 for edge in graph.edges()}
    for center, leaves in star_copies(graph, r):
        for leaf in leaves:
            counts[ordered_edge(center, leaf)] += 1
    return counts
