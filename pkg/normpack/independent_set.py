# -*- coding: utf-8 -*-

"""
normpack.independent_set
~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

This module extracts a large independent set from the pruned intersection
graph and checks that its points are the centers of a packing.

Independent sets are found with a greedy pass (minimum remaining degree first,
or a random order) followed by a budgeted (1,2)-swap local search. Small
graphs can be solved exactly through a maximum clique of the complement.
"""

import heapq
import logging
import math

from dataclasses import dataclass

import networkx as nx
import numpy as np

from .bodies import circumradius, gauge, known_volume
from .packing import NeighborIndex
from .seeding import as_generator

logger = logging.getLogger(__name__)

MIN_DEGREE_FIRST = "min-degree"
RANDOM_ORDER = "random"

supported_order_policies = (MIN_DEGREE_FIRST, RANDOM_ORDER)

DEFAULT_LOCAL_SEARCH_BUDGET = 10000

PACKING_TOLERANCE = 1e-12

class IndependentSetException(Exception):
    """An exception class to be used by the functions in this file so that the
    source of error can be detected.
    """
    pass

class PackingOverlapException(IndependentSetException):
    """An exception indicating that two translates of the body overlap."""

    def __init__(self, first, second, value):
        self.first = first
        self.second = second
        self.value = value

        super().__init__(
            "centers {} and {} overlap: gauge of their difference is {} "
            "< 2".format(first, second, value))


def _as_networkx(graph):

    if isinstance(graph, nx.Graph):
        return graph

    return graph.to_networkx()

def is_independent_set(graph, vertices):

    network = _as_networkx(graph)
    chosen = set(vertices)

    return not any(neighbor in chosen
        for vertex in chosen for neighbor in network[vertex])

def greedy_independent_set(graph, order_policy=MIN_DEGREE_FIRST, rng=None):
    """Returns a maximal independent set as a sorted list of vertices.

    With MIN_DEGREE_FIRST the vertex of smallest degree in the remaining
    graph is chosen next, ties broken by vertex number. With RANDOM_ORDER the
    vertices are scanned in a permutation drawn from `rng`.
    """

    network = _as_networkx(graph)

    if order_policy not in supported_order_policies:
        raise IndependentSetException(
            "{} is not a supported order policy, supported policies are "
            "{}".format(order_policy, list(supported_order_policies)))

    if order_policy == RANDOM_ORDER:
        rng = as_generator(rng)
        order = sorted(network.nodes())
        chosen = set()
        blocked = set()

        for position in rng.permutation(len(order)):
            vertex = order[position]

            if vertex not in blocked:
                chosen.add(vertex)
                blocked.add(vertex)
                blocked.update(network[vertex])

    else:
        chosen = _min_degree_greedy(network)

    selected = sorted(chosen)
    count = network.number_of_nodes()
    largest = max((degree for _, degree in network.degree()), default=0)

    if count and len(selected) < count / (largest + 1):
        raise IndependentSetException(
            "greedy selected {} vertices, below n/(max degree + 1) = "
            "{}".format(len(selected), count / (largest + 1)))

    logger.debug("greedy ({}) selected {} of {} vertices".format(
        order_policy, len(selected), count))

    return selected

def _min_degree_greedy(network):

    alive = set(network.nodes())
    degree = { vertex: network.degree(vertex) for vertex in alive }
    heap = [ (value, vertex) for vertex, value in degree.items() ]
    heapq.heapify(heap)

    chosen = set()

    while heap:

        value, vertex = heapq.heappop(heap)

        if vertex not in alive or value != degree[vertex]:
            continue

        chosen.add(vertex)

        removed = [vertex] + [ u for u in network[vertex] if u in alive ]
        alive.difference_update(removed)

        for gone in removed:
            for neighbor in network[gone]:
                if neighbor in alive:
                    degree[neighbor] -= 1
                    heapq.heappush(heap, (degree[neighbor], neighbor))

    return chosen

def _first_non_adjacent_pair(network, candidates):

    for position, first in enumerate(candidates):
        for second in candidates[position + 1:]:
            if not network.has_edge(first, second):
                return first, second

    return None

def local_search_improve(graph, seed_set, budget=DEFAULT_LOCAL_SEARCH_BUDGET):
    """Grows an independent set with free insertions and (1,2)-swaps (drop
    one vertex, add two of its neighbors that have no other neighbor in the
    set) until no move applies or `budget` moves were made.

    The returned set is never smaller than `seed_set`.
    """

    network = _as_networkx(graph)
    solution = set(int(vertex) for vertex in seed_set)

    if not is_independent_set(network, solution):
        raise IndependentSetException("the seed set is not independent")

    tightness = { vertex: sum(1 for u in network[vertex] if u in solution)
        for vertex in network if vertex not in solution }

    def insert(vertex):
        solution.add(vertex)
        tightness.pop(vertex, None)

        for neighbor in network[vertex]:
            if neighbor in solution:
                raise IndependentSetException(
                    "move made {} and {} both selected".format(vertex, neighbor))

            tightness[neighbor] += 1

    def remove(vertex):
        solution.discard(vertex)
        tightness[vertex] = 0

        for neighbor in network[vertex]:
            tightness[neighbor] -= 1

    moves = 0
    improved = True

    while improved and moves < budget:

        improved = False

        for vertex in sorted(v for v, count in tightness.items() if count == 0):

            if moves >= budget:
                break

            if tightness.get(vertex) == 0:
                insert(vertex)
                moves += 1
                improved = True

        if improved:
            continue

        for vertex in sorted(solution):

            candidates = sorted(u for u in network[vertex] if tightness.get(u) == 1)
            pair = _first_non_adjacent_pair(network, candidates)

            if pair is not None:
                remove(vertex)
                insert(pair[0])
                insert(pair[1])
                moves += 1
                improved = True
                break

    logger.debug("local search made {} moves, set size {} -> {}".format(
        moves, len(seed_set), len(solution)))

    return sorted(solution)

def exhaustive_maximum_independent_set(graph):
    """An exact maximum independent set, as the maximum clique of the
    complement graph. Exponential; meant for small graphs.
    """

    network = _as_networkx(graph)

    if network.number_of_nodes() == 0:
        return []

    clique, _ = nx.max_weight_clique(nx.complement(network), weight=None)

    return sorted(clique)


@dataclass
class PackingResult:
    """A verified set of packing centers and its density."""

    centers: np.ndarray
    density: float
    trivial_bound: float
    min_gauge: float
    target_size: float = None
    target_density: float = None

    @property
    def size(self):
        return self.centers.shape[0]

    def to_dict(self):
        return {
            "size": self.size,
            "density": self.density,
            "trivial_bound": self.trivial_bound,
            "min_gauge": None if math.isinf(self.min_gauge) else self.min_gauge,
            "target_size": self.target_size,
            "target_density": self.target_density
        }

def verify_packing(centers, body, domain, tolerance=PACKING_TOLERANCE,
    retained=None, Delta=None, workers=1):
    """Checks from raw coordinates that no two translates center + K overlap
    on the torus: every pair must satisfy gauge(minimal-image(x - y)) >=
    2 (1 - tolerance). Raises PackingOverlapException naming the first
    offending pair.

    `retained` and `Delta` give the reference size |X| log(Delta) / Delta.
    """

    domain.validate_for(body)
    centers = np.asarray(centers, dtype=float).reshape(-1, domain.d)

    if centers.size and (centers.min() < 0 or centers.max() >= domain.L):
        raise IndependentSetException(
            "centers must lie in [0, {})^{}".format(domain.L, domain.d))

    index = NeighborIndex(centers, domain)
    nearby = index.pairs_within(4.0 * circumradius(body) * (1.0 + 1e-9))

    min_gauge = math.inf

    if nearby.shape[0]:
        values = np.atleast_1d(gauge(body, index.displacements(nearby)))
        worst = int(np.argmin(values))
        min_gauge = float(values[worst])

        if min_gauge < 2.0 * (1.0 - tolerance):
            first, second = nearby[worst]
            raise PackingOverlapException(int(first), int(second), min_gauge)

    volume = known_volume(body)
    density = centers.shape[0] * volume / domain.volume

    target_size = None
    target_density = None

    if retained is not None and Delta is not None and Delta > 1:
        target_size = retained * math.log(Delta) / Delta
        target_density = target_size * volume / domain.volume

    logger.info("verified packing of {} centers, density {} (trivial bound "
        "{})".format(centers.shape[0], density, 2.0 ** -domain.d))

    return PackingResult(centers, density, 2.0 ** -domain.d, min_gauge,
        target_size, target_density)
