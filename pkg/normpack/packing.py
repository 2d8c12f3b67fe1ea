# -*- coding: utf-8 -*-

"""
normpack.packing
~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

This module builds the random intersection graph behind the packing:

1. a Poisson point process X of intensity 2^-d Delta on the flat torus
   [0, L)^d,
2. the graph G(X, K) with an edge xy whenever x - y lies in 2K, i.e. the
   translates x + K and y + K intersect,
3. the pruning of the points that have too many neighbors (X_1), that have
   another point within x + 2I (X_2), or that belong to a pair whose common
   neighborhood is too large (X_3).

The surviving graph has maximum degree at most Delta + Delta^(2/3) and
maximum codegree below codegree_coeff * Delta.
"""

import collections
import logging
import math

from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from scipy import sparse
from scipy.spatial import cKDTree
from scipy.stats import poisson

from .bodies import circumradius, gauge
from .recordmodel import CheckReport, VERDICT_FAIL, VERDICT_PASS
from .seeding import as_generator, seed_value
from .volumetrics import CLASS_BOUNDARY, CLASS_OUTSIDE, \
    analytic_projection_support, classify_intersection, has_analytic_projection
from .workers import chunk_ranges, ordered_map

logger = logging.getLogger(__name__)

DEFAULT_MAX_POINTS = 2000000

PAIR_CHUNK_SIZE = 1 << 16

# minimal-image displacement of a translate must not reach around the torus
SELF_WRAP_FACTOR = 8.0

# covers the volume error of a body normalized by a Monte Carlo estimate
PROJECTION_FILTER_MARGIN = 1.05

class PackingException(Exception):
    """An exception class to be used by the functions in this file so that the
    source of error can be detected.
    """
    pass

class PackingDomainException(PackingException):
    """An exception indicating that the torus is too small for the body, so a
    translate could intersect its own periodic image.
    """
    pass

class PackingSampleSizeException(PackingException):
    """An exception indicating that the expected number of Poisson points
    exceeds the configured cap.
    """
    pass

class PackingProfileMismatchException(PackingException):
    """An exception indicating that the I_K profile or the graph was computed
    for a different body than the one being pruned.
    """
    pass


def default_codegree_coeff(d):
    """The d^-9 codegree coefficient, floored at 1e-3."""

    return max(float(d) ** -9, 1e-3)


class TorusDomain:
    """The flat torus [0, L)^d. Displacements are taken as the coordinate-wise
    minimal image in (-L/2, L/2]^d.
    """

    def __init__(self, d, L):

        if d < 1:
            raise PackingDomainException(
                "dimension must be positive, got {}".format(d))

        if not (L > 0 and math.isfinite(L)):
            raise PackingDomainException(
                "side length must be a positive real, got {}".format(L))

        self.d = int(d)
        self.L = float(L)

    def __repr__(self):
        return "TorusDomain(d={}, L={})".format(self.d, self.L)

    def __eq__(self, other):
        return isinstance(other, TorusDomain) and \
            (self.d, self.L) == (other.d, other.L)

    @property
    def volume(self):
        return self.L ** self.d

    def minimal_image(self, displacement):
        displacement = np.asarray(displacement, dtype=float)
        return displacement - self.L * np.ceil(displacement / self.L - 0.5)

    def wrap(self, points):
        """Maps points into [0, L)^d."""

        wrapped = np.mod(np.asarray(points, dtype=float), self.L)

        return np.minimum(wrapped, np.nextafter(self.L, 0.0))

    def minimum_side(self, body):
        return SELF_WRAP_FACTOR * circumradius(body)

    def validate_for(self, body):
        """Raises PackingDomainException unless L > 4 circumradius(2K)."""

        if body.dim != self.d:
            raise PackingDomainException(
                "body has dimension {} but the torus has dimension {}".format(
                    body.dim, self.d))

        required = self.minimum_side(body)

        if not self.L > required:
            raise PackingDomainException(
                "side length {} does not exceed 4 circumradius(2K) = {}; "
                "translates would wrap onto themselves".format(self.L, required))


@dataclass
class PointSet:
    """A Poisson sample on a torus."""

    points: np.ndarray
    domain: TorusDomain
    intensity: float
    seed: int = None

    def __len__(self):
        return self.points.shape[0]


def sample_poisson(domain, Delta, rng, max_points=DEFAULT_MAX_POINTS):
    """Draws N ~ Poisson(lam L^d), lam = 2^-d Delta, and places N uniform
    points on the torus.
    """

    if Delta < 0:
        raise PackingException("Delta must be nonnegative, got {}".format(Delta))

    seed = seed_value(rng)
    rng = as_generator(rng)

    intensity = 2.0 ** (-domain.d) * Delta
    expected = intensity * domain.volume

    if expected > max_points:
        raise PackingSampleSizeException(
            "expected {} points exceeds the cap of {}".format(expected, max_points))

    count = int(rng.poisson(expected))
    points = domain.wrap(rng.random((count, domain.d)) * domain.L)

    logger.info("sampled {} Poisson points (expected {}) on {}".format(
        count, expected, domain))

    return PointSet(points, domain, intensity, seed)


class NeighborIndex:
    """Fixed radius neighbor queries on the torus through a periodic k-d
    tree; pairs come back sorted with i < j.
    """

    def __init__(self, points, domain):
        self.points = np.asarray(points, dtype=float).reshape(-1, domain.d)
        self.domain = domain
        self.tree = cKDTree(self.points, boxsize=domain.L) \
            if self.points.shape[0] else None

    def pairs_within(self, radius):

        if self.tree is None or self.points.shape[0] < 2:
            return np.zeros((0, 2), dtype=np.int64)

        pairs = self.tree.query_pairs(radius, output_type='ndarray')

        if pairs.shape[0] == 0:
            return np.zeros((0, 2), dtype=np.int64)

        pairs = np.sort(pairs, axis=1)
        order = np.lexsort((pairs[:, 1], pairs[:, 0]))

        return pairs[order].astype(np.int64)

    def displacements(self, pairs):
        """Minimal-image y - x for every pair (x, y)."""

        return self.domain.minimal_image(
            self.points[pairs[:, 1]] - self.points[pairs[:, 0]])


def _gauge_filter(body, index, pairs, threshold, strict, workers):

    def mask_for(bounds):
        start, stop = bounds
        values = gauge(body, index.displacements(pairs[start:stop]))
        values = np.atleast_1d(values)
        return values < threshold if strict else values <= threshold

    if pairs.shape[0] == 0:
        return np.zeros(0, dtype=bool)

    masks = ordered_map(mask_for, chunk_ranges(pairs.shape[0], PAIR_CHUNK_SIZE),
        workers)

    return np.concatenate(masks)

def gauge_close_pairs(points, body, domain, threshold, strict=False, workers=1):
    """Returns the sorted pairs (i, j), i < j, whose minimal-image
    displacement has gauge <= threshold (< threshold when `strict`).
    """

    index = NeighborIndex(points, domain)
    radius = threshold * circumradius(body) * (1.0 + 1e-9)

    candidates = index.pairs_within(radius)
    keep = _gauge_filter(body, index, candidates, threshold, strict, workers)

    return candidates[keep]

def _symmetric_adjacency(edges, count):

    if edges.shape[0] == 0:
        return sparse.csr_matrix((count, count), dtype=np.int64)

    ones = np.ones(edges.shape[0], dtype=np.int64)
    upper = sparse.coo_matrix((ones, (edges[:, 0], edges[:, 1])),
        shape=(count, count))

    return (upper + upper.T).tocsr()


class PackingGraph:
    """The intersection graph G(X, K) on a subset of a Poisson sample.

    `vertex_ids` maps local vertex numbers back to indices of the original
    sample, so a pruned graph still knows where its points came from.
    """

    def __init__(self, points, body, domain, adjacency, vertex_ids=None):
        self.points = np.asarray(points, dtype=float).reshape(-1, domain.d)
        self.body = body
        self.domain = domain
        self.adjacency = adjacency.tocsr()

        if vertex_ids is None:
            vertex_ids = np.arange(self.points.shape[0])

        self.vertex_ids = np.asarray(vertex_ids, dtype=np.int64)

    @property
    def vertex_count(self):
        return self.points.shape[0]

    @property
    def edge_count(self):
        return int(self.adjacency.nnz // 2)

    def degrees(self):
        return np.asarray(self.adjacency.sum(axis=1)).reshape(-1).astype(np.int64)

    def neighbors(self, vertex):
        start, stop = self.adjacency.indptr[vertex], self.adjacency.indptr[vertex + 1]
        return self.adjacency.indices[start:stop]

    def has_edge(self, first, second):
        return bool(self.adjacency[first, second])

    def edges(self):
        """Edges (i, j) with i < j, sorted."""

        upper = sparse.triu(self.adjacency, k=1).tocoo()
        edges = np.column_stack([upper.row, upper.col]).astype(np.int64)

        if edges.shape[0] == 0:
            return edges.reshape(0, 2)

        return edges[np.lexsort((edges[:, 1], edges[:, 0]))]

    def codegrees(self):
        """Sparse matrix of common-neighbor counts, diagonal removed."""

        squared = (self.adjacency @ self.adjacency).tolil()
        squared.setdiag(0)
        squared = squared.tocsr()
        squared.eliminate_zeros()

        return squared

    def subgraph(self, keep):
        """The induced subgraph on the vertices where the boolean array
        `keep` is true, renumbered in order.
        """

        keep = np.asarray(keep, dtype=bool)
        selected = np.nonzero(keep)[0]
        adjacency = self.adjacency[selected][:, selected]

        return PackingGraph(self.points[selected], self.body, self.domain,
            adjacency, self.vertex_ids[selected])

    def to_networkx(self):
        graph = nx.Graph()
        graph.add_nodes_from(range(self.vertex_count))
        graph.add_edges_from(map(tuple, self.edges()))
        return graph


def build_graph(points, body, domain, workers=1):
    """Builds G(X, K): an edge for every pair with
    gauge(minimal-image(x - y)) <= 2. `points` is a PointSet or an array.
    """

    domain.validate_for(body)
    coordinates = getattr(points, "points", points)
    coordinates = np.asarray(coordinates, dtype=float).reshape(-1, domain.d)

    edges = gauge_close_pairs(coordinates, body, domain, 2.0, workers=workers)
    adjacency = _symmetric_adjacency(edges, coordinates.shape[0])

    logger.info("built intersection graph with {} vertices and {} "
        "edges".format(coordinates.shape[0], edges.shape[0]))

    return PackingGraph(coordinates, body, domain, adjacency)

def brute_force_adjacency(points, body, domain):
    """All pairs scan for the edges of G(X, K); returns sorted (i, j) pairs
    with i < j. Quadratic, meant as a test oracle.
    """

    points = np.asarray(points, dtype=float).reshape(-1, domain.d)
    edges = []

    for i in range(points.shape[0] - 1):
        displacement = domain.minimal_image(points[i + 1:] - points[i])
        close = np.nonzero(np.atleast_1d(gauge(body, displacement)) <= 2.0)[0]
        edges.extend((i, i + 1 + j) for j in close)

    return np.array(edges, dtype=np.int64).reshape(-1, 2)


@dataclass
class PruneReport:
    """Removal counts by rule. `removed_*` are first-match counts in the
    order X_1, X_2, X_3; `matched_*` are the full rule sizes; `removed`
    is the size of the union.
    """

    sampled: int
    removed_x1: int
    removed_x2: int
    removed_x3: int
    removed: int
    retained: int
    matched_x1: int = 0
    matched_x2: int = 0
    matched_x3: int = 0
    near_pairs: int = 0
    codegree_pairs: int = 0
    boundary_pairs: int = 0
    expected_sizes: dict = field(default_factory=dict)
    preconditions: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "sampled": self.sampled,
            "removed_x1": self.removed_x1,
            "removed_x2": self.removed_x2,
            "removed_x3": self.removed_x3,
            "removed": self.removed,
            "retained": self.retained,
            "matched_x1": self.matched_x1,
            "matched_x2": self.matched_x2,
            "matched_x3": self.matched_x3,
            "near_pairs": self.near_pairs,
            "codegree_pairs": self.codegree_pairs,
            "boundary_pairs": self.boundary_pairs,
            "expected_sizes": dict(self.expected_sizes),
            "preconditions": dict(self.preconditions)
        }


def degree_threshold(Delta):
    return Delta + Delta ** (2.0 / 3.0)

def construction_preconditions(d, Delta, delta_K):
    """Which hypotheses of the degree/codegree guarantee hold."""

    return {
        "d_above_10": d > 10,
        "Delta_above_d12": Delta > float(d) ** 12,
        "Delta_at_most_Delta_K": Delta <= delta_K
    }

def expected_prune_sizes(count, d, Delta, ik_volume, delta, codegree_coeff):
    """Reference sizes for the three rules on a sample of `count` points,
    from exact Poisson tails under the Palm distribution.
    """

    threshold = degree_threshold(Delta)
    codegree_threshold = codegree_coeff * Delta

    x1_probability = float(poisson.sf(math.floor(threshold), Delta))
    x2_probability = -math.expm1(-Delta * ik_volume)
    s3_probability = float(poisson.sf(math.ceil(codegree_threshold) - 1,
        delta * Delta))

    return {
        "x1": count * x1_probability,
        "x1_tail_bound": count * math.exp(-Delta ** (2.0 / 3.0) / 3.0),
        "x2": count * x2_probability,
        "x3": count * 2.0 ** d * Delta * s3_probability
    }

def near_pairs_in_2i(graph, body, ik, samples, rng, workers=1):
    """Pairs (i, j) with y - x in 2I, i.e. f((y - x)/2) > delta. Boundary
    classifications count as inside. Returns (pairs, boundary_count).
    """

    if ik.delta >= 1.0 or graph.vertex_count < 2:
        return np.zeros((0, 2), dtype=np.int64), 0

    index = NeighborIndex(graph.points, graph.domain)
    candidates = gauge_close_pairs(graph.points, body, graph.domain, 4.0,
        strict=True, workers=workers)

    if candidates.shape[0] == 0:
        return candidates, 0

    halves = 0.5 * index.displacements(candidates)

    if has_analytic_projection(body):
        # f(z) > delta forces h_ΠK(z) <= log(1/delta) for unit volume K
        reachable = analytic_projection_support(body, halves) <= \
            math.log(1.0 / ik.delta) * PROJECTION_FILTER_MARGIN
        candidates = candidates[reachable]
        halves = halves[reachable]

    codes, _ = classify_intersection(body, halves, ik.delta, samples, rng)

    inside = codes != CLASS_OUTSIDE
    boundary = int(np.count_nonzero(codes == CLASS_BOUNDARY))

    return candidates[inside], boundary

def prune(graph, body, ik, Delta, codegree_coeff=None, domain=None,
    samples=2000, rng=0, workers=1):
    """Removes X_1, X_2 and X_3 from `graph` and returns
    (pruned graph, PruneReport).

    All three rules are marked on the full graph before anything is removed.
    """

    if domain is None:
        domain = graph.domain

    if ik.body != body or graph.body != body:
        raise PackingProfileMismatchException(
            "the I_K profile and the graph must be computed for the body being "
            "pruned")

    if domain != graph.domain:
        raise PackingProfileMismatchException(
            "graph was built on {}, not {}".format(graph.domain, domain))

    d = body.dim

    if codegree_coeff is None:
        codegree_coeff = default_codegree_coeff(d)

    count = graph.vertex_count
    rng = as_generator(rng)

    degrees = graph.degrees()
    in_x1 = degrees > degree_threshold(Delta)

    close, boundary = near_pairs_in_2i(graph, body, ik, samples, rng, workers)
    in_x2 = np.zeros(count, dtype=bool)
    in_x2[close.reshape(-1)] = True

    codegrees = sparse.triu(graph.codegrees(), k=1).tocoo()
    heavy = codegrees.data >= codegree_coeff * Delta
    heavy_pairs = np.column_stack([codegrees.row[heavy], codegrees.col[heavy]])

    excluded = set(map(tuple, close.tolist()))
    s3 = [ pair for pair in map(tuple, heavy_pairs.tolist())
        if pair not in excluded ]

    in_x3 = np.zeros(count, dtype=bool)

    for first, second in s3:
        in_x3[first] = True
        in_x3[second] = True

    removed = in_x1 | in_x2 | in_x3

    report = PruneReport(
        sampled=count,
        removed_x1=int(np.count_nonzero(in_x1)),
        removed_x2=int(np.count_nonzero(in_x2 & ~in_x1)),
        removed_x3=int(np.count_nonzero(in_x3 & ~in_x1 & ~in_x2)),
        removed=int(np.count_nonzero(removed)),
        retained=int(np.count_nonzero(~removed)),
        matched_x1=int(np.count_nonzero(in_x1)),
        matched_x2=int(np.count_nonzero(in_x2)),
        matched_x3=int(np.count_nonzero(in_x3)),
        near_pairs=int(close.shape[0]),
        codegree_pairs=len(s3),
        boundary_pairs=boundary,
        expected_sizes=expected_prune_sizes(count, d, Delta,
            ik.volume_estimate.value, ik.delta, codegree_coeff),
        preconditions=construction_preconditions(d, Delta, ik.delta_K)
    )

    for name, holds in report.preconditions.items():
        if not holds:
            logger.warning("precondition {} does not hold; the degree and "
                "codegree bounds are enforced but the size guarantees do "
                "not apply".format(name))

    logger.info("pruned {} of {} points (X1 {}, X2 {}, X3 {})".format(
        report.removed, count, report.removed_x1, report.removed_x2,
        report.removed_x3))

    return graph.subgraph(~removed), report


@dataclass
class DegreeStats:
    histogram: dict
    max_degree: int
    mean_degree: float
    max_codegree: int
    expected_mean_degree: float = None

    def to_dict(self):
        return {
            "histogram": { str(key): value for key, value in self.histogram.items() },
            "max_degree": self.max_degree,
            "mean_degree": self.mean_degree,
            "max_codegree": self.max_codegree,
            "expected_mean_degree": self.expected_mean_degree
        }

def degree_codegree_stats(graph, Delta=None):
    """Degree histogram, maximum and mean degree, and maximum codegree over
    all vertex pairs. `Delta` is the expected mean degree of an unpruned
    Poisson graph on a unit volume body.
    """

    if graph.vertex_count == 0:
        return DegreeStats({}, 0, 0.0, 0, Delta)

    degrees = graph.degrees()
    values, counts = np.unique(degrees, return_counts=True)
    codegrees = graph.codegrees()

    return DegreeStats(
        histogram={ int(value): int(count) for value, count in zip(values, counts) },
        max_degree=int(degrees.max()),
        mean_degree=float(degrees.mean()),
        max_codegree=int(codegrees.max()) if codegrees.nnz else 0,
        expected_mean_degree=Delta
    )

def check_prune_postconditions(graph, Delta, codegree_coeff):
    """Rescans a pruned graph from raw coordinates: every degree must be at
    most Delta + Delta^(2/3) and every codegree below codegree_coeff * Delta.
    """

    edges = brute_force_adjacency(graph.points, graph.body, graph.domain)
    neighbors = collections.defaultdict(set)

    for first, second in edges.tolist():
        neighbors[first].add(second)
        neighbors[second].add(first)

    degree_bound = degree_threshold(Delta)
    codegree_bound = codegree_coeff * Delta

    degree_violations = sum(1 for vertex in neighbors
        if len(neighbors[vertex]) > degree_bound)

    common = collections.Counter()

    for vertex, adjacent in neighbors.items():
        ordered = sorted(adjacent)
        for position, first in enumerate(ordered):
            for second in ordered[position + 1:]:
                common[(first, second)] += 1

    codegree_violations = sum(1 for value in common.values()
        if value >= codegree_bound)

    violations = degree_violations + codegree_violations
    largest = max(common.values()) if common else 0

    return CheckReport("prune_postconditions", graph.body.kind, graph.domain.d,
        params={"Delta": Delta, "codegree_coeff": codegree_coeff,
            "degree_violations": degree_violations,
            "codegree_violations": codegree_violations,
            "max_degree": max((len(value) for value in neighbors.values()), default=0)},
        value=float(largest), std_error=0.0, bound=codegree_bound,
        violations=violations, trials=graph.vertex_count, seed=None,
        verdict=VERDICT_PASS if violations == 0 else VERDICT_FAIL)
