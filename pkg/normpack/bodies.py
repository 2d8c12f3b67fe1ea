# -*- coding: utf-8 -*-

"""
normpack.bodies
~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

This module represents centrally symmetric convex bodies through their gauge
(Minkowski functional) and support functions.

Three families are built in:

* l_p balls for 1 <= p <= inf,
* symmetric H-polytopes, given as pairs of facets {x : a.x <= b},
* the difference body (S - S)/2 of the regular d-simplex S, evaluated as the
  slice of the (d+1)-dimensional cross-polytope by the hyperplane
  x_1 + ... + x_{d+1} = 0.

Every body carries a positive `scale` that multiplies its canonical shape,
so that gauge(scale * B, x) = gauge(B, x) / scale.
"""

import functools
import itertools
import logging
import math

import numpy as np

from scipy.optimize import linprog
from scipy.spatial import HalfspaceIntersection, QhullError
from scipy.special import gammaln

from .seeding import as_generator

logger = logging.getLogger(__name__)

LP_BALL = "lp"
HPOLYTOPE = "hpoly"
SIMPLEX_DIFFERENCE = "simplex_diff"

supported_body_kind_names = (LP_BALL, HPOLYTOPE, SIMPLEX_DIFFERENCE)

SYMMETRY_TOLERANCE = 1e-9

# rejection sampling gives up below this acceptance rate
REJECTION_EFFICIENCY_FLOOR = 1e-4

MAX_REJECTION_BATCH = 1 << 18

SIMPLEX_VOLUME_SAMPLES = 2000000
SIMPLEX_VOLUME_SEED = 7

class BodyException(Exception):
    """An exception class to be used by the functions in this file so that the
    source of error can be detected.
    """
    pass

class BodyDimensionMismatchException(BodyException):
    """An exception indicating that a vector does not live in the body's
    ambient dimension.
    """
    pass

class BodyInvalidInputException(BodyException):
    """An exception indicating that a vector contains NaN entries."""
    pass

class BodyVolumeUnavailableException(BodyException):
    """An exception indicating that no closed form volume exists for the
    body; callers must estimate it with `volumetrics.mc_volume`.
    """
    pass

class BodySamplingException(BodyException):
    """An exception indicating that rejection sampling from the bounding box
    accepts too few points to be practical.
    """
    pass

class BodySpecificationException(BodyException):
    """An exception indicating a malformed body: asymmetric facets, an
    invalid p, a nonpositive scale or offset, or an unbounded polytope.
    """
    pass


class HPolytopeSpec:
    """The facet list {x : a_i.x <= b_i for all i} of a symmetric polytope.

    Normals are rescaled to unit length on construction. The facets must
    come in pairs (a, b), (-a, b) and every offset must be positive, so that
    the origin is an interior point and the polytope is centrally symmetric.
    """

    def __init__(self, normals, offsets, tolerance=SYMMETRY_TOLERANCE):

        normals = np.atleast_2d(np.asarray(normals, dtype=float))
        offsets = np.asarray(offsets, dtype=float).reshape(-1)

        if normals.shape[0] != offsets.shape[0]:
            raise BodySpecificationException(
                "got {} normals but {} offsets".format(
                    normals.shape[0], offsets.shape[0]))

        if not np.all(np.isfinite(normals)) or not np.all(np.isfinite(offsets)):
            raise BodySpecificationException("facet data must be finite")

        lengths = np.linalg.norm(normals, axis=1)

        if np.any(lengths == 0):
            raise BodySpecificationException("facet normals must be nonzero")

        if np.any(offsets <= 0):
            raise BodySpecificationException(
                "facet offsets must be positive so the origin is interior")

        self.normals = normals / lengths[:, None]
        self.offsets = offsets / lengths
        self.tolerance = tolerance

        self._check_symmetric()

    def _check_symmetric(self):

        cosines = self.normals @ self.normals.T

        for i in range(self.facet_count):

            partners = np.nonzero(cosines[i] <= -1.0 + self.tolerance)[0]

            matched = np.any(
                np.abs(self.offsets[partners] - self.offsets[i]) <=
                self.tolerance * max(1.0, self.offsets[i])
            )

            if not matched:
                raise BodySpecificationException(
                    "facet {} with normal {} has no opposite facet with the "
                    "same offset; only centrally symmetric polytopes are "
                    "accepted".format(i, self.normals[i].tolist()))

    @property
    def dim(self):
        return self.normals.shape[1]

    @property
    def facet_count(self):
        return self.normals.shape[0]

    def to_list(self):
        return [
            {"normal": [float(v) for v in normal], "offset": float(offset)}
            for normal, offset in zip(self.normals, self.offsets)
        ]


@functools.lru_cache(maxsize=None)
def simplex_hyperplane_basis(d):
    """Returns a (d+1) x d matrix whose orthonormal columns span the
    hyperplane x_1 + ... + x_{d+1} = 0 (Helmert basis). A point x of R^d is
    embedded as U @ x.
    """

    basis = np.zeros((d + 1, d))

    for k in range(1, d + 1):
        basis[:k, k - 1] = 1.0
        basis[k, k - 1] = -float(k)
        basis[:, k - 1] /= math.sqrt(k * (k + 1))

    basis.setflags(write=False)

    return basis


class ConvexBody:
    """A centrally symmetric convex body in R^d.

    `kind` is one of "lp", "hpoly" or "simplex_diff". `p` is only used by
    l_p balls and may be math.inf. `facets` is an HPolytopeSpec and only used
    by H-polytopes. `volume`, when known, is the volume of this body (for
    instance after `normalize_to_unit_volume`).
    """

    def __init__(self, kind, dim, scale=1.0, p=None, facets=None, volume=None):

        if kind not in supported_body_kind_names:
            raise BodySpecificationException(
                "{} is not a supported body kind, supported kinds are "
                "{}".format(kind, list(supported_body_kind_names)))

        dim = int(dim)
        scale = float(scale)

        if dim < 1:
            raise BodySpecificationException(
                "dimension must be positive, got {}".format(dim))

        if not (scale > 0 and math.isfinite(scale)):
            raise BodySpecificationException(
                "scale must be a positive real, got {}".format(scale))

        if kind == LP_BALL:

            if p is None:
                raise BodySpecificationException("an l_p ball needs p")

            p = float(p)

            if not p >= 1:
                raise BodySpecificationException(
                    "p must lie in [1, inf], got {}".format(p))

        else:
            p = None

        if kind == HPOLYTOPE:

            if facets is None:
                raise BodySpecificationException("an H-polytope needs facets")

            if not isinstance(facets, HPolytopeSpec):
                facets = HPolytopeSpec(*facets)

            if facets.dim != dim:
                raise BodySpecificationException(
                    "facet normals have dimension {} but the body has "
                    "dimension {}".format(facets.dim, dim))

            if np.linalg.matrix_rank(facets.normals) < dim:
                raise BodySpecificationException(
                    "facet normals do not span R^{}, the polytope is "
                    "unbounded".format(dim))

        else:
            facets = None

        self.kind = kind
        self.dim = dim
        self.scale = scale
        self.p = p
        self.facets = facets
        self.volume = None if volume is None else float(volume)

        self._half_widths = None

    def __repr__(self):
        return "ConvexBody({})".format(self.to_dict())

    def __eq__(self, other):
        return isinstance(other, ConvexBody) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(repr(self))

    def to_dict(self):
        """Produces the JSON-compatible body specification."""

        spec = {"kind": self.kind, "d": self.dim, "scale": self.scale}

        if self.kind == LP_BALL:
            spec["p"] = "inf" if math.isinf(self.p) else self.p

        if self.kind == HPOLYTOPE:
            spec["facets"] = self.facets.to_list()

        if self.volume is not None:
            spec["volume"] = self.volume

        return spec

    def rescaled(self, factor, volume=None):
        """Returns the body factor * self."""

        if volume is None and self.volume is not None:
            volume = self.volume * factor ** self.dim

        return ConvexBody(self.kind, self.dim, scale=self.scale * factor,
            p=self.p, facets=self.facets, volume=volume)

    def canonical_gauge(self, points):
        """Vectorized gauge of the scale-1 body over the last axis."""

        if self.kind == LP_BALL:
            return np.linalg.norm(points, ord=self.p, axis=-1)

        if self.kind == HPOLYTOPE:
            ratios = (points @ self.facets.normals.T) / self.facets.offsets
            return np.maximum(ratios.max(axis=-1), 0.0)

        embedded = points @ simplex_hyperplane_basis(self.dim).T
        return np.abs(embedded).sum(axis=-1)

    def half_widths(self):
        """Half side lengths of the axis-aligned bounding box, i.e. the
        support values h(e_i).
        """

        if self._half_widths is None:
            self._half_widths = np.asarray(
                support(self, np.eye(self.dim)), dtype=float).reshape(self.dim)
            self._half_widths.setflags(write=False)

        return self._half_widths


def lp_ball(d, p, scale=1.0):
    return ConvexBody(LP_BALL, d, scale=scale, p=p)

def hpolytope(normals, offsets, scale=1.0):
    normals = np.atleast_2d(np.asarray(normals, dtype=float))
    return ConvexBody(HPOLYTOPE, normals.shape[1], scale=scale,
        facets=HPolytopeSpec(normals, offsets))

def simplex_difference(d, scale=1.0):
    return ConvexBody(SIMPLEX_DIFFERENCE, d, scale=scale)


def _as_points(body, x):

    points = np.asarray(x, dtype=float)

    if points.ndim == 0 or points.shape[-1] != body.dim:
        raise BodyDimensionMismatchException(
            "expected vectors of dimension {}, got shape {}".format(
                body.dim, points.shape))

    if np.isnan(points).any():
        raise BodyInvalidInputException("NaN in input vector")

    return points

def _scalar_or_array(values, points):

    if points.ndim == 1:
        return float(values)

    return values

def gauge(body, x):
    """Returns the Minkowski gauge of `x` with respect to `body`. `x` may
    also be an array of vectors along its last axis.
    """

    points = _as_points(body, x)

    return _scalar_or_array(body.canonical_gauge(points) / body.scale, points)

def _polytope_support(body, directions):

    facets = body.facets
    values = np.empty(directions.shape[0])

    for row, u in enumerate(directions):

        if not np.any(u):
            values[row] = 0.0
            continue

        result = linprog(-u, A_ub=facets.normals, b_ub=facets.offsets,
            bounds=[(None, None)] * body.dim, method="highs")

        if result.status != 0:
            raise BodySpecificationException(
                "support LP failed in direction {}: {}".format(
                    u.tolist(), result.message))

        values[row] = -result.fun

    return values

def support(body, u):
    """Returns the support function h_K(u) = sup_{x in K} x.u. `u` may also
    be an array of directions along its last axis.
    """

    directions = _as_points(body, u)
    flat = directions.reshape(-1, body.dim)

    if body.kind == LP_BALL:

        if body.p == 1:
            q = math.inf
        elif math.isinf(body.p):
            q = 1.0
        else:
            q = body.p / (body.p - 1.0)

        values = np.linalg.norm(flat, ord=q, axis=-1)

    elif body.kind == HPOLYTOPE:
        values = _polytope_support(body, flat)

    else:
        embedded = flat @ simplex_hyperplane_basis(body.dim).T
        values = (embedded.max(axis=-1) - embedded.min(axis=-1)) / 2.0

    values = body.scale * values.reshape(directions.shape[:-1])

    return _scalar_or_array(values, directions)

@functools.lru_cache(maxsize=None)
def _simplex_difference_unit_volume(d):

    body = simplex_difference(d)
    half = body.half_widths()
    box_volume = float(np.prod(2.0 * half))
    rng = np.random.default_rng(SIMPLEX_VOLUME_SEED)

    logger.debug("estimating the volume of the simplex difference body in "
        "dimension {} from {} samples".format(d, SIMPLEX_VOLUME_SAMPLES))

    hits = 0
    remaining = SIMPLEX_VOLUME_SAMPLES

    while remaining > 0:
        batch = min(remaining, MAX_REJECTION_BATCH)
        draws = rng.uniform(-half, half, size=(batch, d))
        hits += int(np.count_nonzero(body.canonical_gauge(draws) <= 1.0))
        remaining -= batch

    return box_volume * hits / SIMPLEX_VOLUME_SAMPLES

def closed_form_volume(body):
    """Returns the volume of `body` for l_p balls (Dirichlet formula) and the
    simplex difference body (Monte Carlo, computed once per dimension and
    cached). Raises BodyVolumeUnavailableException for H-polytopes.
    """

    d = body.dim

    if body.kind == LP_BALL:

        inverse_p = 0.0 if math.isinf(body.p) else 1.0 / body.p

        log_volume = d * math.log(2.0) + d * gammaln(1.0 + inverse_p) \
            - gammaln(1.0 + d * inverse_p) + d * math.log(body.scale)

        return math.exp(log_volume)

    if body.kind == SIMPLEX_DIFFERENCE:
        return _simplex_difference_unit_volume(d) * body.scale ** d

    raise BodyVolumeUnavailableException(
        "no closed form volume for an H-polytope, use mc_volume instead")

def known_volume(body):
    """Returns the recorded volume of `body` if one is attached, else its
    closed form volume.
    """

    if body.volume is not None:
        return body.volume

    return closed_form_volume(body)

def normalize_to_unit_volume(body, volume=None):
    """Returns `body` rescaled to volume 1. `volume` is an estimate of the
    current volume (for instance an McEstimate value) and is required for
    bodies without a closed form volume.
    """

    if volume is None:
        volume = known_volume(body)

    volume = float(getattr(volume, "value", volume))

    if not volume > 0:
        raise BodyVolumeUnavailableException(
            "cannot normalize a body of volume {}".format(volume))

    factor = volume ** (-1.0 / body.dim)

    logger.debug("normalizing {} body of volume {} by factor {}".format(
        body.kind, volume, factor))

    return body.rescaled(factor, volume=1.0)

def polytope_vertices(body):
    """Returns the vertices of a body with an H-representation as an
    (n, d) array.
    """

    d = body.dim

    if body.kind == LP_BALL and math.isinf(body.p):
        corners = itertools.product((1.0, -1.0), repeat=d)
        return body.scale * np.array(list(corners))

    if body.kind == LP_BALL and body.p == 1:
        return body.scale * np.vstack([np.eye(d), -np.eye(d)])

    if body.kind == SIMPLEX_DIFFERENCE:
        identity = np.eye(d + 1)
        pairs = [ (identity[i] - identity[j]) / 2.0
            for i in range(d + 1) for j in range(d + 1) if i != j ]
        return body.scale * (np.array(pairs) @ simplex_hyperplane_basis(d))

    poly = as_hpolytope(body)
    normals = poly.facets.normals
    offsets = poly.facets.offsets * poly.scale

    if poly.dim == 1:
        extent = float(np.min(offsets / np.abs(normals[:, 0])))
        return np.array([[extent], [-extent]])

    halfspaces = np.hstack([normals, -offsets[:, None]])
    intersection = HalfspaceIntersection(halfspaces, np.zeros(poly.dim))

    return np.unique(np.round(intersection.intersections, 12), axis=0)

def circumradius(body):
    """Returns R with body contained in the Euclidean ball of radius R."""

    d = body.dim

    if body.kind == LP_BALL:

        if body.p >= 2:
            exponent = 0.5 if math.isinf(body.p) else 0.5 - 1.0 / body.p
            return body.scale * d ** exponent

        return body.scale

    if body.kind == SIMPLEX_DIFFERENCE:
        # vertices are the embedded (e_i - e_j) / 2
        return body.scale / math.sqrt(2.0)

    try:
        vertices = polytope_vertices(body)
        return float(np.linalg.norm(vertices, axis=1).max())

    except QhullError:
        logger.warning("vertex enumeration failed, using the bounding box "
            "corner as circumradius bound")

        return float(np.linalg.norm(body.half_widths()))

def as_hpolytope(body):
    """Returns an H-polytope body equal to `body`, for l_1 and l_inf balls,
    the simplex difference body, and H-polytopes themselves.
    """

    d = body.dim

    if body.kind == HPOLYTOPE:
        return body

    if body.kind == LP_BALL and math.isinf(body.p):
        normals = np.vstack([np.eye(d), -np.eye(d)])
        offsets = np.ones(2 * d)

    elif body.kind == LP_BALL and body.p == 1:
        signs = np.array(list(itertools.product((1.0, -1.0), repeat=d)))
        normals = signs / math.sqrt(d)
        offsets = np.full(signs.shape[0], 1.0 / math.sqrt(d))

    elif body.kind == SIMPLEX_DIFFERENCE:
        basis = simplex_hyperplane_basis(d)
        signs = np.array(list(itertools.product((1.0, -1.0), repeat=d + 1)))
        projected = signs @ basis
        lengths = np.linalg.norm(projected, axis=1)
        keep = lengths > SYMMETRY_TOLERANCE
        normals = projected[keep] / lengths[keep, None]
        offsets = 1.0 / lengths[keep]

    else:
        raise BodyException(
            "an l_{} ball has no H-representation".format(body.p))

    return ConvexBody(HPOLYTOPE, d, scale=body.scale,
        facets=HPolytopeSpec(normals, offsets), volume=body.volume)

def random_symmetric_hpolytope(d, pairs, rng):
    """Draws a random centrally symmetric H-polytope with `pairs` facet
    pairs, uniformly random unit normals and offsets in [0.5, 1.5].
    """

    rng = as_generator(rng)

    if pairs < d:
        raise BodySpecificationException(
            "need at least {} facet pairs in dimension {}".format(d, d))

    while True:
        normals = rng.standard_normal((pairs, d))
        normals /= np.linalg.norm(normals, axis=1)[:, None]

        if np.linalg.matrix_rank(normals) == d:
            break

    offsets = rng.uniform(0.5, 1.5, size=pairs)

    return hpolytope(np.vstack([normals, -normals]),
        np.concatenate([offsets, offsets]))

def sample_uniform(body, rng, n, efficiency_floor=REJECTION_EFFICIENCY_FLOOR):
    """Draws `n` points uniformly from `body` by rejection from its bounding
    box. Raises BodySamplingException when fewer than `efficiency_floor` of
    the box draws land in the body.
    """

    if n < 1:
        raise BodyException("need at least one sample, got {}".format(n))

    rng = as_generator(rng)
    half = body.half_widths()

    accepted = []
    have = 0
    drawn = 0
    batch = max(1024, 2 * n)

    while have < n:

        batch = min(batch, MAX_REJECTION_BATCH)
        draws = rng.uniform(-half, half, size=(batch, body.dim))
        inside = draws[body.canonical_gauge(draws) <= body.scale]

        accepted.append(inside)
        have += inside.shape[0]
        drawn += batch

        efficiency = have / drawn

        if drawn >= 10.0 / efficiency_floor and efficiency < efficiency_floor:
            raise BodySamplingException(
                "rejection sampling accepted {} of {} draws for a {} body in "
                "dimension {}; this dimension is infeasible for box "
                "rejection".format(have, drawn, body.kind, body.dim))

        batch = int(math.ceil((n - have) / max(efficiency, efficiency_floor) * 1.2)) + 64

    return np.concatenate(accepted)[:n]
