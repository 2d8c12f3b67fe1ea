# -*- coding: utf-8 -*-

"""
normpack.volumetrics
~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

This module estimates volumes related to a convex body K:

* the volume of K itself,
* the covariogram f(x) = vol(K ∩ (K + x)) and its threshold set
  I_K = {x : f(x) > delta}, together with Delta_K = (d vol(I_K))^-1,
* the support function of the projection body, h_ΠK(u), which is the
  (d-1)-volume of the shadow of K on the hyperplane orthogonal to u,
* the volume of the polar projection body Π*K.

Closed forms are used where they exist (Euclidean balls, axis-aligned cubes,
polytopes through the Cauchy projection formula) and Monte Carlo estimates
otherwise. Every estimate is returned as an McEstimate carrying its standard
error, so callers can decide with explicit confidence bands.
"""

import functools
import logging
import math

from dataclasses import dataclass, field

import numpy as np

from scipy.linalg import null_space
from scipy.optimize import minimize_scalar
from scipy.spatial import ConvexHull, QhullError
from scipy.special import betainc, gammaln

from .bodies import LP_BALL, \
    BodyVolumeUnavailableException, _as_points, as_hpolytope, circumradius, \
    closed_form_volume, gauge, known_volume, polytope_vertices, \
    sample_uniform, support, MAX_REJECTION_BATCH
from .seeding import as_generator, seed_value
from .workers import chunk_ranges

logger = logging.getLogger(__name__)

MIN_MC_SAMPLES = 1000

CONFIDENCE_SIGMAS = 3.0

ESCALATION_FACTOR = 4
ESCALATION_LEVELS = 3

# upper bound on the number of float entries materialized per block
POOL_BLOCK_ELEMENTS = 1 << 22

CLASS_OUTSIDE = 0
CLASS_INSIDE = 1
CLASS_BOUNDARY = 2

class VolumetricsException(Exception):
    """An exception class to be used by the functions in this file so that the
    source of error can be detected.
    """
    pass

class VolumetricsBracketException(VolumetricsException):
    """An exception indicating that the one dimensional search along a line
    found a point of the body outside its circumradius, which means the
    search interval was too small.
    """
    pass

class VolumetricsParameterException(VolumetricsException):
    """An exception indicating an invalid threshold, direction or sample
    count.
    """
    pass


@dataclass(frozen=True)
class McEstimate:
    """A Monte Carlo estimate with its binomial standard error. Analytic
    values are stored with `std_error` 0 and `samples` 0.
    """

    value: float
    std_error: float
    samples: int
    seed: int = None

    def interval(self, sigmas=CONFIDENCE_SIGMAS):
        return (self.value - sigmas * self.std_error,
            self.value + sigmas * self.std_error)

    def brackets(self, target, sigmas=CONFIDENCE_SIGMAS, floor=0.0):
        low, high = self.interval(sigmas)
        return low - floor <= target <= high + floor

    def to_dict(self):
        return {
            "value": json_number(self.value),
            "std_error": json_number(self.std_error),
            "samples": self.samples,
            "seed": self.seed
        }


@dataclass(frozen=True)
class IkProfile:
    """The threshold set I_K of a unit volume body at level `delta`."""

    body: object
    delta: float
    volume_estimate: McEstimate
    delta_K: float
    boundary_count: int = 0
    flags: tuple = field(default_factory=tuple)

    @property
    def degenerate(self):
        return len(self.flags) > 0

    def to_dict(self):
        return {
            "body": self.body.to_dict(),
            "delta": self.delta,
            "volume": self.volume_estimate.to_dict(),
            "delta_K": json_number(self.delta_K),
            "boundary_count": self.boundary_count,
            "flags": list(self.flags)
        }


def json_number(value):
    """Maps infinities to the strings "inf" and "-inf" for strict JSON."""

    if value is None:
        return None

    value = float(value)

    if math.isinf(value):
        return "inf" if value > 0 else "-inf"

    return value

def log_unit_ball_volume(k):
    """Returns log(gamma_k), gamma_k = pi^(k/2) / (k/2)!, with gamma_0 = 1."""

    return 0.5 * k * math.log(math.pi) - gammaln(0.5 * k + 1.0)

def unit_ball_volume(k):
    return math.exp(log_unit_ball_volume(k))

def default_ik_delta(d):
    """The d^-10 threshold, capped below at 1e-6."""

    return max(float(d) ** -10, 1e-6)

def _binomial_estimate(scale, hits, samples, seed):

    fraction = hits / samples
    spread = math.sqrt(fraction * (1.0 - fraction) / samples)

    return McEstimate(scale * fraction, scale * spread, samples, seed)

def mc_indicator_volume(indicator, half_widths, samples, rng, center=None):
    """Estimates the volume of {x : indicator(x)} inside the box
    center + [-half_widths, half_widths] from `samples` uniform draws.
    `indicator` takes an (n, k) array and returns a boolean array of
    length n.
    """

    seed = seed_value(rng)
    rng = as_generator(rng)
    half_widths = np.asarray(half_widths, dtype=float)
    box_volume = float(np.prod(2.0 * half_widths))

    hits = 0

    for start, stop in chunk_ranges(samples, MAX_REJECTION_BATCH):
        draws = rng.uniform(-half_widths, half_widths,
            size=(stop - start, half_widths.shape[0]))

        if center is not None:
            draws += center

        hits += int(np.count_nonzero(indicator(draws)))

    return _binomial_estimate(box_volume, hits, samples, seed)

def mc_volume(body, samples, rng):
    """Estimates vol(body) by rejection from its bounding box."""

    if samples < MIN_MC_SAMPLES:
        raise VolumetricsParameterException(
            "mc_volume needs at least {} samples, got {}".format(
                MIN_MC_SAMPLES, samples))

    logger.debug("estimating volume of {} body in dimension {} from {} "
        "samples".format(body.kind, body.dim, samples))

    return mc_indicator_volume(
        lambda points: body.canonical_gauge(points) <= body.scale,
        body.half_widths(), samples, rng)

def _unit_volume_of(body):

    try:
        return known_volume(body)
    except BodyVolumeUnavailableException:
        raise VolumetricsParameterException(
            "the body has no recorded volume; normalize it first")

def exact_intersection_volume(body, x):
    """Returns f(x) = vol(K ∩ (K + x)) in closed form for Euclidean balls
    (lens formula) and axis-aligned cubes (product formula), else None.
    """

    if body.kind != LP_BALL or body.p not in (2.0, math.inf):
        return None

    points = _as_points(body, x)

    if math.isinf(body.p):
        side = 2.0 * body.scale
        values = np.clip(side - np.abs(points), 0.0, None).prod(axis=-1)

    else:
        ratio = np.linalg.norm(points, axis=-1) / (2.0 * body.scale)
        lens = betainc(0.5 * (body.dim + 1), 0.5,
            np.clip(1.0 - ratio ** 2, 0.0, 1.0))
        values = np.where(ratio < 1.0, closed_form_volume(body) * lens, 0.0)

    if points.ndim == 1:
        return float(values)

    return values

def intersection_volume(body, x, samples, rng):
    """Estimates f(x) = vol(K ∩ (K + x)) as vol(K) P[y - x in K] for y
    uniform in K. Translates with gauge(x) >= 2 are disjoint and give an
    exact 0.
    """

    point = _as_points(body, x)
    seed = seed_value(rng)

    if gauge(body, point) >= 2.0:
        return McEstimate(0.0, 0.0, samples, seed)

    volume = _unit_volume_of(body)
    pool = sample_uniform(body, rng, samples)
    hits = int(np.count_nonzero(
        body.canonical_gauge(pool - point) <= body.scale))

    return _binomial_estimate(volume, hits, samples, seed)

def _pool_hit_fractions(body, pool, shifts):

    fractions = np.empty(shifts.shape[0])
    block = max(1, POOL_BLOCK_ELEMENTS // (pool.shape[0] * body.dim))

    for start, stop in chunk_ranges(shifts.shape[0], block):
        moved = pool[None, :, :] - shifts[start:stop, None, :]
        fractions[start:stop] = \
            (body.canonical_gauge(moved) <= body.scale).mean(axis=1)

    return fractions

def classify_intersection(body, shifts, delta, samples, rng,
    levels=ESCALATION_LEVELS, sigmas=CONFIDENCE_SIGMAS):
    """Decides f(z) > delta for every row z of `shifts`.

    Returns (codes, values): codes are CLASS_INSIDE, CLASS_OUTSIDE or
    CLASS_BOUNDARY, values the last estimate of f. Bodies with a closed form
    f are decided exactly. Otherwise all undecided shifts share one pool of
    uniform samples per level, the pool grows by ESCALATION_FACTOR per level,
    and shifts whose band still contains delta after `levels` escalations are
    labelled boundary.
    """

    shifts = np.atleast_2d(_as_points(body, shifts))
    count = shifts.shape[0]

    codes = np.full(count, CLASS_OUTSIDE, dtype=np.int8)
    values = np.zeros(count)

    if count == 0:
        return codes, values

    exact = exact_intersection_volume(body, shifts)

    if exact is not None:
        codes[exact > delta] = CLASS_INSIDE
        return codes, exact

    rng = as_generator(rng)
    volume = _unit_volume_of(body)
    pending = np.nonzero(gauge(body, shifts) < 2.0)[0]
    pool_size = samples

    for level in range(levels + 1):

        if pending.size == 0:
            break

        logger.debug("classifying {} shifts against delta {} with a pool of "
            "{} samples (level {})".format(pending.size, delta, pool_size, level))

        pool = sample_uniform(body, rng, pool_size)
        fractions = _pool_hit_fractions(body, pool, shifts[pending])

        estimate = volume * fractions
        spread = volume * np.maximum(
            np.sqrt(fractions * (1.0 - fractions) / pool_size), 1.0 / pool_size)

        values[pending] = estimate

        inside = estimate - sigmas * spread > delta
        outside = estimate + sigmas * spread < delta

        codes[pending[inside]] = CLASS_INSIDE
        codes[pending[outside]] = CLASS_OUTSIDE

        pending = pending[~(inside | outside)]
        pool_size *= ESCALATION_FACTOR

    codes[pending] = CLASS_BOUNDARY

    return codes, values

def estimate_ik(body, delta, outer_samples, inner_samples, rng):
    """Estimates vol(I_K), I_K = {x : f(x) > delta}, for a unit volume body.

    Points x are drawn uniformly from 2K and classified with
    classify_intersection; boundary points count as inside, which can only
    lower Delta_K.
    """

    d = body.dim

    if delta is None:
        delta = default_ik_delta(d)

    delta = float(delta)
    seed = seed_value(rng)

    if not delta > 0:
        raise VolumetricsParameterException(
            "delta must be positive, got {}".format(delta))

    if delta >= 1.0:
        logger.warning("delta {} >= 1: f never exceeds vol(K) = 1, so I_K is "
            "empty".format(delta))

        return IkProfile(body, delta, McEstimate(0.0, 0.0, 0, seed),
            math.inf, 0, ("delta>=1",))

    rng = as_generator(rng)
    volume = _unit_volume_of(body)

    shifts = 2.0 * sample_uniform(body, rng, outer_samples)
    codes, _ = classify_intersection(body, shifts, delta, inner_samples, rng)

    boundary = int(np.count_nonzero(codes == CLASS_BOUNDARY))
    hits = int(np.count_nonzero(codes != CLASS_OUTSIDE))

    estimate = _binomial_estimate(2.0 ** d * volume, hits, outer_samples, seed)

    flags = []

    if hits == 0:
        flags.append("no-hits")

    if hits == outer_samples:
        flags.append("all-hits")

    for flag in flags:
        logger.warning("degenerate I_K estimate at delta {}: {}".format(
            delta, flag))

    delta_K = math.inf if estimate.value == 0 else 1.0 / (d * estimate.value)

    logger.info("vol(I_K) = {} +/- {} at delta {}, Delta_K = {} ({} boundary "
        "points)".format(estimate.value, estimate.std_error, delta, delta_K,
        boundary))

    return IkProfile(body, delta, estimate, delta_K, boundary, tuple(flags))


def has_analytic_projection(body):
    """Whether h_ΠK has a closed form for `body`."""

    if body.dim == 1 or body.kind != LP_BALL:
        return True

    return body.p in (1.0, 2.0, math.inf)

@functools.lru_cache(maxsize=64)
def polytope_facet_areas(body):
    """Returns (normals, areas): the unit facet normals of `body` and the
    (d-1)-volumes of the corresponding facets. Redundant facets get area 0.
    """

    poly = as_hpolytope(body)
    d = poly.dim
    vertices = polytope_vertices(body)
    normals = poly.facets.normals
    offsets = poly.facets.offsets * poly.scale

    areas = np.zeros(normals.shape[0])

    for index, (normal, offset) in enumerate(zip(normals, offsets)):

        on_facet = vertices[
            np.abs(vertices @ normal - offset) <= 1e-9 * max(1.0, offset)]

        if on_facet.shape[0] < d:
            continue

        coordinates = on_facet @ null_space(normal[None, :])

        if d == 2:
            areas[index] = float(coordinates.max() - coordinates.min())
            continue

        try:
            areas[index] = ConvexHull(coordinates).volume
        except QhullError:
            logger.debug("facet {} is degenerate, area 0".format(index))

    return normals, areas

def analytic_projection_support(body, directions):
    """Returns h_ΠK(u) for the rows u of `directions` (any length), or None
    when no closed form exists.
    """

    if not has_analytic_projection(body):
        return None

    directions = np.atleast_2d(_as_points(body, directions))
    lengths = np.linalg.norm(directions, axis=1)
    d = body.dim

    if d == 1:
        return lengths

    if body.kind == LP_BALL and body.p == 2:
        radius = body.scale
        return unit_ball_volume(d - 1) * radius ** (d - 1) * lengths

    if body.kind == LP_BALL and math.isinf(body.p):
        side = 2.0 * body.scale
        return side ** (d - 1) * np.abs(directions).sum(axis=1)

    normals, areas = polytope_facet_areas(body)

    # Cauchy: h(u) = 1/2 sum_i area(F_i) |u . a_i|
    return 0.5 * np.abs(directions @ normals.T) @ areas

def _line_meets_body(body, point, direction, radius):

    along = lambda t: float(body.canonical_gauge(point + t * direction))
    tolerance = 1e-10 * max(1.0, radius)

    result = minimize_scalar(along, bounds=(-radius, radius), method="bounded",
        options={"xatol": tolerance})

    if not np.isfinite(result.fun):
        raise VolumetricsBracketException(
            "line search failed at {}: {}".format(point.tolist(),
                getattr(result, "message", "")))

    hit = result.fun <= body.scale

    if hit and radius - abs(result.x) <= 10 * tolerance \
        and result.fun < body.scale * (1.0 - 1e-9):
        raise VolumetricsBracketException(
            "the body extends beyond its circumradius {} along the line "
            "through {}".format(radius, point.tolist()))

    return hit

def proj_body_support(body, u, samples, rng):
    """Returns h_ΠK(u), the (d-1)-volume of the shadow of `body` on the
    hyperplane orthogonal to the unit vector `u`.

    The closed form is returned when available. Otherwise points z are drawn
    from a bounding box of the shadow and the line z + t u is tested against
    the body by minimizing the convex function t -> gauge(z + t u) over
    |t| <= circumradius.
    """

    direction = _as_points(body, u)
    seed = seed_value(rng)

    if direction.ndim != 1 or abs(np.linalg.norm(direction) - 1.0) > 1e-9:
        raise VolumetricsParameterException(
            "proj_body_support needs a single unit vector, got {}".format(
                direction.tolist()))

    analytic = analytic_projection_support(body, direction)

    if analytic is not None:
        return McEstimate(float(analytic[0]), 0.0, 0, seed)

    if samples < MIN_MC_SAMPLES:
        raise VolumetricsParameterException(
            "shadow estimation needs at least {} samples, got {}".format(
                MIN_MC_SAMPLES, samples))

    rng = as_generator(rng)
    radius = circumradius(body) * (1.0 + 1e-9) + 1e-12
    complement = null_space(direction[None, :])
    half_widths = np.asarray(support(body, complement.T), dtype=float)

    def indicator(coordinates):

        points = coordinates @ complement.T
        hits = body.canonical_gauge(points) <= body.scale
        undecided = np.nonzero(~hits & (np.linalg.norm(points, axis=1) <= radius))[0]

        for row in undecided:
            hits[row] = _line_meets_body(body, points[row], direction, radius)

        return hits

    estimate = mc_indicator_volume(indicator, half_widths, samples, rng)

    return _with_seed(estimate, seed)

def _with_seed(estimate, seed):
    return McEstimate(estimate.value, estimate.std_error, estimate.samples, seed)


class ProjectionBodyModel:
    """The projection body ΠK of `body`, described by its support function.

    The support is analytic where `has_analytic_projection` holds and a
    Monte Carlo shadow estimate otherwise; in that case the estimates consume
    the model's generator in call order.
    """

    def __init__(self, body, samples=4000, rng=0):
        self.body = body
        self.samples = samples
        self.rng = as_generator(rng)
        self.analytic = has_analytic_projection(body)

    def support_estimate(self, u):
        """McEstimate of h_ΠK at the unit vector `u`."""

        return proj_body_support(self.body, u, self.samples, self.rng)

    def support(self, x):
        """h_ΠK(x) for any vector (or rows of vectors) x, using
        1-homogeneity and evenness.
        """

        points = _as_points(self.body, x)
        rows = np.atleast_2d(points)

        if self.analytic:
            values = analytic_projection_support(self.body, rows)

        else:
            values = np.zeros(rows.shape[0])

            for index, row in enumerate(rows):
                length = np.linalg.norm(row)

                if length > 0:
                    values[index] = length * \
                        self.support_estimate(row / length).value

        if points.ndim == 1:
            return float(values[0])

        return values

    def polar_gauge(self, x):
        """Gauge of the polar projection body Π*K, which is h_ΠK itself."""

        return self.support(x)


def random_directions(d, count, rng):
    """`count` uniformly random unit vectors in R^d."""

    rng = as_generator(rng)
    directions = rng.standard_normal((count, d))

    return directions / np.linalg.norm(directions, axis=1)[:, None]

def polar_projection_volume(model, samples, rng):
    """Estimates vol(Π*K) = gamma_d E[h_ΠK(u)^-d] over uniform unit u.

    With an analytic support `samples` directions are used; with Monte Carlo
    supports the directions form a net of at least 2 d^2 directions and the
    estimate inherits the net resolution.
    """

    d = model.body.dim
    seed = seed_value(rng)

    count = samples if model.analytic else max(2 * d * d, samples)
    directions = random_directions(d, count, rng)

    radial = unit_ball_volume(d) * model.support(directions) ** (-float(d))

    return McEstimate(float(radial.mean()),
        float(radial.std(ddof=1) / math.sqrt(count)) if count > 1 else 0.0,
        count, seed)


@dataclass(frozen=True)
class PolarBallVolume:
    value: float
    bound: float

    @property
    def holds(self):
        return self.value <= self.bound

def polar_proj_ball_volume(d):
    """Returns vol(Π*B) = (gamma_d / gamma_{d-1})^d for the unit volume ball
    B together with the upper bound (2 pi / d)^(d/2).
    """

    if d < 1:
        raise VolumetricsParameterException(
            "dimension must be positive, got {}".format(d))

    value = math.exp(d * (log_unit_ball_volume(d) - log_unit_ball_volume(d - 1)))
    bound = (2.0 * math.pi / d) ** (0.5 * d)

    result = PolarBallVolume(value, bound)

    if not result.holds:
        raise VolumetricsException(
            "vol(Π*B) = {} exceeds (2 pi/d)^(d/2) = {} in dimension {}".format(
                value, bound, d))

    return result
