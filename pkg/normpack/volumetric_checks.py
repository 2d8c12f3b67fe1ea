# -*- coding: utf-8 -*-

"""
normpack.volumetric_checks
~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

This module executes numerical verifiers for the geometric inequalities the
packing construction relies on:

* the two-sided containment (1 - delta) Π*K ⊂ {f > delta} ⊂ log(1/delta) Π*K,
* log-concavity of the covariogram f and its slope -h_ΠK(y) at the origin,
* Petty's projection inequality vol(Π*K) <= vol(Π*B),
* the Rogers-Shephard equality vol(S - S) = binom(2d, d) vol(S) for simplices,
* Minkowski's equivalence between packings of K and of (K - K)/2,
* the Poisson upper tail P[Z > (1 + t) lam] <= exp(-lam t / 3),
* the calibration of Monte Carlo volumes against closed forms.

Every verifier returns a CheckReport. Violations are counted, never raised.
"""

import logging
import math

import numpy as np

from scipy.optimize import linprog
from scipy.special import comb, gammaln

from .bodies import LP_BALL, closed_form_volume, gauge, known_volume, \
    lp_ball, normalize_to_unit_volume, sample_uniform, simplex_difference, \
    simplex_hyperplane_basis
from .recordmodel import CheckReport, VERDICT_FAIL, VERDICT_INCONCLUSIVE, \
    VERDICT_PASS
from .seeding import as_generator, seed_value
from .volumetrics import CLASS_BOUNDARY, CLASS_INSIDE, CLASS_OUTSIDE, \
    CONFIDENCE_SIGMAS, ESCALATION_FACTOR, ESCALATION_LEVELS, McEstimate, \
    ProjectionBodyModel, classify_intersection, exact_intersection_volume, \
    intersection_volume, json_number, mc_volume, polar_proj_ball_volume, \
    polar_projection_volume, random_directions, unit_ball_volume, \
    VolumetricsException

logger = logging.getLogger(__name__)

DEFAULT_SLACK = 0.05

SLOPE_TOLERANCE = 0.05

# 1 - f(t y) at the finite difference step
SLOPE_STEP_DEFICIT = 0.05

# closed forms go through exp(gammaln) and are off by a few ulp
CLOSED_FORM_RTOL = 1e-12

# relative tolerances on vol(S - S) / vol(S), by dimension
rogers_shephard_tolerances = {1: 0.03, 2: 0.03, 3: 0.05}
ROGERS_SHEPHARD_DEFAULT_TOLERANCE = 0.05

default_calibration_cases = ((2, 1.0), (2, 2.0), (3, 2.0), (4, 3.0), (6, math.inf))

default_gamma_ratio_points = (0.5, 1.0, 2.5, 10.0, 100.0)

def describe_body(body):
    """A short label for reports, e.g. "lp(p=2)" or "hpoly(m=8)"."""

    if body.kind == LP_BALL:
        return "lp(p={})".format("inf" if math.isinf(body.p) else "{:g}".format(body.p))

    if body.facets is not None:
        return "hpoly(m={})".format(body.facets.facet_count)

    return body.kind

def _verdict(violations):
    return VERDICT_PASS if violations == 0 else VERDICT_FAIL

def covariogram(body, x, samples, rng):
    """f(x) as an McEstimate: exact where a closed form exists."""

    exact = exact_intersection_volume(body, x)

    if exact is not None:
        return McEstimate(float(exact), 0.0, 0, seed_value(rng))

    return intersection_volume(body, x, samples, rng)

def check_schmuckenschlager(body, delta, trials, rng, slack=DEFAULT_SLACK,
    samples=4000, model=None):
    """Verifies both containments for a unit volume body at level `delta`.

    Outer: points x of 2K with f(x) > delta must have
    h_ΠK(x) <= log(1/delta) (1 + slack). Inner: points with
    h_ΠK(x) <= (1 - delta)(1 - slack) must have f(x) > delta. Only conclusive
    classifications can count as violations.
    """

    seed = seed_value(rng)
    rng = as_generator(rng)
    d = body.dim

    if model is None:
        model = ProjectionBodyModel(body, rng=rng)

    outer_bound = math.log(1.0 / delta) * (1.0 + slack)
    inner_level = (1.0 - delta) * (1.0 - slack)

    outer_points = 2.0 * sample_uniform(body, rng, trials)
    outer_codes, _ = classify_intersection(body, outer_points, delta, samples, rng)
    outer_inside = outer_points[outer_codes == CLASS_INSIDE]

    outer_support = np.atleast_1d(model.support(outer_inside)) \
        if outer_inside.shape[0] else np.zeros(0)
    outer_violations = int(np.count_nonzero(outer_support > outer_bound))

    directions = random_directions(d, trials, rng)
    radii = inner_level * rng.random(trials) ** (1.0 / d)
    inner_points = directions * (radii / np.atleast_1d(model.support(directions)))[:, None]

    inner_codes, _ = classify_intersection(body, inner_points, delta, samples, rng)
    inner_violations = int(np.count_nonzero(inner_codes == CLASS_OUTSIDE))

    boundary = int(np.count_nonzero(outer_codes == CLASS_BOUNDARY)) + \
        int(np.count_nonzero(inner_codes == CLASS_BOUNDARY))

    largest = float(outer_support.max() / math.log(1.0 / delta)) \
        if outer_support.size else 0.0

    violations = outer_violations + inner_violations

    logger.info("containment check on {} at delta {}: {} outer and {} inner "
        "violations".format(describe_body(body), delta, outer_violations,
        inner_violations))

    return CheckReport("schmuckenschlager", describe_body(body), d,
        params={"delta": delta, "slack": slack, "samples": samples,
            "outer_violations": outer_violations,
            "inner_violations": inner_violations,
            "outer_hits": int(outer_inside.shape[0]),
            "boundary": boundary},
        value=largest, std_error=0.0, bound=1.0 + slack,
        violations=violations, trials=2 * trials, seed=seed,
        verdict=_verdict(violations))

def _midpoint_violation(low_value, high_value, middle, weight, sigmas):

    lower_low = max(low_value.value - sigmas * low_value.std_error, 0.0)
    lower_high = max(high_value.value - sigmas * high_value.std_error, 0.0)

    required = lower_low ** weight * lower_high ** (1.0 - weight)

    return middle.value + sigmas * middle.std_error < required

def log_slope_at_origin(body, direction, samples, rng, model=None):
    """Finite difference slope of log f(t y) at t = 0+, extrapolated from the
    steps t and t/2. The step is chosen so that f(t y) is about
    1 - SLOPE_STEP_DEFICIT.

    Returns (slope, h_ΠK(y), standard error of the slope). The error comes
    from the two covariogram estimates; f(0) = vol(K) is known.
    """

    if model is None:
        model = ProjectionBodyModel(body, rng=rng)

    expected = model.support(direction)
    step = SLOPE_STEP_DEFICIT / expected

    full = covariogram(body, step * direction, samples, rng)
    half = covariogram(body, 0.5 * step * direction, samples, rng)
    origin = known_volume(body)

    slope = (4.0 * math.log(half.value) - math.log(full.value)
        - 3.0 * math.log(origin)) / step

    spread = math.hypot(4.0 * half.std_error / half.value,
        full.std_error / full.value) / step

    return slope, expected, spread

def _slope_outcome(body, direction, samples, rng, model, sigmas):
    """Decides |slope + h| / h <= SLOPE_TOLERANCE for one direction, growing
    the sample count while the band straddles the tolerance. Returns the
    outcome (pass, fail or inconclusive) and the last relative error.
    """

    for level in range(ESCALATION_LEVELS + 1):

        slope, expected, spread = log_slope_at_origin(body, direction, samples,
            rng, model=model)

        error = abs(slope + expected) / expected
        band = sigmas * spread / expected

        if error + band <= SLOPE_TOLERANCE:
            return VERDICT_PASS, error

        if error - band > SLOPE_TOLERANCE:
            return VERDICT_FAIL, error

        logger.debug("slope error {} +/- {} straddles {} at {} samples "
            "(level {})".format(error, band, SLOPE_TOLERANCE, samples, level))

        samples *= ESCALATION_FACTOR

    return VERDICT_INCONCLUSIVE, error

def check_logconcavity(body, rays, rng, samples=20000, directions=20,
    sigmas=CONFIDENCE_SIGMAS, model=None):
    """Checks the midpoint inequality f(m y) >= f(t1 y)^l f(t2 y)^(1-l),
    m = l t1 + (1 - l) t2, on `rays` random rays, and the slope identity
    d/dt log f(t y) at 0+ = -h_ΠK(y) on `directions` random unit y.
    """

    seed = seed_value(rng)
    rng = as_generator(rng)
    d = body.dim

    if model is None:
        model = ProjectionBodyModel(body, rng=rng)

    concavity_violations = 0

    for direction in random_directions(d, rays, rng):

        reach = 2.0 / gauge(body, direction)
        first, second = np.sort(rng.uniform(0.0, 0.95 * reach, size=2))
        weight = rng.random()
        middle = weight * first + (1.0 - weight) * second

        low_value = covariogram(body, first * direction, samples, rng)
        high_value = covariogram(body, second * direction, samples, rng)
        middle_value = covariogram(body, middle * direction, samples, rng)

        if _midpoint_violation(low_value, high_value, middle_value, weight, sigmas):
            concavity_violations += 1

    slope_failures = 0
    slope_undecided = 0
    worst = 0.0

    for direction in random_directions(d, directions, rng):

        outcome, error = _slope_outcome(body, direction, samples, rng, model,
            sigmas)

        if outcome == VERDICT_FAIL:
            slope_failures += 1
        elif outcome == VERDICT_INCONCLUSIVE:
            slope_undecided += 1

        if outcome != VERDICT_INCONCLUSIVE:
            worst = max(worst, error)

    violations = concavity_violations + slope_failures

    if violations:
        verdict = VERDICT_FAIL
    elif slope_undecided:
        verdict = VERDICT_INCONCLUSIVE
    else:
        verdict = VERDICT_PASS

    logger.info("log-concavity check on {}: {} midpoint violations, {} slope "
        "failures, {} undecided slopes, worst slope error {}".format(
        describe_body(body), concavity_violations, slope_failures,
        slope_undecided, worst))

    return CheckReport("logconcavity", describe_body(body), d,
        params={"rays": rays, "directions": directions, "samples": samples,
            "midpoint_violations": concavity_violations,
            "slope_failures": slope_failures,
            "slope_undecided": slope_undecided},
        value=worst, std_error=0.0, bound=SLOPE_TOLERANCE,
        violations=violations, trials=rays + directions, seed=seed,
        verdict=verdict)

def exact_polar_projection_volume(body):
    """vol(Π*K) for Euclidean balls and axis-aligned cubes, else None."""

    if body.kind != LP_BALL or body.p not in (2.0, math.inf):
        return None

    d = body.dim

    if math.isinf(body.p):
        # Π*K is the cross-polytope of radius side^(1-d)
        side = 2.0 * body.scale
        return math.exp(d * math.log(2.0) - gammaln(d + 1.0)
            + d * (1.0 - d) * math.log(side))

    shadow = unit_ball_volume(d - 1) * body.scale ** (d - 1)

    return unit_ball_volume(d) / shadow ** d

def check_petty(body, directions, samples, rng, slack=0.0):
    """Compares vol(K)^(d-1) vol(Π*K) against the same quantity for the
    Euclidean ball, (gamma_d / gamma_{d-1})^d.

    Balls and cubes are decided exactly. Otherwise vol(Π*K) is estimated
    with the radial formula; a band that straddles the ball value is
    reported as inconclusive.
    """

    seed = seed_value(rng)
    d = body.dim
    ball = polar_proj_ball_volume(d).value
    normalizer = known_volume(body) ** (d - 1)
    limit = ball * (1.0 + slack)

    exact = exact_polar_projection_volume(body)

    if exact is not None:
        value = exact * normalizer
        verdict = VERDICT_PASS if value <= limit * (1.0 + 1e-12) else VERDICT_FAIL

        return CheckReport("petty", describe_body(body), d,
            params={"method": "analytic", "slack": slack},
            value=value, std_error=0.0, bound=ball,
            violations=0 if verdict == VERDICT_PASS else 1, trials=1,
            seed=seed, verdict=verdict)

    rng = as_generator(rng)
    model = ProjectionBodyModel(body, samples=samples, rng=rng)
    estimate = polar_projection_volume(model, directions, rng)

    value = estimate.value * normalizer
    spread = estimate.std_error * normalizer

    if value + CONFIDENCE_SIGMAS * spread <= limit:
        verdict = VERDICT_PASS
    elif value - CONFIDENCE_SIGMAS * spread > limit:
        verdict = VERDICT_FAIL
    else:
        verdict = VERDICT_INCONCLUSIVE

    notes = "" if model.analytic else \
        "support from a net of {} Monte Carlo directions".format(estimate.samples)

    logger.info("Petty check on {}: vol(Π*K) = {} +/- {}, ball {} -> "
        "{}".format(describe_body(body), value, spread, ball, verdict))

    return CheckReport("petty", describe_body(body), d,
        params={"method": "radial", "directions": estimate.samples,
            "slack": slack},
        value=value, std_error=spread, bound=ball,
        violations=1 if verdict == VERDICT_FAIL else 0,
        trials=estimate.samples, seed=seed, verdict=verdict, notes=notes)

def regular_simplex_volume(d):
    """Volume of conv(e_1, ..., e_{d+1}), sqrt(d + 1) / d!."""

    return math.exp(0.5 * math.log(d + 1.0) - gammaln(d + 1.0))

def check_rogers_shephard(d, samples, rng):
    """Estimates vol(S - S) / vol(S) = 2^d vol(D) / vol(S) for the regular
    simplex S and its difference body D = (S - S)/2, against binom(2d, d).
    vol(S) is exact, so all of the Monte Carlo error sits in vol(D). A
    violation needs the ratio outside both the relative tolerance for `d`
    and the 3 sigma band. The cube control 2^d must fall strictly below
    binom(2d, d) for d >= 2.
    """

    seed = seed_value(rng)
    rng = as_generator(rng)

    difference = mc_volume(simplex_difference(d), samples, rng)
    simplex = regular_simplex_volume(d)

    ratio = 2.0 ** d * difference.value / simplex
    spread = 2.0 ** d * difference.std_error / simplex

    expected = float(comb(2 * d, d, exact=True))
    tolerance = rogers_shephard_tolerances.get(d, ROGERS_SHEPHARD_DEFAULT_TOLERANCE)
    relative_error = abs(ratio - expected) / expected
    control = 2.0 ** d
    control_strict = control < expected

    violations = 0

    if relative_error > tolerance and \
        abs(ratio - expected) > CONFIDENCE_SIGMAS * spread:
        violations += 1

    if d >= 2 and not control_strict:
        violations += 1

    logger.info("Rogers-Shephard ratio in dimension {}: {} +/- {} against "
        "{}".format(d, ratio, spread, expected))

    return CheckReport("rogers_shephard", "simplex", d,
        params={"samples": samples, "simplex_volume": simplex,
            "relative_error": relative_error, "tolerance": tolerance,
            "cube_ratio": control, "cube_strict": control_strict},
        value=ratio, std_error=spread, bound=expected,
        violations=violations, trials=2, seed=seed,
        verdict=_verdict(violations))

def simplex_translates_overlap(first, second):
    """Largest s such that some point lies at least s inside both translates
    first + S and second + S of the centered regular simplex S, found by a
    linear program in the ambient R^(d+1). A positive value means the
    interiors intersect.
    """

    first = np.asarray(first, dtype=float)
    second = np.asarray(second, dtype=float)
    d = first.shape[0]
    basis = simplex_hyperplane_basis(d)

    # centers in R^(d+1); S sits at {y >= 0, sum y = 1}
    shift_first = basis @ first
    shift_second = basis @ second
    size = d + 1

    # variables (y_1, ..., y_{d+1}, s); maximize s
    objective = np.zeros(size + 1)
    objective[-1] = -1.0

    upper = np.hstack([-np.eye(size), np.ones((size, 1))])
    inequalities = np.vstack([upper, upper])
    limits = np.concatenate([-shift_first, -shift_second])

    equality = np.append(np.ones(size), 0.0)[None, :]

    result = linprog(objective, A_ub=inequalities, b_ub=limits, A_eq=equality,
        b_eq=[1.0], bounds=[(None, None)] * size + [(None, 1.0)],
        method="highs")

    if result.status != 0:
        raise VolumetricsException(
            "overlap LP failed: {}".format(result.message))

    return -result.fun

def packing_predicates(centers, tolerance=1e-9):
    """Returns (packs_simplex, packs_difference_body) for a set of centers in
    hyperplane coordinates.
    """

    centers = np.asarray(centers, dtype=float)
    d = centers.shape[1]
    body = simplex_difference(d)

    packs_simplex = True
    packs_difference = True

    for i in range(centers.shape[0]):
        for j in range(i + 1, centers.shape[0]):

            if simplex_translates_overlap(centers[i], centers[j]) > tolerance:
                packs_simplex = False

            if gauge(body, centers[i] - centers[j]) < 2.0 - tolerance:
                packs_difference = False

    return packs_simplex, packs_difference

def check_minkowski_equivalence(d, trials, rng, centers=3, spread=1.5):
    """On `trials` random center sets, translates of the simplex pack if and
    only if translates of its difference body pack.
    """

    seed = seed_value(rng)
    rng = as_generator(rng)

    disagreements = 0
    packings = 0

    for trial in range(trials):

        points = rng.uniform(-spread, spread, size=(centers, d))
        packs_simplex, packs_difference = packing_predicates(points)

        if packs_simplex != packs_difference:
            logger.warning("packing predicates disagree on centers "
                "{}".format(points.tolist()))
            disagreements += 1

        packings += int(packs_difference)

    return CheckReport("minkowski", "simplex", d,
        params={"centers": centers, "spread": spread, "packings": packings},
        value=float(disagreements), std_error=0.0, bound=0.0,
        violations=disagreements, trials=trials, seed=seed,
        verdict=_verdict(disagreements))

def check_poisson_tail(lam, t, draws, rng):
    """Empirical P[Z > (1 + t) lam] for Z ~ Poisson(lam) against
    exp(-lam t / 3).
    """

    seed = seed_value(rng)
    rng = as_generator(rng)

    sample = rng.poisson(lam, size=draws)
    fraction = float(np.count_nonzero(sample > (1.0 + t) * lam)) / draws
    spread = max(math.sqrt(fraction * (1.0 - fraction) / draws), 1.0 / draws)
    bound = math.exp(-lam * t / 3.0)

    violations = int(fraction > bound + CONFIDENCE_SIGMAS * spread)

    return CheckReport("poisson_tail", "poisson", 0,
        params={"lambda": lam, "t": t},
        value=fraction, std_error=spread, bound=bound,
        violations=violations, trials=draws, seed=seed,
        verdict=_verdict(violations))

def check_gamma_ratio(points=default_gamma_ratio_points):
    """x! / (x - 1/2)! >= sqrt(x), evaluated through log-gamma."""

    worst = math.inf
    violations = 0

    for x in points:

        log_ratio = gammaln(x + 1.0) - gammaln(x + 0.5)
        margin = log_ratio - 0.5 * math.log(x)
        worst = min(worst, margin)

        if margin < 0:
            violations += 1

    return CheckReport("gamma_ratio", "none", 0,
        params={"points": list(points)},
        value=float(worst), std_error=0.0, bound=0.0,
        violations=violations, trials=len(points), seed=None,
        verdict=_verdict(violations))

def check_polar_formula(max_d=64):
    """(gamma_d / gamma_{d-1})^d <= (2 pi / d)^(d/2) for d = 1..max_d."""

    violations = 0
    worst = 0.0

    for d in range(1, max_d + 1):

        try:
            result = polar_proj_ball_volume(d)
            worst = max(worst, result.value / result.bound)
        except VolumetricsException:
            violations += 1

    return CheckReport("polar_formula", "lp(p=2)", max_d,
        params={"max_d": max_d,
            "d2": polar_proj_ball_volume(2).value,
            "d3": polar_proj_ball_volume(3).value},
        value=worst, std_error=0.0, bound=1.0,
        violations=violations, trials=max_d, seed=None,
        verdict=_verdict(violations))

def check_mc_calibration(cases, samples, rng):
    """mc_volume of l_p balls against their closed form volumes, 3 sigma."""

    seed = seed_value(rng)
    rng = as_generator(rng)

    violations = 0
    worst = 0.0

    for d, p in cases:

        body = lp_ball(d, p)
        estimate = mc_volume(body, samples, rng)
        exact = closed_form_volume(body)
        distance = abs(estimate.value - exact) / max(estimate.std_error, 1e-300)

        # a box fully inside the body gives a zero spread estimate
        if estimate.std_error == 0:
            distance = 0.0 if math.isclose(estimate.value, exact,
                rel_tol=CLOSED_FORM_RTOL) else math.inf

        worst = max(worst, distance)

        if distance > CONFIDENCE_SIGMAS:
            logger.warning("Monte Carlo volume {} of l_{} ball in dimension {} "
                "is {} sigma from {}".format(estimate.value, p, d, distance, exact))
            violations += 1

    return CheckReport("mc_calibration", "lp", 0,
        params={"cases": [ [d, json_number(p)] for d, p in cases ],
            "samples": samples},
        value=json_number(worst), std_error=0.0, bound=CONFIDENCE_SIGMAS,
        violations=violations, trials=len(cases), seed=seed,
        verdict=_verdict(violations))

def unit_volume_ball(d):
    return normalize_to_unit_volume(lp_ball(d, 2.0))

def unit_cube(d):
    return lp_ball(d, math.inf, scale=0.5)
