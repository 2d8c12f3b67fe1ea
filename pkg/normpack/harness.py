# -*- coding: utf-8 -*-

"""
normpack.harness
~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

This module orchestrates experiments: single pipeline runs, parameter sweeps
and the verification suite.

A pipeline run goes through the stages

    normalize -> estimate_ik -> sample_poisson -> build_graph -> prune ->
    greedy -> local_search -> verify

and every stage draws its randomness from a generator derived from the
master seed and the stage name. Stage timings go to the log and to a
timings sidecar file, never into the RunRecord.
"""

import json
import logging
import math
import os
import time

from contextlib import contextmanager

from .bodies import BodyVolumeUnavailableException, closed_form_volume, \
    normalize_to_unit_volume, random_symmetric_hpolytope
from .experiment import ExperimentConfigException, default_output_directory
from .independent_set import greedy_independent_set, local_search_improve, \
    verify_packing
from .packing import TorusDomain, build_graph, check_prune_postconditions, \
    degree_codegree_stats, degree_threshold, prune, sample_poisson
from .pointfile import write_packing, write_point_graph
from .recordmodel import CheckReport, RecordModel, RunRecord, VERDICT_PASS
from .seeding import pipeline_stage_names, stage_generator
from .volumetric_checks import check_gamma_ratio, check_logconcavity, \
    check_mc_calibration, check_minkowski_equivalence, check_petty, \
    check_poisson_tail, check_polar_formula, check_rogers_shephard, \
    check_schmuckenschlager, default_calibration_cases, describe_body, \
    unit_cube, unit_volume_ball
from .volumetrics import estimate_ik, mc_volume

logger = logging.getLogger(__name__)

RUN_RECORD_FILENAME = "runs.jsonl"
TIMINGS_FILENAME = "runs.timings.jsonl"
SWEEP_TABLE_FILENAME = "sweep.csv"

supported_grid_parameters = ("Delta", "d")

class PipelineStageException(Exception):
    """An exception raised when a pipeline stage fails; carries the stage
    name and the original exception.
    """

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause

        super().__init__("pipeline stage {} failed: {}: {}".format(
            stage, type(cause).__name__, cause))


class StageTimer:

    def __init__(self):
        self.timings = {}

    @contextmanager
    def stage(self, name):

        if name not in pipeline_stage_names:
            raise ValueError("{} is not a pipeline stage".format(name))

        logger.info("starting stage {}".format(name))
        started = time.perf_counter()

        try:
            yield
        except Exception as error:
            logger.error("stage {} failed: {}".format(name, error))
            raise PipelineStageException(name, error) from error

        self.timings[name] = time.perf_counter() - started
        logger.info("finished stage {} in {:.3f}s".format(name, self.timings[name]))


def normalized_body(config):
    """Builds the config's body and rescales it to unit volume, estimating
    the volume when there is no closed form.
    """

    body = config.build_body()

    try:
        closed_form_volume(body)
        return normalize_to_unit_volume(body)

    except BodyVolumeUnavailableException:
        estimate = mc_volume(body, config.volume_samples,
            stage_generator(config.seed, "normalize"))

        logger.info("estimated body volume {} +/- {}".format(
            estimate.value, estimate.std_error))

        return normalize_to_unit_volume(body, estimate)

def packing_report(result, body):
    """Summarizes a packing that verify_packing accepted from raw
    coordinates.
    """

    return CheckReport("packing", describe_body(body), body.dim,
        params={"density": result.density, "trivial_bound": result.trivial_bound,
            "above_trivial_bound": result.density >= result.trivial_bound},
        value=None if math.isinf(result.min_gauge) else result.min_gauge,
        std_error=0.0, bound=2.0, violations=0, trials=result.size, seed=None,
        verdict=VERDICT_PASS)

def _output_directory(config):

    directory = config.output or default_output_directory()
    os.makedirs(directory, exist_ok=True)

    return directory

def run_pipeline(config, persist=True, export_packing=False,
    export_graph=False):
    """Runs the full construction for `config` and returns its RunRecord.

    With `persist` the record is appended to runs.jsonl in the output
    directory and the stage timings to runs.timings.jsonl. `export_packing`
    writes the centers and `export_graph` the sampled intersection graph
    next to them.
    """

    timer = StageTimer()
    config.validate()

    with timer.stage("normalize"):
        body = normalized_body(config)

    try:
        side = config.resolve_side_length(body)
        domain = TorusDomain(config.d, side)
        domain.validate_for(body)
    except ExperimentConfigException:
        raise
    except Exception as error:
        raise ExperimentConfigException(str(error)) from error

    with timer.stage("estimate_ik"):
        ik = estimate_ik(body, config.ik_delta, config.ik_samples,
            config.mc_samples, stage_generator(config.seed, "estimate_ik"))

    with timer.stage("sample_poisson"):
        points = sample_poisson(domain, config.Delta,
            stage_generator(config.seed, "sample_poisson"),
            max_points=config.max_points)

    with timer.stage("build_graph"):
        graph = build_graph(points, body, domain, workers=config.workers)

    with timer.stage("prune"):
        pruned, report = prune(graph, body, ik, config.Delta,
            codegree_coeff=config.codegree_coeff, domain=domain,
            samples=config.mc_samples,
            rng=stage_generator(config.seed, "prune"), workers=config.workers)

    with timer.stage("greedy"):
        selected = greedy_independent_set(pruned, config.order_policy,
            stage_generator(config.seed, "greedy"))

    with timer.stage("local_search"):
        selected = local_search_improve(pruned, selected,
            budget=config.local_search_budget)

    with timer.stage("verify"):
        result = verify_packing(pruned.points[selected], body, domain,
            retained=report.retained, Delta=config.Delta)

        checks = [
            check_prune_postconditions(pruned, config.Delta,
                config.codegree_coeff),
            packing_report(result, body)
        ]

    for check in checks:
        if not check.passed:
            logger.warning("run check {} reported {} with {} violations".format(
                check.check, check.verdict, check.violations))

    stats = degree_codegree_stats(pruned)
    codegree_bound = config.codegree_coeff * config.Delta

    packing = result.to_dict()
    packing.update({
        "L": side,
        "sampled": len(points),
        "greedy_bound": pruned.vertex_count / (stats.max_degree + 1)
            if pruned.vertex_count else 0.0,
        "max_degree": stats.max_degree,
        "max_codegree": stats.max_codegree,
        "degree_bound": degree_threshold(config.Delta),
        "codegree_bound": codegree_bound,
        "bounds_hold": stats.max_degree <= degree_threshold(config.Delta)
            and stats.max_codegree < codegree_bound
    })

    record = RunRecord(config.config_hash(), config.result_dict(),
        ik=ik.to_dict(), prune_report=report.to_dict(), packing=packing,
        checks=[ check.to_dict() for check in checks ])

    logger.info("run {} packed {} centers, density {}".format(
        record.config_hash[:12], result.size, result.density))

    if persist:
        directory = _output_directory(config)

        model = RecordModel()
        model.add_run_record(record)
        model.save_as_JSONL(os.path.join(directory, RUN_RECORD_FILENAME),
            append=True)

        with open(os.path.join(directory, TIMINGS_FILENAME), 'a') as timingfile:
            timingfile.write(json.dumps({"config_hash": record.config_hash,
                "timings": timer.timings}, sort_keys=True) + "\n")

        if export_packing:
            write_packing(os.path.join(directory,
                "packing-{}.txt".format(record.config_hash[:12])),
                result.centers, body, domain)

        if export_graph:
            write_point_graph(os.path.join(directory,
                "graph-{}.txt".format(record.config_hash[:12])),
                graph.points, graph.edges(), body, domain)

    return record

def grid_configs(config, parameter, values):
    """One config per grid value. A dimension grid also rewrites the body
    dimension and lets L be chosen automatically.
    """

    if parameter not in supported_grid_parameters:
        raise ExperimentConfigException(
            "{} is not a supported grid parameter, supported parameters are "
            "{}".format(parameter, list(supported_grid_parameters)))

    configs = []

    for value in values:

        if parameter == "d":
            body = dict(config.body)
            body["d"] = int(value)
            configs.append(config.replace(d=int(value), body=body, L=None))
        else:
            configs.append(config.replace(Delta=float(value)))

    return configs

def sweep_row(config, record=None, error=None):

    row = {
        "d": config.d,
        "Delta": config.Delta,
        "trivial_bound": 2.0 ** -config.d,
        "log_delta_over_delta": math.log(config.Delta) / config.Delta
    }

    if record is None:
        row.update({"status": "failed", "error": error})
        return row

    row.update({
        "n_sampled": record.prune_report["sampled"],
        "n_retained": record.prune_report["retained"],
        "size": record.packing["size"],
        "density": record.packing["density"],
        "status": record.status,
        "error": ""
    })

    return row

def sweep(config, parameter, values, persist=True):
    """Runs the pipeline on every grid point and returns a RecordModel with
    one table row per point. Failed points are logged and kept as flagged
    rows.
    """

    values = list(values)

    if not values:
        raise ExperimentConfigException("the sweep grid is empty")

    model = RecordModel()
    configs = grid_configs(config, parameter, values)

    for number, point in enumerate(configs, start=1):

        logger.info("Processing grid point {} of {}: {} = {}".format(
            number, len(configs), parameter, values[number - 1]))

        try:
            record = run_pipeline(point, persist=persist)
            model.add_run_record(record)
            model.add_table_row(sweep_row(point, record))

        except (PipelineStageException, ExperimentConfigException) as error:
            logger.warning("grid point {} = {} failed: {}".format(
                parameter, values[number - 1], error))
            model.add_table_row(sweep_row(point, error=str(error)))

    if persist:
        model.save_as_CSV(os.path.join(_output_directory(config),
            SWEEP_TABLE_FILENAME))

    return model


def run_schmuckenschlager_checks(level, rng):

    dimensions = (2, 3) if level == "fast" else (2, 3, 4)
    trials = 200 if level == "fast" else 1000

    reports = []

    for d in dimensions:
        for body in (unit_volume_ball(d), unit_cube(d)):
            for delta in (0.05, 0.5):
                reports.append(check_schmuckenschlager(body, delta, trials, rng))

    return reports

def run_logconcavity_checks(level, rng):

    dimensions = (2, 3) if level == "fast" else (2, 3, 4)
    rays = 50 if level == "fast" else 200

    return [ check_logconcavity(body, rays, rng)
        for d in dimensions for body in (unit_volume_ball(d), unit_cube(d)) ]

def run_petty_checks(level, rng):

    reports = [ check_petty(unit_cube(d), 0, 0, rng) for d in range(2, 9) ]
    reports.extend( check_petty(unit_volume_ball(d), 0, 0, rng) for d in (2, 3) )

    polytope = random_symmetric_hpolytope(3, 6, rng)
    volume = mc_volume(polytope, 200000 if level == "fast" else 1000000, rng)
    reports.append(check_petty(normalize_to_unit_volume(polytope, volume),
        4000 if level == "fast" else 20000, 0, rng))

    return reports

def run_rogers_shephard_checks(level, rng):

    samples = 200000 if level == "fast" else 1000000

    return [ check_rogers_shephard(d, samples, rng) for d in (1, 2, 3) ]

def run_minkowski_checks(level, rng):

    trials = 50 if level == "fast" else 100

    return [ check_minkowski_equivalence(d, trials, rng) for d in (2, 3) ]

def run_poisson_checks(level, rng):

    draws = 100000

    return [ check_poisson_tail(20.0, 1.0, draws, rng) ]

def run_formula_checks(level, rng):

    samples = 200000 if level == "fast" else 1000000

    return [
        check_gamma_ratio(),
        check_polar_formula(64),
        check_mc_calibration(default_calibration_cases, samples, rng)
    ]

supported_checks = {
    "schmuck": {
        "name": "Two-sided containment of the covariogram level set",
        "function": run_schmuckenschlager_checks
    },
    "logconcavity": {
        "name": "Log-concavity and slope of the covariogram",
        "function": run_logconcavity_checks
    },
    "petty": {
        "name": "Petty projection inequality",
        "function": run_petty_checks
    },
    "rs": {
        "name": "Rogers-Shephard equality for simplices",
        "function": run_rogers_shephard_checks
    },
    "minkowski": {
        "name": "Minkowski difference body equivalence",
        "function": run_minkowski_checks
    },
    "poisson": {
        "name": "Poisson upper tail",
        "function": run_poisson_checks
    },
    "formulas": {
        "name": "Closed form and calibration checks",
        "function": run_formula_checks
    }
}

supported_check_levels = ("fast", "full")

def verify_suite(level="fast", seed=1, checks=None):
    """Runs the named checks (all by default) and returns a RecordModel of
    CheckReports. Verdicts are report content; nothing is raised for a
    violation.
    """

    if level not in supported_check_levels:
        raise ExperimentConfigException(
            "{} is not a supported level, supported levels are {}".format(
                level, list(supported_check_levels)))

    if checks is None:
        checks = list(supported_checks.keys())

    model = RecordModel()

    for checkname in checks:

        logger.info("Running check {} ({}) at level {}".format(checkname,
            supported_checks[checkname]["name"], level))

        rng = stage_generator(seed, "verify:{}".format(checkname))

        for report in supported_checks[checkname]["function"](level, rng):
            model.add_check_report(report)

    counts = model.get_verdict_counts()

    logger.info("verification finished: {} passed, {} failed, {} "
        "inconclusive, {} violations".format(counts["pass"], counts["fail"],
        counts["inconclusive"], model.get_total_violations()))

    return model
