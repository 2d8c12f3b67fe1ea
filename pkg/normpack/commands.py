# -*- coding: utf-8 -*-

"""
normpack.commands
~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

This module holds the argparse front ends of the pack, vol and verify
programs. The scripts in bin/ call `pack_main`, `vol_main` and `verify_main`.

    pack run config.json
    pack sweep config.json --grid Delta=10,20,40
    vol body-info '{"kind": "lp", "d": 3, "p": 2}'
    vol intersection body.json --x 0.2,0.1,0
    verify all --level fast
"""

import argparse
import json
import math
import sys

from .argument_processing import calculate_loglevel, get_logger, \
    process_body_argument, process_check_level, process_check_names, \
    process_grid_argument, process_output_types, process_vector_argument
from .bodies import BodyException, BodyVolumeUnavailableException, \
    circumradius, closed_form_volume, normalize_to_unit_volume, \
    polytope_vertices
from .experiment import ExperimentConfigException
from .harness import PipelineStageException, run_pipeline, sweep, verify_suite
from .input_types import load_experiment_config
from .output_types import write_output
from .recordmodel import RecordModel
from .version import __appname__, __appversion__
from .volumetrics import VolumetricsException, exact_intersection_volume, \
    has_analytic_projection, intersection_volume, json_number, mc_volume

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CHECK_FAILED = 2

def add_common_arguments(parser):

    parser.add_argument('-o', '--output-file', dest='output_filename',
        default=None,
        help="file to write results to, in the format given by -ot")

    parser.add_argument('-ot', '--output-type', dest='output_type',
        default='jsonl', type=process_output_types,
        help="format of the output file (default: jsonl)")

    parser.add_argument('-l', '--logfile', dest='logfile', default=sys.stdout,
        help="file to write log messages to (default: standard output)")

    parser.add_argument('-v', '--verbose', action='store_true',
        help="raise the logging level to debug")

    parser.add_argument('-q', '--quiet', action='store_true',
        help="only log warnings and errors")

    parser.add_argument('--seed', dest='seed', type=int, default=None,
        help="master seed, overrides any seed in the input")

def _start_logging(args):

    return get_logger(__appname__,
        calculate_loglevel(verbose=args.verbose, quiet=args.quiet),
        args.logfile)

def _emit(args, recordmodel, summary):
    """Prints `summary` as JSON and writes the record model to the output
    file, if one was requested.
    """

    print(json.dumps(summary, sort_keys=True, indent=4))

    if args.output_filename is not None:
        write_output(args.output_type, args.output_filename, recordmodel)


def build_pack_parser():

    parser = argparse.ArgumentParser(prog="pack",
        description="Builds packings of convex bodies from a Poisson sample "
        "of the torus.")

    parser.add_argument('--version', action='version',
        version="{} {}".format(__appname__, __appversion__))

    subparsers = parser.add_subparsers(dest='command', required=True)

    run_parser = subparsers.add_parser('run', help="run the pipeline once")
    run_parser.add_argument('config', help="experiment config JSON file")
    run_parser.add_argument('--export-packing', action='store_true',
        help="also write the packing centers to the output directory")
    run_parser.add_argument('--export-graph', action='store_true',
        help="also write the sampled intersection graph as v/e lines to the "
        "output directory")
    run_parser.add_argument('--workers', type=int, default=None,
        help="worker threads, overrides the config")
    add_common_arguments(run_parser)

    sweep_parser = subparsers.add_parser('sweep',
        help="run the pipeline over a parameter grid")
    sweep_parser.add_argument('config', help="experiment config JSON file")
    sweep_parser.add_argument('--grid', required=True,
        type=process_grid_argument,
        help="grid to sweep, for example Delta=10,20,40 or d=2,3")
    sweep_parser.add_argument('--workers', type=int, default=None,
        help="worker threads, overrides the config")
    add_common_arguments(sweep_parser)

    return parser

def pack_main(argv=None):

    args = build_pack_parser().parse_args(argv)
    logger = _start_logging(args)

    try:
        config = load_experiment_config(args.config)

        changes = {}

        if args.seed is not None:
            changes["seed"] = args.seed

        if args.workers is not None:
            changes["workers"] = args.workers

        config = config.replace(**changes)
        config.validate()

        recordmodel = RecordModel()

        if args.command == 'run':
            record = run_pipeline(config, export_packing=args.export_packing,
                export_graph=args.export_graph)
            recordmodel.add_run_record(record)

            summary = {
                "config_hash": record.config_hash,
                "packing": record.packing,
                "prune_report": record.prune_report
            }

        else:
            parameter, values = args.grid
            recordmodel = sweep(config, parameter, values)
            summary = {"table": recordmodel.get_table_rows()}

    except (ExperimentConfigException, BodyException, OSError) as error:
        logger.error("cannot run the experiment: {}".format(error))
        return EXIT_FAILURE

    except PipelineStageException as error:
        logger.error("pipeline failed in stage {}: {}".format(
            error.stage, error.cause))
        return EXIT_FAILURE

    _emit(args, recordmodel, summary)

    return EXIT_OK


def build_vol_parser():

    parser = argparse.ArgumentParser(prog="vol",
        description="Volumetric quantities of convex bodies.")

    parser.add_argument('--version', action='version',
        version="{} {}".format(__appname__, __appversion__))

    subparsers = parser.add_subparsers(dest='command', required=True)

    info_parser = subparsers.add_parser('body-info',
        help="volume, circumradius and structure of a body")
    info_parser.add_argument('body', type=process_body_argument,
        help="body JSON file or inline JSON body specification")
    info_parser.add_argument('--samples', type=int, default=200000,
        help="Monte Carlo samples when the volume has no closed form")
    add_common_arguments(info_parser)

    intersection_parser = subparsers.add_parser('intersection',
        help="vol(K ∩ (K + x)) for the unit volume rescaling of K")
    intersection_parser.add_argument('body', type=process_body_argument,
        help="body JSON file or inline JSON body specification")
    intersection_parser.add_argument('--x', required=True,
        type=process_vector_argument,
        help="translation vector, comma separated")
    intersection_parser.add_argument('--samples', type=int, default=200000,
        help="Monte Carlo samples")
    add_common_arguments(intersection_parser)

    return parser

def _body_volume(body, samples, seed):

    try:
        return {"value": closed_form_volume(body), "std_error": 0.0,
            "samples": 0, "seed": None}
    except BodyVolumeUnavailableException:
        return mc_volume(body, samples, seed).to_dict()

def body_info(body, samples, seed):

    info = {
        "body": body.to_dict(),
        "volume": _body_volume(body, samples, seed),
        "circumradius": circumradius(body),
        "half_widths": [ float(value) for value in body.half_widths() ],
        "analytic_projection_body": has_analytic_projection(body)
    }

    if body.kind != "lp" or body.p in (1.0, math.inf):
        info["vertex_count"] = int(polytope_vertices(body).shape[0])

    return info

def intersection_info(body, x, samples, seed):

    if len(x) != body.dim:
        raise VolumetricsException(
            "the translation has {} coordinates but the body has dimension "
            "{}".format(len(x), body.dim))

    volume = _body_volume(body, samples, seed)
    unit = normalize_to_unit_volume(body, volume["value"])

    info = {
        "body": unit.to_dict(),
        "x": x,
        "estimate": intersection_volume(unit, x, samples, seed).to_dict()
    }

    exact = exact_intersection_volume(unit, x)

    if exact is not None:
        info["exact"] = json_number(exact)

    return info

def vol_main(argv=None):

    args = build_vol_parser().parse_args(argv)
    logger = _start_logging(args)

    seed = 0 if args.seed is None else args.seed

    try:
        if args.command == 'body-info':
            summary = body_info(args.body, args.samples, seed)
        else:
            summary = intersection_info(args.body, args.x, args.samples, seed)

    except (BodyException, VolumetricsException) as error:
        logger.error("cannot compute {}: {}".format(args.command, error))
        return EXIT_FAILURE

    print(json.dumps(summary, sort_keys=True, indent=4))

    if args.output_filename is not None:
        with open(args.output_filename, 'w') as outputfile:
            json.dump(summary, outputfile, sort_keys=True, indent=4)

    return EXIT_OK


def build_verify_parser():

    parser = argparse.ArgumentParser(prog="verify",
        description="Runs the volumetric and packing checks and reports "
        "their verdicts.")

    parser.add_argument('--version', action='version',
        version="{} {}".format(__appname__, __appversion__))

    parser.add_argument('checks', type=process_check_names,
        help="all, or a comma separated list of schmuck, logconcavity, "
        "petty, rs, minkowski, poisson, formulas")

    parser.add_argument('--level', type=process_check_level, default='fast',
        help="fast or full (default: fast)")

    add_common_arguments(parser)

    return parser

def verify_main(argv=None):

    args = build_verify_parser().parse_args(argv)
    _start_logging(args)

    seed = 1 if args.seed is None else args.seed

    recordmodel = verify_suite(args.level, seed, checks=args.checks)

    summary = {
        "verdicts": recordmodel.get_verdict_counts(),
        "violations": recordmodel.get_total_violations(),
        "checks": [ "{} {} {}".format(report.check, report.body, report.verdict)
            for report in recordmodel.get_check_reports() ]
    }

    _emit(args, recordmodel, summary)

    if recordmodel.get_verdict_counts()["fail"]:
        return EXIT_CHECK_FAILED

    return EXIT_OK
