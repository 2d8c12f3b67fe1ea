# -*- coding: utf-8 -*-

"""
normpack.argument_processing
~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

This module handles the arguments passed to pack, vol and verify.
"""

import argparse
import json
import logging
import os
import sys

from .bodies import BodyException
from .harness import supported_checks, supported_check_levels, \
    supported_grid_parameters
from .input_types import body_from_spec, load_body_spec
from .output_types import supported_output_types

def process_body_argument(input_argument):
    """Accepts either a path to a JSON body file or an inline JSON body
    specification.
    """

    try:
        if os.path.exists(input_argument):
            return load_body_spec(input_argument)

        return body_from_spec(json.loads(input_argument))

    except json.JSONDecodeError:
        raise argparse.ArgumentTypeError(
            "{} is neither a body file nor a JSON body specification\n\n"
            "Examples:\n"
            "for the unit cube use\n"
            "'{{\"kind\": \"lp\", \"d\": 3, \"p\": \"inf\", \"scale\": 0.5}}'\n\n"
            "for the difference body of the simplex use\n"
            "'{{\"kind\": \"simplex_diff\", \"d\": 3}}'".format(input_argument)
            )

    except BodyException as error:
        raise argparse.ArgumentTypeError(str(error))

def process_vector_argument(input_argument):

    try:
        return [ float(value) for value in input_argument.split(',') ]
    except ValueError:
        raise argparse.ArgumentTypeError(
            "{} is not a comma separated list of numbers".format(input_argument))

def process_grid_argument(input_argument):
    """Parses a grid such as Delta=10,20,40 or d=2,3 into (name, values)."""

    if '=' not in input_argument:
        raise argparse.ArgumentTypeError(
            "no values supplied for grid {}\n\n"
            "Examples:\n"
            "--grid Delta=10,20,40\n"
            "--grid d=2,3,4".format(input_argument)
            )

    parameter, argument = input_argument.split('=', 1)

    if parameter not in supported_grid_parameters:
        raise argparse.ArgumentTypeError(
            "{} is not a supported grid parameter, supported parameters are "
            "{}".format(parameter, list(supported_grid_parameters))
            )

    values = process_vector_argument(argument)

    if parameter == "d":
        if any(value != int(value) or value < 1 for value in values):
            raise argparse.ArgumentTypeError(
                "dimensions must be positive integers, got {}".format(argument))

        values = [ int(value) for value in values ]

    return parameter, values

def process_check_names(input_argument):

    if input_argument == "all":
        return list(supported_checks.keys())

    checks = input_argument.split(',')

    for check in checks:
        if check not in supported_checks:
            raise argparse.ArgumentTypeError(
                "{} is not a supported check, supported checks are {}".format(
                    check, ["all"] + list(supported_checks.keys()))
                )

    return checks

def process_check_level(input_argument):

    if input_argument in supported_check_levels:
        return input_argument
    else:
        raise argparse.ArgumentTypeError(
            "{} is not a supported level, supported levels are {}".format(
                input_argument, list(supported_check_levels))
        )

def process_output_types(input_argument):

    output_type = input_argument

    if output_type in supported_output_types:
        return output_type
    else:
        raise argparse.ArgumentTypeError(
            "{} is not a supported output type, supported output types are "
            "{}".format(output_type, list(supported_output_types.keys()))
        )

def get_logger(appname, loglevel, logfile):

    logger = logging.getLogger(appname)

    if logfile == sys.stdout:
        logging.basicConfig(
            format='%(asctime)s [%(levelname)s] %(name)s: %(message)s',
            level=loglevel)
    else:
        logging.basicConfig(
            format='%(asctime)s [%(levelname)s] %(name)s: %(message)s',
            level=loglevel,
            filename=logfile)

    return logger

def calculate_loglevel(verbose=False, quiet=False):

    # verbose trumps quiet
    if verbose:
        return logging.DEBUG

    if quiet:
        return logging.WARNING

    return logging.INFO
