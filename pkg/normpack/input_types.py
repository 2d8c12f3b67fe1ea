# -*- coding: utf-8 -*-

"""
normpack.input_types
~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

This module exists to permit different ways of describing a convex body and
an experiment: JSON body specifications, body files and experiment config
files.

A body specification looks like

    {"kind": "lp", "d": 3, "p": "inf", "scale": 0.5}
    {"kind": "hpoly", "d": 2, "facets": [{"normal": [1, 0], "offset": 1}, ...]}
    {"kind": "simplex_diff", "d": 3}
"""

import json
import logging
import math

from .bodies import ConvexBody, HPolytopeSpec, BodySpecificationException, \
    LP_BALL, HPOLYTOPE, SIMPLEX_DIFFERENCE

logger = logging.getLogger(__name__)

def _parse_p(value):

    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity"):
            return math.inf

        try:
            return float(value)
        except ValueError:
            raise BodySpecificationException(
                "p must be a number or \"inf\", got {}".format(value))

    if value is None:
        raise BodySpecificationException("an l_p ball needs p")

    return float(value)

def _common_fields(spec):

    if "d" not in spec:
        raise BodySpecificationException(
            "body specification {} has no dimension d".format(spec))

    return int(spec["d"]), float(spec.get("scale", 1.0)), spec.get("volume")

def get_lp_body(spec):

    d, scale, volume = _common_fields(spec)

    return ConvexBody(LP_BALL, d, scale=scale, p=_parse_p(spec.get("p")),
        volume=volume)

def get_hpolytope_body(spec):

    d, scale, volume = _common_fields(spec)
    facets = spec.get("facets")

    if not facets:
        raise BodySpecificationException("an H-polytope needs a facet list")

    try:
        normals = [ facet["normal"] for facet in facets ]
        offsets = [ facet["offset"] for facet in facets ]
    except (KeyError, TypeError):
        raise BodySpecificationException(
            "every facet needs a \"normal\" and an \"offset\"")

    return ConvexBody(HPOLYTOPE, d, scale=scale,
        facets=HPolytopeSpec(normals, offsets), volume=volume)

def get_simplex_difference_body(spec):

    d, scale, volume = _common_fields(spec)

    return ConvexBody(SIMPLEX_DIFFERENCE, d, scale=scale, volume=volume)

supported_body_kinds = {
    LP_BALL: get_lp_body,
    HPOLYTOPE: get_hpolytope_body,
    SIMPLEX_DIFFERENCE: get_simplex_difference_body
}

def body_from_spec(spec):
    """This factory method takes a body specification dictionary and uses
    `supported_body_kinds` to build the ConvexBody it describes.
    """

    if not isinstance(spec, dict):
        raise BodySpecificationException(
            "a body specification must be a JSON object, got {}".format(spec))

    kind = spec.get("kind")

    if kind not in supported_body_kinds:
        raise BodySpecificationException(
            "{} is not a supported body kind, supported kinds are {}".format(
                kind, list(supported_body_kinds.keys())))

    logger.debug("building {} body from {}".format(kind, spec))

    return supported_body_kinds[kind](spec)

def load_body_spec(filename):
    """Reads a body specification from a JSON file."""

    with open(filename) as bodyfile:
        try:
            spec = json.load(bodyfile)
        except json.JSONDecodeError as error:
            raise BodySpecificationException(
                "{} is not valid JSON: {}".format(filename, error))

    return body_from_spec(spec)

def load_experiment_config(filename):
    """Reads an ExperimentConfig from a JSON file."""

    from .experiment import ExperimentConfig

    with open(filename) as configfile:
        text = configfile.read()

    logger.info("loading experiment config from {}".format(filename))

    return ExperimentConfig.from_json(text)
