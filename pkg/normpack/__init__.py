from .bodies import ConvexBody, HPolytopeSpec, BodyException, \
    BodyDimensionMismatchException, BodyInvalidInputException, \
    BodyVolumeUnavailableException, BodySamplingException, \
    BodySpecificationException, lp_ball, hpolytope, simplex_difference, \
    gauge, support, closed_form_volume, normalize_to_unit_volume, \
    circumradius, sample_uniform, random_symmetric_hpolytope
from .input_types import body_from_spec, supported_body_kinds, \
    load_body_spec, load_experiment_config
from .volumetrics import McEstimate, IkProfile, ProjectionBodyModel, \
    VolumetricsException, VolumetricsBracketException, \
    VolumetricsParameterException, mc_volume, intersection_volume, \
    exact_intersection_volume, classify_intersection, estimate_ik, \
    proj_body_support, polar_projection_volume, polar_proj_ball_volume
from .volumetric_checks import check_schmuckenschlager, check_logconcavity, \
    check_petty, check_rogers_shephard, check_minkowski_equivalence, \
    check_poisson_tail, check_gamma_ratio, check_polar_formula, \
    check_mc_calibration
from .packing import TorusDomain, PointSet, PackingGraph, PruneReport, \
    PackingException, PackingDomainException, PackingSampleSizeException, \
    PackingProfileMismatchException, sample_poisson, build_graph, prune, \
    degree_codegree_stats, check_prune_postconditions, brute_force_adjacency
from .independent_set import PackingResult, IndependentSetException, \
    PackingOverlapException, greedy_independent_set, local_search_improve, \
    exhaustive_maximum_independent_set, verify_packing
from .pointfile import MalformedPointFileException, write_point_graph, \
    read_point_graph, write_packing, read_packing
from .experiment import ExperimentConfig, ExperimentConfigException
from .recordmodel import CheckReport, RunRecord, RecordModel
from .harness import PipelineStageException, run_pipeline, sweep, \
    verify_suite, supported_checks
from .argument_processing import get_logger, calculate_loglevel, \
    process_output_types
from .output_types import supported_output_types

__all__ = ["ConvexBody", "HPolytopeSpec", "BodyException",
    "BodyDimensionMismatchException", "BodyInvalidInputException",
    "BodyVolumeUnavailableException", "BodySamplingException",
    "BodySpecificationException", "lp_ball", "hpolytope",
    "simplex_difference", "gauge", "support", "closed_form_volume",
    "normalize_to_unit_volume", "circumradius", "sample_uniform",
    "random_symmetric_hpolytope",
    "body_from_spec", "supported_body_kinds", "load_body_spec",
    "load_experiment_config",
    "McEstimate", "IkProfile", "ProjectionBodyModel", "VolumetricsException",
    "VolumetricsBracketException", "VolumetricsParameterException",
    "mc_volume", "intersection_volume", "exact_intersection_volume",
    "classify_intersection", "estimate_ik", "proj_body_support",
    "polar_projection_volume", "polar_proj_ball_volume",
    "check_schmuckenschlager", "check_logconcavity", "check_petty",
    "check_rogers_shephard", "check_minkowski_equivalence",
    "check_poisson_tail", "check_gamma_ratio", "check_polar_formula",
    "check_mc_calibration",
    "TorusDomain", "PointSet", "PackingGraph", "PruneReport",
    "PackingException", "PackingDomainException",
    "PackingSampleSizeException", "PackingProfileMismatchException",
    "sample_poisson", "build_graph", "prune", "degree_codegree_stats",
    "check_prune_postconditions", "brute_force_adjacency",
    "PackingResult", "IndependentSetException", "PackingOverlapException",
    "greedy_independent_set", "local_search_improve",
    "exhaustive_maximum_independent_set", "verify_packing",
    "MalformedPointFileException", "write_point_graph", "read_point_graph",
    "write_packing", "read_packing",
    "ExperimentConfig", "ExperimentConfigException",
    "CheckReport", "RunRecord", "RecordModel",
    "PipelineStageException", "run_pipeline", "sweep", "verify_suite",
    "supported_checks", "get_logger", "calculate_loglevel",
    "process_output_types", "supported_output_types"
    ]

import logging

logging.getLogger(__name__).addHandler(logging.NullHandler())
