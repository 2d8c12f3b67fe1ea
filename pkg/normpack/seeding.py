# -*- coding: utf-8 -*-

"""
normpack.seeding
~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

This module derives every random stream of a run from a single master seed.

Each pipeline stage receives its own generator, seeded by hashing the master
seed together with the stage label, so that adding a stage or changing the
worker count never shifts the random numbers another stage sees.
"""

import hashlib
import logging
import numbers

import numpy as np

logger = logging.getLogger(__name__)

pipeline_stage_names = (
    "normalize",
    "estimate_ik",
    "sample_poisson",
    "build_graph",
    "prune",
    "greedy",
    "local_search",
    "verify",
)

def derive_seed(master_seed, label):
    """Returns a 64 bit child seed for `label` under `master_seed`."""

    material = "{}:{}".format(int(master_seed), label).encode('utf8')

    return int(hashlib.sha3_256(material).hexdigest()[:16], 16)

def stage_generator(master_seed, label):

    seed = derive_seed(master_seed, label)
    logger.debug("stage {} draws from child seed {}".format(label, seed))

    return np.random.default_rng(seed)

def as_generator(rng):
    """Accepts an integer seed or a numpy Generator and returns a Generator.

    There is no default: unseeded, wall-clock randomness is never used.
    """

    if isinstance(rng, np.random.Generator):
        return rng

    if isinstance(rng, numbers.Integral) and not isinstance(rng, bool):
        return np.random.default_rng(int(rng))

    raise TypeError(
        "expected an integer seed or numpy Generator, got {!r}".format(rng))

def seed_value(rng):
    """Returns the integer seed if `rng` is one, else None."""

    if isinstance(rng, numbers.Integral) and not isinstance(rng, bool):
        return int(rng)

    return None

