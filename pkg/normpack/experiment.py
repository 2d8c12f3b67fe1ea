# -*- coding: utf-8 -*-

"""
normpack.experiment
~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

This module holds the configuration of a packing experiment.

The thresholds default to desk-scale values. The literal d^-10 and d^-9
constants are available through `volumetrics.default_ik_delta` and
`packing.default_codegree_coeff`, but at d <= 12 they remove every sampled
point for any useful Delta. The codegree coefficient stays below
1 + Delta^(-1/3); at or above it every heavy pair already has both endpoints
of degree above the X1 threshold, and X3 removes nothing new.
"""

import dataclasses
import hashlib
import json
import logging
import numbers
import os

from dataclasses import dataclass

from .bodies import circumradius
from .independent_set import DEFAULT_LOCAL_SEARCH_BUDGET, supported_order_policies
from .input_types import body_from_spec
from .packing import DEFAULT_MAX_POINTS, SELF_WRAP_FACTOR

logger = logging.getLogger(__name__)

output_directory_default = "/tmp/normpack-output"

OUTPUT_DIRECTORY_VARIABLE = "NORMPACK_OUTPUT_DIR"

# fields that do not change results and stay out of the config hash
non_result_fields = ("workers", "output")

class ExperimentConfigException(Exception):
    """An exception indicating an invalid experiment configuration."""
    pass

def default_output_directory():
    return os.environ.get(OUTPUT_DIRECTORY_VARIABLE, output_directory_default)


@dataclass
class ExperimentConfig:
    """One pipeline run. `L` may be None, in which case it is chosen so that
    about `target_points` points are sampled.
    """

    body: dict
    d: int
    seed: int
    L: float = None
    Delta: float = 30.0
    ik_delta: float = 0.9
    codegree_coeff: float = 1.0
    mc_samples: int = 2000
    ik_samples: int = 2000
    volume_samples: int = 200000
    order_policy: str = "min-degree"
    local_search_budget: int = DEFAULT_LOCAL_SEARCH_BUDGET
    max_points: int = DEFAULT_MAX_POINTS
    target_points: int = 2000
    workers: int = 1
    output: str = None

    @classmethod
    def from_dict(cls, data):

        if not isinstance(data, dict):
            raise ExperimentConfigException(
                "an experiment config must be a JSON object")

        known = set(field.name for field in dataclasses.fields(cls))
        unknown = set(data) - known

        if unknown:
            raise ExperimentConfigException(
                "unknown config fields {}".format(sorted(unknown)))

        missing = [ name for name in ("body", "d", "seed") if name not in data ]

        if missing:
            raise ExperimentConfigException(
                "config is missing the mandatory fields {}".format(missing))

        config = cls(**data)
        config.validate()

        return config

    @classmethod
    def from_json(cls, text):

        try:
            data = json.loads(text)
        except json.JSONDecodeError as error:
            raise ExperimentConfigException(
                "config is not valid JSON: {}".format(error))

        return cls.from_dict(data)

    def to_dict(self):
        return dataclasses.asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=4)

    def result_dict(self):
        """The fields that determine results."""

        return { key: value for key, value in self.to_dict().items()
            if key not in non_result_fields }

    def config_hash(self):
        canonical = json.dumps(self.result_dict(), sort_keys=True)
        return hashlib.sha3_256(canonical.encode('utf8')).hexdigest()

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def validate(self):
        """Checks everything that does not need the normalized body."""

        if not isinstance(self.seed, numbers.Integral) or isinstance(self.seed, bool):
            raise ExperimentConfigException(
                "seed must be an integer, got {!r}".format(self.seed))

        if not isinstance(self.d, numbers.Integral) or self.d < 1:
            raise ExperimentConfigException(
                "d must be a positive integer, got {!r}".format(self.d))

        for name in ("Delta", "ik_delta", "codegree_coeff"):
            value = getattr(self, name)

            if not isinstance(value, numbers.Real) or not value > 0:
                raise ExperimentConfigException(
                    "{} must be positive, got {!r}".format(name, value))

        for name in ("mc_samples", "ik_samples", "volume_samples",
            "local_search_budget", "max_points", "target_points", "workers"):
            value = getattr(self, name)

            if not isinstance(value, numbers.Integral) or value < 1:
                raise ExperimentConfigException(
                    "{} must be a positive integer, got {!r}".format(name, value))

        if self.L is not None and not (isinstance(self.L, numbers.Real) and self.L > 0):
            raise ExperimentConfigException(
                "L must be positive or null, got {!r}".format(self.L))

        if self.order_policy not in supported_order_policies:
            raise ExperimentConfigException(
                "{} is not a supported order policy, supported policies are "
                "{}".format(self.order_policy, list(supported_order_policies)))

        if not isinstance(self.body, dict) or int(self.body.get("d", -1)) != self.d:
            raise ExperimentConfigException(
                "body specification {} must have dimension d = {}".format(
                    self.body, self.d))

    def build_body(self):
        return body_from_spec(self.body)

    def resolve_side_length(self, body):
        """Returns L for the normalized `body`, checking the no-self-wrap bound
        L > 4 circumradius(2K).
        """

        radius = circumradius(body)
        minimum = SELF_WRAP_FACTOR * radius

        if self.L is not None:

            if not self.L > minimum:
                raise ExperimentConfigException(
                    "L = {} is below the no-self-wrap bound {}".format(
                        self.L, minimum))

            return float(self.L)

        intensity = 2.0 ** (-self.d) * self.Delta
        side = (self.target_points / intensity) ** (1.0 / self.d)
        side = max(side, 10.0 * radius)

        logger.info("choosing side length L = {} for about {} points".format(
            side, intensity * side ** self.d))

        return side
