import unittest
import math
import os

from normpack import ExperimentConfig, ExperimentConfigException, \
    normalize_to_unit_volume, circumradius

from normpack.experiment import OUTPUT_DIRECTORY_VARIABLE, \
    default_output_directory, output_directory_default

cube_config = {
    "body": {"kind": "lp", "d": 2, "p": "inf", "scale": 0.5},
    "d": 2,
    "seed": 42
}

class TestingExperimentConfig(unittest.TestCase):

    def test_defaults(self):

        config = ExperimentConfig.from_dict(cube_config)

        self.assertEqual(config.Delta, 30.0)
        self.assertEqual(config.ik_delta, 0.9)
        self.assertEqual(config.codegree_coeff, 1.0)
        self.assertEqual(config.order_policy, "min-degree")
        self.assertIsNone(config.L)

    def test_json_round_trip(self):

        config = ExperimentConfig.from_dict(dict(cube_config, L=12.0, Delta=20.0))
        text = config.to_json()

        self.assertEqual(ExperimentConfig.from_json(text).to_json(), text)

    def test_unknown_and_missing_fields(self):

        with self.assertRaises(ExperimentConfigException):
            ExperimentConfig.from_dict(dict(cube_config, colour="blue"))

        without_seed = dict(cube_config)
        del without_seed["seed"]

        with self.assertRaises(ExperimentConfigException):
            ExperimentConfig.from_dict(without_seed)

        with self.assertRaises(ExperimentConfigException):
            ExperimentConfig.from_json("{not json")

    def test_validation(self):

        for changes in ({"seed": "42"}, {"seed": 1.5}, {"Delta": -1.0},
            {"d": 3}, {"mc_samples": 0}, {"order_policy": "largest"},
            {"L": 0.0}):

            with self.assertRaises(ExperimentConfigException):
                ExperimentConfig.from_dict(dict(cube_config, **changes))

    def test_config_hash_ignores_workers_and_output(self):

        config = ExperimentConfig.from_dict(cube_config)

        self.assertEqual(config.config_hash(),
            config.replace(workers=8, output="/tmp/elsewhere").config_hash())
        self.assertNotEqual(config.config_hash(),
            config.replace(seed=43).config_hash())
        self.assertNotIn("workers", config.result_dict())

    def test_side_length_bound(self):

        config = ExperimentConfig.from_dict(dict(cube_config, L=5.0))
        body = normalize_to_unit_volume(config.build_body())

        with self.assertRaises(ExperimentConfigException):
            config.resolve_side_length(body)

        self.assertEqual(config.replace(L=6.0).resolve_side_length(body), 6.0)

    def test_automatic_side_length(self):

        config = ExperimentConfig.from_dict(dict(cube_config, target_points=4000))
        body = normalize_to_unit_volume(config.build_body())
        side = config.resolve_side_length(body)

        self.assertAlmostEqual(side, math.sqrt(4000 / 7.5))
        self.assertGreaterEqual(side, 10.0 * circumradius(body))

        small = config.replace(target_points=10).resolve_side_length(body)

        self.assertAlmostEqual(small, 10.0 * circumradius(body))

    def test_output_directory_from_environment(self):

        previous = os.environ.pop(OUTPUT_DIRECTORY_VARIABLE, None)

        try:
            self.assertEqual(default_output_directory(), output_directory_default)

            os.environ[OUTPUT_DIRECTORY_VARIABLE] = "/tmp/test_normpack_output"
            self.assertEqual(default_output_directory(), "/tmp/test_normpack_output")

        finally:
            os.environ.pop(OUTPUT_DIRECTORY_VARIABLE, None)

            if previous is not None:
                os.environ[OUTPUT_DIRECTORY_VARIABLE] = previous

if __name__ == '__main__':
    unittest.main()
