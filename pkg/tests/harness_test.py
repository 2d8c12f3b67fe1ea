import unittest
import os
import json
import shutil

from normpack import ExperimentConfig, ExperimentConfigException, \
    run_pipeline, sweep, verify_suite

from normpack.harness import RUN_RECORD_FILENAME, TIMINGS_FILENAME, \
    SWEEP_TABLE_FILENAME, grid_configs
from normpack.seeding import pipeline_stage_names
from normpack.pointfile import read_point_graph
from normpack.recordmodel import VERDICT_FAIL, VERDICT_PASS

def small_config(output, **changes):

    config = {
        "body": {"kind": "lp", "d": 2, "p": "inf", "scale": 0.5},
        "d": 2,
        "seed": 42,
        "Delta": 8.0,
        "target_points": 300,
        "mc_samples": 500,
        "ik_samples": 500,
        "output": output
    }
    config.update(changes)

    return ExperimentConfig.from_dict(config)

def fresh_directory(directory):

    if os.path.exists(directory):
        shutil.rmtree(directory)

    os.makedirs(directory)

    return directory

class TestingPipeline(unittest.TestCase):

    def test_run_pipeline_persists_record_and_timings(self):

        working_directory = fresh_directory("/tmp/test_harness_run_pipeline")
        config = small_config(working_directory)

        record = run_pipeline(config, export_packing=True, export_graph=True)

        self.assertEqual(record.status, "ok")
        self.assertEqual(record.config_hash, config.config_hash())
        self.assertGreater(record.packing["size"], 0)
        self.assertGreaterEqual(record.packing["size"],
            record.packing["greedy_bound"])
        self.assertLessEqual(record.prune_report["retained"],
            record.prune_report["sampled"])
        self.assertTrue(record.packing["bounds_hold"])

        self.assertEqual([ check["check"] for check in record.checks ],
            ["prune_postconditions", "packing"])
        self.assertTrue(all(check["verdict"] == VERDICT_PASS
            for check in record.checks))

        with open(os.path.join(working_directory, RUN_RECORD_FILENAME)) as f:
            lines = f.read().splitlines()

        self.assertEqual(len(lines), 1)
        self.assertEqual(json.loads(lines[0])["config_hash"], record.config_hash)

        with open(os.path.join(working_directory, TIMINGS_FILENAME)) as f:
            timings = json.loads(f.readline())["timings"]

        self.assertEqual(set(timings), set(pipeline_stage_names))

        self.assertTrue(os.path.exists(os.path.join(working_directory,
            "packing-{}.txt".format(record.config_hash[:12]))))

        points, edges, body, _ = read_point_graph(os.path.join(working_directory,
            "graph-{}.txt".format(record.config_hash[:12])))

        self.assertEqual(len(points), record.packing["sampled"])
        self.assertGreater(len(edges), 0)
        self.assertEqual(body.dim, 2)

        run_pipeline(config)

        with open(os.path.join(working_directory, RUN_RECORD_FILENAME)) as f:
            self.assertEqual(len(f.read().splitlines()), 2)

    def test_run_pipeline_is_deterministic(self):

        config = small_config("/tmp/test_harness_unused")

        first = run_pipeline(config, persist=False)
        second = run_pipeline(config, persist=False)
        parallel = run_pipeline(config.replace(workers=2), persist=False)
        wide = run_pipeline(config.replace(workers=8), persist=False)

        self.assertEqual(first.to_json(), second.to_json())
        self.assertEqual(first.to_json(), parallel.to_json())
        self.assertEqual(first.to_json(), wide.to_json())

        self.assertNotEqual(first.to_json(),
            run_pipeline(config.replace(seed=43), persist=False).to_json())

    def test_euclidean_packings_beat_the_trivial_bound(self):

        for d in (2, 3, 4):
            for seed in (1, 2, 3):
                config = small_config("/tmp/test_harness_unused",
                    body={"kind": "lp", "d": d, "p": 2}, d=d, seed=seed,
                    Delta=30.0, target_points=400)

                record = run_pipeline(config, persist=False)

                self.assertGreaterEqual(record.packing["density"], 2.0 ** -d)

    def test_prune_postconditions_over_seeded_runs(self):

        for d in (2, 3, 4):
            for seed in range(17):
                config = small_config("/tmp/test_harness_unused",
                    body={"kind": "lp", "d": d, "p": 2}, d=d, seed=seed,
                    target_points=200)

                record = run_pipeline(config, persist=False)
                postconditions = record.checks[0]

                self.assertEqual(postconditions["check"], "prune_postconditions")
                self.assertEqual(postconditions["verdict"], VERDICT_PASS)
                self.assertEqual(postconditions["violations"], 0)

    def test_simplex_difference_run(self):

        config = small_config("/tmp/test_harness_unused",
            body={"kind": "simplex_diff", "d": 2})

        record = run_pipeline(config, persist=False)

        self.assertEqual(record.status, "ok")
        self.assertGreater(record.packing["size"], 0)

    def test_side_length_too_small(self):

        config = small_config("/tmp/test_harness_unused", L=5.0)

        with self.assertRaises(ExperimentConfigException):
            run_pipeline(config, persist=False)


class TestingSweep(unittest.TestCase):

    def test_delta_sweep(self):

        working_directory = fresh_directory("/tmp/test_harness_sweep")
        config = small_config(working_directory)

        model = sweep(config, "Delta", [6.0, 10.0])
        rows = model.get_table_rows()

        self.assertEqual([ row["Delta"] for row in rows ], [6.0, 10.0])
        self.assertTrue(all(row["status"] == "ok" for row in rows))
        self.assertEqual(len(model.get_run_records()), 2)
        self.assertTrue(os.path.exists(os.path.join(working_directory,
            SWEEP_TABLE_FILENAME)))

    def test_failed_grid_points_are_flagged(self):

        config = small_config("/tmp/test_harness_unused", L=5.0)

        model = sweep(config, "Delta", [6.0, 10.0], persist=False)

        self.assertEqual([ row["status"] for row in model.get_table_rows() ],
            ["failed", "failed"])
        self.assertEqual(model.get_run_records(), [])

    def test_dimension_grid_rewrites_the_body(self):

        config = small_config("/tmp/test_harness_unused", L=9.0)
        configs = grid_configs(config, "d", [2, 3])

        self.assertEqual([ point.body["d"] for point in configs ], [2, 3])
        self.assertTrue(all(point.L is None for point in configs))
        self.assertEqual(config.body["d"], 2)

    def test_bad_grids(self):

        config = small_config("/tmp/test_harness_unused")

        with self.assertRaises(ExperimentConfigException):
            sweep(config, "Delta", [], persist=False)

        with self.assertRaises(ExperimentConfigException):
            grid_configs(config, "seed", [1, 2])


class TestingVerifySuite(unittest.TestCase):

    def test_fast_suite_subset(self):

        model = verify_suite("fast", 1, checks=["poisson", "formulas"])
        reports = model.get_check_reports()

        self.assertEqual([ report.check for report in reports ],
            ["poisson_tail", "gamma_ratio", "polar_formula", "mc_calibration"])
        self.assertNotIn(VERDICT_FAIL, [ report.verdict for report in reports ])

    def test_suite_is_seeded(self):

        first = verify_suite("fast", 3, checks=["poisson"])
        second = verify_suite("fast", 3, checks=["poisson"])

        self.assertEqual(first.get_check_reports(), second.get_check_reports())

    def test_unknown_level(self):

        with self.assertRaises(ExperimentConfigException):
            verify_suite("thorough")

if __name__ == '__main__':
    unittest.main()
