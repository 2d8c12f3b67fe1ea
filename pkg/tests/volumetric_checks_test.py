import unittest
import math

import numpy as np

from normpack import check_schmuckenschlager, check_logconcavity, \
    check_petty, check_rogers_shephard, check_minkowski_equivalence, \
    check_poisson_tail, check_gamma_ratio, check_polar_formula, \
    check_mc_calibration, normalize_to_unit_volume, \
    random_symmetric_hpolytope, mc_volume, simplex_difference

from normpack.recordmodel import VERDICT_FAIL, VERDICT_INCONCLUSIVE, \
    VERDICT_PASS
from normpack.volumetric_checks import SLOPE_TOLERANCE, describe_body, \
    log_slope_at_origin, packing_predicates, \
    regular_simplex_volume, simplex_translates_overlap, unit_cube, \
    unit_volume_ball

class TestingVolumetricChecks(unittest.TestCase):

    def test_describe_body(self):

        self.assertEqual(describe_body(unit_cube(2)), "lp(p=inf)")
        self.assertEqual(describe_body(unit_volume_ball(2)), "lp(p=2)")
        self.assertEqual(describe_body(random_symmetric_hpolytope(2, 3, 0)),
            "hpoly(m=6)")

    def test_schmuckenschlager_containment(self):

        rng = np.random.default_rng(21)

        for d in (2, 3):
            for body in (unit_cube(d), unit_volume_ball(d)):
                for delta in (0.05, 0.5):
                    report = check_schmuckenschlager(body, delta, 300, rng)

                    self.assertEqual(report.violations, 0)
                    self.assertEqual(report.verdict, VERDICT_PASS)
                    self.assertEqual(report.params["outer_violations"], 0)
                    self.assertEqual(report.params["inner_violations"], 0)

    def test_logconcavity_of_cube_and_ball(self):

        for body in (unit_cube(2), unit_volume_ball(3)):
            report = check_logconcavity(body, 20, 7, directions=5)

            self.assertEqual(report.verdict, VERDICT_PASS)
            self.assertLessEqual(report.value, 0.05)

    def test_slope_of_closed_forms_has_no_spread(self):

        slope, expected, spread = log_slope_at_origin(unit_cube(2),
            np.array([0.6, 0.8]), 1000, 0)

        self.assertAlmostEqual(expected, 1.4)
        self.assertEqual(spread, 0.0)
        self.assertLessEqual(abs(slope + expected) / expected, SLOPE_TOLERANCE)

    def test_slope_noise_is_not_a_failure(self):

        rng = np.random.default_rng(5)
        polytope = random_symmetric_hpolytope(2, 4, rng)
        difference = simplex_difference(2)

        for body in (polytope, difference):
            unit = normalize_to_unit_volume(body, mc_volume(body, 200000, rng))
            report = check_logconcavity(unit, 10, rng, samples=5000, directions=5)

            self.assertEqual(report.params["slope_failures"], 0)
            self.assertIn(report.verdict, (VERDICT_PASS, VERDICT_INCONCLUSIVE))
            self.assertEqual(report.verdict == VERDICT_INCONCLUSIVE,
                report.params["slope_undecided"] > 0)

    def test_petty_is_exact_for_cubes(self):

        for d in range(2, 9):
            report = check_petty(unit_cube(d), 0, 0, 0)

            self.assertEqual(report.verdict, VERDICT_PASS)
            self.assertAlmostEqual(report.value, 2.0 ** d / math.factorial(d))
            self.assertEqual(report.params["method"], "analytic")

    def test_petty_ball_meets_the_bound(self):

        for d in (2, 3, 5):
            report = check_petty(unit_volume_ball(d), 0, 0, 0)

            self.assertEqual(report.verdict, VERDICT_PASS)
            self.assertAlmostEqual(report.value, report.bound)

    def test_petty_for_random_polytope(self):

        rng = np.random.default_rng(31)
        polytope = random_symmetric_hpolytope(3, 5, rng)
        unit = normalize_to_unit_volume(polytope, mc_volume(polytope, 400000, rng))

        report = check_petty(unit, 4000, 0, rng)

        self.assertIn(report.verdict, (VERDICT_PASS, VERDICT_INCONCLUSIVE))
        self.assertEqual(report.params["method"], "radial")
        self.assertLess(report.value - 3 * report.std_error,
            report.bound * 1.05)

    def test_rogers_shephard(self):

        rng = np.random.default_rng(41)

        for d in (1, 2, 3):
            report = check_rogers_shephard(d, 400000, rng)

            self.assertEqual(report.bound, math.comb(2 * d, d))
            self.assertEqual(report.verdict, VERDICT_PASS)
            self.assertEqual(report.params["simplex_volume"],
                regular_simplex_volume(d))
            self.assertEqual(report.params["tolerance"], 0.05 if d == 3 else 0.03)
            self.assertLessEqual(report.params["relative_error"],
                report.params["tolerance"])

        self.assertAlmostEqual(regular_simplex_volume(2), math.sqrt(3.0) / 2.0)

    def test_simplex_overlap_lp(self):

        self.assertGreater(simplex_translates_overlap([0.0, 0.0], [0.1, 0.0]), 0.0)
        self.assertLess(simplex_translates_overlap([0.0, 0.0], [5.0, 0.0]), 0.0)

    def test_packing_predicates_agree(self):

        self.assertEqual(packing_predicates([[0.0, 0.0], [0.1, 0.0]]),
            (False, False))
        self.assertEqual(packing_predicates([[0.0, 0.0], [5.0, 0.0]]),
            (True, True))

    def test_minkowski_equivalence(self):

        for d in (2, 3):
            report = check_minkowski_equivalence(d, 40, d)

            self.assertEqual(report.violations, 0)
            self.assertEqual(report.verdict, VERDICT_PASS)

    def test_poisson_tail(self):

        report = check_poisson_tail(20.0, 1.0, 100000, 3)

        self.assertEqual(report.verdict, VERDICT_PASS)
        self.assertLess(report.value, report.bound)

    def test_gamma_ratio(self):

        report = check_gamma_ratio()

        self.assertEqual(report.verdict, VERDICT_PASS)
        self.assertGreaterEqual(report.value, 0.0)

    def test_polar_formula(self):

        report = check_polar_formula(64)

        self.assertEqual(report.verdict, VERDICT_PASS)
        self.assertEqual(report.trials, 64)
        self.assertAlmostEqual(report.params["d2"], 2.4674011, places=6)
        self.assertAlmostEqual(report.params["d3"], 2.3703704, places=6)

    def test_mc_calibration(self):

        report = check_mc_calibration(((2, 2.0), (6, math.inf)), 100000, 13)

        self.assertEqual(report.verdict, VERDICT_PASS)
        self.assertEqual(report.params["cases"], [[2, 2.0], [6, "inf"]])

    def test_mc_calibration_of_an_exact_cube_estimate(self):

        # the sampling box is the cube itself, so the estimate has no spread
        report = check_mc_calibration(((6, math.inf),), 10000, 0)

        self.assertEqual(report.violations, 0)
        self.assertEqual(report.value, 0.0)

    def test_verifiers_report_instead_of_raising(self):

        report = check_mc_calibration(((2, 2.0),), 1000, 0)

        self.assertIn(report.verdict, (VERDICT_PASS, VERDICT_FAIL))

if __name__ == '__main__':
    unittest.main()
