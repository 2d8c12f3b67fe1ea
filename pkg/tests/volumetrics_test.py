import unittest
import math

import numpy as np

from scipy.optimize import brentq
from scipy import stats
from scipy.special import betainc

from normpack import McEstimate, ProjectionBodyModel, \
    VolumetricsParameterException, lp_ball, hpolytope, \
    normalize_to_unit_volume, closed_form_volume, mc_volume, \
    intersection_volume, exact_intersection_volume, classify_intersection, \
    estimate_ik, proj_body_support, polar_projection_volume, \
    polar_proj_ball_volume, gauge, random_symmetric_hpolytope

from normpack.bodies import as_hpolytope
from normpack.volumetrics import CLASS_INSIDE, CLASS_OUTSIDE, \
    analytic_projection_support, default_ik_delta, has_analytic_projection, \
    json_number, random_directions, unit_ball_volume
from normpack.volumetric_checks import exact_polar_projection_volume, \
    unit_cube, unit_volume_ball

def assertWithinSigmas(testcase, estimate, expected, sigmas=5, floor=1e-3):
    testcase.assertLessEqual(abs(estimate.value - expected),
        sigmas * estimate.std_error + floor)

class TestingVolumetrics(unittest.TestCase):

    def test_unit_ball_volumes(self):

        self.assertEqual(unit_ball_volume(0), 1.0)
        self.assertAlmostEqual(unit_ball_volume(2), math.pi)
        self.assertAlmostEqual(unit_ball_volume(3), 4.0 / 3.0 * math.pi)

    def test_default_ik_delta(self):

        self.assertEqual(default_ik_delta(2), 2.0 ** -10)
        self.assertEqual(default_ik_delta(10), 1e-6)

    def test_json_number(self):

        self.assertEqual(json_number(math.inf), "inf")
        self.assertEqual(json_number(-math.inf), "-inf")
        self.assertEqual(json_number(2), 2.0)
        self.assertIsNone(json_number(None))

    def test_estimate_interval(self):

        estimate = McEstimate(1.0, 0.1, 100)

        self.assertEqual(estimate.interval(), (1.0 - 3 * 0.1, 1.0 + 3 * 0.1))
        self.assertTrue(estimate.brackets(1.25))
        self.assertFalse(estimate.brackets(1.5))

    def test_mc_volume_matches_closed_form(self):

        for body in (lp_ball(2, 2.0), lp_ball(3, 1.0), lp_ball(3, 3.0)):
            estimate = mc_volume(body, 100000, 17)
            assertWithinSigmas(self, estimate, closed_form_volume(body))

    def test_mc_volume_needs_samples(self):

        with self.assertRaises(VolumetricsParameterException):
            mc_volume(lp_ball(2, 2.0), 10, 0)

    def test_exact_intersection_volume_of_cube(self):

        cube = unit_cube(3)

        self.assertAlmostEqual(exact_intersection_volume(cube, [0.5, 0.0, 0.0]), 0.5)
        self.assertAlmostEqual(
            exact_intersection_volume(cube, [0.5, -0.5, 0.2]), 0.5 * 0.5 * 0.8)
        self.assertEqual(exact_intersection_volume(cube, [1.5, 0.0, 0.0]), 0.0)
        self.assertIsNone(exact_intersection_volume(lp_ball(3, 3.0), [0, 0, 0]))

    def test_intersection_volume_matches_cube_product_formula(self):

        rng = np.random.default_rng(3)

        for d in (2, 3, 4, 5):
            cube = unit_cube(d)

            for x in rng.uniform(-1.0, 1.0, size=(10, d)):
                estimate = intersection_volume(cube, x, 20000, rng)
                expected = float(np.prod(np.clip(1.0 - np.abs(x), 0.0, None)))

                assertWithinSigmas(self, estimate, expected)

    def test_intersection_volume_matches_ball_lens_formula(self):

        ball = unit_volume_ball(3)
        rng = np.random.default_rng(4)

        for radius in rng.uniform(0.0, 2.0 * ball.scale, size=10):
            x = np.array([radius, 0.0, 0.0])
            estimate = intersection_volume(ball, x, 20000, rng)
            expected = betainc(2.0, 0.5, 1.0 - (radius / (2.0 * ball.scale)) ** 2)

            assertWithinSigmas(self, estimate, expected)
            self.assertAlmostEqual(exact_intersection_volume(ball, x), expected)

    def test_disjoint_translates_give_exact_zero(self):

        cube = unit_cube(2)
        estimate = intersection_volume(cube, [2.5, 0.0], 1000, 0)

        self.assertEqual(estimate.value, 0.0)
        self.assertEqual(estimate.std_error, 0.0)

    def test_intersection_volume_is_even_and_decreasing_along_rays(self):

        rng = np.random.default_rng(6)
        polytope = random_symmetric_hpolytope(3, 5, rng)
        unit = normalize_to_unit_volume(polytope, mc_volume(polytope, 200000, rng))

        for direction in random_directions(3, 5, rng):

            reach = 2.0 / gauge(unit, direction)
            previous = None

            for t in np.linspace(0.0, reach, 6)[1:-1]:
                forward = intersection_volume(unit, t * direction, 20000, rng)
                backward = intersection_volume(unit, -t * direction, 20000, rng)

                self.assertLessEqual(abs(forward.value - backward.value),
                    5 * math.hypot(forward.std_error, backward.std_error) + 1e-3)

                if previous is not None:
                    self.assertLessEqual(forward.value, previous.value +
                        5 * math.hypot(forward.std_error, previous.std_error) + 1e-3)

                previous = forward

        ball = unit_volume_ball(4)
        radii = np.linspace(0.0, 2.0 * ball.scale, 20)
        values = [ exact_intersection_volume(ball, [r, 0.0, 0.0, 0.0])
            for r in radii ]

        self.assertTrue(all(np.diff(values) <= 0.0))
        self.assertAlmostEqual(values[0], 1.0)
        self.assertAlmostEqual(values[-1], 0.0)

    def test_delta_k_grows_with_dimension(self):

        delta_Ks = []

        for d in range(2, 7):
            profile = estimate_ik(unit_cube(d), 0.5, 200000, 1000, d)

            # I_K of the cube is {prod(1 - |x_i|) > 1/2}
            expected = 2.0 ** d * stats.gamma.cdf(math.log(2.0), d)
            assertWithinSigmas(self, profile.volume_estimate, expected)

            delta_Ks.append(profile.delta_K)

        self.assertTrue(all(np.diff(delta_Ks) > 0))

    def test_classify_intersection_exact_path(self):

        cube = unit_cube(2)
        codes, values = classify_intersection(cube,
            [[0.1, 0.1], [0.7, 0.7], [3.0, 0.0]], 0.5, 1000, 0)

        np.testing.assert_array_equal(codes, [CLASS_INSIDE, CLASS_OUTSIDE, CLASS_OUTSIDE])
        self.assertAlmostEqual(values[0], 0.81)

    def test_classify_intersection_sampled_path(self):

        square = normalize_to_unit_volume(
            hpolytope([[1, 0], [-1, 0], [0, 1], [0, -1]], [1, 1, 1, 1], 0.5), 1.0)

        codes, values = classify_intersection(square,
            [[0.1, 0.1], [0.7, 0.7], [3.0, 0.0]], 0.5, 2000, 5)

        np.testing.assert_array_equal(codes, [CLASS_INSIDE, CLASS_OUTSIDE, CLASS_OUTSIDE])
        self.assertAlmostEqual(values[0], 0.81, delta=0.05)

    def test_estimate_ik_of_ball_matches_lens_radius(self):

        ball = unit_volume_ball(3)
        radius = ball.scale

        threshold = brentq(
            lambda r: betainc(2.0, 0.5, 1.0 - (r / (2.0 * radius)) ** 2) - 0.5,
            0.0, 2.0 * radius)

        profile = estimate_ik(ball, 0.5, 20000, 1000, 8)
        estimated_radius = (profile.volume_estimate.value / unit_ball_volume(3)) ** (1.0 / 3.0)

        self.assertLessEqual(abs(estimated_radius - threshold), 0.05 * threshold)
        self.assertAlmostEqual(profile.delta_K,
            1.0 / (3 * profile.volume_estimate.value))
        self.assertFalse(profile.degenerate)

    def test_estimate_ik_small_delta_approaches_2k(self):

        cube = unit_cube(2)
        profile = estimate_ik(cube, 1e-6, 5000, 1000, 2)

        self.assertGreater(profile.volume_estimate.value, 0.99 * 4.0)

    def test_estimate_ik_with_delta_at_least_one(self):

        profile = estimate_ik(unit_cube(2), 1.0, 1000, 1000, 0)

        self.assertEqual(profile.volume_estimate.value, 0.0)
        self.assertEqual(profile.delta_K, math.inf)
        self.assertIn("delta>=1", profile.flags)
        self.assertEqual(profile.to_dict()["delta_K"], "inf")

    def test_estimate_ik_rejects_nonpositive_delta(self):

        with self.assertRaises(VolumetricsParameterException):
            estimate_ik(unit_cube(2), 0.0, 1000, 1000, 0)

    def test_has_analytic_projection(self):

        self.assertTrue(has_analytic_projection(unit_cube(3)))
        self.assertTrue(has_analytic_projection(lp_ball(3, 2.0)))
        self.assertFalse(has_analytic_projection(lp_ball(3, 3.0)))
        self.assertTrue(has_analytic_projection(lp_ball(1, 3.0)))

    def test_cube_projection_support_agrees_with_facet_formula(self):

        cube = lp_ball(3, math.inf, 0.7)
        directions = np.random.default_rng(6).standard_normal((20, 3))

        np.testing.assert_allclose(
            analytic_projection_support(cube, directions),
            analytic_projection_support(as_hpolytope(cube), directions))

    def test_ball_projection_support(self):

        ball = lp_ball(3, 2.0, 2.0)
        estimate = proj_body_support(ball, [0.0, 0.6, 0.8], 1000, 0)

        self.assertAlmostEqual(estimate.value, 4.0 * math.pi)
        self.assertEqual(estimate.std_error, 0.0)

    def test_sampled_projection_support_of_l3_ball(self):

        body = lp_ball(3, 3.0)
        estimate = proj_body_support(body, [0.0, 0.0, 1.0], 4000, 9)

        assertWithinSigmas(self, estimate, closed_form_volume(lp_ball(2, 3.0)),
            floor=0.02)

    def test_projection_support_needs_unit_vector(self):

        with self.assertRaises(VolumetricsParameterException):
            proj_body_support(unit_cube(2), [1.0, 1.0], 1000, 0)

    def test_projection_model_is_homogeneous(self):

        model = ProjectionBodyModel(unit_cube(3))

        self.assertAlmostEqual(model.support([2.0, 0.0, -2.0]),
            2.0 * model.support([1.0, 0.0, -1.0]))
        self.assertEqual(model.polar_gauge([0.0, 0.0, 0.0]), 0.0)

    def test_polar_projection_volume_of_cube(self):

        cube = unit_cube(3)
        estimate = polar_projection_volume(ProjectionBodyModel(cube), 20000, 12)

        assertWithinSigmas(self, estimate, exact_polar_projection_volume(cube))
        self.assertAlmostEqual(exact_polar_projection_volume(cube), 8.0 / 6.0)

    def test_polar_projection_ball_volume(self):

        self.assertAlmostEqual(polar_proj_ball_volume(2).value, 2.4674011, places=6)
        self.assertAlmostEqual(polar_proj_ball_volume(3).value, 2.3703704, places=6)

        for d in range(1, 65):
            result = polar_proj_ball_volume(d)
            self.assertTrue(result.holds)

        with self.assertRaises(VolumetricsParameterException):
            polar_proj_ball_volume(0)

if __name__ == '__main__':
    unittest.main()
