import unittest
import math

import numpy as np

from hypothesis import given, settings
from hypothesis import strategies as st

from normpack import ConvexBody, HPolytopeSpec, BodySpecificationException, \
    BodyDimensionMismatchException, BodyInvalidInputException, \
    BodyVolumeUnavailableException, lp_ball, hpolytope, simplex_difference, \
    gauge, support, closed_form_volume, normalize_to_unit_volume, \
    circumradius, sample_uniform, random_symmetric_hpolytope

from normpack.bodies import as_hpolytope, polytope_vertices, known_volume

square_normals = [[1, 0], [-1, 0], [0, 1], [0, -1]]

exponents = st.sampled_from([1.0, 1.5, 2.0, 3.0, math.inf])

def vectors(d):
    return st.lists(st.floats(min_value=-5, max_value=5, allow_nan=False),
        min_size=d, max_size=d).map(np.array)

class TestingBodies(unittest.TestCase):

    def test_cube_gauge_and_circumradius(self):

        for d in (1, 2, 5, 9):
            cube = lp_ball(d, math.inf)

            self.assertAlmostEqual(gauge(cube, np.ones(d)), 1.0)
            self.assertAlmostEqual(circumradius(cube), math.sqrt(d))

    def test_euclidean_support(self):

        ball = lp_ball(2, 2.0)
        self.assertAlmostEqual(support(ball, [3.0, 4.0]), 5.0)

        diamond = lp_ball(2, 1.0)
        self.assertAlmostEqual(support(diamond, [1.0, -2.0]), 2.0)

        cube = lp_ball(3, math.inf, scale=0.5)
        self.assertAlmostEqual(support(cube, [1.0, -2.0, 0.5]), 1.75)

    def test_support_accepts_rows(self):

        ball = lp_ball(3, 2.0, scale=2.0)
        values = support(ball, np.eye(3))

        self.assertEqual(values.shape, (3,))
        np.testing.assert_allclose(values, [2.0, 2.0, 2.0])

    def test_closed_form_volumes(self):

        self.assertAlmostEqual(closed_form_volume(lp_ball(2, 2.0)), math.pi)
        self.assertAlmostEqual(closed_form_volume(lp_ball(3, math.inf, 0.5)), 1.0)
        self.assertAlmostEqual(closed_form_volume(lp_ball(4, 1.0)), 16.0 / 24.0)
        self.assertAlmostEqual(closed_form_volume(lp_ball(3, 2.0, 2.0)),
            4.0 / 3.0 * math.pi * 8.0)

    def test_hpolytope_has_no_closed_form_volume(self):

        square = hpolytope(square_normals, [1, 1, 1, 1])

        with self.assertRaises(BodyVolumeUnavailableException):
            closed_form_volume(square)

        with self.assertRaises(BodyVolumeUnavailableException):
            normalize_to_unit_volume(square)

    def test_normalize_to_unit_volume(self):

        for body in (lp_ball(3, 2.0), lp_ball(2, 1.0, 3.0), lp_ball(5, math.inf)):
            unit = normalize_to_unit_volume(body)

            self.assertEqual(unit.volume, 1.0)
            self.assertAlmostEqual(closed_form_volume(unit), 1.0)

        square = hpolytope(square_normals, [1, 1, 1, 1])
        unit = normalize_to_unit_volume(square, 4.0)

        self.assertAlmostEqual(unit.scale, 0.5)
        self.assertEqual(known_volume(unit), 1.0)

    def test_asymmetric_facets_are_rejected(self):

        with self.assertRaises(BodySpecificationException):
            HPolytopeSpec(square_normals, [1, 2, 1, 1])

        with self.assertRaises(BodySpecificationException):
            HPolytopeSpec([[1, 0], [0, 1], [-1, -1]], [1, 1, 1])

    def test_invalid_bodies_are_rejected(self):

        with self.assertRaises(BodySpecificationException):
            lp_ball(2, 0.5)

        with self.assertRaises(BodySpecificationException):
            lp_ball(2, 2.0, scale=0.0)

        with self.assertRaises(BodySpecificationException):
            hpolytope([[1, 0], [-1, 0]], [1, 1])

        with self.assertRaises(BodySpecificationException):
            ConvexBody("sphere", 3)

    def test_gauge_input_errors(self):

        ball = lp_ball(3, 2.0)

        with self.assertRaises(BodyDimensionMismatchException):
            gauge(ball, [1.0, 2.0])

        with self.assertRaises(BodyInvalidInputException):
            gauge(ball, [1.0, float('nan'), 0.0])

    def test_hpolytope_gauge_and_support(self):

        square = hpolytope(square_normals, [1, 1, 1, 1])

        self.assertAlmostEqual(gauge(square, [0.5, -2.0]), 2.0)
        self.assertAlmostEqual(support(square, [1.0, 1.0]), 2.0)

        vertices = polytope_vertices(square)

        self.assertEqual(vertices.shape, (4, 2))
        np.testing.assert_allclose(np.abs(vertices), np.ones((4, 2)))
        self.assertAlmostEqual(circumradius(square), math.sqrt(2.0))

    def test_simplex_difference_structure(self):

        for d in (2, 3, 4):
            body = simplex_difference(d)
            vertices = polytope_vertices(body)

            self.assertEqual(vertices.shape, (d * (d + 1), d))
            np.testing.assert_allclose(gauge(body, vertices), 1.0)
            self.assertAlmostEqual(circumradius(body), 1.0 / math.sqrt(2.0))

    @given(vectors(3))
    def test_simplex_difference_matches_its_h_form(self, x):

        body = simplex_difference(3)
        poly = as_hpolytope(body)

        self.assertAlmostEqual(gauge(body, x), gauge(poly, x), places=9)

    @given(exponents, vectors(3), st.floats(min_value=0.01, max_value=10))
    def test_gauge_is_homogeneous_and_even(self, p, x, t):

        body = lp_ball(3, p, scale=0.7)

        self.assertAlmostEqual(gauge(body, t * x), t * gauge(body, x), places=6)
        self.assertAlmostEqual(gauge(body, -x), gauge(body, x), places=9)

    @given(exponents, vectors(4), vectors(4))
    def test_gauge_triangle_inequality(self, p, x, y):

        body = lp_ball(4, p)

        self.assertLessEqual(gauge(body, x + y),
            gauge(body, x) + gauge(body, y) + 1e-9)

    def test_sample_uniform_stays_inside(self):

        for body in (lp_ball(3, 2.0), simplex_difference(3),
            random_symmetric_hpolytope(3, 5, 11)):

            points = sample_uniform(body, 3, 500)

            self.assertEqual(points.shape, (500, 3))
            self.assertTrue(np.all(gauge(body, points) <= 1.0 + 1e-12))

    def test_gauge_and_support_are_dual(self):

        rng = np.random.default_rng(17)

        for body in (lp_ball(3, 2.0, 1.5), lp_ball(3, 1.0), lp_ball(3, 3.0),
            lp_ball(3, math.inf, 0.5), simplex_difference(3),
            random_symmetric_hpolytope(3, 5, 12)):

            x = rng.standard_normal((1000, 3))
            y = rng.standard_normal((1000, 3))

            products = np.sum(x * y, axis=1)
            bounds = gauge(body, x) * support(body, y)

            self.assertTrue(np.all(products <= bounds * (1.0 + 1e-9) + 1e-12))

        ball = lp_ball(3, 2.0, 1.5)

        np.testing.assert_allclose(gauge(ball, y) * support(ball, y),
            np.sum(y * y, axis=1))

    def test_sample_uniform_is_centered(self):

        samples = 40000

        for body in (lp_ball(3, 2.0), lp_ball(2, math.inf), simplex_difference(3),
            random_symmetric_hpolytope(3, 5, 11)):

            d = body.dim
            points = sample_uniform(body, 23, samples)

            spread = points.std(axis=0) / math.sqrt(samples)
            self.assertTrue(np.all(np.abs(points.mean(axis=0)) <= 5 * spread))

            # the half body holds a 2^-d share of the volume
            share = 2.0 ** -d
            inner = np.mean(gauge(body, points) <= 0.5)
            self.assertLessEqual(abs(inner - share),
                5 * math.sqrt(share * (1.0 - share) / samples))

    def test_sample_uniform_is_seeded(self):

        ball = lp_ball(2, 2.0)

        np.testing.assert_array_equal(sample_uniform(ball, 5, 100),
            sample_uniform(ball, 5, 100))

    def test_random_symmetric_hpolytope(self):

        body = random_symmetric_hpolytope(3, 6, 4)

        self.assertEqual(body.facets.facet_count, 12)
        self.assertGreater(circumradius(body), 0.5)

        with self.assertRaises(BodySpecificationException):
            random_symmetric_hpolytope(3, 2, 4)

    def test_to_dict_marks_infinite_p(self):

        spec = lp_ball(2, math.inf, 0.5).to_dict()

        self.assertEqual(spec, {"kind": "lp", "d": 2, "scale": 0.5, "p": "inf"})

if __name__ == '__main__':
    unittest.main()
