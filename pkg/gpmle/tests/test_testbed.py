# -*- mode: python; coding: utf-8 -*-

import math
import os
import tempfile

import numpy
from numpy import testing

from django import test

from .. import errors
from .. import testbed


class FunctionTests(test.SimpleTestCase):
    def test_branin_minima(self):
        for x in ([-math.pi, 12.275], [math.pi, 2.275], [9.42478, 2.475]):
            self.assertAlmostEqual(testbed.evaluate(testbed.BRANIN, x),
                                   0.397887, places=5)

    def test_welded_beam(self):
        self.assertAlmostEqual(
            testbed.evaluate(testbed.WELDED_BEAM, [1.0, 1.0, 1.0, 1.0]),
            1.10471 + 0.04811 * 15.0)

    def test_g10(self):
        x = [100.0, 2000.0, 3000.0] + [10.0] * 5
        self.assertEqual(testbed.evaluate(testbed.G10, x), 5100.0)

    def test_borehole(self):
        lower, upper = testbed.BOREHOLE.domain
        center = testbed.evaluate(testbed.BOREHOLE, (lower + upper) / 2)

        self.assertGreater(center, 0.0)
        self.assertLess(testbed.evaluate(testbed.BOREHOLE, lower),
                        testbed.evaluate(testbed.BOREHOLE, upper))

    def test_domain(self):
        self.assertEqual([f.d for f in (testbed.BRANIN, testbed.BOREHOLE,
                                        testbed.WELDED_BEAM, testbed.G10)],
                         [2, 8, 4, 8])

        with self.assertRaises(errors.OutOfDomain):
            testbed.evaluate(testbed.BRANIN, [11.0, 0.0])

        with self.assertRaises(errors.ContractViolation):
            testbed.evaluate(testbed.BRANIN, [1.0, 2.0, 3.0])

        # the closed upper bound itself is inside
        testbed.evaluate(testbed.BRANIN, [10.0, 15.0])

    def test_lookup(self):
        self.assertIs(testbed.get_function('borehole'), testbed.BOREHOLE)

        with self.assertRaises(errors.UnknownFunction):
            testbed.get_function('hartmann')

        with self.assertRaisesRegex(errors.UnknownFunction, 'not available'):
            testbed.get_function('g10mod')


class DesignTests(test.SimpleTestCase):
    def test_latin(self):
        rng = numpy.random.default_rng(0)

        for n, d in ((5, 2), (17, 8), (1, 3)):
            points = testbed.latin_hypercube(n, d, rng)

            self.assertEqual(points.shape, (n, d))
            self.assertTrue(testbed.is_latin(points))
            self.assertTrue(numpy.all((points >= 0) & (points < 1)))

    def test_not_latin(self):
        self.assertFalse(testbed.is_latin([[0.1], [0.2]]))

    def test_maximin_improves(self):
        for seed in range(3):
            plain = testbed.unit_design(
                testbed.DesignSpec('lhs', 12, seed), 3)
            best = testbed.unit_design(
                testbed.DesignSpec('lhs-mdu', 12, seed, 50), 3)

            self.assertTrue(testbed.is_latin(best))
            self.assertGreaterEqual(testbed.min_distance(best),
                                    testbed.min_distance(plain))

    def test_deterministic(self):
        spec = testbed.DesignSpec(testbed.DesignKind.LHS_MDU, 10, 7, 20)

        testing.assert_array_equal(
            testbed.generate_design(spec, testbed.BRANIN.domain),
            testbed.generate_design(spec, testbed.BRANIN.domain))

    def test_within_domain(self):
        lower, upper = testbed.BOREHOLE.domain
        X = testbed.generate_design(
            testbed.DesignSpec('uniform', 30, 1), (lower, upper))

        self.assertTrue(numpy.all((X >= lower) & (X <= upper)))

    def test_invalid(self):
        with self.assertRaises(errors.ContractViolation):
            testbed.DesignSpec('lhs', 0)

        with self.assertRaises(ValueError):
            testbed.DesignSpec('sobol', 4)


class CorpusTests(test.SimpleTestCase):
    def test_ids(self):
        self.assertEqual(testbed.parse_dataset_id('branin-5d'),
                         (testbed.BRANIN, 10))
        self.assertEqual(testbed.parse_dataset_id('borehole-n7'),
                         (testbed.BOREHOLE, 7))

        with self.assertRaises(errors.ContractViolation):
            testbed.parse_dataset_id('branin')

        with self.assertRaises(errors.ContractViolation):
            testbed.parse_dataset_id('branin-0d')

        with self.assertRaises(errors.UnknownFunction):
            testbed.parse_dataset_id('g10mod-3d')

    def test_corpus(self):
        ids = testbed.corpus_ids()

        self.assertEqual(len(ids), 16)
        self.assertIn('welded_beam-20d', ids)
        self.assertFalse(testbed.corpus_complete())

    def test_build(self):
        data = testbed.build_dataset('welded_beam-3d', 5)

        self.assertEqual((data.n, data.d), (12, 4))
        self.assertEqual(data.name, 'welded_beam-3d')
        self.assertEqual(data.meta['seed'], 5)
        self.assertEqual(data.meta['design'], 'lhs-mdu')
        testing.assert_allclose(
            data.z, testbed.evaluate_all(testbed.WELDED_BEAM, data.X))

    def test_uniform_split(self):
        train, test_set = testbed.uniform_split(testbed.BRANIN, 8, 20, 3)

        self.assertEqual((train.n, test_set.n), (8, 20))
        self.assertEqual((train.meta['seed'], test_set.meta['seed']), (3, 4))


class CsvTests(test.SimpleTestCase):
    def test_round_trip(self):
        data = testbed.build_dataset('branin-n6', 11)

        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'branin.csv')
            testbed.write_dataset_csv(data, path)

            with open(path) as fp:
                head = [next(fp) for _ in range(6)]

            read = testbed.read_dataset_csv(path)

        self.assertEqual(head[0], '# function: branin\n')
        self.assertEqual(head[4], '# id: branin-n6\n')
        self.assertEqual(head[5], 'x_1,x_2,z\n')
        testing.assert_array_equal(read.X, data.X)
        testing.assert_array_equal(read.z, data.z)
        self.assertEqual(read.meta, data.meta)

    def test_missing_header(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'bad.csv')

            with open(path, 'w') as fp:
                fp.write('1.0,2.0\n')

            with self.assertRaises(errors.ContractViolation):
                testbed.read_dataset_csv(path)
