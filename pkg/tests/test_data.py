# -*- coding: utf-8 -*-

# Copyright 2026 The fusedbregman authors
#
# Permission is hereby granted, free of charge, to any person obtaining a copy of this software and associated
# documentation files (the "Software"), to deal in the Software without restriction, including without limitation the
# rights to use, copy, modify, merge, publish, distribute, sublicense, and/or sell copies of the Software,
# and to permit persons to whom the Software is furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included in all copies or substantial portions of
# the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR IMPLIED, INCLUDING BUT NOT LIMITED TO
# THE WARRANTIES OF MERCHANTABILITY, FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER LIABILITY, WHETHER IN AN ACTION OF CONTRACT,
# TORT OR OTHERWISE, ARISING FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
# SOFTWARE.

"""Unit tests for `fusedbregman.data`"""

import os
import tempfile
import unittest

import numpy as np

from fusedbregman.data import DataFormatException, Dataset, default_beta, gen_equicorrelated, gen_flsa_signal, \
    gen_regression, gen_two_class, kfold, load_csv, perceptron_separable, standardize, write_csv
from fusedbregman.linalg import DimensionMismatchException


def off_diagonal_correlations(X: np.ndarray) -> np.ndarray:
    corr = np.corrcoef(X, rowvar=False)
    return corr[~np.eye(corr.shape[0], dtype=bool)]


class TestGenerators(unittest.TestCase):
    """Test case for the synthetic data generators in `fusedbregman.data`."""

    def test_gen_equicorrelated(self):
        """Test `fusedbregman.data.gen_equicorrelated`"""
        ds = gen_equicorrelated(400, 5, 0.0, 1)
        self.assertEqual(ds.X.shape, (400, 5))
        self.assertIsNone(ds.y)
        self.assertTrue(ds.standardized)
        np.testing.assert_allclose(ds.X.mean(axis=0), np.zeros(5), atol=1e-12)
        np.testing.assert_allclose(ds.X.std(axis=0), np.ones(5), atol=1e-12)
        self.assertLess(np.max(np.abs(off_diagonal_correlations(ds.X))), 5.0 / np.sqrt(400))
        np.testing.assert_array_equal(ds.X, gen_equicorrelated(400, 5, 0.0, 1).X)
        self.assertFalse(np.array_equal(ds.X, gen_equicorrelated(400, 5, 0.0, 2).X))

        correlated = gen_equicorrelated(2000, 10, 0.8, 3)
        self.assertAlmostEqual(float(np.mean(off_diagonal_correlations(correlated.X))), 0.8, delta=0.05)

        self.assertRaises(ValueError, lambda: gen_equicorrelated(10, 3, 1.0, 0))
        self.assertRaises(ValueError, lambda: gen_equicorrelated(10, 3, -0.1, 0))
        self.assertRaises(ValueError, lambda: gen_equicorrelated(0, 3, 0.0, 0))

    def test_default_beta(self):
        """Test `fusedbregman.data.default_beta`"""
        beta = default_beta(500)
        self.assertEqual(beta[40], 3.0)
        self.assertEqual(beta[72], 1.0)
        self.assertEqual(beta[125], 0.0)
        self.assertEqual(beta[0], 2.0)
        self.assertEqual(beta[124], 2.0)
        self.assertEqual(np.count_nonzero(beta), 41)
        self.assertRaises(ValueError, lambda: default_beta(124))

    def test_gen_regression(self):
        """Test `fusedbregman.data.gen_regression`"""
        X = gen_equicorrelated(50, 125, 0.0, 4).X
        beta = default_beta(125)
        np.testing.assert_array_equal(gen_regression(X, beta, 0.0, 4), X @ beta)

        X = np.random.default_rng(5).standard_normal((20000, 2))
        noise = gen_regression(X, [1.0, -1.0], 2.0, 6) - X @ np.array([1.0, -1.0])
        self.assertAlmostEqual(float(np.var(noise)), 2.0, delta=0.2)
        np.testing.assert_array_equal(gen_regression(X, [1.0, -1.0], 2.0, 6), gen_regression(X, [1.0, -1.0], 2.0, 6))

        self.assertRaises(DimensionMismatchException, lambda: gen_regression(X, [1.0], 1.0, 0))
        self.assertRaises(ValueError, lambda: gen_regression(X, [1.0, -1.0], -1.0, 0))

    def test_gen_flsa_signal(self):
        """Test `fusedbregman.data.gen_flsa_signal`"""
        np.testing.assert_array_equal(gen_flsa_signal(1200, 0.0), np.tile(default_beta(500), 3)[:1200])
        noisy = gen_flsa_signal(1000, 0.5, 7)
        self.assertEqual(noisy.shape, (1000,))
        np.testing.assert_array_equal(noisy, gen_flsa_signal(1000, 0.5, 7))
        self.assertRaises(ValueError, lambda: gen_flsa_signal(100, 0.5, 0))

    def test_gen_two_class(self):
        """Test `fusedbregman.data.gen_two_class`"""
        ds = gen_two_class(40, 5, 10.0, 8)
        self.assertEqual(ds.X.shape, (40, 5))
        self.assertEqual(set(ds.y), {-1.0, 1.0})
        self.assertEqual(float(np.sum(ds.y)), 0.0)
        self.assertTrue(perceptron_separable(ds.X, ds.y))
        self.assertRaises(ValueError, lambda: gen_two_class(7, 3, 1.0, 0))

    def test_perceptron_separable(self):
        """Test `fusedbregman.data.perceptron_separable` on labels no hyperplane separates"""
        self.assertFalse(perceptron_separable([[0.0], [1.0], [2.0]], [1.0, -1.0, 1.0], max_epochs=50))
        self.assertTrue(perceptron_separable([[0.0], [1.0], [2.0]], [-1.0, -1.0, 1.0]))


class TestCsv(unittest.TestCase):
    """Test case for `fusedbregman.data.load_csv` and `fusedbregman.data.write_csv`."""

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.directory.cleanup()

    def write(self, text: str) -> str:
        path = os.path.join(self.directory.name, 'data.csv')
        with open(path, 'w', encoding='utf-8') as file:
            file.write(text)
        return path

    def test_load_csv(self):
        """Test `fusedbregman.data.load_csv`"""
        path = self.write('1,2\n3,4\n5,6\n')
        ds = load_csv(path)
        np.testing.assert_array_equal(ds.X, [[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]])
        self.assertIsNone(ds.y)
        ds = load_csv(path, response_column=1)
        np.testing.assert_array_equal(ds.X, [[1.0], [3.0], [5.0]])
        np.testing.assert_array_equal(ds.y, [2.0, 4.0, 6.0])

        ds = load_csv(self.write('0.5\n-1.5\n2e3\n'))
        self.assertIsNone(ds.X)
        np.testing.assert_array_equal(ds.y, [0.5, -1.5, 2000.0])

    def test_header(self):
        """Test `fusedbregman.data.load_csv` with a header line"""
        ds = load_csv(self.write('a,b,target\n1,2,3\n4,5,6\n'), has_header=True, response_column='target')
        self.assertEqual(ds.feature_names, ('a', 'b'))
        np.testing.assert_array_equal(ds.y, [3.0, 6.0])
        path = self.write('a,b\n1,2\n')
        self.assertRaises(DataFormatException, lambda: load_csv(path, has_header=True, response_column='c'))
        self.assertRaises(DataFormatException, lambda: load_csv(path, has_header=True, response_column=5))

    def test_malformed(self):
        """Test the error reports of `fusedbregman.data.load_csv`"""
        with self.assertRaises(DataFormatException) as context:
            load_csv(self.write('1,2\n3,4\n5,6,7\n'))
        self.assertEqual(context.exception.line, 3)

        with self.assertRaises(DataFormatException) as context:
            load_csv(self.write('1,2\n3\n5,6\n'))
        self.assertEqual(context.exception.line, 2)

        with self.assertRaises(DataFormatException) as context:
            load_csv(self.write('1,2\n3,abc\n'))
        self.assertEqual(context.exception.line, 2)
        self.assertEqual(context.exception.column, 1)

        with self.assertRaises(DataFormatException) as context:
            load_csv(self.write('x,y\n1,2\nfoo,4\n'), has_header=True)
        self.assertEqual(context.exception.line, 3)
        self.assertEqual(context.exception.column, 'x')

        self.assertRaises(DataFormatException, lambda: load_csv(self.write('')))
        self.assertRaises(OSError, lambda: load_csv(os.path.join(self.directory.name, 'missing.csv')))

    def test_write_csv(self):
        """Test that `fusedbregman.data.write_csv` preserves every bit"""
        values = np.random.default_rng(9).standard_normal((5, 3)) * 1e5
        path = os.path.join(self.directory.name, 'out.csv')
        write_csv(path, values)
        np.testing.assert_array_equal(load_csv(path).X, values)
        write_csv(path, values[:, 0])
        np.testing.assert_array_equal(load_csv(path).y, values[:, 0])
        write_csv(path, values, header=['u', 'v', 'w'])
        self.assertEqual(load_csv(path, has_header=True).feature_names, ('u', 'v', 'w'))


class TestDataset(unittest.TestCase):
    """Test case for `fusedbregman.data.Dataset` and `fusedbregman.data.standardize`."""

    def setUp(self):
        rng = np.random.default_rng(10)
        self.X = rng.normal(3.0, 2.0, (30, 4))
        self.y = rng.normal(-1.0, 5.0, 30)

    def test_dataset(self):
        """Test `fusedbregman.data.Dataset`"""
        ds = Dataset(self.X, self.y)
        self.assertEqual(ds.n, 30)
        self.assertFalse(ds.X.flags.writeable)
        self.assertEqual(ds.subset(np.arange(5)).n, 5)
        self.assertRaises(DimensionMismatchException, lambda: Dataset(self.X, self.y[:10]))

    def test_standardize(self):
        """Test `fusedbregman.data.standardize`"""
        ds = standardize(Dataset(self.X, self.y))
        np.testing.assert_allclose(ds.X.mean(axis=0), np.zeros(4), atol=1e-12)
        np.testing.assert_allclose(ds.X.std(axis=0), np.ones(4), atol=1e-12)
        self.assertAlmostEqual(float(ds.y.mean()), 0.0, places=12)
        again = standardize(ds)
        np.testing.assert_allclose(again.X, ds.X, atol=1e-12)
        X_out, y_out = ds.transform.apply(self.X, self.y)
        np.testing.assert_allclose(X_out, ds.X, atol=1e-12)
        np.testing.assert_allclose(y_out, ds.y, atol=1e-12)

        labels = standardize(Dataset(self.X, self.y), include_y=False)
        np.testing.assert_array_equal(labels.y, self.y)

    def test_zero_variance(self):
        """Test that constant columns are zeroed and reported"""
        X = self.X.copy()
        X[:, 1] = 5.0
        with self.assertLogs('fusedbregman.data', level='WARNING'):
            ds = standardize(Dataset(X, self.y))
        self.assertEqual(ds.zero_variance_columns, (1,))
        np.testing.assert_array_equal(ds.X[:, 1], np.zeros(30))


class TestKfold(unittest.TestCase):
    """Test case for `fusedbregman.data.kfold`."""

    def test_kfold(self):
        """Test `fusedbregman.data.kfold`"""
        np.testing.assert_array_equal(kfold(10, 10, 0).sizes(), np.ones(10))
        plan = kfold(216, 10, 1)
        self.assertEqual(set(plan.sizes()), {21, 22})
        self.assertEqual(int(plan.sizes().sum()), 216)
        np.testing.assert_array_equal(plan.assignments, kfold(216, 10, 1).assignments)
        self.assertRaises(ValueError, lambda: kfold(5, 6, 0))
        self.assertRaises(ValueError, lambda: kfold(5, 1, 0))

    def test_split(self):
        """Test `fusedbregman.data.FoldPlan.split`"""
        plan = kfold(23, 4, 2)
        seen = []
        for fold in range(4):
            train, test = plan.split(fold)
            self.assertEqual(len(np.intersect1d(train, test)), 0)
            self.assertEqual(len(train) + len(test), 23)
            seen.extend(test)
        self.assertEqual(sorted(seen), list(range(23)))
        self.assertRaises(ValueError, lambda: plan.split(4))


if __name__ == '__main__':
    unittest.main()
