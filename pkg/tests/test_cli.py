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

"""Unit tests for `fusedbregman.cli`"""

import contextlib
import io
import json
import os
import tempfile
import unittest

import numpy as np
import pandas as pd

from fusedbregman.cli import EXIT_ERROR, EXIT_NOT_CONVERGED, EXIT_OK, SCHEMA_VERSION, loglog_slope, main
from fusedbregman.data import load_csv, write_csv
from fusedbregman.run_solver import PRETRIAL_GRID

RECORD_KEYS = {'schema_version', 'command', 'kind', 'n', 'p', 'rho', 'lam1', 'lam2', 'mu1', 'mu2', 'iterations',
               'wall_time', 'objective', 'rel_e', 'kkt_residual', 'gap_beta', 'gap_diff', 'nonzeros', 'intercept',
               'converged', 'fold', 'test_error'}


class TestCli(unittest.TestCase):
    """Test case for `fusedbregman.cli.main`."""

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.out = self.directory.name

    def tearDown(self):
        self.directory.cleanup()

    def run_main(self, *argv: str) -> int:
        with contextlib.redirect_stdout(io.StringIO()), contextlib.redirect_stderr(io.StringIO()):
            return main(list(argv))

    def path(self, *names: str) -> str:
        return os.path.join(self.out, *names)

    def read_record(self, name: str = 'record.jsonl') -> dict:
        with open(self.path(name), encoding='utf-8') as file:
            return json.loads(file.readline())

    def test_generate(self):
        """Test the generate command"""
        code = self.run_main('generate', '--kind', 'regression', '--n', '20', '--p', '30', '--rho', '0.5',
                             '--seed', '3', '--out', self.path('a'))
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(load_csv(self.path('a', 'X.csv')).X.shape, (20, 30))
        self.assertEqual(load_csv(self.path('a', 'y.csv')).y.shape, (20,))
        self.assertEqual(load_csv(self.path('a', 'beta_true.csv')).y.shape, (30,))
        with open(self.path('a', 'metadata.json'), encoding='utf-8') as file:
            metadata = json.load(file)
        self.assertEqual((metadata['seed'], metadata['rho'], metadata['schema_version']), (3, 0.5, SCHEMA_VERSION))

        self.run_main('generate', '--kind', 'regression', '--n', '20', '--p', '30', '--rho', '0.5', '--seed', '3',
                      '--out', self.path('b'))
        for name in ('X.csv', 'y.csv'):
            with open(self.path('a', name), 'rb') as first, open(self.path('b', name), 'rb') as second:
                self.assertEqual(first.read(), second.read())

        self.assertEqual(self.run_main('generate', '--kind', 'flsa', '--p', '600', '--out', self.path('c')), EXIT_OK)
        self.assertEqual(load_csv(self.path('c', 'signal.csv')).y.shape, (600,))
        self.assertEqual(self.run_main('generate', '--kind', 'svm', '--n', '10', '--p', '4', '--out', self.path('d')),
                         EXIT_OK)
        self.assertEqual(set(load_csv(self.path('d', 'y.csv')).y), {-1.0, 1.0})

    def test_solve(self):
        """Test the solve command"""
        self.run_main('generate', '--kind', 'flsa', '--p', '200', '--seed', '1', '--out', self.out)
        code = self.run_main('solve', '--kind', 'flsa', '--signal', self.path('signal.csv'), '--lam1', '0.1',
                             '--lam2', '0.8', '--out', self.out)
        self.assertEqual(code, EXIT_OK)
        record = self.read_record()
        self.assertEqual(set(record), RECORD_KEYS)
        self.assertEqual(record['kind'], 'flsa')
        self.assertTrue(record['converged'])
        self.assertIsNotNone(record['kkt_residual'])
        self.assertEqual(load_csv(self.path('coef.csv')).y.shape, (200,))

    def test_solve_regression(self):
        """Test the solve command on a regression problem with automatic augmentation weights"""
        X = np.random.default_rng(4).standard_normal((15, 6))
        y = X @ np.array([1.0, 1.0, 0.0, 0.0, -1.0, -1.0])
        write_csv(self.path('X.csv'), X)
        write_csv(self.path('y.csv'), y)
        code = self.run_main('solve', '--kind', 'regression', '--x', self.path('X.csv'), '--y', self.path('y.csv'),
                             '--lam1', '0.1', '--lam2', '0.1', '--mu', 'auto', '--out', self.out)
        self.assertEqual(code, EXIT_OK)
        record = self.read_record()
        scale = float(np.linalg.norm(y))
        self.assertTrue(any(abs(record['mu1'] - factor * scale) <= 1e-12 * scale for factor in PRETRIAL_GRID))

    def test_solve_not_converged(self):
        """Test the exit code of a run stopped by the iteration cap"""
        self.run_main('generate', '--kind', 'flsa', '--p', '200', '--seed', '1', '--out', self.out)
        code = self.run_main('solve', '--kind', 'flsa', '--signal', self.path('signal.csv'), '--lam1', '0.1',
                             '--lam2', '0.8', '--max-iter', '1', '--out', self.out)
        self.assertEqual(code, EXIT_NOT_CONVERGED)
        self.assertFalse(self.read_record()['converged'])

    def test_solve_errors(self):
        """Test that data errors exit with 1 and write nothing"""
        code = self.run_main('solve', '--kind', 'flsa', '--signal', self.path('missing.csv'), '--lam1', '0.1',
                             '--lam2', '0.8', '--out', self.out)
        self.assertEqual(code, EXIT_ERROR)
        self.assertFalse(os.path.exists(self.path('coef.csv')))

        with open(self.path('bad.csv'), 'w', encoding='utf-8') as file:
            file.write('1,2\n3,4\n5,6,7\n')
        code = self.run_main('solve', '--kind', 'regression', '--x', self.path('bad.csv'), '--y',
                             self.path('bad.csv'), '--lam1', '0.1', '--lam2', '0.1', '--out', self.out)
        self.assertEqual(code, EXIT_ERROR)
        self.assertFalse(os.path.exists(self.path('record.jsonl')))

    def test_usage_errors(self):
        """Test that usage errors exit with 1"""
        self.assertEqual(self.run_main('solve', '--kind', 'flsa'), EXIT_ERROR)
        self.assertEqual(self.run_main('frobnicate'), EXIT_ERROR)
        self.assertEqual(self.run_main('solve', '--kind', 'flsa', '--lam1', '1', '--lam2', '1', '--mu', '-2'),
                         EXIT_ERROR)
        self.assertEqual(self.run_main('--version'), EXIT_OK)

    def test_cv(self):
        """Test the cv command"""
        self.run_main('generate', '--kind', 'svm', '--n', '20', '--p', '3', '--separation', '4', '--out', self.out)
        code = self.run_main('cv', '--kind', 'svm', '--x', self.path('X.csv'), '--y', self.path('y.csv'),
                             '--lam1', '0.01', '--lam1', '0.1', '--lam2', '0.01', '--folds', '2', '--out', self.out)
        self.assertIn(code, (EXIT_OK, EXIT_NOT_CONVERGED))
        summary = pd.read_csv(self.path('cv_summary.csv'))
        self.assertEqual(len(summary), 2)
        self.assertTrue(all(errors.endswith('/20') for errors in summary['errors']))
        with open(self.path('cv_folds.jsonl'), encoding='utf-8') as file:
            records = [json.loads(line) for line in file]
        self.assertEqual(len(records), 4)
        self.assertEqual(sorted(record['fold'] for record in records), [0, 0, 1, 1])

        code = self.run_main('cv', '--kind', 'svm', '--x', self.path('X.csv'), '--y', self.path('y.csv'),
                             '--lam1', '0.1', '--lam2', '0.1', '--folds', '21', '--out', self.out)
        self.assertEqual(code, EXIT_ERROR)

    def test_cv_regression_on_labels(self):
        """Test that regression on labels in {-1, +1} reports misclassification counts"""
        self.run_main('generate', '--kind', 'svm', '--n', '20', '--p', '3', '--separation', '4', '--out', self.out)
        for extra in ((), ('--standardize',)):
            code = self.run_main('cv', '--kind', 'regression', '--x', self.path('X.csv'), '--y', self.path('y.csv'),
                                 '--lam1', '0.01', '--lam2', '0.01', '--folds', '4', '--out', self.out, *extra)
            self.assertIn(code, (EXIT_OK, EXIT_NOT_CONVERGED))
            summary = pd.read_csv(self.path('cv_summary.csv'))
            errors = summary['errors'][0]
            self.assertTrue(errors.endswith('/20'))
            self.assertLessEqual(int(errors.split('/')[0]), 20)

        X = np.random.default_rng(5).standard_normal((12, 3))
        write_csv(self.path('X.csv'), X)
        write_csv(self.path('y.csv'), X @ np.array([1.0, 0.5, 0.0]))
        self.run_main('cv', '--kind', 'regression', '--x', self.path('X.csv'), '--y', self.path('y.csv'),
                      '--lam1', '0.01', '--lam2', '0.01', '--folds', '3', '--out', self.out)
        self.assertNotIn('errors', pd.read_csv(self.path('cv_summary.csv')).columns)

    def test_bench(self):
        """Test the bench command"""
        code = self.run_main('bench', '--kind', 'flsa', '--p', '200', '--p', '400', '--lam1', '0.1', '--lam2', '0.8',
                             '--out', self.out)
        self.assertEqual(code, EXIT_OK)
        bench = pd.read_csv(self.path('bench.csv'))
        self.assertEqual(list(bench.columns),
                         ['method', 'n', 'p', 'rho', 'mean_time', 'mean_iters', 'runs', 'converged_runs'])
        self.assertEqual(list(bench['p']), [200, 400])
        self.assertTrue(os.path.exists(self.path('scaling.csv')))

    def test_loglog_slope(self):
        """Test `fusedbregman.cli.loglog_slope`"""
        sizes = np.array([100.0, 200.0, 400.0, 800.0])
        self.assertAlmostEqual(loglog_slope(sizes, 3.0 * sizes ** 1.5), 1.5, places=10)


if __name__ == '__main__':
    unittest.main()
