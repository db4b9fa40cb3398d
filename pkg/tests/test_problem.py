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

"""Unit tests for `fusedbregman.problem`"""

import dataclasses
import unittest

import numpy as np

from fusedbregman.enums import ProblemKind
from fusedbregman.linalg import DiffOperator, DimensionMismatchException
from fusedbregman.problem import FusedProblem, InvalidConfigException, InvalidProblemException, SolverConfig, \
    objective_flsvm, objective_fused


class TestFusedProblem(unittest.TestCase):
    """Test case for `fusedbregman.problem.FusedProblem`."""

    def test_constructors(self):
        """Test `fusedbregman.problem.FusedProblem.regression`, `flsa` and `svm`"""
        problem = FusedProblem.regression(np.ones((3, 2)), [1.0, 2.0, 3.0], 0.5, 0.25)
        self.assertIs(problem.kind, ProblemKind.REGRESSION)
        self.assertEqual((problem.n, problem.p, problem.L.m), (3, 2, 1))
        problem = FusedProblem.flsa([1.0, 2.0, 3.0, 4.0], 1.0, 1.0)
        self.assertIsNone(problem.X)
        self.assertEqual(problem.p, 4)
        problem = FusedProblem.svm(np.ones((2, 3)), [1.0, -1.0], 1.0, 1.0)
        self.assertIs(problem.kind, ProblemKind.SVM)

    def test_invariants(self):
        """Test the validation of `fusedbregman.problem.FusedProblem`"""
        X = np.ones((3, 2))
        self.assertRaises(InvalidProblemException, lambda: FusedProblem.regression(X, np.ones(3), 0.0, 1.0))
        self.assertRaises(InvalidProblemException, lambda: FusedProblem.regression(X, np.ones(3), 1.0, -1.0))
        self.assertRaises(InvalidProblemException, lambda: FusedProblem.regression(X, np.ones(4), 1.0, 1.0))
        self.assertRaises(InvalidProblemException, lambda: FusedProblem.svm(X, [1.0, 0.5, -1.0], 1.0, 1.0))
        self.assertRaises(InvalidProblemException,
                          lambda: FusedProblem(X, np.ones(3), 1.0, 1.0, DiffOperator.chain(2), ProblemKind.FLSA))
        self.assertRaises(InvalidProblemException,
                          lambda: FusedProblem.regression(X, np.ones(3), 1.0, 1.0, DiffOperator.chain(3)))
        self.assertRaises(InvalidProblemException,
                          lambda: FusedProblem.regression(X, [1.0, np.nan, 0.0], 1.0, 1.0))

    def test_immutable(self):
        """Test that the arrays of `fusedbregman.problem.FusedProblem` are read-only copies"""
        y = np.array([1.0, 2.0])
        problem = FusedProblem.flsa(y, 1.0, 1.0)
        y[0] = 5.0
        self.assertEqual(problem.y[0], 1.0)

        def assign():
            problem.y[0] = 3.0

        self.assertRaises(ValueError, assign)
        self.assertRaises(dataclasses.FrozenInstanceError, lambda: setattr(problem, 'lam1', 2.0))


class TestObjectives(unittest.TestCase):
    """Test case for `fusedbregman.problem.objective_fused` and `fusedbregman.problem.objective_flsvm`."""

    def test_objective_fused(self):
        """Test `fusedbregman.problem.objective_fused`"""
        problem = FusedProblem.flsa([1.0, 0.0], 1.0, 1.0)
        self.assertEqual(objective_fused(problem, [1.0, 0.0]), 2.0)
        self.assertEqual(objective_fused(problem, [0.0, 0.0]), 0.5)
        self.assertRaises(DimensionMismatchException, lambda: objective_fused(problem, [1.0, 0.0, 0.0]))

        rng = np.random.default_rng(17)
        X, y, beta = rng.standard_normal((7, 5)), rng.standard_normal(7), rng.standard_normal(5)
        problem = FusedProblem.regression(X, y, 0.3, 1.7)
        expected = 0.0
        for i in range(7):
            expected += 0.5 * (sum(X[i, j] * beta[j] for j in range(5)) - y[i]) ** 2
        expected += 0.3 * sum(abs(b) for b in beta)
        expected += 1.7 * sum(abs(beta[j + 1] - beta[j]) for j in range(4))
        self.assertAlmostEqual(objective_fused(problem, beta), expected, delta=1e-12 * (1.0 + expected))

    def test_objective_flsvm(self):
        """Test `fusedbregman.problem.objective_flsvm`"""
        rng = np.random.default_rng(23)
        X = rng.standard_normal((6, 3))
        y = np.array([1.0, -1.0, 1.0, 1.0, -1.0, -1.0])
        problem = FusedProblem.svm(X, y, 0.2, 0.1)
        self.assertEqual(objective_flsvm(problem, np.zeros(3), 0.0), 1.0)

        separated = FusedProblem.svm([[2.0], [-2.0]], [1.0, -1.0], 0.01, 0.01)
        self.assertAlmostEqual(objective_flsvm(separated, [1.0], 0.0), 0.01, places=15)

        beta, beta0 = rng.standard_normal(3), 0.3
        expected = sum(max(0.0, 1.0 - y[i] * (sum(X[i, j] * beta[j] for j in range(3)) + beta0)) for i in range(6)) / 6
        expected += 0.2 * sum(abs(b) for b in beta) + 0.1 * (abs(beta[1] - beta[0]) + abs(beta[2] - beta[1]))
        self.assertAlmostEqual(objective_flsvm(problem, beta, beta0), expected, delta=1e-12 * (1.0 + expected))


class TestSolverConfig(unittest.TestCase):
    """Test case for `fusedbregman.problem.SolverConfig`."""

    def test_defaults(self):
        """Test the defaults of `fusedbregman.problem.SolverConfig`"""
        config = SolverConfig(mu1=2.0, mu2=3.0)
        self.assertEqual((config.delta1, config.delta2, config.delta3), (2.0, 3.0, 1.0))
        self.assertEqual(config.rel_tol, 1e-5)
        self.assertEqual(config.max_iter, 50000)
        self.assertIsNone(config.pcg_max)
        self.assertFalse(config.mu_auto)
        self.assertEqual(config.gap_tol, 1e-4)

    def test_pretrial_default(self):
        """Test that missing augmentation weights are left to the pretrial"""
        self.assertTrue(SolverConfig().mu_auto)
        self.assertTrue(SolverConfig(mu1=2.0).mu_auto)
        self.assertTrue(SolverConfig(mu1=2.0, mu2=2.0, mu_auto=True).mu_auto)
        config = SolverConfig(mu_auto=False)
        self.assertFalse(config.mu_auto)
        self.assertEqual((config.mu1, config.mu2, config.delta1, config.delta2), (1.0, 1.0, 1.0, 1.0))

    def test_validation(self):
        """Test the validation of `fusedbregman.problem.SolverConfig`"""
        self.assertRaises(InvalidConfigException, lambda: SolverConfig(mu1=1.0, delta1=1.5))
        self.assertRaises(InvalidConfigException, lambda: SolverConfig(mu2=1.0, delta2=0.0))
        self.assertRaises(InvalidConfigException, lambda: SolverConfig(mu3=1.0, delta3=2.0))
        self.assertRaises(InvalidConfigException, lambda: SolverConfig(mu1=0.0))
        self.assertRaises(InvalidConfigException, lambda: SolverConfig(max_iter=0))
        self.assertRaises(InvalidConfigException, lambda: SolverConfig(pcg_tol=0.0))
        self.assertRaises(InvalidConfigException, lambda: SolverConfig(gap_tol=-1e-4))
        SolverConfig(mu1=1.0, delta1=0.5)

    def test_with_mu(self):
        """Test `fusedbregman.problem.SolverConfig.with_mu`"""
        config = SolverConfig(mu1=1.0, mu2=1.0, delta1=0.5, rel_tol=1e-7, mu_auto=True).with_mu(4.0, 5.0)
        self.assertEqual((config.mu1, config.mu2, config.delta1, config.delta2), (4.0, 5.0, 4.0, 5.0))
        self.assertEqual(config.rel_tol, 1e-7)
        self.assertFalse(config.mu_auto)


if __name__ == '__main__':
    unittest.main()
