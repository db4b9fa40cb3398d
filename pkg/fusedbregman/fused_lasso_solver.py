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

"""This module provides the split Bregman solvers with a least-squares loss: the general fused Lasso and the fused
Lasso signal approximator."""

import logging

import numpy as np
import scipy.linalg

from fusedbregman.abstract_solver import AbstractSolver
from fusedbregman.enums import BetaSolver, ProblemKind
from fusedbregman.linalg import LinOp, NotPositiveDefiniteException, PcgBreakdownException, apply_LtL, \
    build_preconditioner, pcg, tridiag_cholesky, tridiag_solve
from fusedbregman.problem import FusedProblem, SolverConfig, SolverState, objective_fused

_logger = logging.getLogger('fusedbregman.fused_lasso_solver')


def dense_cho_factor(matrix: np.ndarray):
    """Factors a small dense symmetric positive definite matrix with `scipy.linalg.cho_factor`.

    Raises:
        fusedbregman.linalg.NotPositiveDefiniteException: The matrix is not positive definite
    """
    try:
        return scipy.linalg.cho_factor(matrix, lower=True, check_finite=False)
    except np.linalg.LinAlgError as ex:
        raise NotPositiveDefiniteException(f'Matrix is not positive definite ({ex})') from ex


def run_pcg(operator: LinOp, rhs: np.ndarray, x0: np.ndarray, config: SolverConfig):
    """Runs `fusedbregman.linalg.pcg` warm started from `x0`. A breakdown keeps the partial iterate."""
    try:
        return pcg(operator, rhs, x0=x0, tol=config.pcg_tol, max_iter=config.pcg_max)
    except PcgBreakdownException as ex:
        _logger.warning('beta step: %s, continuing with the partial iterate', ex)
        return ex.x, ex.iterations


class FusedLassoSolver(AbstractSolver):
    """Solves the fused Lasso with a general design matrix.

    The beta step solves

    ```
    (X^T X + mu1 I + mu2 L^T L) beta = X^T y + mu1 a - u + L^T (mu2 b - v)
    ```

    by PCG with preconditioner `mu1 I + mu2 L^T L`, whose tridiagonal Cholesky factor is computed once. Since the
    operator is the preconditioner plus a term of rank at most `n`, PCG needs at most `n + 1` iterations. With
    `fusedbregman.enums.BetaSolver.DIRECT` the whole matrix is factored once instead.
    """

    kind = ProblemKind.REGRESSION

    def __init__(self, problem: FusedProblem, config: SolverConfig):
        super().__init__(problem, config)
        X, L = problem.X, problem.L
        self._xty = X.T @ problem.y
        self._direct = None
        if config.beta_solver is BetaSolver.DIRECT:
            self._direct = dense_cho_factor(X.T @ X + config.mu1 * np.eye(problem.p) + config.mu2 * L.lt_l_dense())
            return
        factor = tridiag_cholesky(build_preconditioner(L, config.mu1, config.mu2))
        self._operator = LinOp(
            problem.p,
            lambda x: X.T @ (X @ x) + config.mu1 * x + config.mu2 * apply_LtL(L, x),
            lambda r: tridiag_solve(factor, r))

    def beta_step(self, state: SolverState) -> int:
        rhs = self._xty + self.penalty_rhs(state)
        if self._direct is not None:
            state.beta = scipy.linalg.cho_solve(self._direct, rhs, check_finite=False)
            return 0
        state.beta, iterations = run_pcg(self._operator, rhs, state.beta, self.config)
        return iterations

    def objective(self, beta: np.ndarray, beta0: float) -> float:
        return objective_fused(self.problem, beta)


class FlsaSolver(AbstractSolver):
    """Solves the fused Lasso signal approximator (`X = I`).

    The beta step matrix `(mu1 + 1) I + mu2 L^T L` is tridiagonal for the chain operator, so every iteration costs a
    single `O(p)` solve with a factor computed once. A general operator falls back to PCG with a Jacobi
    preconditioner, or to a dense factor with `fusedbregman.enums.BetaSolver.DIRECT`.
    """

    kind = ProblemKind.FLSA

    def __init__(self, problem: FusedProblem, config: SolverConfig):
        super().__init__(problem, config)
        L = problem.L
        self._factor = None
        self._direct = None
        if L.is_chain:
            self._factor = tridiag_cholesky(build_preconditioner(L, config.mu1 + 1.0, config.mu2))
        elif config.beta_solver is BetaSolver.DIRECT:
            self._direct = dense_cho_factor((config.mu1 + 1.0) * np.eye(problem.p) + config.mu2 * L.lt_l_dense())
        else:
            jacobi = tridiag_cholesky(build_preconditioner(L, config.mu1 + 1.0, config.mu2))
            self._operator = LinOp(
                problem.p,
                lambda x: (config.mu1 + 1.0) * x + config.mu2 * apply_LtL(L, x),
                lambda r: tridiag_solve(jacobi, r))

    def beta_step(self, state: SolverState) -> int:
        rhs = self.problem.y + self.penalty_rhs(state)
        if self._factor is not None:
            state.beta = tridiag_solve(self._factor, rhs)
            return 0
        if self._direct is not None:
            state.beta = scipy.linalg.cho_solve(self._direct, rhs, check_finite=False)
            return 0
        state.beta, iterations = run_pcg(self._operator, rhs, state.beta, self.config)
        return iterations

    def objective(self, beta: np.ndarray, beta0: float) -> float:
        return objective_fused(self.problem, beta)
