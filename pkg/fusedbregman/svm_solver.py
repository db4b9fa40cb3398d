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

"""This module provides the split Bregman solver for the fused Lasso support vector machine."""

from typing import Tuple

import numpy as np
import scipy.linalg

from fusedbregman.abstract_solver import AbstractSolver
from fusedbregman.enums import BetaSolver, ProblemKind
from fusedbregman.fused_lasso_solver import dense_cho_factor, run_pcg
from fusedbregman.linalg import LinOp, apply_LtL, build_preconditioner, tridiag_cholesky, tridiag_solve
from fusedbregman.problem import FusedProblem, SolverConfig, SolverState, objective_flsvm
from fusedbregman.prox import hinge_shrink


class FlsvmSolver(AbstractSolver):
    """Solves the fused Lasso SVM

    ```
    min 1/n sum (c_i)_+ + lam1 |a|_1 + lam2 |b|_1   s.t.   a = beta, b = L beta, c = 1 - Y X beta - beta0 y
    ```

    With `M = [Y X, y]` and `z = (beta, beta0)`, the beta step solves the `(p + 1)`-dimensional system

    ```
    (diag(mu1 I + mu2 L^T L, 0) + mu3 M^T M) z = (mu1 a - u + L^T (mu2 b - v), 0) + M^T (mu3 (1 - c) + w)
    ```

    by PCG, preconditioned with the tridiagonal factor of `mu1 I + mu2 L^T L` and the scalar `mu3 y^T y = mu3 n`.
    The hinge variable is updated by `c <- S_{1/(n mu3)}(1 - M z + w / mu3)` and its dual by
    `w <- w + delta3 (1 - M z - c)`. The hinge gap `|1 - M z - c|_inf` counts towards the primal residual.
    """

    kind = ProblemKind.SVM

    def __init__(self, problem: FusedProblem, config: SolverConfig):
        super().__init__(problem, config)
        X, y, L = problem.X, problem.y, problem.L
        self._yx = y[:, np.newaxis] * X
        mu1, mu2, mu3 = config.mu1, config.mu2, config.mu3
        p = problem.p
        self._direct = None
        if config.beta_solver is BetaSolver.DIRECT:
            M = np.hstack([self._yx, y[:, np.newaxis]])
            block = mu3 * (M.T @ M)
            block[:p, :p] += mu1 * np.eye(p) + mu2 * L.lt_l_dense()
            self._direct = dense_cho_factor(block)
            return
        factor = tridiag_cholesky(build_preconditioner(L, mu1, mu2))
        tail = mu3 * problem.n

        def matvec(z: np.ndarray) -> np.ndarray:
            out = mu3 * self._rmatvec(self._matvec(z))
            out[:p] += mu1 * z[:p] + mu2 * apply_LtL(L, z[:p])
            return out

        def psolve(r: np.ndarray) -> np.ndarray:
            return np.append(tridiag_solve(factor, r[:p]), r[p] / tail)

        self._operator = LinOp(p + 1, matvec, psolve)

    def _matvec(self, z: np.ndarray) -> np.ndarray:
        """Computes `M z = Y X beta + beta0 y`."""
        return self._yx @ z[:-1] + z[-1] * self.problem.y

    def _rmatvec(self, r: np.ndarray) -> np.ndarray:
        """Computes `M^T r = (X^T Y r, y^T r)`."""
        return np.append(self._yx.T @ r, self.problem.y @ r)

    def initial_state(self) -> SolverState:
        state = super().initial_state()
        state.c = np.ones(self.problem.n)
        state.w = np.zeros(self.problem.n)
        return state

    def beta_step(self, state: SolverState) -> int:
        config = self.config
        rhs = self._rmatvec(config.mu3 * (1.0 - state.c) + state.w)
        rhs[:-1] += self.penalty_rhs(state)
        if self._direct is not None:
            z = scipy.linalg.cho_solve(self._direct, rhs, check_finite=False)
            iterations = 0
        else:
            z, iterations = run_pcg(self._operator, rhs, np.append(state.beta, state.beta0), config)
        state.beta, state.beta0 = z[:-1].copy(), float(z[-1])
        return iterations

    def constraint_step(self, state: SolverState) -> Tuple[float, float]:
        config = self.config
        margins = 1.0 - self._matvec(np.append(state.beta, state.beta0))
        c_prev = state.c
        state.c = hinge_shrink(margins + state.w / config.mu3, 1.0 / (self.problem.n * config.mu3))
        state.w = state.w + config.delta3 * (margins - state.c)
        hinge_gap = float(np.max(np.abs(margins - state.c)))
        return hinge_gap, config.mu3 * float(np.max(np.abs(self._rmatvec(state.c - c_prev))))

    def objective(self, beta: np.ndarray, beta0: float) -> float:
        return objective_flsvm(self.problem, beta, beta0)
