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

"""This module is an abstraction of a split Bregman solver. Every concrete solver should inherit from this class."""

import logging
from abc import ABC, abstractmethod
from typing import Tuple

import numpy as np

from fusedbregman.enums import ProblemKind
from fusedbregman.linalg import apply_L, apply_Lt
from fusedbregman.problem import FusedProblem, InvalidProblemException, Solution, SolverConfig, SolverState
from fusedbregman.prox import soft_threshold

_logger = logging.getLogger('fusedbregman.abstract_solver')


def _inf_norm(x: np.ndarray) -> float:
    return float(np.max(np.abs(x), initial=0.0))


class AbstractSolver(ABC):
    """Alternates one exact minimization over `beta` with closed-form updates of the splitting variables and a dual
    ascent step:

    ```
    beta <- argmin of the augmented Lagrangian        (beta_step)
    a    <- T_{lam1/mu1}(beta + u / mu1)
    b    <- T_{lam2/mu2}(L beta + v / mu2)
    u    <- u + delta1 (beta - a)
    v    <- v + delta2 (L beta - b)
    ```

    Subclasses provide the beta step and the objective, and may add further splitting variables through
    `constraint_step`.

    Attributes:
        problem: The `fusedbregman.problem.FusedProblem` this solver works on. It is never modified.
        config: The `fusedbregman.problem.SolverConfig`.
    """

    kind: ProblemKind
    """The `fusedbregman.enums.ProblemKind` this solver accepts."""

    def __init__(self, problem: FusedProblem, config: SolverConfig):
        if problem.kind is not self.kind:
            raise InvalidProblemException(f'{type(self).__name__} solves {self.kind.value} problems, '
                                          f'got {problem.kind.value}')
        self.problem = problem
        self.config = config

    def initial_state(self) -> SolverState:
        """Returns the all-zero starting point."""
        p, m = self.problem.p, self.problem.L.m
        return SolverState(beta=np.zeros(p), a=np.zeros(p), b=np.zeros(m), u=np.zeros(p), v=np.zeros(m))

    def penalty_rhs(self, state: SolverState) -> np.ndarray:
        """Computes `mu1 a - u + L^T (mu2 b - v)`, the part of the beta step right hand side that stems from the
        splitting of the two penalties."""
        config = self.config
        return config.mu1 * state.a - state.u + apply_Lt(self.problem.L, config.mu2 * state.b - state.v)

    @abstractmethod
    def beta_step(self, state: SolverState) -> int:
        """Minimizes the augmented Lagrangian over `beta` (and `beta0`) in place.

        Args:
            state: The current `fusedbregman.problem.SolverState`

        Returns:
            The number of inner PCG iterations, zero for direct solves.
        """

    @abstractmethod
    def objective(self, beta: np.ndarray, beta0: float) -> float:
        """Evaluates the objective of `problem` at the given coefficients."""

    def constraint_step(self, state: SolverState) -> Tuple[float, float]:
        """Hook for solvers with further splitting variables and their duals. Called once `beta`, `a`, `b`, `u` and
        `v` are updated.

        Returns:
            The largest violation of the further constraints and their contribution to the dual residual.
        """
        return 0.0, 0.0

    def step(self, state: SolverState) -> None:
        """Performs one outer iteration and appends the objective at the new `beta` to `state.obj_history`.

        A non-finite iterate marks `state.diverged` and leaves the history untouched.
        """
        config, problem = self.config, self.problem
        state.pcg_iters.append(self.beta_step(state))
        l_beta = apply_L(problem.L, state.beta)
        a_prev, b_prev = state.a, state.b
        state.a = soft_threshold(state.beta + state.u / config.mu1, problem.lam1 / config.mu1)
        state.b = soft_threshold(l_beta + state.v / config.mu2, problem.lam2 / config.mu2)
        state.u = state.u + config.delta1 * (state.beta - state.a)
        state.v = state.v + config.delta2 * (l_beta - state.b)
        extra_primal, extra_dual = self.constraint_step(state)
        state.k += 1

        state.primal_residual = max(_inf_norm(state.beta - state.a), _inf_norm(l_beta - state.b), extra_primal)
        state.dual_residual = max(config.mu1 * _inf_norm(state.a - a_prev),
                                  config.mu2 * _inf_norm(apply_Lt(problem.L, state.b - b_prev)), extra_dual)
        if not state.is_finite():
            _logger.error('non-finite iterate in iteration %d', state.k)
            state.diverged = True
            return
        obj = self.objective(state.beta, state.beta0)
        if not np.isfinite(obj):
            _logger.error('non-finite objective in iteration %d', state.k)
            state.diverged = True
            return
        state.obj_history.append(obj)

    def residuals_small(self, state: SolverState) -> bool:
        """Whether the primal residual is within `gap_tol * (1 + |a|_inf)` and the dual residual within
        `gap_tol * (1 + max(|u|_inf, |v|_inf))`."""
        tol = self.config.gap_tol
        if state.primal_residual > tol * (1.0 + _inf_norm(state.a)):
            return False
        return state.dual_residual <= tol * (1.0 + max(_inf_norm(state.u), _inf_norm(state.v)))

    def constraint_gap(self, state: SolverState) -> Tuple[float, float]:
        """Returns `(|beta - a|_inf, |L beta - b|_inf)`."""
        return _inf_norm(state.beta - state.a), _inf_norm(apply_L(self.problem.L, state.beta) - state.b)

    def solution(self, state: SolverState, rel_e: float) -> Solution:
        """Packs the final iterate into a `fusedbregman.problem.Solution`. The coefficients are taken from `a`."""
        coef = state.a.copy()
        return Solution(coef=coef, intercept=float(state.beta0), objective=self.objective(coef, state.beta0),
                        iterations=state.k, rel_e=rel_e, converged=state.converged,
                        constraint_gap=self.constraint_gap(state), pcg_iters=list(state.pcg_iters),
                        mu1=self.config.mu1, mu2=self.config.mu2, obj_history=list(state.obj_history))
