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

"""This module runs a `fusedbregman.abstract_solver.AbstractSolver` until the relative change of the objective is
small enough, and chooses the augmentation weights by a short pretrial."""

import dataclasses
import logging
from typing import Dict, Generator, List, Optional, Tuple, Type

import numpy as np

from fusedbregman.abstract_solver import AbstractSolver
from fusedbregman.enums import ProblemKind
from fusedbregman.fused_lasso_solver import FlsaSolver, FusedLassoSolver
from fusedbregman.problem import FusedProblem, InvalidProblemException, Solution, SolverConfig, SolverState
from fusedbregman.svm_solver import FlsvmSolver

_logger = logging.getLogger('fusedbregman.run_solver')

SOLVERS: Dict[ProblemKind, Type[AbstractSolver]] = {
    ProblemKind.REGRESSION: FusedLassoSolver,
    ProblemKind.FLSA: FlsaSolver,
    ProblemKind.SVM: FlsvmSolver,
}
"""The solver class for every `fusedbregman.enums.ProblemKind`."""

PRETRIAL_GRID: Tuple[float, ...] = (0.2, 0.4, 0.6, 0.8, 1.0)
"""Candidate augmentation weights of the pretrial, as multiples of `|y|_2`."""


def rel_e(obj_prev: float, obj_curr: float) -> float:
    """Computes the relative energy change `|obj_curr - obj_prev| / obj_prev`.

    A zero previous objective yields 0 if the current one is zero as well, and otherwise uses machine epsilon as the
    denominator.
    """
    if obj_prev == 0.0:
        return 0.0 if obj_curr == 0.0 else abs(obj_curr) / np.finfo(np.float64).eps
    return abs(obj_curr - obj_prev) / abs(obj_prev)


def stop_rel_e(obj_prev: float, obj_curr: float, rel_tol: float) -> bool:
    """Decides whether the iteration should stop, i.e. whether `fusedbregman.run_solver.rel_e` is at most `rel_tol`.

    Example:
        ```python
        stop_rel_e(100.0, 100.0005, 1e-5)
        # True
        ```
    """
    return rel_e(obj_prev, obj_curr) <= rel_tol


def _last_rel_e(history: List[float]) -> float:
    return rel_e(history[-2], history[-1]) if len(history) >= 2 else float('inf')


def iterate(solver: AbstractSolver, state: Optional[SolverState] = None) -> Generator[SolverState, None, None]:
    """Runs a solver and logs the progress every `log_every` iterations.

    The loop ends when `fusedbregman.run_solver.stop_rel_e` fires on the last two objectives while the primal and
    dual residuals are within `gap_tol` (`state.converged` is set, see
    `fusedbregman.abstract_solver.AbstractSolver.residuals_small`), when an iterate becomes non-finite
    (`state.diverged` is set) or after `max_iter` iterations.

    Args:
        solver: An `fusedbregman.abstract_solver.AbstractSolver`
        state: The `fusedbregman.problem.SolverState` to continue from. Defaults to the solver's initial state.

    Yields:
        The `fusedbregman.problem.SolverState` after every outer iteration. The same object is yielded every time.
    """
    config = solver.config
    state = solver.initial_state() if state is None else state
    while state.k < config.max_iter:
        solver.step(state)
        if state.diverged:
            yield state
            break
        history = state.obj_history
        if len(history) >= 2 and stop_rel_e(history[-2], history[-1], config.rel_tol):
            state.converged = solver.residuals_small(state)
        if state.k % config.log_every == 0:
            _logger.debug('iteration %d: objective %.10g, RelE %.3e, residuals %.3e / %.3e, pcg %d', state.k,
                          history[-1], _last_rel_e(history), state.primal_residual, state.dual_residual,
                          state.pcg_iters[-1])
        yield state
        if state.converged:
            break


def solve(problem: FusedProblem, config: Optional[SolverConfig] = None) -> Solution:
    """Solves a problem with the solver registered for its kind in `SOLVERS`.

    With `mu_auto`, the default unless both weights are given, `mu1 = mu2` is chosen by
    `fusedbregman.run_solver.pretrial_select_mu` first.

    Args:
        problem: The `fusedbregman.problem.FusedProblem`
        config: The `fusedbregman.problem.SolverConfig`. Defaults to `SolverConfig()`.

    Returns:
        The `fusedbregman.problem.Solution`. Running into `max_iter` is reported by `converged = False`, not raised.
    """
    config = config if config is not None else SolverConfig()
    if config.mu_auto:
        mu1, mu2 = pretrial_select_mu(problem, config.pretrial_iters, config)
        config = config.with_mu(mu1, mu2)
    solver = SOLVERS[problem.kind](problem, config)
    state = solver.initial_state()
    for state in iterate(solver, state):
        pass
    solution = solver.solution(state, _last_rel_e(state.obj_history))
    _logger.info('%s: %d iterations, objective %.10g, RelE %.3e, %d nonzeros', problem.kind.value,
                 solution.iterations, solution.objective, solution.rel_e, solution.nonzeros)
    if not solution.converged:
        _logger.warning('%s solver stopped without convergence after %d iterations (RelE %.3e)', problem.kind.value,
                        solution.iterations, solution.rel_e)
    return solution


def _solve_kind(problem: FusedProblem, config: Optional[SolverConfig], kind: ProblemKind) -> Solution:
    if problem.kind is not kind:
        raise InvalidProblemException(f'Expected a {kind.value} problem, got {problem.kind.value}')
    return solve(problem, config)


def sb_fused_lasso(problem: FusedProblem, config: Optional[SolverConfig] = None) -> Solution:
    """Solves a fused Lasso regression problem, see `fusedbregman.fused_lasso_solver.FusedLassoSolver`."""
    return _solve_kind(problem, config, ProblemKind.REGRESSION)


def sb_flsa(problem: FusedProblem, config: Optional[SolverConfig] = None) -> Solution:
    """Solves a fused Lasso signal approximation problem, see `fusedbregman.fused_lasso_solver.FlsaSolver`."""
    return _solve_kind(problem, config, ProblemKind.FLSA)


def sb_flsvm(problem: FusedProblem, config: Optional[SolverConfig] = None) -> Solution:
    """Solves a fused Lasso SVM problem, see `fusedbregman.svm_solver.FlsvmSolver`."""
    return _solve_kind(problem, config, ProblemKind.SVM)


def pretrial_select_mu(problem: FusedProblem, pretrial_iters: int = 30, config: Optional[SolverConfig] = None) \
        -> Tuple[float, float]:
    """Selects `mu1 = mu2` from the candidates `PRETRIAL_GRID * |y|_2` by running `pretrial_iters` iterations with each
    and keeping the one with the largest objective decrease per iteration. Ties go to the smaller candidate.

    For SVM labels `|y|_2 = sqrt(n)`.

    Args:
        problem: The `fusedbregman.problem.FusedProblem`
        pretrial_iters: The number of iterations per candidate.
        config: Further settings shared by all candidates. Defaults to `SolverConfig()`.

    Returns:
        The selected `(mu1, mu2)`. Falls back to `(1.0, 1.0)` if `y` is zero.
    """
    config = config if config is not None else SolverConfig()
    scale = float(np.linalg.norm(problem.y))
    if scale == 0.0:
        _logger.info('pretrial: y is zero, using mu = 1')
        return 1.0, 1.0

    solver_class = SOLVERS[problem.kind]
    best_mu, best_rate = None, -np.inf
    for factor in PRETRIAL_GRID:
        mu = factor * scale
        pretrial_config = dataclasses.replace(config.with_mu(mu, mu), max_iter=pretrial_iters)
        solver = solver_class(problem, pretrial_config)
        start = solver.initial_state()
        obj_start = solver.objective(start.beta, start.beta0)
        state = start
        for state in iterate(solver, start):
            pass
        if state.diverged or not state.obj_history:
            _logger.debug('pretrial: mu %.6g diverged', mu)
            continue
        rate = (obj_start - state.obj_history[-1]) / state.k
        _logger.debug('pretrial: mu %.6g decreases the objective by %.6g per iteration', mu, rate)
        if rate > best_rate:
            best_mu, best_rate = mu, rate
    if best_mu is None:
        best_mu = scale
    _logger.info('pretrial selected mu %.6g', best_mu)
    return best_mu, best_mu
