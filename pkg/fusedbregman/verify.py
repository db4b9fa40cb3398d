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

"""This module provides solver-independent correctness checks: a certifier that measures how far a candidate is from
satisfying the first order optimality conditions, a brute-force oracle for tiny instances and a linear program
reference for the SVM."""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Tuple

import numpy as np
import scipy.linalg
import scipy.optimize
import scipy.sparse

from fusedbregman.enums import ProblemKind
from fusedbregman.linalg import DiffOperator, apply_L, apply_Lt
from fusedbregman.problem import FusedProblem, InvalidProblemException, hinge_margins, objective_flsvm, \
    objective_fused

_logger = logging.getLogger('fusedbregman.verify')

MAX_ORACLE_P = 5
"""The largest number of coefficients `brute_force_fused` accepts."""


class OracleTooLargeException(ValueError):
    """Exception that is raised if a brute-force enumeration would be too large."""


@dataclass
class KktReport:
    """Result of a KKT certification.

    Attributes:
        residual_inf: The infinity norm of the smallest stationarity residual found over all admissible subgradients.
        feasible_subgradient: Whether `residual_inf` is within the requested tolerance.
        per_block: Infinity norms of the smooth (`'smooth'`), sparsity (`'l1'`) and fusion (`'tv'`) terms of the
            residual, plus the intercept condition (`'intercept'`) for the SVM.
        subgradients: The subgradients attaining `residual_inf`, keyed by `'s'`, `'p'` and `'q'`.
    """
    residual_inf: float
    feasible_subgradient: bool
    per_block: Dict[str, float] = field(default_factory=dict)
    subgradients: Dict[str, np.ndarray] = field(default_factory=dict)


def _box(values: np.ndarray, tol_active: float, lower: float = -1.0) -> Tuple[np.ndarray, np.ndarray]:
    """Returns the fixed subgradient (sign of the active entries) and the mask of free entries."""
    free = np.abs(values) <= tol_active
    fixed = np.where(free, 0.0, np.sign(values))
    if lower == 0.0:
        fixed = np.maximum(fixed, 0.0)
    return fixed, free


def _chain_warm_start(h: np.ndarray, lam2: float, q: np.ndarray, q_free: np.ndarray) -> np.ndarray:
    """For the chain operator, `h + lam2 L^T q = 0` is solved by the cumulative sums of `h / lam2` whenever
    `sum(h) = 0`. The free entries are initialized with their projection onto `[-1, 1]`."""
    if q.shape[0] == 0:
        return q
    guess = np.clip(np.cumsum(h / lam2)[:-1], -1.0, 1.0)
    return np.where(q_free, guess, q)


def _update_q(residual: np.ndarray, q: np.ndarray, q_free: np.ndarray, lam2: float, op: DiffOperator) -> float:
    """Performs one sweep of projected coordinate descent over the free fusion subgradients in place.

    For the chain operator, entries of equal parity touch disjoint pairs of residual entries and are updated at once.

    Returns:
        The largest change of an entry.
    """
    change = 0.0
    if op.is_chain:
        for parity in (0, 1):
            idx = np.arange(parity, op.m, 2)
            idx = idx[q_free[idx]]
            if idx.shape[0] == 0:
                continue
            # column j of L^T is e_{j+1} - e_j
            new = np.clip(q[idx] - (residual[idx + 1] - residual[idx]) / (2.0 * lam2), -1.0, 1.0)
            delta = new - q[idx]
            residual[idx] -= lam2 * delta
            residual[idx + 1] += lam2 * delta
            q[idx] = new
            change = max(change, float(np.max(np.abs(delta))))
        return change

    matrix = op.to_sparse()
    for j in np.flatnonzero(q_free):
        row = matrix.getrow(j)
        cols, vals = row.indices, row.data
        norm2 = float(vals @ vals)
        if norm2 == 0.0:
            continue
        new = float(np.clip(q[j] - (vals @ residual[cols]) / (lam2 * norm2), -1.0, 1.0))
        delta = new - q[j]
        residual[cols] += lam2 * delta * vals
        q[j] = new
        change = max(change, abs(delta))
    return change


def kkt_residual_fused(problem: FusedProblem, beta, tol_active: float = 1e-6, tol: float = 1e-6,
                       sweeps: int = 500, sweep_tol: float = 1e-10) -> KktReport:
    """Certifies a candidate of a least-squares fused Lasso problem.

    The candidate is optimal if and only if `g + lam1 s + lam2 L^T q = 0` for `g = X^T (X beta - y)` and some
    subgradients `s` of `|.|_1` at `beta` and `q` of `|.|_1` at `L beta`. Entries with a magnitude above `tol_active`
    fix their subgradient to the sign, the others may take any value in `[-1, 1]`. The smallest residual is searched
    by projected coordinate descent on its squared norm, and its infinity norm is reported.

    Args:
        problem: A regression or signal approximation `fusedbregman.problem.FusedProblem`
        beta: The candidate.
        tol_active: Threshold below which an entry counts as zero.
        tol: Tolerance for `KktReport.feasible_subgradient`.
        sweeps: Maximum number of coordinate descent sweeps.
        sweep_tol: The descent stops once no subgradient entry changes by more than this.

    Returns:
        A `fusedbregman.verify.KktReport`.
    """
    if problem.kind is ProblemKind.SVM:
        raise InvalidProblemException('Use `kkt_residual_flsvm` for SVM problems')
    beta = np.asarray(beta, dtype=np.float64)
    lam1, lam2, op = problem.lam1, problem.lam2, problem.L
    g = problem.design_rmatvec(problem.design_matvec(beta) - problem.y)

    s, s_free = _box(beta, tol_active)
    q, q_free = _box(apply_L(op, beta), tol_active)
    s = np.where(s_free, np.clip(-g / lam1, -1.0, 1.0), s)
    if op.is_chain:
        q = _chain_warm_start(g + lam1 * s, lam2, q, q_free)
    residual = g + lam1 * s + lam2 * apply_Lt(op, q)

    for sweep in range(sweeps):
        new = np.where(s_free, np.clip(s - residual / lam1, -1.0, 1.0), s)
        change = float(np.max(np.abs(new - s), initial=0.0))
        residual += lam1 * (new - s)
        s = new
        change = max(change, _update_q(residual, q, q_free, lam2, op))
        if change <= sweep_tol:
            break

    # recomputed to shed accumulated roundoff
    residual = g + lam1 * s + lam2 * apply_Lt(op, q)
    residual_inf = float(np.max(np.abs(residual), initial=0.0))
    per_block = {
        'smooth': float(np.max(np.abs(g), initial=0.0)),
        'l1': float(np.max(np.abs(lam1 * s), initial=0.0)),
        'tv': float(np.max(np.abs(lam2 * apply_Lt(op, q)), initial=0.0)),
    }
    _logger.debug('kkt residual %.3e after %d sweeps', residual_inf, sweep + 1 if sweeps else 0)
    return KktReport(residual_inf, residual_inf <= tol, per_block, {'s': s, 'q': q})


def kkt_residual_flsvm(problem: FusedProblem, beta, beta0: float, tol_active: float = 1e-6, tol: float = 1e-6,
                       sweeps: int = 500, sweep_tol: float = 1e-10) -> KktReport:
    """Certifies a candidate `(beta, beta0)` of a fused Lasso SVM problem.

    The candidate is optimal if and only if

    ```
    -1/n X^T Y s + lam1 p + lam2 L^T q = 0   and   1/n y^T s = 0
    ```

    where `s_i` is a subgradient of the hinge at `c_i = 1 - y_i (x_i^T beta + beta0)`: `1` if `c_i > tol_active`,
    `0` if `c_i < -tol_active` and free in `[0, 1]` otherwise. `p` and `q` are treated as in `kkt_residual_fused`.
    The intercept condition is the last entry of the residual.

    Returns:
        A `fusedbregman.verify.KktReport`.
    """
    if problem.kind is not ProblemKind.SVM:
        raise InvalidProblemException('`kkt_residual_flsvm` certifies SVM problems only')
    beta = np.asarray(beta, dtype=np.float64)
    lam1, lam2, op, n = problem.lam1, problem.lam2, problem.L, problem.n
    yx = problem.y[:, np.newaxis] * problem.X
    # column i of the loss part of the residual
    columns = np.hstack([-yx, problem.y[:, np.newaxis]]) / n
    col_norm2 = np.sum(columns ** 2, axis=1)

    hinge, s_free = _box(hinge_margins(problem, beta, beta0), tol_active, lower=0.0)
    s = np.where(s_free, 0.5, hinge)
    sub_p, p_free = _box(beta, tol_active)
    q, q_free = _box(apply_L(op, beta), tol_active)

    loss = columns.T @ s
    sub_p = np.where(p_free, np.clip(-loss[:-1] / lam1, -1.0, 1.0), sub_p)
    if op.is_chain:
        q = _chain_warm_start(loss[:-1] + lam1 * sub_p, lam2, q, q_free)
    residual = loss.copy()
    residual[:-1] += lam1 * sub_p + lam2 * apply_Lt(op, q)

    free_rows = np.flatnonzero(s_free)
    for sweep in range(sweeps):
        change = 0.0
        for i in free_rows:
            new = float(np.clip(s[i] - (columns[i] @ residual) / col_norm2[i], 0.0, 1.0))
            delta = new - s[i]
            residual += delta * columns[i]
            s[i] = new
            change = max(change, abs(delta))
        new = np.where(p_free, np.clip(sub_p - residual[:-1] / lam1, -1.0, 1.0), sub_p)
        change = max(change, float(np.max(np.abs(new - sub_p), initial=0.0)))
        residual[:-1] += lam1 * (new - sub_p)
        sub_p = new
        change = max(change, _update_q(residual[:-1], q, q_free, lam2, op))
        if change <= sweep_tol:
            break

    loss = columns.T @ s
    residual = loss.copy()
    residual[:-1] += lam1 * sub_p + lam2 * apply_Lt(op, q)
    residual_inf = float(np.max(np.abs(residual)))
    per_block = {
        'smooth': float(np.max(np.abs(loss[:-1]), initial=0.0)),
        'l1': float(np.max(np.abs(lam1 * sub_p), initial=0.0)),
        'tv': float(np.max(np.abs(lam2 * apply_Lt(op, q)), initial=0.0)),
        'intercept': float(abs(loss[-1])),
    }
    return KktReport(residual_inf, residual_inf <= tol, per_block, {'s': s, 'p': sub_p, 'q': q})


def _enumerate_candidates(problem: FusedProblem, eps: float) -> Iterator[Tuple[np.ndarray, float]]:
    """Yields every pattern-consistent stationary point of the piecewise quadratic objective together with its
    objective.

    Every pair of zero sets of `beta` and `L beta` defines a face with a null space basis `N`. On a face, a choice of
    signs `sigma` for the nonzero entries of `beta` and `tau` for those of `L beta` turns the objective into a
    quadratic in `beta = N z`, minimized by `z = (N^T X^T X N)^+ N^T (X^T y - lam1 sigma - lam2 L^T tau)`.
    """
    p, m = problem.p, problem.L.m
    X = np.eye(p) if problem.X is None else problem.X
    L = problem.L.to_sparse().toarray()
    xtx, xty = X.T @ X, X.T @ problem.y

    for zero_beta in itertools.product((False, True), repeat=p):
        for zero_diff in itertools.product((False, True), repeat=m):
            zero_beta_idx = np.flatnonzero(zero_beta)
            zero_diff_idx = np.flatnonzero(zero_diff)
            constraints = np.vstack([np.eye(p)[zero_beta_idx], L[zero_diff_idx]])
            basis = scipy.linalg.null_space(constraints) if constraints.shape[0] else np.eye(p)
            if basis.shape[1] == 0:
                beta = np.zeros(p)
                yield beta, objective_fused(problem, beta)
                continue
            gram_pinv = np.linalg.pinv(basis.T @ xtx @ basis)
            signed_beta = np.flatnonzero(np.logical_not(zero_beta))
            signed_diff = np.flatnonzero(np.logical_not(zero_diff))
            for signs in itertools.product((-1.0, 1.0), repeat=signed_beta.shape[0] + signed_diff.shape[0]):
                sigma = np.zeros(p)
                sigma[signed_beta] = signs[:signed_beta.shape[0]]
                tau = np.zeros(m)
                tau[signed_diff] = signs[signed_beta.shape[0]:]
                linear = xty - problem.lam1 * sigma - problem.lam2 * (L.T @ tau)
                beta = basis @ (gram_pinv @ (basis.T @ linear))
                diff = L @ beta
                if np.any(sigma * beta < -eps) or np.any(tau * diff < -eps):
                    continue
                yield beta, objective_fused(problem, beta)


def _check_oracle_input(problem: FusedProblem) -> None:
    if problem.kind is ProblemKind.SVM:
        raise InvalidProblemException('The brute-force oracle handles least-squares problems only')
    if problem.p > MAX_ORACLE_P:
        raise OracleTooLargeException(f'Refusing to enumerate the patterns of {problem.p} > {MAX_ORACLE_P} '
                                      f'coefficients')


def brute_force_fused(problem: FusedProblem, eps: float = 1e-12) -> Tuple[np.ndarray, float]:
    """Minimizes a tiny least-squares fused Lasso problem by enumerating all sign patterns of `beta` and `L beta`.

    Args:
        problem: A regression or signal approximation `fusedbregman.problem.FusedProblem` with at most
            `MAX_ORACLE_P` coefficients.
        eps: Slack for the sign consistency of a candidate with its pattern.

    Returns:
        A tuple of the minimizer and the minimal objective.

    Raises:
        OracleTooLargeException: `p` is larger than `MAX_ORACLE_P`
    """
    _check_oracle_input(problem)
    best_beta, best_obj = None, np.inf
    for beta, obj in _enumerate_candidates(problem, eps):
        if obj < best_obj:
            best_beta, best_obj = beta, obj
    return best_beta, best_obj


def oracle_minimizers(problem: FusedProblem, rtol: float = 1e-9, eps: float = 1e-12) -> List[np.ndarray]:
    """Returns all distinct candidates of `brute_force_fused` whose objective is within `rtol * (1 + min)` of the
    minimum. A single entry means the oracle found a unique minimizer.

    Raises:
        OracleTooLargeException: `p` is larger than `MAX_ORACLE_P`
    """
    _check_oracle_input(problem)
    candidates = list(_enumerate_candidates(problem, eps))
    best = min(obj for _, obj in candidates)
    minimizers = []
    for beta, obj in candidates:
        if obj > best + rtol * (1.0 + abs(best)):
            continue
        if all(np.max(np.abs(beta - other)) > 1e-8 for other in minimizers):
            minimizers.append(beta)
    return minimizers


def lp_flsvm(problem: FusedProblem) -> Tuple[np.ndarray, float, float]:
    """Solves a fused Lasso SVM problem exactly as the linear program

    ```
    min 1/n sum xi + lam1 sum e + lam2 sum t
    s.t. xi >= 1 - y_i (x_i^T beta + beta0),  -e <= beta <= e,  -t <= L beta <= t,  xi, e, t >= 0
    ```

    with `scipy.optimize.linprog`. Meant as a reference for small and medium instances.

    Returns:
        A tuple of `beta`, `beta0` and the minimal objective.

    Raises:
        ArithmeticError: The linear program solver did not report an optimum
    """
    if problem.kind is not ProblemKind.SVM:
        raise InvalidProblemException('`lp_flsvm` solves SVM problems only')
    n, p, m = problem.n, problem.p, problem.L.m
    yx = scipy.sparse.csr_matrix(problem.y[:, np.newaxis] * problem.X)
    y = scipy.sparse.csr_matrix(problem.y[:, np.newaxis])
    L = problem.L.to_sparse()
    eye_p, eye_n, eye_m = scipy.sparse.identity(p), scipy.sparse.identity(n), scipy.sparse.identity(m)

    def block(*parts):
        return scipy.sparse.hstack(parts)

    # variables: beta (p), beta0 (1), xi (n), e (p), t (m)
    zeros = scipy.sparse.csr_matrix
    A_ub = scipy.sparse.vstack([
        block(-yx, -y, -eye_n, zeros((n, p)), zeros((n, m))),
        block(eye_p, zeros((p, 1)), zeros((p, n)), -eye_p, zeros((p, m))),
        block(-eye_p, zeros((p, 1)), zeros((p, n)), -eye_p, zeros((p, m))),
        block(L, zeros((m, 1)), zeros((m, n)), zeros((m, p)), -eye_m),
        block(-L, zeros((m, 1)), zeros((m, n)), zeros((m, p)), -eye_m),
    ]).tocsc()
    b_ub = np.concatenate([-np.ones(n), np.zeros(2 * p + 2 * m)])
    cost = np.concatenate([np.zeros(p + 1), np.full(n, 1.0 / n), np.full(p, problem.lam1), np.full(m, problem.lam2)])
    bounds = [(None, None)] * (p + 1) + [(0.0, None)] * (n + p + m)
    result = scipy.optimize.linprog(cost, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method='highs')
    if result.status != 0:
        raise ArithmeticError(f'Linear program not solved: {result.message}')
    beta, beta0 = result.x[:p].copy(), float(result.x[p])
    _logger.debug('lp optimum %.12g', result.fun)
    return beta, beta0, objective_flsvm(problem, beta, beta0)
