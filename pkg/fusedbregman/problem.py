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

"""This module serves the representation of fused Lasso problems, solver settings, iterates and results, and the
evaluation of the objective functions."""

from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

import numpy as np

from fusedbregman.enums import BetaSolver, ProblemKind
from fusedbregman.linalg import DiffOperator, apply_L


class InvalidProblemException(ValueError):
    """Exception that is raised if a problem statement violates its invariants."""


class InvalidConfigException(ValueError):
    """Exception that is raised if solver settings violate the convergence conditions."""


def _frozen_array(array, name: str, ndim: int) -> np.ndarray:
    frozen = np.array(array, dtype=np.float64)
    if frozen.ndim != ndim:
        raise InvalidProblemException(f'`{name}` must have {ndim} dimension(s), got shape {frozen.shape}')
    if not np.all(np.isfinite(frozen)):
        raise InvalidProblemException(f'`{name}` must be finite')
    frozen.flags.writeable = False
    return frozen


@dataclass(frozen=True, eq=False)
class FusedProblem:
    """Immutable statement of a fused Lasso problem

    ```
    min V(beta) + lam1 |beta|_1 + lam2 |L beta|_1
    ```

    where `V` is the least-squares loss `1/2 |X beta - y|^2` (`X` is the identity for the signal approximator) or the
    averaged hinge loss `1/n sum (1 - y_i (x_i^T beta + beta0))_+`.

    Attributes:
        X: The `n x p` design matrix, or `None` for the identity (`fusedbregman.enums.ProblemKind.FLSA`).
        y: Responses, or labels in `{-1, +1}` for `fusedbregman.enums.ProblemKind.SVM`.
        lam1: Positive weight of the sparsity penalty.
        lam2: Positive weight of the fusion penalty.
        L: The `fusedbregman.linalg.DiffOperator`.
        kind: The `fusedbregman.enums.ProblemKind`.
    """
    X: Optional[np.ndarray]
    y: np.ndarray
    lam1: float
    lam2: float
    L: DiffOperator
    kind: ProblemKind

    def __post_init__(self):
        y = _frozen_array(self.y, 'y', 1)
        object.__setattr__(self, 'y', y)
        if not (self.lam1 > 0 and self.lam2 > 0):
            raise InvalidProblemException('`lam1` and `lam2` must be positive')
        object.__setattr__(self, 'lam1', float(self.lam1))
        object.__setattr__(self, 'lam2', float(self.lam2))
        if self.kind is ProblemKind.FLSA:
            if self.X is not None:
                raise InvalidProblemException('The signal approximator takes no design matrix')
            p = y.shape[0]
        else:
            if self.X is None:
                raise InvalidProblemException(f'A {self.kind.value} problem needs a design matrix')
            X = _frozen_array(self.X, 'X', 2)
            if X.shape[0] != y.shape[0]:
                raise InvalidProblemException(f'`X` has {X.shape[0]} rows but `y` has length {y.shape[0]}')
            object.__setattr__(self, 'X', X)
            p = X.shape[1]
        if self.kind is ProblemKind.SVM and not np.all(np.abs(y) == 1.0):
            raise InvalidProblemException('Labels must be -1 or +1')
        if self.L.p != p:
            raise InvalidProblemException(f'`L` acts on {self.L.p} coefficients, the problem has {p}')

    @classmethod
    def regression(cls, X, y, lam1: float, lam2: float, L: Optional[DiffOperator] = None) -> 'FusedProblem':
        X = np.asarray(X, dtype=np.float64)
        return cls(X, y, lam1, lam2, L if L is not None else DiffOperator.chain(X.shape[1]), ProblemKind.REGRESSION)

    @classmethod
    def flsa(cls, y, lam1: float, lam2: float, L: Optional[DiffOperator] = None) -> 'FusedProblem':
        y = np.asarray(y, dtype=np.float64)
        return cls(None, y, lam1, lam2, L if L is not None else DiffOperator.chain(y.shape[0]), ProblemKind.FLSA)

    @classmethod
    def svm(cls, X, y, lam1: float, lam2: float, L: Optional[DiffOperator] = None) -> 'FusedProblem':
        X = np.asarray(X, dtype=np.float64)
        return cls(X, y, lam1, lam2, L if L is not None else DiffOperator.chain(X.shape[1]), ProblemKind.SVM)

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def p(self) -> int:
        return self.L.p

    def design_matvec(self, beta: np.ndarray) -> np.ndarray:
        """Computes `X beta`."""
        return beta.copy() if self.X is None else self.X @ beta

    def design_rmatvec(self, r: np.ndarray) -> np.ndarray:
        """Computes `X^T r`."""
        return r.copy() if self.X is None else self.X.T @ r

    def with_lambdas(self, lam1: float, lam2: float) -> 'FusedProblem':
        return FusedProblem(self.X, self.y, lam1, lam2, self.L, self.kind)


@dataclass(frozen=True)
class SolverConfig:
    """Settings of the split Bregman iteration.

    The dual steps default to the augmentation weights (`delta_i = mu_i`) and must satisfy `0 < delta_i <= mu_i`.
    Unless both `mu1` and `mu2` are given, they are chosen by the pretrial (`mu_auto`) on the scale of `y`.

    Attributes:
        mu1: Augmentation weight of `beta = a`. `None` selects it by the pretrial.
        mu2: Augmentation weight of `L beta = b`. `None` selects it by the pretrial.
        mu3: Augmentation weight of the hinge constraint (SVM only).
        delta1: Dual step of `u`.
        delta2: Dual step of `v`.
        delta3: Dual step of `w` (SVM only).
        rel_tol: Threshold of the relative objective change that stops the iteration.
        gap_tol: Bound on the primal and dual residuals, relative to the size of the iterates, that must hold as well
            before the iteration stops.
        max_iter: Cap on outer iterations.
        pcg_tol: Relative residual tolerance of the beta step.
        pcg_max: Cap on PCG iterations per beta step. Defaults to the system dimension.
        mu_auto: Select `mu1 = mu2` by `fusedbregman.run_solver.pretrial_select_mu` before solving. Defaults to
            whether `mu1` or `mu2` is missing.
        pretrial_iters: Iterations per pretrial candidate.
        beta_solver: The `fusedbregman.enums.BetaSolver` of the beta step.
        log_every: Log progress every so many iterations.
    """
    mu1: Optional[float] = None
    mu2: Optional[float] = None
    mu3: float = 1.0
    delta1: Optional[float] = None
    delta2: Optional[float] = None
    delta3: Optional[float] = None
    rel_tol: float = 1e-5
    gap_tol: float = 1e-4
    max_iter: int = 50000
    pcg_tol: float = 1e-8
    pcg_max: Optional[int] = None
    mu_auto: Optional[bool] = None
    pretrial_iters: int = 30
    beta_solver: BetaSolver = BetaSolver.PCG
    log_every: int = 100

    def __post_init__(self):
        if self.mu_auto is None:
            object.__setattr__(self, 'mu_auto', self.mu1 is None or self.mu2 is None)
        # placeholders until the pretrial has run
        for mu_name in ('mu1', 'mu2'):
            if getattr(self, mu_name) is None:
                object.__setattr__(self, mu_name, 1.0)
        for mu_name, delta_name in (('mu1', 'delta1'), ('mu2', 'delta2'), ('mu3', 'delta3')):
            mu = getattr(self, mu_name)
            if not mu > 0:
                raise InvalidConfigException(f'`{mu_name}` must be positive')
            delta = getattr(self, delta_name)
            if delta is None:
                object.__setattr__(self, delta_name, mu)
            elif not 0 < delta <= mu:
                raise InvalidConfigException(f'`{delta_name}` must satisfy 0 < {delta_name} <= {mu_name}')
        if not self.rel_tol >= 0:
            raise InvalidConfigException('`rel_tol` must be nonnegative')
        if not self.gap_tol >= 0:
            raise InvalidConfigException('`gap_tol` must be nonnegative')
        if self.max_iter < 1:
            raise InvalidConfigException('`max_iter` must be positive')
        if not self.pcg_tol > 0:
            raise InvalidConfigException('`pcg_tol` must be positive')
        if self.pcg_max is not None and self.pcg_max < 1:
            raise InvalidConfigException('`pcg_max` must be positive')
        if self.pretrial_iters < 1:
            raise InvalidConfigException('`pretrial_iters` must be positive')

    def with_mu(self, mu1: float, mu2: float) -> 'SolverConfig':
        """Returns a copy with new `mu1`, `mu2` and the dual steps reset to them."""
        return replace(self, mu1=mu1, mu2=mu2, delta1=None, delta2=None, mu_auto=False)


@dataclass
class SolverState:
    """Mutable primal and dual iterates of one solver run. Only the run that created it may touch it.

    `beta0`, `c` and `w` are only used by the SVM solver. `primal_residual` is the largest constraint violation and
    `dual_residual` the largest change of the stationarity condition caused by the last update of the splitting
    variables.
    """
    beta: np.ndarray
    a: np.ndarray
    b: np.ndarray
    u: np.ndarray
    v: np.ndarray
    beta0: float = 0.0
    c: Optional[np.ndarray] = None
    w: Optional[np.ndarray] = None
    k: int = 0
    obj_history: List[float] = field(default_factory=list)
    pcg_iters: List[int] = field(default_factory=list)
    primal_residual: float = float('inf')
    dual_residual: float = float('inf')
    converged: bool = False
    diverged: bool = False

    def is_finite(self) -> bool:
        arrays = [self.beta, self.a, self.b, self.u, self.v]
        arrays += [array for array in (self.c, self.w) if array is not None]
        return np.isfinite(self.beta0) and all(np.all(np.isfinite(array)) for array in arrays)


@dataclass
class Solution:
    """Outcome of a solver run.

    Attributes:
        coef: The sparse coefficient estimate, taken from the soft-thresholded `a` iterate.
        intercept: `beta0` (SVM only, else 0).
        objective: The objective at `coef` (and `intercept`).
        iterations: Number of outer iterations performed.
        rel_e: The last relative objective change.
        converged: Whether the stopping rule fired before `max_iter`.
        constraint_gap: `(|beta - a|_inf, |L beta - b|_inf)` at exit.
        pcg_iters: PCG iterations per outer iteration (zeros for direct solves).
        mu1: The `mu1` used.
        mu2: The `mu2` used.
        obj_history: The objective at every `beta` iterate.
        kkt_residual: Filled in by `fusedbregman.verify`.
    """
    coef: np.ndarray
    intercept: float
    objective: float
    iterations: int
    rel_e: float
    converged: bool
    constraint_gap: Tuple[float, float]
    pcg_iters: List[int]
    mu1: float
    mu2: float
    obj_history: List[float]
    kkt_residual: Optional[float] = None

    @property
    def nonzeros(self) -> int:
        return int(np.count_nonzero(self.coef))

    def gap_acceptable(self) -> bool:
        """Whether both constraint gaps are within `1e-4 * (1 + |coef|_inf)`."""
        bound = 1e-4 * (1.0 + float(np.max(np.abs(self.coef), initial=0.0)))
        return max(self.constraint_gap) <= bound


def objective_fused(problem: FusedProblem, beta) -> float:
    """Evaluates `1/2 |X beta - y|^2 + lam1 |beta|_1 + lam2 |L beta|_1` (`X = I` for the signal approximator).

    Raises:
        fusedbregman.linalg.DimensionMismatchException: `beta` must have length `p`
    """
    beta = np.asarray(beta, dtype=np.float64)
    diff = apply_L(problem.L, beta)
    residual = problem.design_matvec(beta) - problem.y
    return float(0.5 * residual @ residual + problem.lam1 * np.abs(beta).sum() + problem.lam2 * np.abs(diff).sum())


def hinge_margins(problem: FusedProblem, beta: np.ndarray, beta0: float) -> np.ndarray:
    """Computes `1 - y_i (x_i^T beta + beta0)` for every observation."""
    return 1.0 - problem.y * (problem.X @ beta + beta0)


def objective_flsvm(problem: FusedProblem, beta, beta0: float) -> float:
    """Evaluates `1/n sum (1 - y_i (x_i^T beta + beta0))_+ + lam1 |beta|_1 + lam2 |L beta|_1`.

    Raises:
        fusedbregman.linalg.DimensionMismatchException: `beta` must have length `p`
    """
    beta = np.asarray(beta, dtype=np.float64)
    diff = apply_L(problem.L, beta)
    loss = np.maximum(hinge_margins(problem, beta, beta0), 0.0).mean()
    return float(loss + problem.lam1 * np.abs(beta).sum() + problem.lam2 * np.abs(diff).sum())
