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

"""This module provides matrix-free structured linear algebra for the beta subproblems: the difference operator `L`,
tridiagonal Cholesky factorizations and a preconditioned conjugate gradient solver."""

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Tuple

import numpy as np
import scipy.linalg
import scipy.sparse

from fusedbregman.enums import DiffMode

_logger = logging.getLogger('fusedbregman.linalg')

PIVOT_RTOL = 1e-14
"""A Cholesky pivot at or below this fraction of the largest diagonal entry counts as non-positive."""


class DimensionMismatchException(ValueError):
    """Exception that is raised if an array does not have the length an operator expects."""


class NotPositiveDefiniteException(ArithmeticError):
    """Exception that is raised if a Cholesky factorization meets a non-positive pivot."""


class PcgBreakdownException(ArithmeticError):
    """Exception that is raised if conjugate gradient meets a search direction without positive curvature.

    Attributes:
        x: The partial iterate at the time of the breakdown.
        iterations: The number of completed iterations.
    """

    def __init__(self, message: str, x: np.ndarray, iterations: int):
        super().__init__(message)
        self.x = x
        self.iterations = iterations


def _as_vector(name: str, array, expected: int) -> np.ndarray:
    vector = np.asarray(array, dtype=np.float64)
    if vector.ndim != 1 or vector.shape[0] != expected:
        raise DimensionMismatchException(f'`{name}` must be a vector of length {expected}, got shape {vector.shape}')
    return vector


@dataclass(frozen=True)
class DiffOperator:
    """Represents the coupling operator `L` of the total variation penalty.

    In `fusedbregman.enums.DiffMode.CHAIN` mode, `L` is the `(p - 1) x p` first difference matrix with `-1` on the
    diagonal and `+1` on the superdiagonal, so that `L x = (x_2 - x_1, ..., x_p - x_{p-1})`. In
    `fusedbregman.enums.DiffMode.GENERAL` mode, `L` is an arbitrary `m x p` sparse matrix given by
    `(row, column, value)` triples.
    """
    p: int
    mode: DiffMode = DiffMode.CHAIN
    rows: Tuple[Tuple[int, int, float], ...] = ()
    m: Optional[int] = None
    _matrix: Optional[scipy.sparse.csr_matrix] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.p < 1:
            raise ValueError('`p` must be positive')
        if self.mode is DiffMode.CHAIN:
            if self.rows:
                raise ValueError('A chain operator does not take explicit rows')
            object.__setattr__(self, 'm', self.p - 1)
            return
        rows = tuple((int(i), int(j), float(value)) for i, j, value in self.rows)
        m = self.m if self.m is not None else (max(i for i, _, _ in rows) + 1 if rows else 0)
        for i, j, _ in rows:
            if not 0 <= i < m or not 0 <= j < self.p:
                raise ValueError(f'Entry ({i}, {j}) lies outside of a {m} x {self.p} operator')
        object.__setattr__(self, 'rows', rows)
        object.__setattr__(self, 'm', m)
        if rows:
            i, j, values = zip(*rows)
        else:
            i, j, values = (), (), ()
        matrix = scipy.sparse.coo_matrix((values, (i, j)), shape=(m, self.p)).tocsr()
        object.__setattr__(self, '_matrix', matrix)

    @classmethod
    def chain(cls, p: int) -> 'DiffOperator':
        """Returns the first difference operator for `p` ordered coefficients."""
        return cls(p)

    @classmethod
    def general(cls, p: int, rows: Iterable[Tuple[int, int, float]], m: Optional[int] = None) -> 'DiffOperator':
        """Returns a general sparse operator.

        Args:
            p: The number of coefficients.
            rows: `(row, column, value)` triples. Duplicate positions are summed.
            m: The number of rows. Defaults to one more than the largest row index.
        """
        return cls(p, DiffMode.GENERAL, tuple(rows), m)

    @property
    def is_chain(self) -> bool:
        return self.mode is DiffMode.CHAIN

    def to_sparse(self) -> scipy.sparse.csr_matrix:
        """Returns `L` as a `scipy.sparse.csr_matrix`."""
        if self.is_chain and self.m == 0:
            return scipy.sparse.csr_matrix((0, self.p))
        if self.is_chain:
            return scipy.sparse.diags([-np.ones(self.m), np.ones(self.m)], [0, 1], shape=(self.m, self.p),
                                      format='csr')
        return self._matrix

    def lt_l_diagonal(self) -> np.ndarray:
        """Returns the diagonal of `L^T L`."""
        if self.is_chain:
            counts = np.zeros(self.p)
            counts[:-1] += 1.0
            counts[1:] += 1.0
            return counts
        return np.asarray(self._matrix.multiply(self._matrix).sum(axis=0), dtype=np.float64).ravel()

    def lt_l_dense(self) -> np.ndarray:
        """Returns `L^T L` as a dense `p x p` array. Meant for small `p` only."""
        if not self.is_chain:
            return (self._matrix.T @ self._matrix).toarray()
        off = -np.ones(self.p - 1)
        return np.diag(self.lt_l_diagonal()) + np.diag(off, 1) + np.diag(off, -1)


def apply_L(op: DiffOperator, x) -> np.ndarray:
    """Computes `L x`.

    Example:
        ```python
        apply_L(DiffOperator.chain(3), [1, 2, 4])
        # array([1., 2.])
        ```

    Raises:
        DimensionMismatchException: `x` must have length `p`
    """
    x = _as_vector('x', x, op.p)
    if op.is_chain:
        return np.diff(x)
    return op._matrix @ x


def apply_Lt(op: DiffOperator, v) -> np.ndarray:
    """Computes `L^T v`. For the chain operator `(L^T v)_1 = -v_1`, `(L^T v)_i = v_{i-1} - v_i` and
    `(L^T v)_p = v_{p-1}`.

    Raises:
        DimensionMismatchException: `v` must have length `m`
    """
    v = _as_vector('v', v, op.m)
    if op.is_chain:
        out = np.zeros(op.p)
        out[:-1] -= v
        out[1:] += v
        return out
    return op._matrix.T @ v


def apply_LtL(op: DiffOperator, x) -> np.ndarray:
    """Computes `L^T L x` without forming `L x` for the chain operator."""
    x = _as_vector('x', x, op.p)
    if not op.is_chain:
        return op._matrix.T @ (op._matrix @ x)
    out = np.zeros(op.p)
    if op.p == 1:
        return out
    out[0] = x[0] - x[1]
    out[-1] = x[-1] - x[-2]
    out[1:-1] = 2.0 * x[1:-1] - x[:-2] - x[2:]
    return out


@dataclass(frozen=True, eq=False)
class TridiagMatrix:
    """A symmetric tridiagonal matrix stored by its main diagonal (length `p`) and off-diagonal (length `p - 1`)."""
    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        diag = np.array(self.diag, dtype=np.float64)
        offdiag = np.array(self.offdiag, dtype=np.float64)
        if diag.ndim != 1 or diag.shape[0] < 1:
            raise DimensionMismatchException('`diag` must be a non-empty vector')
        _as_vector('offdiag', offdiag, diag.shape[0] - 1)
        diag.flags.writeable = False
        offdiag.flags.writeable = False
        object.__setattr__(self, 'diag', diag)
        object.__setattr__(self, 'offdiag', offdiag)

    @property
    def p(self) -> int:
        return self.diag.shape[0]

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)


@dataclass(frozen=True, eq=False)
class TridiagFactor:
    """The lower bidiagonal Cholesky factor `L_hat` of a `TridiagMatrix`, `P = L_hat L_hat^T`.

    The factor is kept in the lower banded layout of `scipy.linalg.cholesky_banded`: row 0 holds the main diagonal,
    row 1 the subdiagonal followed by one unused entry.
    """
    banded: np.ndarray

    @property
    def p(self) -> int:
        return self.banded.shape[1]

    @property
    def diag(self) -> np.ndarray:
        return self.banded[0]

    @property
    def subdiag(self) -> np.ndarray:
        return self.banded[1, :-1]

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.subdiag, -1)


def tridiag_matvec(P: TridiagMatrix, x) -> np.ndarray:
    """Computes `P x` in `O(p)`."""
    x = _as_vector('x', x, P.p)
    out = P.diag * x
    out[:-1] += P.offdiag * x[1:]
    out[1:] += P.offdiag * x[:-1]
    return out


def build_preconditioner(op: DiffOperator, mu1: float, mu2: float, extra_diag=None) -> TridiagMatrix:
    """Builds `P = mu1 I + mu2 L^T L (+ diag(extra_diag))`.

    For the chain operator `P` is tridiagonal with diagonal `mu1 + mu2 * (1, 2, ..., 2, 1)` and off-diagonal
    `-mu2`. For a general operator only the diagonal is kept (Jacobi preconditioner), since its `L^T L` is not
    tridiagonal.

    Args:
        op: The `DiffOperator`.
        mu1: Positive weight of the identity.
        mu2: Nonnegative weight of `L^T L`.
        extra_diag: Optional vector of length `p` added to the main diagonal, e.g. ones for the signal approximator.

    Raises:
        ValueError: `mu1` must be positive and `mu2` nonnegative
    """
    if not mu1 > 0:
        raise ValueError('`mu1` must be positive')
    if not mu2 >= 0:
        raise ValueError('`mu2` must be nonnegative')
    diag = mu1 + mu2 * op.lt_l_diagonal()
    if extra_diag is not None:
        diag = diag + _as_vector('extra_diag', extra_diag, op.p)
    if op.is_chain:
        offdiag = np.full(op.p - 1, -float(mu2))
    else:
        offdiag = np.zeros(op.p - 1)
    return TridiagMatrix(diag, offdiag)


def tridiag_cholesky(P: TridiagMatrix) -> TridiagFactor:
    """Factors a symmetric positive definite tridiagonal matrix in `O(p)` time and memory.

    Raises:
        NotPositiveDefiniteException: A pivot is at or below `PIVOT_RTOL` times the largest diagonal entry
    """
    scale = float(np.max(P.diag))
    if not scale > 0 or np.any(P.diag <= PIVOT_RTOL * scale):
        raise NotPositiveDefiniteException('Matrix is not positive definite')
    banded = np.zeros((2, P.p))
    banded[0] = P.diag
    banded[1, :-1] = P.offdiag
    if P.p == 1:
        banded[0] = np.sqrt(P.diag)
        return TridiagFactor(banded)
    try:
        factor = scipy.linalg.cholesky_banded(banded, lower=True)
    except np.linalg.LinAlgError as ex:
        raise NotPositiveDefiniteException(f'Matrix is not positive definite ({ex})') from ex
    if np.any(factor[0] ** 2 <= PIVOT_RTOL * scale):
        raise NotPositiveDefiniteException('Matrix is not positive definite (vanishing pivot)')
    return TridiagFactor(factor)


def tridiag_solve(f: TridiagFactor, g) -> np.ndarray:
    """Solves `L_hat L_hat^T x = g` by one forward and one backward bidiagonal substitution.

    Raises:
        DimensionMismatchException: `g` must have length `p`
    """
    g = _as_vector('g', g, f.p)
    if f.p == 1:
        return g / f.banded[0] ** 2
    return scipy.linalg.cho_solve_banded((f.banded, True), g, check_finite=False)


@dataclass(frozen=True, eq=False)
class LinOp:
    """A symmetric positive definite operator on `R^dim`, given by its matrix-vector product.

    Attributes:
        dim: The dimension of the space the operator acts on.
        matvec: Computes `A x`.
        psolve: Optionally solves `M z = r` for a preconditioner `M`. Identity if absent.
    """
    dim: int
    matvec: Callable[[np.ndarray], np.ndarray]
    psolve: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def precondition(self, r: np.ndarray) -> np.ndarray:
        return r.copy() if self.psolve is None else self.psolve(r)

    def check_symmetric(self, trials: int = 5, seed: int = 0, rtol: float = 1e-8) -> bool:
        """Checks `|<Ax, y> - <x, Ay>| <= rtol * |x| |y|` for random `x` and `y`."""
        rng = np.random.default_rng(seed)
        for _ in range(trials):
            x = rng.standard_normal(self.dim)
            y = rng.standard_normal(self.dim)
            ax = self.matvec(x)
            # roundoff grows with the operator norm
            scale = max(1.0, np.linalg.norm(ax) / np.linalg.norm(x))
            if abs(ax @ y - x @ self.matvec(y)) > rtol * scale * np.linalg.norm(x) * np.linalg.norm(y):
                return False
        return True


def pcg(A: LinOp, rhs, x0=None, tol: float = 1e-8, max_iter: Optional[int] = None) -> Tuple[np.ndarray, int]:
    """Solves `A x = rhs` with the preconditioned conjugate gradient method.

    Iteration stops as soon as `|A x - rhs|_2 <= tol * |rhs|_2` (measured on the recursively updated residual) or
    after `max_iter` iterations. There are no restarts.

    Args:
        A: A symmetric positive definite `LinOp`. Its `psolve` is used as preconditioner.
        rhs: The right hand side.
        x0: The starting point. Defaults to zero.
        tol: The relative residual tolerance.
        max_iter: The iteration cap. Defaults to `A.dim`.

    Returns:
        A tuple of the approximate solution and the number of iterations performed.

    Raises:
        PcgBreakdownException: A search direction has non-positive curvature
    """
    rhs = _as_vector('rhs', rhs, A.dim)
    x = np.zeros(A.dim) if x0 is None else _as_vector('x0', x0, A.dim).copy()
    if max_iter is None:
        max_iter = A.dim
    rhs_norm = np.linalg.norm(rhs)
    if rhs_norm == 0.0:
        return np.zeros(A.dim), 0
    threshold = tol * rhs_norm

    r = rhs - A.matvec(x)
    if np.linalg.norm(r) <= threshold:
        return x, 0
    z = A.precondition(r)
    direction = z.copy()
    gamma = r @ z
    for iteration in range(1, max_iter + 1):
        q = A.matvec(direction)
        curvature = direction @ q
        if not curvature > 0.0:
            raise PcgBreakdownException(f'Non-positive curvature {curvature} in iteration {iteration}', x,
                                        iteration - 1)
        alpha = gamma / curvature
        x += alpha * direction
        r -= alpha * q
        if np.linalg.norm(r) <= threshold:
            return x, iteration
        z = A.precondition(r)
        gamma_next = r @ z
        if not gamma_next > 0.0:
            raise PcgBreakdownException(f'Preconditioner is not positive definite in iteration {iteration}', x,
                                        iteration)
        direction = z + (gamma_next / gamma) * direction
        gamma = gamma_next
    _logger.warning('pcg stopped at the iteration cap %d with relative residual %.3e', max_iter,
                    np.linalg.norm(r) / rhs_norm)
    return x, max_iter
