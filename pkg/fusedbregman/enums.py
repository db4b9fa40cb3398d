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

"""This module provides some enumerations to describe problems and solver settings."""

from enum import Enum


class ProblemKind(Enum):
    """Enumeration of the problem families a `fusedbregman.problem.FusedProblem` can describe."""
    value: str
    REGRESSION = 'regression'
    """Least-squares loss with a general design matrix."""
    FLSA = 'flsa'
    """Signal approximator, i.e. the design matrix is the identity."""
    SVM = 'svm'
    """Averaged hinge loss with labels in {-1, +1} and an intercept."""


class DiffMode(Enum):
    """Enumeration of the storage modes of a `fusedbregman.linalg.DiffOperator`."""
    value: str
    CHAIN = 'chain'
    """First differences of neighbouring coefficients, `(p - 1) x p`."""
    GENERAL = 'general'
    """Arbitrary sparse `m x p` operator given by `(row, column, value)` triples."""


class BetaSolver(Enum):
    """Enumeration of the strategies for the linear system of the beta step."""
    value: str
    PCG = 'pcg'
    """Preconditioned conjugate gradient, warm started from the previous iterate."""
    DIRECT = 'direct'
    """Dense Cholesky factor computed once per solve. Only sensible for small `p`."""
