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

"""This module generates synthetic fused Lasso data, reads and writes CSV files, standardizes datasets and assigns
cross-validation folds."""

import logging
import re
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
import pandas as pd

from fusedbregman.linalg import DimensionMismatchException

_logger = logging.getLogger('fusedbregman.data')

BASE_PATTERN_LENGTH = 500
"""Period of the tiled coefficient pattern of `gen_flsa_signal`."""


class DataFormatException(ValueError):
    """Exception that is raised if a data file cannot be parsed.

    Attributes:
        line: The 1-based line of the file, if known.
        column: The column name or index, if known.
    """

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[Union[str, int]] = None):
        super().__init__(message)
        self.line = line
        self.column = column


def rng_from_seed(seed: int) -> np.random.Generator:
    """Returns a PCG64 generator, so that seeded streams are identical on every platform."""
    return np.random.Generator(np.random.PCG64(seed))


def _read_only(array: Optional[np.ndarray]) -> Optional[np.ndarray]:
    if array is None:
        return None
    array = np.array(array, dtype=np.float64)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class StandardizeTransform:
    """Column means and scales estimated on a training set.

    Attributes:
        x_mean: Column means of `X`, or `None`.
        x_scale: Column standard deviations of `X`, with ones in place of zero variances.
        y_mean: Mean of `y`, or 0 if `y` is left alone.
        y_scale: Standard deviation of `y`, or 1 if `y` is left alone.
    """
    x_mean: Optional[np.ndarray]
    x_scale: Optional[np.ndarray]
    y_mean: float = 0.0
    y_scale: float = 1.0

    def apply(self, X=None, y=None) -> Tuple[Optional[np.ndarray], Optional[np.ndarray]]:
        """Applies the transform to held-out data."""
        X_out = None if X is None or self.x_mean is None else (np.asarray(X, dtype=np.float64) - self.x_mean) / \
            self.x_scale
        y_out = None if y is None else (np.asarray(y, dtype=np.float64) - self.y_mean) / self.y_scale
        return X_out, y_out


@dataclass(frozen=True, eq=False)
class Dataset:
    """An immutable dataset.

    Attributes:
        X: The `n x p` design matrix, absent for pure signals.
        y: Responses, labels in `{-1, +1}` or the signal itself.
        feature_names: Names of the columns of `X`, if the source had a header.
        standardized: Whether `X` (and `y`, if it was included) has zero mean and unit variance columns.
        transform: The `StandardizeTransform` that produced this dataset, if any.
        zero_variance_columns: Columns of `X` that had zero variance and were left as zeros by `standardize`.
    """
    X: Optional[np.ndarray]
    y: Optional[np.ndarray]
    feature_names: Optional[Tuple[str, ...]] = None
    standardized: bool = False
    transform: Optional[StandardizeTransform] = None
    zero_variance_columns: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'X', _read_only(self.X))
        object.__setattr__(self, 'y', _read_only(self.y))
        if self.X is not None and self.y is not None and self.X.shape[0] != self.y.shape[0]:
            raise DimensionMismatchException(f'`X` has {self.X.shape[0]} rows but `y` has length {self.y.shape[0]}')

    @property
    def n(self) -> int:
        return self.y.shape[0] if self.X is None else self.X.shape[0]

    def subset(self, rows: np.ndarray) -> 'Dataset':
        """Returns the observations `rows` as an unstandardized dataset."""
        return Dataset(None if self.X is None else self.X[rows], None if self.y is None else self.y[rows],
                       self.feature_names)


@dataclass(frozen=True, eq=False)
class FoldPlan:
    """Assignment of `n` observations to `k` cross-validation folds.

    Attributes:
        k: The number of folds.
        assignments: The fold index in `[0, k)` of every observation.
    """
    k: int
    assignments: np.ndarray

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignments, minlength=self.k)

    def split(self, fold: int) -> Tuple[np.ndarray, np.ndarray]:
        """Returns the training and the test indices of a fold.

        Raises:
            ValueError: `fold` must lie in `[0, k)`
        """
        if not 0 <= fold < self.k:
            raise ValueError(f'Fold {fold} does not exist in a {self.k}-fold plan')
        return np.flatnonzero(self.assignments != fold), np.flatnonzero(self.assignments == fold)


def gen_equicorrelated(n: int, p: int, rho: float, seed: int) -> Dataset:
    """Generates `n` observations of `p` standard Gaussian predictors with pairwise population correlation `rho`:
    `X_j = sqrt(rho) Z_0 + sqrt(1 - rho) Z_j`, followed by column standardization.

    Raises:
        ValueError: `n`, `p` must be positive and `rho` must lie in `[0, 1)`
    """
    if n < 1 or p < 1:
        raise ValueError('`n` and `p` must be positive')
    if not 0.0 <= rho < 1.0:
        raise ValueError('`rho` must lie in [0, 1)')
    rng = rng_from_seed(seed)
    common = rng.standard_normal((n, 1))
    X = np.sqrt(rho) * common + np.sqrt(1.0 - rho) * rng.standard_normal((n, p))
    return standardize(Dataset(X, None), include_y=False)


def default_beta(p: int) -> np.ndarray:
    """Returns the block sparse coefficient pattern of the simulation studies: 2 at positions 1-20 and 121-125, 3 at
    position 41, 1 at positions 71-85 (1-based) and 0 elsewhere.

    Raises:
        ValueError: `p` must be at least 125
    """
    if p < 125:
        raise ValueError('`p` must be at least 125')
    beta = np.zeros(p)
    beta[0:20] = 2.0
    beta[40] = 3.0
    beta[70:85] = 1.0
    beta[120:125] = 2.0
    return beta


def gen_regression(X, beta, sigma: float = 1.0, seed: int = 0) -> np.ndarray:
    """Generates responses `y = X beta + eps` with Gaussian noise of variance `sigma`.

    Raises:
        fusedbregman.linalg.DimensionMismatchException: `beta` must have one entry per column of `X`
        ValueError: `sigma` must be nonnegative
    """
    X = np.asarray(X, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    if X.ndim != 2 or beta.shape != (X.shape[1],):
        raise DimensionMismatchException(f'`beta` of shape {beta.shape} does not fit `X` of shape {X.shape}')
    if not sigma >= 0:
        raise ValueError('`sigma` must be nonnegative')
    y = X @ beta
    if sigma > 0:
        y = y + np.sqrt(sigma) * rng_from_seed(seed).standard_normal(X.shape[0])
    return y


def gen_flsa_signal(p: int, sigma: float = 0.5, seed: int = 0) -> np.ndarray:
    """Generates a noisy piecewise constant signal `y = beta + eps`, where `beta` repeats `default_beta(500)` every
    500 coordinates and `eps` is Gaussian noise of variance `sigma`.

    Raises:
        ValueError: `p` must be at least 125 and `sigma` nonnegative
    """
    if p < 125:
        raise ValueError('`p` must be at least 125')
    if not sigma >= 0:
        raise ValueError('`sigma` must be nonnegative')
    signal = np.resize(default_beta(BASE_PATTERN_LENGTH), p)
    if sigma > 0:
        signal = signal + np.sqrt(sigma) * rng_from_seed(seed).standard_normal(p)
    return signal


def gen_two_class(n: int, p: int, separation: float, seed: int) -> Dataset:
    """Generates two balanced Gaussian classes with labels `-1` and `+1`, whose means differ by `separation` along the
    normalized `default_beta(p)` direction (the first coordinate if `p < 125`).

    Raises:
        ValueError: `n` must be positive and even
    """
    if n < 2 or n % 2:
        raise ValueError('`n` must be positive and even')
    rng = rng_from_seed(seed)
    y = rng.permutation(np.repeat([1.0, -1.0], n // 2))
    if p >= 125:
        direction = default_beta(p) / np.linalg.norm(default_beta(p))
    else:
        direction = np.eye(p)[0]
    X = rng.standard_normal((n, p)) + 0.5 * separation * y[:, np.newaxis] * direction
    return Dataset(X, y)


def perceptron_separable(X, y, max_epochs: int = 1000) -> bool:
    """Checks linear separability (with intercept) by running the perceptron until an epoch without mistakes.

    A `False` result means no separating hyperplane was found within `max_epochs` epochs.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    Z = np.hstack([X, np.ones((X.shape[0], 1))]) * y[:, np.newaxis]
    weights = np.zeros(Z.shape[1])
    for _ in range(max_epochs):
        mistakes = 0
        for row in Z:
            if row @ weights <= 0.0:
                weights += row
                mistakes += 1
        if mistakes == 0:
            return True
    return False


def standardize(ds: Dataset, include_y: bool = True) -> Dataset:
    """Returns a copy of `ds` whose columns have zero mean and unit (population) variance, together with the
    `StandardizeTransform` for held-out data.

    Columns with zero variance are left as zeros; they are logged and listed in `Dataset.zero_variance_columns`.

    Args:
        ds: The `Dataset`.
        include_y: Whether to standardize `y` as well. Labels and pure signals should be left alone.
    """
    x_mean = x_scale = None
    X = ds.X
    zero_variance = ()
    if X is not None:
        x_mean = X.mean(axis=0)
        x_scale = X.std(axis=0)
        zero_variance = tuple(int(j) for j in np.flatnonzero(x_scale == 0.0))
        if zero_variance:
            _logger.warning('columns %s have zero variance and are set to zero', list(zero_variance))
            x_scale = np.where(x_scale == 0.0, 1.0, x_scale)
    y_mean, y_scale = 0.0, 1.0
    if include_y and ds.y is not None:
        y_mean = float(ds.y.mean())
        y_scale = float(ds.y.std()) or 1.0
    transform = StandardizeTransform(x_mean, x_scale, y_mean, y_scale)
    X_out, y_out = transform.apply(X, ds.y)
    return Dataset(X_out, y_out, ds.feature_names, True, transform, zero_variance)


def kfold(n: int, k: int, seed: int) -> FoldPlan:
    """Assigns `n` observations to `k` folds in random order, such that fold sizes differ by at most one.

    Raises:
        ValueError: `2 <= k <= n` must hold
    """
    if not 2 <= k <= n:
        raise ValueError(f'Cannot split {n} observations into {k} folds')
    assignments = rng_from_seed(seed).permutation(n) % k
    assignments.flags.writeable = False
    return FoldPlan(k, assignments)


def _parse_column(values: pd.Series, column: Union[str, int], line_offset: int) -> np.ndarray:
    try:
        parsed = np.asarray(values.to_numpy(), dtype=np.float64)
    except ValueError:
        parsed = None
    if parsed is not None and np.all(np.isfinite(parsed)):
        return parsed
    for row, cell in enumerate(values):
        try:
            number = float(cell)
        except ValueError:
            number = None
        if number is None or not np.isfinite(number):
            raise DataFormatException(f'Line {row + line_offset}: column {column!r} holds the non-numeric value '
                                      f'{cell!r}', row + line_offset, column)
    raise DataFormatException(f'Column {column!r} could not be parsed', column=column)


def load_csv(path: str, has_header: bool = False, response_column: Optional[Union[str, int]] = None) -> Dataset:
    """Reads a comma separated file with one observation per row.

    Args:
        path: The file path.
        has_header: Whether the first line names the columns.
        response_column: Name or 0-based index of the response column. Without it, a single column file is read as a
            pure signal (`Dataset.y` set, `Dataset.X` absent) and a wider file as a design matrix.

    Returns:
        A `Dataset`.

    Raises:
        OSError: The file cannot be read
        DataFormatException: A row has the wrong number of fields or a cell is not a finite number
    """
    try:
        frame = pd.read_csv(path, header=0 if has_header else None, dtype=str, keep_default_na=False,
                            skipinitialspace=True, encoding='utf-8')
    except pd.errors.EmptyDataError as ex:
        raise DataFormatException(f'{path} holds no data') from ex
    except pd.errors.ParserError as ex:
        match = re.search(r'line (\d+)', str(ex))
        line = int(match.group(1)) if match else None
        raise DataFormatException(f'{path}: malformed row ({ex})', line) from ex
    if frame.shape[0] == 0:
        raise DataFormatException(f'{path} holds no data')
    line_offset = 2 if has_header else 1
    short_rows = np.flatnonzero(frame.isna().any(axis=1).to_numpy())
    if short_rows.shape[0]:
        line = int(short_rows[0]) + line_offset
        raise DataFormatException(f'{path}: line {line} has too few fields', line)

    columns = [_parse_column(frame[name], name if has_header else index, line_offset)
               for index, name in enumerate(frame.columns)]
    names = tuple(str(name) for name in frame.columns) if has_header else None

    if response_column is None:
        if len(columns) == 1:
            return Dataset(None, columns[0])
        return Dataset(np.column_stack(columns), None, names)
    if isinstance(response_column, str):
        if names is None or response_column not in names:
            raise DataFormatException(f'{path} has no column {response_column!r}', column=response_column)
        response = names.index(response_column)
    else:
        response = int(response_column)
        if not 0 <= response < len(columns):
            raise DataFormatException(f'{path} has no column {response}', column=response)
    features = [column for index, column in enumerate(columns) if index != response]
    feature_names = None if names is None else tuple(name for index, name in enumerate(names) if index != response)
    X = np.column_stack(features) if features else None
    return Dataset(X, columns[response], feature_names)


def write_csv(path: str, values, header=None) -> None:
    """Writes a vector (one value per line) or a matrix with round-trip float formatting.

    Args:
        path: The file path.
        values: A vector or a 2-dimensional array.
        header: Optional column names.

    Raises:
        OSError: The file cannot be written
    """
    values = np.asarray(values, dtype=np.float64)
    frame = pd.DataFrame(values.reshape(values.shape[0], -1) if values.ndim == 1 else values)
    frame.to_csv(path, index=False, header=list(header) if header is not None else False, float_format='%.17g',
                 encoding='utf-8')
