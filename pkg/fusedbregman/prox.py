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

"""This module provides the closed-form proximal maps used by the split Bregman updates."""

import numpy as np


def soft_threshold(w, lam: float) -> np.ndarray:
    """Soft thresholding `T_lam`, the proximal map of `lam * |.|_1`, applied componentwise:
    `t_lam(w_i) = sgn(w_i) max(0, |w_i| - lam)`.

    Entries with `|w_i| <= lam` are returned as exactly `0.0` (never `-0.0` or a tiny residual).

    Example:
        ```python
        soft_threshold([2.0, -2.0, 1.0], 1.5)
        # array([ 0.5, -0.5,  0. ])
        ```

    Raises:
        ValueError: `lam` must be nonnegative
    """
    if not lam >= 0:
        raise ValueError('`lam` must be nonnegative')
    w = np.asarray(w, dtype=np.float64)
    return np.where(np.abs(w) <= lam, 0.0, w - np.sign(w) * lam)


def hinge_shrink(w, lam: float) -> np.ndarray:
    """Hinge shrinkage `S_lam`, the proximal map of `lam * x_+`, applied componentwise:

    ```
    s_lam(w) = w - lam   if w > lam
               0         if 0 <= w <= lam
               w         if w < 0
    ```

    Raises:
        ValueError: `lam` must be nonnegative
    """
    if not lam >= 0:
        raise ValueError('`lam` must be nonnegative')
    w = np.asarray(w, dtype=np.float64)
    return np.where(w > lam, w - lam, np.where(w < 0.0, w, 0.0))
