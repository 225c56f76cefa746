"""Variability statistics of one distribution-valued variable: barycenter,
inertia, sum of squares, variance, standard deviation, standardization.

Conventions are population-style: sums of squares divide by n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateVariableError, EmptyInputError, ValidationError
from .metric import _square_integral
from .quantile import QuantileFunction, _aligned_arrays, _monotone_fixup

__all__ = [
    "VariableSummary",
    "barycenter",
    "inertia_to",
    "pairwise_inertia",
    "summarize",
    "standardize",
]


def _require_column(column: Sequence[QuantileFunction]) -> None:
    if len(column) == 0:
        raise EmptyInputError("column must contain at least one quantile function")


def _mean_rows(lo: np.ndarray, hi: np.ndarray, weights=None) -> tuple[np.ndarray, np.ndarray]:
    # Averaging offsets from the first row keeps the mean bit-exact when all
    # rows coincide, which downstream code relies on for exact zero spread.
    if weights is None:
        b_lo = lo[0] + np.mean(lo - lo[0], axis=0)
        b_hi = hi[0] + np.mean(hi - hi[0], axis=0)
    else:
        b_lo = lo[0] + weights @ (lo - lo[0])
        b_hi = hi[0] + weights @ (hi - hi[0])
    return b_lo, b_hi


def barycenter(
    column: Sequence[QuantileFunction], weights: Sequence[float] | None = None
) -> QuantileFunction:
    """Pointwise (weighted) mean of the quantile functions in ``column``.

    The mean of non-decreasing functions is non-decreasing, so the result
    is itself a quantile function. It minimizes the total squared distance
    to the column.
    """
    _require_column(column)
    w = None
    if weights is not None:
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != (len(column),):
            raise ValidationError("weights must match the column length")
        if np.any(w < 0.0) or not np.all(np.isfinite(w)) or np.sum(w) <= 0.0:
            raise ValidationError("weights must be nonnegative, finite, and not all zero")
        w = w / np.sum(w)
    grid, lo, hi = _aligned_arrays(list(column))
    b_lo, b_hi = _mean_rows(lo, hi, w)
    b_lo, b_hi = _monotone_fixup(b_lo, b_hi)
    return QuantileFunction(t=grid, q_lo=b_lo, q_hi=b_hi)


def inertia_to(column: Sequence[QuantileFunction], center: QuantileFunction) -> float:
    """Sum of squared distances from every column entry to ``center``."""
    _require_column(column)
    grid, lo, hi = _aligned_arrays(list(column) + [center])
    w = np.diff(grid)
    d_lo = lo[:-1] - lo[-1]
    d_hi = hi[:-1] - hi[-1]
    return float(np.sum(_square_integral(w, d_lo, d_hi, axis=1)))


def pairwise_inertia(column: Sequence[QuantileFunction]) -> float:
    """Sum of squared distances over all ordered pairs of the column.

    Equals ``2 * n * ss`` where ``ss`` is the centered sum of squares.
    """
    _require_column(column)
    grid, lo, hi = _aligned_arrays(list(column))
    w = np.diff(grid)
    total = 0.0
    for i in range(lo.shape[0]):
        d_lo = lo - lo[i]
        d_hi = hi - hi[i]
        total += float(np.sum(_square_integral(w, d_lo, d_hi, axis=1)))
    return total


@dataclass(frozen=True)
class VariableSummary:
    """Variability summary of one column: its barycenter, the barycenter's
    own mean and spread, and the column's sum of squares / variance /
    standard deviation about the barycenter."""

    barycenter: QuantileFunction
    barycenter_mean: float
    barycenter_std: float
    ss: float
    variance: float
    std: float
    n: int


def summarize(column: Sequence[QuantileFunction]) -> VariableSummary:
    """All variability statistics of a column in one pass."""
    _require_column(column)
    center = barycenter(column)
    ss = inertia_to(column, center)
    n = len(column)
    variance = ss / n
    return VariableSummary(
        barycenter=center,
        barycenter_mean=center.mean(),
        barycenter_std=center.std(),
        ss=ss,
        variance=variance,
        std=math.sqrt(max(variance, 0.0)),
        n=n,
    )


def standardize(column: Sequence[QuantileFunction]) -> list[QuantileFunction]:
    """Shift by the barycenter mean and scale by the column standard
    deviation, so the standardized column has barycenter mean 0 and
    standard deviation 1."""
    summary = summarize(column)
    if summary.std == 0.0:
        raise DegenerateVariableError("cannot standardize a column with zero spread")
    h = 1.0 / summary.std
    k = -summary.barycenter_mean / summary.std
    return [qf.affine(h, k) for qf in column]
