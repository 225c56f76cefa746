"""Codeviance, covariance and correlation between distribution-valued
variables, plus full association matrices.

The direct centered integral is the authoritative value; the expanded
form exists as a cross-validation path and for per-individual shape
diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateVariableError, EmptyInputError, ShapeMismatchError
from .metric import _product_integral, rho_qq
from .modal import DEFAULT_RESOLUTION
from .quantile import QuantileFunction, _aligned_arrays
from .stats import _mean_rows, barycenter
from .table import DistributionalTable

__all__ = [
    "AssociationMatrix",
    "codeviance",
    "codeviance_expanded",
    "covariance",
    "correlation",
    "association_matrix",
]


def _paired_arrays(y: Sequence[QuantileFunction], z: Sequence[QuantileFunction]):
    if len(y) != len(z):
        raise ShapeMismatchError(f"columns differ in length: {len(y)} vs {len(z)}")
    if len(y) == 0:
        raise EmptyInputError("columns must contain at least one quantile function")
    n = len(y)
    grid, lo, hi = _aligned_arrays(list(y) + list(z))
    w = np.diff(grid)
    return n, w, lo[:n], hi[:n], lo[n:], hi[n:]


def codeviance(y: Sequence[QuantileFunction], z: Sequence[QuantileFunction]) -> float:
    """Sum over individuals of the integral of the product of centered
    quantile functions (centered at the column barycenters)."""
    n, w, y_lo, y_hi, z_lo, z_hi = _paired_arrays(y, z)
    by_lo, by_hi = _mean_rows(y_lo, y_hi)
    bz_lo, bz_hi = _mean_rows(z_lo, z_hi)
    dy_lo = y_lo - by_lo
    dy_hi = y_hi - by_hi
    dz_lo = z_lo - bz_lo
    dz_hi = z_hi - bz_hi
    dy_mid = (dy_lo + dy_hi) / 2.0
    dz_mid = (dz_lo + dz_hi) / 2.0
    per_row = np.sum(w * (dy_lo * dz_lo + 4.0 * dy_mid * dz_mid + dy_hi * dz_hi), axis=1) / 6.0
    return float(np.sum(per_row))


def codeviance_expanded(y: Sequence[QuantileFunction], z: Sequence[QuantileFunction]) -> float:
    """Codeviance assembled from per-individual quantile correlations and
    moments instead of the direct integral.

    Matches :func:`codeviance` up to roundoff; useful both as a
    cross-check and because the intermediate correlations are
    interpretable shape diagnostics.
    """
    if len(y) != len(z):
        raise ShapeMismatchError(f"columns differ in length: {len(y)} vs {len(z)}")
    if len(y) == 0:
        raise EmptyInputError("columns must contain at least one quantile function")
    n = len(y)
    bar_y = barycenter(y)
    bar_z = barycenter(z)
    mu_bar_y, s_bar_y = bar_y.mean(), bar_y.std()
    mu_bar_z, s_bar_z = bar_z.mean(), bar_z.std()
    total = 0.0
    mean_part = 0.0
    for yi, zi in zip(y, z):
        s_iy, s_iz = yi.std(), zi.std()
        alpha = rho_qq(yi, zi)
        beta = rho_qq(zi, bar_y)
        gamma = rho_qq(yi, bar_z)
        total += alpha * s_iy * s_iz - beta * s_bar_y * s_iz - gamma * s_iy * s_bar_z
        mean_part += yi.mean() * zi.mean()
    delta = rho_qq(bar_y, bar_z)
    total += n * delta * s_bar_y * s_bar_z
    total += mean_part - n * mu_bar_y * mu_bar_z
    return float(total)


def covariance(y: Sequence[QuantileFunction], z: Sequence[QuantileFunction]) -> float:
    """Codeviance divided by n."""
    return codeviance(y, z) / len(y)


def correlation(y: Sequence[QuantileFunction], z: Sequence[QuantileFunction]) -> float:
    """Codeviance normalized by the two sums of squares; lies in [-1, 1]
    up to roundoff."""
    ss_yz = codeviance(y, z)
    ss_y = codeviance(y, y)
    ss_z = codeviance(z, z)
    if ss_y <= 0.0 or ss_z <= 0.0:
        raise DegenerateVariableError("correlation is undefined for a column with zero spread")
    return ss_yz / math.sqrt(ss_y * ss_z)


@dataclass(frozen=True)
class AssociationMatrix:
    """Symmetric codeviance, covariance and correlation matrices for the
    variables of a table. Correlation entries touching a zero-spread
    variable are NaN (reported downstream as missing)."""

    names: tuple[str, ...]
    ss: np.ndarray
    cov: np.ndarray
    corr: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.names)

    def __post_init__(self) -> None:
        for field_name in ("ss", "cov", "corr"):
            arr = np.asarray(getattr(self, field_name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, field_name, arr)


def association_matrix(
    table: DistributionalTable, resolution: int = DEFAULT_RESOLUTION
) -> AssociationMatrix:
    """All pairwise codeviances / covariances / correlations of a table."""
    columns = table.quantile_columns(resolution=resolution)
    p = table.p
    n = table.n
    ss = np.zeros((p, p))
    for h in range(p):
        for k in range(h, p):
            value = codeviance(columns[h], columns[k])
            ss[h, k] = value
            ss[k, h] = value
    cov = ss / n
    corr = np.full((p, p), np.nan)
    diag = np.diag(ss)
    for h in range(p):
        if diag[h] <= 0.0:
            continue
        corr[h, h] = 1.0
        for k in range(h + 1, p):
            if diag[k] <= 0.0:
                continue
            r = ss[h, k] / math.sqrt(diag[h] * diag[k])
            corr[h, k] = r
            corr[k, h] = r
    return AssociationMatrix(names=table.variable_names, ss=ss, cov=cov, corr=corr)
