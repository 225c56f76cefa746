"""Symmetric positive-definite matrix inversion and the Mahalanobis
version of the distance between individuals described by several
distribution-valued variables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import linalg as _scipy_linalg

from .errors import (
    InvalidMetricError,
    ShapeMismatchError,
    SingularMatrixError,
    ValidationError,
)
from .metric import _product_integral, distance_squared, rho_qq
from .quantile import QuantileFunction, _aligned_arrays

__all__ = [
    "SpdMatrix",
    "invert_spd",
    "mahalanobis_wasserstein",
    "mahalanobis_same_shape",
]

_SYM_TOL = 1e-12
_RESIDUAL_TOL = 1e-8
DEFAULT_RIDGE = 1e-8


@dataclass(frozen=True)
class SpdMatrix:
    """A symmetric matrix intended to be positive definite.

    ``regularized`` is set when a ridge had to be added to make a
    factorization succeed.
    """

    entries: np.ndarray
    regularized: bool = False

    def __post_init__(self) -> None:
        arr = np.array(self.entries, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValidationError("matrix must be square")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("matrix entries must be finite")
        scale = max(1.0, float(np.max(np.abs(arr))))
        if float(np.max(np.abs(arr - arr.T))) > _SYM_TOL * scale:
            raise ValidationError("matrix is not symmetric within tolerance")
        arr = (arr + arr.T) / 2.0
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def _as_spd(m) -> SpdMatrix:
    return m if isinstance(m, SpdMatrix) else SpdMatrix(entries=np.asarray(m, dtype=np.float64))


def _try_invert(a: np.ndarray) -> np.ndarray | None:
    try:
        factor = _scipy_linalg.cho_factor(a, lower=True, check_finite=False)
    except _scipy_linalg.LinAlgError:
        return None
    inv = _scipy_linalg.cho_solve(factor, np.eye(a.shape[0]), check_finite=False)
    inv = (inv + inv.T) / 2.0
    residual = float(np.max(np.abs(a @ inv - np.eye(a.shape[0]))))
    if residual > _RESIDUAL_TOL:
        return None
    return inv


def invert_spd(m: SpdMatrix | np.ndarray, ridge: float = DEFAULT_RIDGE) -> SpdMatrix:
    """Invert via Cholesky; on failure retry once with a relative ridge
    (``ridge * mean(diagonal)``) added to the diagonal."""
    spd = _as_spd(m)
    ridge = float(ridge)
    if ridge < 0.0 or not math.isfinite(ridge):
        raise ValidationError("ridge must be a nonnegative finite number")
    inv = _try_invert(spd.entries)
    if inv is not None:
        return SpdMatrix(entries=inv, regularized=False)
    scale = float(np.mean(np.abs(np.diag(spd.entries))))
    if scale <= 0.0:
        scale = 1.0
    bumped = spd.entries + (ridge * scale) * np.eye(spd.dim)
    inv = _try_invert(bumped)
    if inv is None:
        raise SingularMatrixError(
            f"matrix is singular even after ridge {ridge!r} relative to the diagonal"
        )
    return SpdMatrix(entries=inv, regularized=True)


def _check_vectors(xi: Sequence[QuantileFunction], xj: Sequence[QuantileFunction], a: SpdMatrix) -> int:
    p = a.dim
    if len(xi) != p or len(xj) != p:
        raise ShapeMismatchError(
            f"individuals have {len(xi)} and {len(xj)} components, matrix expects {p}"
        )
    return p


def _finish(d2: float) -> float:
    tol = 1e-9 * max(1.0, abs(d2))
    if d2 < -tol:
        raise InvalidMetricError(f"quadratic form is negative ({d2!r}); weight matrix is not PSD")
    return math.sqrt(max(d2, 0.0))


def mahalanobis_wasserstein(
    xi: Sequence[QuantileFunction],
    xj: Sequence[QuantileFunction],
    a: SpdMatrix | np.ndarray,
) -> float:
    """Distance between two individuals: the quadratic form of the
    componentwise quantile-difference cross integrals under weights ``a``
    (typically an inverse covariance matrix)."""
    a = _as_spd(a)
    p = _check_vectors(xi, xj, a)
    grid, lo, hi = _aligned_arrays(list(xi) + list(xj))
    w = np.diff(grid)
    d_lo = lo[:p] - lo[p:]
    d_hi = hi[:p] - hi[p:]
    d_mid = (d_lo + d_hi) / 2.0
    # cross[h, k] = integral of diff_h * diff_k, Simpson-exact per segment
    cross = ((d_lo * w) @ d_lo.T + 4.0 * (d_mid * w) @ d_mid.T + (d_hi * w) @ d_hi.T) / 6.0
    d2 = float(np.sum(a.entries * cross))
    return _finish(d2)


def mahalanobis_same_shape(
    xi: Sequence[QuantileFunction],
    xj: Sequence[QuantileFunction],
    a: SpdMatrix | np.ndarray,
    means: tuple[Sequence[float], Sequence[float]] | None = None,
    stds: tuple[Sequence[float], Sequence[float]] | None = None,
    check_shape: bool = False,
) -> float:
    """Simplified distance valid when every component distribution shares
    one shape: cross terms reduce to products of mean and spread
    differences.

    ``means`` and ``stds`` may carry precomputed per-component moments as
    ``(for_xi, for_xj)`` pairs; they are derived from the inputs otherwise.
    """
    a = _as_spd(a)
    p = _check_vectors(xi, xj, a)
    if check_shape:
        pool = [qf for qf in list(xi) + list(xj) if qf.std() > 0.0]
        for u in range(len(pool)):
            for v in range(u + 1, len(pool)):
                if rho_qq(pool[u], pool[v]) < 1.0 - 1e-9:
                    raise ValidationError("components do not share a common shape")
    if means is None:
        mi = np.array([qf.mean() for qf in xi])
        mj = np.array([qf.mean() for qf in xj])
    else:
        mi = np.asarray(means[0], dtype=np.float64)
        mj = np.asarray(means[1], dtype=np.float64)
    if stds is None:
        si = np.array([qf.std() for qf in xi])
        sj = np.array([qf.std() for qf in xj])
    else:
        si = np.asarray(stds[0], dtype=np.float64)
        sj = np.asarray(stds[1], dtype=np.float64)
    for arr in (mi, mj, si, sj):
        if arr.shape != (p,):
            raise ShapeMismatchError("moment vectors must have one entry per component")
    d2 = 0.0
    for k in range(p):
        d2 += a.entries[k, k] * distance_squared(xi[k], xj[k])
    ds = si - sj
    dm = mi - mj
    for h in range(p):
        for k in range(h + 1, p):
            d2 += 2.0 * a.entries[h, k] * (ds[h] * ds[k] + dm[h] * dm[k])
    return _finish(d2)
