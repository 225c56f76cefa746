"""Piecewise-linear quantile functions, the common representation for
distribution-valued observations.

A quantile function is stored as a strictly increasing probability grid
``t`` plus per-segment start and end values, so a jump between two
consecutive segments encodes an atom of probability mass while a flat
segment encodes a plateau of the CDF. Keeping everything piecewise linear
makes every downstream integral (means, variances, distances, cross
products) available in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, ValidationError

__all__ = ["QuantileFunction", "align", "align_many"]


def _readonly(values, dtype=np.float64) -> np.ndarray:
    out = np.array(values, dtype=dtype)
    out.setflags(write=False)
    return out


def _monotone_fixup(q_lo: np.ndarray, q_hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Interpolating inside a segment can break monotonicity by an ulp; a
    # running maximum over the interleaved endpoint sequence restores it.
    # Callers must only pass values that are already monotone up to roundoff.
    m = q_lo.shape[0]
    flat = np.empty(2 * m, dtype=np.float64)
    flat[0::2] = q_lo
    flat[1::2] = q_hi
    np.maximum.accumulate(flat, out=flat)
    return flat[0::2].copy(), flat[1::2].copy()


@dataclass(frozen=True, eq=False)
class QuantileFunction:
    """Non-decreasing piecewise-linear map from [0, 1] to the real line.

    Segment ``k`` is linear on ``[t[k], t[k+1]]``, rising from ``q_lo[k]``
    to ``q_hi[k]``. Across a boundary the next ``q_lo`` may exceed the
    previous ``q_hi`` (a value jump, i.e. an atom). Instances are immutable
    and safe to share between workers.
    """

    t: np.ndarray
    q_lo: np.ndarray
    q_hi: np.ndarray

    def __post_init__(self) -> None:
        t = _readonly(self.t)
        q_lo = _readonly(self.q_lo)
        q_hi = _readonly(self.q_hi)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "q_lo", q_lo)
        object.__setattr__(self, "q_hi", q_hi)
        if t.ndim != 1 or q_lo.ndim != 1 or q_hi.ndim != 1:
            raise ValidationError("quantile function arrays must be one dimensional")
        if t.shape[0] < 2 or q_lo.shape[0] != t.shape[0] - 1 or q_hi.shape[0] != t.shape[0] - 1:
            raise ValidationError(
                "breakpoint grid of length m+1 requires value arrays of length m >= 1"
            )
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(q_lo)) and np.all(np.isfinite(q_hi))):
            raise ValidationError("quantile function coordinates must be finite")
        if t[0] != 0.0 or t[-1] != 1.0:
            raise ValidationError("probability grid must start at 0 and end at 1")
        if np.any(np.diff(t) <= 0.0):
            raise ValidationError("probability grid must be strictly increasing (no zero-width segments)")
        if np.any(q_hi < q_lo):
            raise ValidationError("segment values must be non-decreasing (q_lo <= q_hi)")
        if q_lo.shape[0] > 1 and np.any(q_lo[1:] < q_hi[:-1]):
            raise ValidationError("values must be non-decreasing across segment boundaries")

    # ---- constructors -------------------------------------------------

    @classmethod
    def from_segments(cls, segments: Iterable[tuple[float, float, float, float]]) -> "QuantileFunction":
        """Build from ``(t_lo, t_hi, q_lo, q_hi)`` tuples covering [0, 1]."""
        segs = list(segments)
        if not segs:
            raise ValidationError("segment list must not be empty")
        arr = np.asarray(segs, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] != 4:
            raise ValidationError("each segment must be a (t_lo, t_hi, q_lo, q_hi) tuple")
        t_lo, t_hi = arr[:, 0], arr[:, 1]
        if np.any(t_lo[1:] != t_hi[:-1]):
            raise ValidationError("segments must be contiguous in probability")
        t = np.concatenate([t_lo, t_hi[-1:]])
        return cls(t=t, q_lo=arr[:, 2], q_hi=arr[:, 3])

    @classmethod
    def constant(cls, value: float) -> "QuantileFunction":
        """Quantile function of a point mass at ``value``."""
        return cls(t=np.array([0.0, 1.0]), q_lo=np.array([float(value)]), q_hi=np.array([float(value)]))

    # ---- basic queries -------------------------------------------------

    @property
    def n_segments(self) -> int:
        return self.q_lo.shape[0]

    @property
    def segments(self) -> tuple[tuple[float, float, float, float], ...]:
        return tuple(
            (float(self.t[k]), float(self.t[k + 1]), float(self.q_lo[k]), float(self.q_hi[k]))
            for k in range(self.n_segments)
        )

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.t)

    def __repr__(self) -> str:  # keep array noise out of tracebacks
        return (
            f"QuantileFunction({self.n_segments} segments, "
            f"values in [{float(self.q_lo[0])!r}, {float(self.q_hi[-1])!r}])"
        )

    def evaluate(self, t):
        """Value at probability ``t`` (scalar or array), right-continuous at
        interior breakpoints."""
        tq = np.asarray(t, dtype=np.float64)
        if np.any(tq < 0.0) or np.any(tq > 1.0):
            raise DomainError("probability argument must lie in [0, 1]")
        idx = np.searchsorted(self.t, tq, side="right") - 1
        idx = np.clip(idx, 0, self.n_segments - 1)
        width = self.t[idx + 1] - self.t[idx]
        frac = np.clip((tq - self.t[idx]) / width, 0.0, 1.0)
        val = self.q_lo[idx] * (1.0 - frac) + self.q_hi[idx] * frac
        if np.ndim(t) == 0:
            return float(val)
        return val

    def mean(self) -> float:
        """Exact integral of the quantile function over [0, 1]."""
        w = np.diff(self.t)
        return float(np.sum(w * (self.q_lo + self.q_hi)) / 2.0)

    def std(self) -> float:
        """Standard deviation, via the centered square integral (exact)."""
        w = np.diff(self.t)
        mu = self.mean()
        lo = self.q_lo - mu
        hi = self.q_hi - mu
        var = float(np.sum(w * (lo * lo + lo * hi + hi * hi)) / 3.0)
        return math.sqrt(max(var, 0.0))

    # ---- transforms ----------------------------------------------------

    def affine(self, h: float, k: float) -> "QuantileFunction":
        """Quantile function of ``h * Y + k``.

        For ``h < 0`` the distribution is reflected, so segments are
        reversed (and endpoints swapped) to keep the result non-decreasing.
        """
        h = float(h)
        k = float(k)
        if not (math.isfinite(h) and math.isfinite(k)):
            raise ValidationError("affine coefficients must be finite")
        if h == 0.0:
            return QuantileFunction.constant(k)
        if h > 0.0:
            return QuantileFunction(t=self.t, q_lo=h * self.q_lo + k, q_hi=h * self.q_hi + k)
        t = (1.0 - self.t)[::-1]
        t = t.copy()
        t[0] = 0.0
        t[-1] = 1.0
        return QuantileFunction(
            t=t,
            q_lo=(h * self.q_hi + k)[::-1],
            q_hi=(h * self.q_lo + k)[::-1],
        )


def _refine(qf: QuantileFunction, grid: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Endpoint arrays of ``qf`` re-expressed on ``grid``.

    ``grid`` must contain every breakpoint of ``qf``, so each refined
    segment falls inside exactly one original segment and jumps are kept
    intact. Returns raw (lo, hi) arrays without monotonicity fixup.
    """
    idx = np.searchsorted(qf.t, grid[:-1], side="right") - 1
    idx = np.clip(idx, 0, qf.n_segments - 1)
    width = qf.t[idx + 1] - qf.t[idx]
    f0 = (grid[:-1] - qf.t[idx]) / width
    f1 = (grid[1:] - qf.t[idx]) / width
    src_lo = qf.q_lo[idx]
    src_hi = qf.q_hi[idx]
    lo = src_lo * (1.0 - f0) + src_hi * f0
    hi = src_lo * (1.0 - f1) + src_hi * f1
    np.clip(lo, src_lo, src_hi, out=lo)
    np.clip(hi, src_lo, src_hi, out=hi)
    return lo, hi


def _union_grid(qfs: Sequence[QuantileFunction]) -> np.ndarray:
    return np.unique(np.concatenate([qf.t for qf in qfs]))


def _aligned_arrays(qfs: Sequence[QuantileFunction]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Shared grid plus stacked (n, m) lo/hi endpoint arrays for ``qfs``."""
    if not qfs:
        raise ValidationError("alignment requires at least one quantile function")
    grid = _union_grid(qfs)
    lo = np.empty((len(qfs), grid.shape[0] - 1))
    hi = np.empty_like(lo)
    for i, qf in enumerate(qfs):
        lo[i], hi[i] = _refine(qf, grid)
    return grid, lo, hi


def align_many(qfs: Sequence[QuantileFunction]) -> list[QuantileFunction]:
    """Equivalent representations of ``qfs`` on their common breakpoint grid."""
    grid, lo, hi = _aligned_arrays(qfs)
    out = []
    for i in range(lo.shape[0]):
        flo, fhi = _monotone_fixup(lo[i], hi[i])
        out.append(QuantileFunction(t=grid, q_lo=flo, q_hi=fhi))
    return out

def align(a: QuantileFunction, b: QuantileFunction) -> tuple[QuantileFunction, QuantileFunction]:
    """Re-express two quantile functions on the union of their breakpoints.

    Pointwise values are unchanged (up to an ulp at interpolated knots).
    """
    ra, rb = align_many([a, b])
    return ra, rb
