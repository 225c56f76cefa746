"""Distribution-valued cell descriptions and their lowering to quantile
functions.

Five kinds of description are supported: a single point, an interval
(read as a uniform density), a histogram (mixture of uniforms), a
discrete weighted multi-set (mixture of point masses), and a parametric
density from a small registry of families. Each kind knows how to lower
itself to an exact or controllably approximated piecewise-linear
quantile function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy import stats as _scipy_stats

from .errors import UnsupportedFamilyError, ValidationError
from .quantile import QuantileFunction

__all__ = [
    "ModalValue",
    "Point",
    "Interval",
    "Histogram",
    "Discrete",
    "Parametric",
    "lower",
    "parametric_families",
]

# Weight vectors are renormalized when their sum is off by at most this
# much, and rejected otherwise.
WEIGHT_SUM_TOLERANCE = 1e-6

# Probability at which unbounded parametric tails are clamped.
TAIL_EPS = 1e-4

DEFAULT_RESOLUTION = 200


def _require_finite(name: str, *values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise ValidationError(f"{name}: coordinates must be finite")


def _normalized_weights(kind: str, weights: np.ndarray) -> np.ndarray:
    if np.any(~np.isfinite(weights)):
        raise ValidationError(f"{kind}: weights must be finite")
    if np.any(weights <= 0.0):
        raise ValidationError(f"{kind}: weights must be strictly positive")
    total = float(np.sum(weights))
    # tiny relative slack so decimal inputs sitting exactly on the boundary
    # (weights summing to 0.999999) are not rejected by representation error
    if abs(total - 1.0) > WEIGHT_SUM_TOLERANCE * (1.0 + 1e-9):
        raise ValidationError(
            f"{kind}: weights sum to {total!r}, expected 1 within {WEIGHT_SUM_TOLERANCE}"
        )
    if total != 1.0:
        weights = weights / total
    return weights


def _cumulative_grid(kind: str, weights: np.ndarray) -> np.ndarray:
    t = np.concatenate([[0.0], np.cumsum(weights)])
    t[-1] = 1.0
    if np.any(np.diff(t) <= 0.0):
        raise ValidationError(f"{kind}: a weight is too small to resolve as a probability segment")
    return t


class ModalValue:
    """Base class for distribution-valued cell descriptions."""

    kind: str = "modal"

    def to_quantile(self, resolution: int = DEFAULT_RESOLUTION) -> QuantileFunction:
        raise NotImplementedError


@dataclass(frozen=True)
class Point(ModalValue):
    """A single observed value (a point mass)."""

    value: float
    kind = "point"

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", float(self.value))
        _require_finite("point", self.value)

    def to_quantile(self, resolution: int = DEFAULT_RESOLUTION) -> QuantileFunction:
        return QuantileFunction.constant(self.value)


@dataclass(frozen=True)
class Interval(ModalValue):
    """An interval observation, read as a uniform density on [lo, hi]."""

    lo: float
    hi: float
    kind = "interval"

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        _require_finite("interval", self.lo, self.hi)
        if self.lo > self.hi:
            raise ValidationError(f"interval: lower bound {self.lo!r} exceeds upper bound {self.hi!r}")

    def to_quantile(self, resolution: int = DEFAULT_RESOLUTION) -> QuantileFunction:
        return QuantileFunction(
            t=np.array([0.0, 1.0]), q_lo=np.array([self.lo]), q_hi=np.array([self.hi])
        )


@dataclass(frozen=True)
class Histogram(ModalValue):
    """A weighted histogram: non-overlapping bins, each uniform inside.

    Bins are sorted on construction. Zero-width bins (lo == hi) are
    accepted and behave as atoms.
    """

    bins: tuple[tuple[float, float, float], ...]
    kind = "histogram"

    def __post_init__(self) -> None:
        try:
            bins = tuple(sorted((float(a), float(b), float(w)) for a, b, w in self.bins))
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"histogram: bins must be (lo, hi, weight) triples ({exc})") from None
        object.__setattr__(self, "bins", bins)
        if not bins:
            raise ValidationError("histogram: at least one bin is required")
        for lo, hi, w in bins:
            _require_finite("histogram", lo, hi, w)
            if lo > hi:
                raise ValidationError(f"histogram: bin [{lo!r}, {hi!r}) has lo > hi")
        for (_, prev_hi, _), (nxt_lo, nxt_hi, _) in zip(bins, bins[1:]):
            if nxt_lo < prev_hi:
                raise ValidationError(
                    f"histogram: bins overlap near [{nxt_lo!r}, {nxt_hi!r})"
                )
        _normalized_weights("histogram", np.array([w for _, _, w in self.bins]))

    def to_quantile(self, resolution: int = DEFAULT_RESOLUTION) -> QuantileFunction:
        arr = np.asarray(self.bins, dtype=np.float64)
        weights = _normalized_weights("histogram", arr[:, 2])
        t = _cumulative_grid("histogram", weights)
        return QuantileFunction(t=t, q_lo=arr[:, 0], q_hi=arr[:, 1])


@dataclass(frozen=True)
class Discrete(ModalValue):
    """A weighted multi-set of distinct values (mixture of point masses)."""

    atoms: tuple[tuple[float, float], ...]
    kind = "discrete"

    def __post_init__(self) -> None:
        try:
            atoms = tuple(sorted((float(x), float(w)) for x, w in self.atoms))
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"discrete: atoms must be (value, weight) pairs ({exc})") from None
        object.__setattr__(self, "atoms", atoms)
        if not atoms:
            raise ValidationError("discrete: at least one atom is required")
        for x, w in atoms:
            _require_finite("discrete", x, w)
        xs = np.array([x for x, _ in atoms])
        if np.any(np.diff(xs) == 0.0):
            raise ValidationError("discrete: atom values must be distinct")
        _normalized_weights("discrete", np.array([w for _, w in atoms]))

    def to_quantile(self, resolution: int = DEFAULT_RESOLUTION) -> QuantileFunction:
        arr = np.asarray(self.atoms, dtype=np.float64)
        weights = _normalized_weights("discrete", arr[:, 1])
        t = _cumulative_grid("discrete", weights)
        return QuantileFunction(t=t, q_lo=arr[:, 0], q_hi=arr[:, 0])


def _family_normal(p):
    if p["sigma"] <= 0:
        raise ValidationError("parametric normal: sigma must be > 0")
    return _scipy_stats.norm(loc=p["mu"], scale=p["sigma"])


def _family_lognormal(p):
    if p["sigma"] <= 0:
        raise ValidationError("parametric lognormal: sigma must be > 0")
    return _scipy_stats.lognorm(s=p["sigma"], scale=math.exp(p["mu"]))


def _family_exponential(p):
    if p["rate"] <= 0:
        raise ValidationError("parametric exponential: rate must be > 0")
    return _scipy_stats.expon(scale=1.0 / p["rate"])


def _family_gamma(p):
    if p["shape"] <= 0 or p["rate"] <= 0:
        raise ValidationError("parametric gamma: shape and rate must be > 0")
    return _scipy_stats.gamma(a=p["shape"], scale=1.0 / p["rate"])


def _family_beta(p):
    if p["alpha"] <= 0 or p["beta"] <= 0:
        raise ValidationError("parametric beta: alpha and beta must be > 0")
    return _scipy_stats.beta(a=p["alpha"], b=p["beta"])


def _family_uniform(p):
    if p["lo"] > p["hi"]:
        raise ValidationError("parametric uniform: lo must not exceed hi")
    return _scipy_stats.uniform(loc=p["lo"], scale=p["hi"] - p["lo"])


_FAMILIES = {
    "normal": (("mu", "sigma"), _family_normal),
    "lognormal": (("mu", "sigma"), _family_lognormal),
    "exponential": (("rate",), _family_exponential),
    "gamma": (("shape", "rate"), _family_gamma),
    "beta": (("alpha", "beta"), _family_beta),
    "uniform": (("lo", "hi"), _family_uniform),
}


def parametric_families() -> tuple[str, ...]:
    """Names of the supported parametric families."""
    return tuple(sorted(_FAMILIES))


@dataclass(frozen=True)
class Parametric(ModalValue):
    """A parametric density, lowered by sampling its quantile on an
    equal-probability knot grid (tails clamped at probability TAIL_EPS when
    unbounded)."""

    family: str
    params: Mapping[str, float]
    kind = "parametric"

    def __post_init__(self) -> None:
        family = str(self.family).lower()
        object.__setattr__(self, "family", family)
        if family not in _FAMILIES:
            raise UnsupportedFamilyError(
                f"parametric family {family!r} is not supported; known: {', '.join(parametric_families())}"
            )
        names, _ = _FAMILIES[family]
        try:
            params = {str(k): float(v) for k, v in dict(self.params).items()}
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"parametric {family}: parameters must be numeric ({exc})") from None
        object.__setattr__(self, "params", params)
        missing = [n for n in names if n not in params]
        extra = [n for n in params if n not in names]
        if missing or extra:
            raise ValidationError(
                f"parametric {family}: expected parameters {names}, "
                f"missing {missing or 'none'}, unexpected {extra or 'none'}"
            )
        for v in params.values():
            _require_finite(f"parametric {family}", v)
        self._dist()  # family-specific constraints are checked eagerly

    def _dist(self):
        _, make = _FAMILIES[self.family]
        return make(self.params)

    def to_quantile(self, resolution: int = DEFAULT_RESOLUTION) -> QuantileFunction:
        resolution = int(resolution)
        if resolution < 2:
            raise ValidationError("parametric lowering needs a resolution of at least 2 knots")
        dist = self._dist()
        knots = np.linspace(0.0, 1.0, resolution)
        q = np.asarray(dist.ppf(knots), dtype=np.float64)
        if not np.isfinite(q[0]):
            q[0] = float(dist.ppf(TAIL_EPS))
        if not np.isfinite(q[-1]):
            q[-1] = float(dist.ppf(1.0 - TAIL_EPS))
        if np.any(~np.isfinite(q)):
            raise ValidationError(f"parametric {self.family}: quantile values are not finite")
        np.maximum.accumulate(q, out=q)
        return QuantileFunction(t=knots, q_lo=q[:-1], q_hi=q[1:])


def lower(value: ModalValue, resolution: int = DEFAULT_RESOLUTION) -> QuantileFunction:
    """Lower any modal description to its quantile function.

    ``resolution`` only matters for parametric kinds, where it sets the
    number of equal-probability interpolation knots.
    """
    if not isinstance(value, ModalValue):
        raise ValidationError(f"expected a ModalValue, got {type(value).__name__}")
    return value.to_quantile(resolution=resolution)
