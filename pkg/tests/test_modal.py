import math

import numpy as np
import pytest
from scipy import stats as sps

from distrostats import (
    Discrete,
    Histogram,
    Interval,
    Parametric,
    Point,
    UnsupportedFamilyError,
    ValidationError,
    lower,
    parametric_families,
)


def test_interval_order_enforced():
    with pytest.raises(ValidationError):
        Interval(4, 2)


def test_point_must_be_finite():
    with pytest.raises(ValidationError):
        Point(float("inf"))


def test_histogram_weight_sum_tolerance():
    # off by exactly the tolerance: accepted and renormalized
    h = Histogram(bins=[(0, 1, 0.499999_5), (1, 3, 0.499999_5)])
    qf = lower(h)
    assert qf.t[1] == 0.5
    with pytest.raises(ValidationError):
        Histogram(bins=[(0, 1, 0.5), (1, 3, 0.6)])


def test_histogram_overlap_rejected():
    with pytest.raises(ValidationError) as err:
        Histogram(bins=[(0, 2, 0.5), (1, 3, 0.5)])
    assert "overlap" in str(err.value)


def test_histogram_zero_width_bin_is_atom():
    h = Histogram(bins=[(0, 1, 0.5), (2, 2, 0.5)])
    qf = lower(h)
    assert qf.segments == ((0.0, 0.5, 0.0, 1.0), (0.5, 1.0, 2.0, 2.0))


def test_histogram_unsorted_input_is_sorted():
    a = Histogram(bins=[(1, 3, 0.5), (0, 1, 0.5)])
    b = Histogram(bins=[(0, 1, 0.5), (1, 3, 0.5)])
    assert a.bins == b.bins


def test_histogram_nonpositive_weight_rejected():
    with pytest.raises(ValidationError):
        Histogram(bins=[(0, 1, 0.0), (1, 3, 1.0)])
    with pytest.raises(ValidationError):
        Histogram(bins=[(0, 1, -0.5), (1, 3, 1.5)])


def test_discrete_duplicate_atoms_rejected():
    with pytest.raises(ValidationError):
        Discrete(atoms=[(1, 0.5), (1, 0.5)])


def test_discrete_weight_sum_checked():
    with pytest.raises(ValidationError):
        Discrete(atoms=[(0, 0.3), (1, 0.3)])


def test_unknown_parametric_family():
    with pytest.raises(UnsupportedFamilyError):
        Parametric(family="cauchy", params={"loc": 0, "scale": 1})


def test_parametric_param_validation():
    with pytest.raises(ValidationError):
        Parametric(family="normal", params={"mu": 0.0, "sigma": -1.0})
    with pytest.raises(ValidationError):
        Parametric(family="normal", params={"mu": 0.0})
    with pytest.raises(ValidationError):
        Parametric(family="normal", params={"mu": 0.0, "sigma": 1.0, "extra": 2.0})


def test_parametric_families_registry():
    fams = parametric_families()
    assert "normal" in fams and "lognormal" in fams and "exponential" in fams


def test_parametric_resolution_minimum():
    p = Parametric(family="normal", params={"mu": 0.0, "sigma": 1.0})
    with pytest.raises(ValidationError):
        lower(p, resolution=1)
    qf = lower(p, resolution=2)
    assert qf.n_segments == 1


def test_normal_lowering_matches_quantiles():
    p = Parametric(family="normal", params={"mu": 3.0, "sigma": 2.0})
    qf = lower(p, resolution=400)
    for t in (0.1, 0.25, 0.5, 0.8, 0.975):
        assert abs(qf.evaluate(t) - sps.norm(3.0, 2.0).ppf(t)) < 1e-3
    # tails clamped to finite quantiles
    assert math.isfinite(qf.evaluate(0.0)) and math.isfinite(qf.evaluate(1.0))
    assert abs(qf.evaluate(0.0) - sps.norm(3.0, 2.0).ppf(1e-4)) < 1e-9
    assert abs(qf.evaluate(1.0) - sps.norm(3.0, 2.0).ppf(1 - 1e-4)) < 1e-9


def test_bounded_family_keeps_exact_endpoints():
    qf = lower(Parametric(family="uniform", params={"lo": 2.0, "hi": 5.0}), resolution=50)
    assert qf.evaluate(0.0) == 2.0
    assert qf.evaluate(1.0) == 5.0
    beta = lower(Parametric(family="beta", params={"alpha": 2.0, "beta": 3.0}), resolution=100)
    assert beta.evaluate(0.0) == 0.0
    assert beta.evaluate(1.0) == 1.0


def test_exponential_and_gamma_means():
    e = lower(Parametric(family="exponential", params={"rate": 2.0}), resolution=2000)
    assert abs(e.mean() - 0.5) < 5e-3
    g = lower(Parametric(family="gamma", params={"shape": 3.0, "rate": 2.0}), resolution=2000)
    assert abs(g.mean() - 1.5) < 5e-3


def test_lower_requires_modal_value():
    with pytest.raises(ValidationError):
        lower(3.5)  # type: ignore[arg-type]


def test_modal_values_are_immutable():
    p = Point(1.0)
    with pytest.raises(Exception):
        p.value = 2.0  # type: ignore[misc]
