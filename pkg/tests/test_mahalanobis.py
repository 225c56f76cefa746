import math

import numpy as np
import pytest

from conftest import rand_interval, rand_modal, rand_qf
from distrostats import (
    Interval,
    InvalidMetricError,
    Point,
    ShapeMismatchError,
    SingularMatrixError,
    SpdMatrix,
    ValidationError,
    distance_squared,
    invert_spd,
    lower,
    mahalanobis_same_shape,
    mahalanobis_wasserstein,
)


# ---- SPD inversion


def test_invert_examples():
    inv = invert_spd(np.diag([2.0, 4.0]))
    assert np.allclose(inv.entries, np.diag([0.5, 0.25]), atol=1e-14)
    assert not inv.regularized
    eye = invert_spd(np.eye(3))
    assert np.array_equal(eye.entries, np.eye(3))


def test_invert_random_spd_residual():
    rng = np.random.default_rng(307)
    for _ in range(20):
        a = rng.normal(size=(5, 5))
        m = a @ a.T + np.eye(5)
        inv = invert_spd(m)
        assert np.max(np.abs(m @ inv.entries - np.eye(5))) <= 1e-8


def test_invert_asymmetric_rejected():
    with pytest.raises(ValidationError):
        SpdMatrix(entries=np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_invert_singular_paths():
    # indefinite symmetric matrix: no ridge of this size can fix it
    with pytest.raises(SingularMatrixError):
        invert_spd(np.array([[1.0, 2.0], [2.0, 1.0]]), ridge=1e-8)
    # PSD rank-deficient: a big enough ridge regularizes
    ones = np.ones((3, 3))
    inv = invert_spd(ones, ridge=1e-3)
    assert inv.regularized


# ---- Mahalanobis distance


def test_identity_matrix_reduces_to_componentwise_sum():
    rng = np.random.default_rng(311)
    for _ in range(50):
        p = int(rng.integers(1, 4))
        xi = [lower(rand_modal(rng, max_bins=5)) for _ in range(p)]
        xj = [lower(rand_modal(rng, max_bins=5)) for _ in range(p)]
        d = mahalanobis_wasserstein(xi, xj, np.eye(p))
        expected = math.sqrt(sum(distance_squared(a, b) for a, b in zip(xi, xj)))
        assert abs(d - expected) <= 1e-12 * max(1.0, expected)


def test_self_distance_and_symmetry():
    rng = np.random.default_rng(313)
    a = rng.normal(size=(3, 3))
    spd = SpdMatrix(entries=a @ a.T + np.eye(3))
    for _ in range(30):
        xi = [rand_qf(rng, max_bins=4) for _ in range(3)]
        xj = [rand_qf(rng, max_bins=4) for _ in range(3)]
        assert mahalanobis_wasserstein(xi, xi, spd) == 0.0
        assert mahalanobis_wasserstein(xi, xj, spd) == mahalanobis_wasserstein(xj, xi, spd)


def test_classical_mahalanobis_on_point_individuals():
    rng = np.random.default_rng(317)
    data = rng.normal(size=(40, 2)) @ np.array([[1.0, 0.4], [0.0, 0.8]]) + [1.0, -2.0]
    cov = np.cov(data, rowvar=False, bias=True)
    a = invert_spd(cov)
    i, j = 3, 17
    xi = [lower(Point(v)) for v in data[i]]
    xj = [lower(Point(v)) for v in data[j]]
    d = mahalanobis_wasserstein(xi, xj, a)
    diff = data[i] - data[j]
    classical = math.sqrt(diff @ a.entries @ diff)
    assert abs(d - classical) <= 1e-12 * max(1.0, classical)
    # the simplified same-shape form agrees too (points all share a shape)
    d2 = mahalanobis_same_shape(xi, xj, a)
    assert abs(d2 - classical) <= 1e-12 * max(1.0, classical)


def test_same_shape_matches_general_on_uniform_columns():
    rng = np.random.default_rng(331)
    for _ in range(30):
        p = int(rng.integers(2, 4))
        base = rng.normal(size=(p, p))
        a = SpdMatrix(entries=base @ base.T + p * np.eye(p))
        xi = [lower(rand_interval(rng)) for _ in range(p)]
        xj = [lower(rand_interval(rng)) for _ in range(p)]
        general = mahalanobis_wasserstein(xi, xj, a)
        simplified = mahalanobis_same_shape(xi, xj, a)
        assert abs(general - simplified) <= 1e-9 * max(1.0, general)
        with_moments = mahalanobis_same_shape(
            xi,
            xj,
            a,
            means=([q.mean() for q in xi], [q.mean() for q in xj]),
            stds=([q.std() for q in xi], [q.std() for q in xj]),
        )
        assert with_moments == simplified


def test_same_shape_self_distance_zero():
    rng = np.random.default_rng(337)
    xi = [lower(rand_interval(rng)) for _ in range(2)]
    assert mahalanobis_same_shape(xi, xi, np.eye(2)) == 0.0


def test_same_shape_validation():
    xi = [lower(Interval(0, 1))]
    xj = [lower(Point(0.5))]
    # a point mass is degenerate, so it does not break the shape check
    mahalanobis_same_shape(xi, xj, np.eye(1), check_shape=True)
    mixed_i = [lower(Interval(0, 1))]
    mixed_j = [
        lower(
            __import__("distrostats").Histogram(
                bins=[(0.0, 0.2, 0.8), (0.2, 3.0, 0.2)]
            )
        )
    ]
    with pytest.raises(ValidationError):
        mahalanobis_same_shape(mixed_i, mixed_j, np.eye(1), check_shape=True)


def test_dimension_mismatch_errors():
    xi = [lower(Point(0))]
    xj = [lower(Point(1)), lower(Point(2))]
    with pytest.raises(ShapeMismatchError):
        mahalanobis_wasserstein(xi, xj, np.eye(2))
    with pytest.raises(ShapeMismatchError):
        mahalanobis_same_shape(xi, xi, np.eye(1), means=([0.0, 1.0], [0.0]))


def test_non_psd_weight_matrix_detected():
    xi = [lower(Point(0)), lower(Point(0))]
    xj = [lower(Point(1)), lower(Point(0))]
    bad = SpdMatrix(entries=np.array([[-4.0, 0.0], [0.0, 1.0]]))
    with pytest.raises(InvalidMetricError):
        mahalanobis_wasserstein(xi, xj, bad)
