"""Shared random-input builders for the test suite.

All generators take an explicit ``numpy`` Generator so every test run is
reproducible; bin widths and weights are bounded away from zero so no
degenerate probability segments appear by accident.
"""

from __future__ import annotations

import numpy as np

from distrostats import (
    Discrete,
    DistributionalTable,
    Histogram,
    Interval,
    Point,
    lower,
)


def rand_histogram(rng, max_bins=12, lo=-10.0, hi=10.0):
    nb = int(rng.integers(1, max_bins + 1))
    edges = np.sort(rng.uniform(lo, hi, nb + 1))
    while np.any(np.diff(edges) < 1e-6):
        edges = np.sort(rng.uniform(lo, hi, nb + 1))
    w = rng.random(nb) + 0.05
    w = w / w.sum()
    return Histogram(bins=tuple((edges[i], edges[i + 1], w[i]) for i in range(nb)))


def rand_discrete(rng, max_atoms=6, lo=-10.0, hi=10.0):
    na = int(rng.integers(1, max_atoms + 1))
    xs = np.sort(rng.uniform(lo, hi, na))
    while np.any(np.diff(xs) < 1e-9):
        xs = np.sort(rng.uniform(lo, hi, na))
    w = rng.random(na) + 0.05
    w = w / w.sum()
    return Discrete(atoms=tuple((xs[i], w[i]) for i in range(na)))


def rand_interval(rng, lo=-10.0, hi=10.0):
    a, b = np.sort(rng.uniform(lo, hi, 2))
    return Interval(a, b)


def rand_modal(rng, max_bins=12):
    kind = rng.integers(0, 4)
    if kind == 0:
        return Point(float(rng.uniform(-10, 10)))
    if kind == 1:
        return rand_interval(rng)
    if kind == 2:
        return rand_histogram(rng, max_bins=max_bins)
    return rand_discrete(rng)


def rand_qf(rng, max_bins=12):
    return lower(rand_histogram(rng, max_bins=max_bins))


def rand_column(rng, n, mixed=False, max_bins=12):
    if mixed:
        return [lower(rand_modal(rng, max_bins=max_bins)) for _ in range(n)]
    return [rand_qf(rng, max_bins=max_bins) for _ in range(n)]


def rand_table(rng, n, p, max_bins=6):
    cells = tuple(tuple(rand_modal(rng, max_bins=max_bins) for _ in range(p)) for _ in range(n))
    names = tuple(f"v{j}" for j in range(p))
    return DistributionalTable(variable_names=names, cells=cells)


def quadrature_d2(a, b, nodes=100_000):
    """Midpoint-rule oracle for the squared distance."""
    ts = (np.arange(nodes) + 0.5) / nodes
    diff = a.evaluate(ts) - b.evaluate(ts)
    return float(np.mean(diff * diff))


def quadrature_product(a, b, nodes=100_000):
    """Midpoint-rule oracle for the inner product."""
    ts = (np.arange(nodes) + 0.5) / nodes
    return float(np.mean(a.evaluate(ts) * b.evaluate(ts)))
