"""Acceptance gate: every criterion below runs at its stated tolerance and
prints one PASS/FAIL line (run with ``pytest -s`` to see them live)."""

import functools
import itertools
import json
import math
import time

import numpy as np

from conftest import (
    quadrature_d2,
    rand_column,
    rand_histogram,
    rand_interval,
    rand_modal,
    rand_qf,
    rand_table,
)
from distrostats import (
    DistributionalTable,
    Point,
    barycenter,
    cluster,
    codeviance,
    codeviance_expanded,
    correlation,
    decompose,
    distance_squared,
    inertia_to,
    invert_spd,
    lower,
    mahalanobis_same_shape,
    mahalanobis_wasserstein,
    pairwise_inertia,
    summarize,
)
from distrostats.cli import run_command
from test_clustering import enumeration_optimum


def criterion(number, description):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            start = time.perf_counter()
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"ACCEPTANCE {number:02d} FAIL: {description}")
                raise
            elapsed = time.perf_counter() - start
            print(f"ACCEPTANCE {number:02d} PASS: {description} ({elapsed:.2f}s)")

        return wrapper

    return deco


@criterion(1, "decomposition identity on 1000 random histogram pairs (1e-9 rel, <5s)")
def test_criterion_01_decomposition_identity():
    rng = np.random.default_rng(1001)
    start = time.perf_counter()
    for _ in range(1000):
        a = lower(rand_histogram(rng, max_bins=12))
        b = lower(rand_histogram(rng, max_bins=12))
        parts = decompose(a, b)
        direct = distance_squared(a, b)
        assert parts.location >= 0.0 and parts.size >= 0.0 and parts.shape >= 0.0
        total = parts.location + parts.size + parts.shape
        assert abs(total - direct) <= 1e-9 * max(1e-12, direct)
    assert time.perf_counter() - start < 5.0


@criterion(2, "exact distance matches 1e5-node midpoint quadrature on 100 pairs (1e-4 rel, <10s)")
def test_criterion_02_quadrature_oracle():
    rng = np.random.default_rng(1002)
    start = time.perf_counter()
    for _ in range(100):
        a = lower(rand_modal(rng))
        b = lower(rand_modal(rng))
        exact = distance_squared(a, b)
        approx = quadrature_d2(a, b, nodes=100_000)
        assert abs(exact - approx) <= 1e-4 * max(1e-12, exact)
    assert time.perf_counter() - start < 10.0


@criterion(3, "pairwise inertia equals 2n times centered sum of squares on 100 columns (1e-9 rel)")
def test_criterion_03_pairwise_inertia_identity():
    rng = np.random.default_rng(1003)
    for _ in range(100):
        n = int(rng.integers(1, 31))
        col = rand_column(rng, n, mixed=True, max_bins=8)
        pairwise = pairwise_inertia(col)
        ss = inertia_to(col, barycenter(col))
        assert abs(pairwise - 2 * n * ss) <= 1e-9 * max(1.0, pairwise)


@criterion(4, "Huygens within/between split on 100 random column partitions (1e-9 rel)")
def test_criterion_04_huygens_decomposition():
    rng = np.random.default_rng(1004)
    for _ in range(100):
        n = int(rng.integers(4, 20))
        col = rand_column(rng, n, mixed=True, max_bins=6)
        groups = rng.integers(0, int(rng.integers(2, 5)), n)
        global_bary = barycenter(col)
        total = inertia_to(col, global_bary)
        within = 0.0
        between = 0.0
        for g in np.unique(groups):
            sub = [col[i] for i in np.flatnonzero(groups == g)]
            sub_bary = barycenter(sub)
            within += inertia_to(sub, sub_bary)
            between += len(sub) * distance_squared(sub_bary, global_bary)
        assert abs(total - (within + between)) <= 1e-9 * max(1.0, total)


@criterion(5, "variability axioms: nonnegative, exactly 0 on constant columns, |h| shrinking (1e-9)")
def test_criterion_05_variability_axioms():
    rng = np.random.default_rng(1005)
    for _ in range(50):
        col = rand_column(rng, int(rng.integers(1, 12)), mixed=True)
        assert summarize(col).ss >= 0.0
    for n in (1, 2, 3, 5, 8):
        qf = lower(rand_modal(rng))
        s = summarize([qf] * n)
        assert s.ss == 0.0 and s.std == 0.0
        s_point = summarize([lower(Point(0.1))] * n)
        assert s_point.ss == 0.0 and s_point.std == 0.0
    for _ in range(20):
        col = rand_column(rng, int(rng.integers(2, 9)), mixed=True)
        base = summarize(col).std
        for h in (-2.0, 0.5, 3.0):
            k = float(rng.uniform(-3, 3))
            scaled = summarize([qf.affine(h, k) for qf in col]).std
            assert abs(scaled - abs(h) * base) <= 1e-9 * max(1.0, base)


@criterion(6, "all-point tables reduce to textbook population formulas (1e-12)")
def test_criterion_06_classical_reduction():
    rng = np.random.default_rng(1006)
    for _ in range(20):
        n = int(rng.integers(3, 25))
        data = rng.uniform(-20, 20, size=(n, 2))
        cols = [[lower(Point(v)) for v in data[:, j]] for j in range(2)]
        for j in range(2):
            s = summarize(cols[j])
            mean = float(np.mean(data[:, j]))
            std = float(np.std(data[:, j]))
            assert abs(s.barycenter_mean - mean) <= 1e-12 * max(1.0, abs(mean))
            assert abs(s.std - std) <= 1e-12 * max(1.0, std)
        cov = codeviance(cols[0], cols[1]) / n
        classical_cov = float(np.cov(data.T, bias=True)[0, 1])
        assert abs(cov - classical_cov) <= 1e-12 * max(1.0, abs(classical_cov))
        r = correlation(cols[0], cols[1])
        classical_r = float(np.corrcoef(data.T)[0, 1])
        assert abs(r - classical_r) <= 1e-12
        a = invert_spd(np.cov(data.T, bias=True))
        i, j = 0, n - 1
        d = mahalanobis_wasserstein(
            [cols[0][i], cols[1][i]], [cols[0][j], cols[1][j]], a
        )
        diff = data[i] - data[j]
        classical_d = math.sqrt(diff @ a.entries @ diff)
        assert abs(d - classical_d) <= 1e-12 * max(1.0, classical_d)


@criterion(7, "codeviance expansion (1e-9 rel, 50 pairs) and uniform same-shape simplification")
def test_criterion_07_codeviance_expansion():
    rng = np.random.default_rng(1007)
    for _ in range(50):
        n = int(rng.integers(2, 10))
        y = rand_column(rng, n, mixed=True, max_bins=6)
        z = rand_column(rng, n, mixed=True, max_bins=6)
        direct = codeviance(y, z)
        expanded = codeviance_expanded(y, z)
        assert abs(direct - expanded) <= 1e-9 * max(1.0, abs(direct))
    for _ in range(20):
        n = int(rng.integers(2, 10))
        y = [lower(rand_interval(rng)) for _ in range(n)]
        z = [lower(rand_interval(rng)) for _ in range(n)]
        mu_y = np.array([q.mean() for q in y])
        mu_z = np.array([q.mean() for q in z])
        s_y = np.array([q.std() for q in y])
        s_z = np.array([q.std() for q in z])
        simplified = (np.sum(mu_y * mu_z) - n * mu_y.mean() * mu_z.mean()) + (
            np.sum(s_y * s_z) - n * s_y.mean() * s_z.mean()
        )
        direct = codeviance(y, z)
        assert abs(direct - simplified) <= 1e-12 * max(1.0, abs(direct))


@criterion(8, "correlation bound |r| <= 1 + 1e-9 on 500 pairs and r(y,y) = 1")
def test_criterion_08_correlation_bound():
    rng = np.random.default_rng(1008)
    for _ in range(500):
        n = int(rng.integers(2, 8))
        y = rand_column(rng, n, mixed=True, max_bins=4)
        z = rand_column(rng, n, mixed=True, max_bins=4)
        try:
            r = correlation(y, z)
        except Exception:
            continue  # degenerate random column; bound does not apply
        assert abs(r) <= 1.0 + 1e-9
    for _ in range(20):
        y = rand_column(rng, int(rng.integers(2, 8)))
        assert abs(correlation(y, y) - 1.0) <= 1e-12


@criterion(9, "Mahalanobis reductions: identity weights (1e-12) and same-shape form (1e-9)")
def test_criterion_09_mahalanobis_reductions():
    rng = np.random.default_rng(1009)
    for _ in range(200):
        p = int(rng.integers(1, 4))
        xi = [lower(rand_modal(rng, max_bins=4)) for _ in range(p)]
        xj = [lower(rand_modal(rng, max_bins=4)) for _ in range(p)]
        d = mahalanobis_wasserstein(xi, xj, np.eye(p))
        expected = math.sqrt(sum(distance_squared(a, b) for a, b in zip(xi, xj)))
        assert abs(d - expected) <= 1e-12 * max(1.0, expected)
    for _ in range(50):
        p = int(rng.integers(2, 4))
        base = rng.normal(size=(p, p))
        a = base @ base.T + p * np.eye(p)
        xi = [lower(rand_interval(rng)) for _ in range(p)]
        xj = [lower(rand_interval(rng)) for _ in range(p)]
        general = mahalanobis_wasserstein(xi, xj, a)
        simplified = mahalanobis_same_shape(xi, xj, a)
        assert abs(general - simplified) <= 1e-9 * max(1.0, general)


@criterion(10, "clustering: monotone criterion, exact Q at k=1 and k=n, 95/100 exact small optima (<60s)")
def test_criterion_10_clustering():
    rng = np.random.default_rng(1010)
    start = time.perf_counter()
    # monotone descent inside every restart
    for _ in range(20):
        table = rand_table(rng, n=int(rng.integers(5, 11)), p=int(rng.integers(1, 3)), max_bins=4)
        res = cluster(
            table,
            k=int(rng.integers(2, 4)),
            restarts=1,
            max_iter=50,
            seed=int(rng.integers(100_000)),
        )
        for prev, nxt in zip(res.criterion_history, res.criterion_history[1:]):
            assert nxt <= prev + 1e-12 * max(1.0, abs(prev))
    # exact edge quality values
    for _ in range(10):
        n = int(rng.integers(3, 8))
        table = rand_table(rng, n=n, p=1, max_bins=4)
        assert cluster(table, k=1, restarts=2, seed=7).quality == 0.0
        top = cluster(table, k=n, restarts=2, seed=7)
        assert top.criterion == 0.0 and top.quality == 1.0
    # exhaustive small-instance optimality
    hits = 0
    for _ in range(100):
        n = int(rng.integers(4, 9))
        k = int(rng.integers(2, 4))
        p = int(rng.integers(1, 3))
        table = rand_table(rng, n=n, p=p, max_bins=4)
        res = cluster(table, k=k, restarts=64, max_iter=50, seed=int(rng.integers(100_000)))
        best = enumeration_optimum(table.quantile_columns(), k)
        if abs(res.criterion - best) <= 1e-9 * max(1.0, best):
            hits += 1
    assert hits >= 95, f"only {hits}/100 matched the enumeration optimum"
    assert time.perf_counter() - start < 60.0


@criterion(11, "barycenter minimality against 20 perturbed centers on 50 columns (strict)")
def test_criterion_11_barycenter_minimality():
    rng = np.random.default_rng(1011)
    for _ in range(50):
        col = rand_column(rng, int(rng.integers(2, 10)), mixed=True, max_bins=6)
        center = barycenter(col)
        base = inertia_to(col, center)
        for _ in range(20):
            mode = rng.integers(0, 3)
            if mode == 0:
                g = center.affine(1.0, float(rng.uniform(0.05, 2.0)) * (1 if rng.random() < 0.5 else -1))
            elif mode == 1:
                g = center.affine(float(rng.uniform(1.05, 2.0)), 0.0)
            else:
                g = barycenter([center, rand_qf(rng, max_bins=4)])
                if distance_squared(g, center) == 0.0:
                    continue
            assert inertia_to(col, g) > base


@criterion(12, "two identical CLI invocations with a fixed seed produce byte-identical reports")
def test_criterion_12_cli_determinism(tmp_path):
    rng = np.random.default_rng(1012)
    table = {
        "variables": [{"name": "a", "kind": "mixed"}, {"name": "b", "kind": "mixed"}],
        "individuals": [
            {
                "id": f"S{i}",
                "values": [
                    {
                        "kind": "histogram",
                        "bins": [[float(x), float(x) + 1.0, 0.5], [float(x) + 1.0, float(x) + 3.0, 0.5]],
                    },
                    {"kind": "point", "value": float(rng.uniform(-5, 5))},
                ],
            }
            for i, x in enumerate(rng.uniform(-10, 10, 7))
        ],
    }
    src = tmp_path / "table.json"
    src.write_text(json.dumps(table))
    invocations = [
        ["summary", "--input", str(src)],
        ["assoc", "--input", str(src), "--format", "csv"],
        ["dist", "--input", str(src), "--i", "S0", "--j", "S3", "--decompose"],
        ["barycenter", "--input", str(src), "--var", "a", "--bins", "8"],
        ["cluster", "--input", str(src), "-k", "3", "--restarts", "16", "--seed", "123"],
        ["cluster", "--input", str(src), "-k", "2", "--metric", "mahalanobis",
         "--standardize", "--restarts", "16", "--seed", "9"],
    ]
    for idx, argv in enumerate(invocations):
        out1 = tmp_path / f"r{idx}_1.bin"
        out2 = tmp_path / f"r{idx}_2.bin"
        assert run_command(argv + ["--output", str(out1)]) == 0
        assert run_command(argv + ["--output", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes(), argv
