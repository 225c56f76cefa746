"""Dynamic clustering of distributional tables: alternate assignment to
the nearest prototype with prototype recomputation as per-cluster
barycenters, under the plain or Mahalanobis-weighted metric, with
multi-restart and a deterministic seed policy.

Individuals are embedded in a feature space where the squared metric
distance is exactly the Euclidean one: on a shared breakpoint grid the
segmentwise product integral is a quadratic form with per-segment matrix
``(w/6) * [[2, 1], [1, 2]]``, whose Cholesky factor turns segment
endpoints into coordinates. Barycenters are linear, so prototype updates
commute with the embedding and the usual k-means descent argument
applies unchanged to both metrics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .association import codeviance
from .errors import (
    EmptyInputError,
    InvalidKError,
    ShapeMismatchError,
    ValidationError,
)
from .mahalanobis import DEFAULT_RIDGE, SpdMatrix, invert_spd, mahalanobis_wasserstein
from .metric import distance_squared
from .modal import DEFAULT_RESOLUTION
from .quantile import QuantileFunction, _monotone_fixup, _refine, _union_grid
from .stats import _mean_rows, barycenter
from .stats import standardize as _standardize_column
from .table import DistributionalTable

__all__ = [
    "Partition",
    "Prototype",
    "ClusteringResult",
    "assign",
    "update_prototypes",
    "cluster",
    "quality",
    "cross_tabulate",
]

_CRITERION_RTOL = 1e-10


@dataclass(frozen=True)
class Partition:
    """Per-individual cluster labels in ``[0, k)``."""

    assignments: tuple[int, ...]
    k: int

    def __post_init__(self) -> None:
        labels = tuple(int(a) for a in self.assignments)
        object.__setattr__(self, "assignments", labels)
        object.__setattr__(self, "k", int(self.k))
        if self.k < 1:
            raise ValidationError("partition needs at least one cluster")
        if any(a < 0 or a >= self.k for a in labels):
            raise ValidationError("cluster labels must lie in [0, k)")

    @property
    def n(self) -> int:
        return len(self.assignments)

    def members(self, c: int) -> tuple[int, ...]:
        return tuple(i for i, a in enumerate(self.assignments) if a == c)


@dataclass(frozen=True)
class Prototype:
    """One barycenter per variable, representing a cluster."""

    components: tuple[QuantileFunction, ...]

    def __post_init__(self) -> None:
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ValidationError("prototype needs at least one component")
        for c in comps:
            if not isinstance(c, QuantileFunction):
                raise ValidationError("prototype components must be quantile functions")


@dataclass(frozen=True)
class ClusteringResult:
    partition: Partition
    prototypes: tuple[Prototype, ...]
    criterion: float
    quality: float
    iterations: int
    restarts_run: int
    seed: int
    metric: str
    standardized: bool
    criterion_history: tuple[float, ...]
    metric_matrix: SpdMatrix | None = None


# ---- feature embedding ---------------------------------------------------


@dataclass
class _Space:
    grid: np.ndarray
    w: np.ndarray
    var_lo: np.ndarray  # (p, n, m) refined segment starts per variable
    var_hi: np.ndarray
    X: np.ndarray  # (n, p * 2m) feature rows


def _build_space(columns: Sequence[Sequence[QuantileFunction]], chol: np.ndarray | None) -> _Space:
    p = len(columns)
    n = len(columns[0])
    cells = [qf for col in columns for qf in col]
    grid = _union_grid(cells)
    m = grid.shape[0] - 1
    w = np.diff(grid)
    var_lo = np.empty((p, n, m))
    var_hi = np.empty((p, n, m))
    for j, col in enumerate(columns):
        for i, qf in enumerate(col):
            var_lo[j, i], var_hi[j, i] = _refine(qf, grid)
    # Cholesky of (w/6) [[2, 1], [1, 2]]: coordinates whose dot product is
    # the exact segmentwise product integral.
    c1 = np.sqrt(w / 6.0)
    z1 = c1 * (math.sqrt(2.0) * var_lo + var_hi / math.sqrt(2.0))
    z2 = (np.sqrt(w) / 2.0) * var_hi
    feats = np.concatenate([z1, z2], axis=2)  # (p, n, 2m)
    if chol is not None:
        feats = np.einsum("hk,knf->hnf", chol.T, feats)
    X = np.ascontiguousarray(np.moveaxis(feats, 0, 1).reshape(n, p * 2 * m))
    return _Space(grid=grid, w=w, var_lo=var_lo, var_hi=var_hi, X=X)


def _dist2(X: np.ndarray, P: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances (n, k), using explicit differences so
    exact ties stay exact."""
    n = X.shape[0]
    k = P.shape[0]
    out = np.empty((n, k))
    step = max(1, (1 << 23) // max(1, k * X.shape[1]))
    for s in range(0, n, step):
        diff = X[s : s + step, None, :] - P[None, :, :]
        out[s : s + step] = np.einsum("ikd,ikd->ik", diff, diff)
    return out


def _proto_feat(X: np.ndarray, idx: np.ndarray) -> np.ndarray:
    return X[idx].mean(axis=0)


def _lloyd(X: np.ndarray, init_idx: np.ndarray, k: int, max_iter: int):
    """One restart of the alternating scheme; returns the final
    assignment, prototype features, builder member sets, and the criterion
    after every assignment pass."""
    n = X.shape[0]
    P = X[np.asarray(init_idx)].copy()
    members = [np.array([i]) for i in init_idx]
    prev_assign = None
    prev_delta = None
    history: list[float] = []
    assignment = np.zeros(n, dtype=np.intp)
    for it in range(max_iter):
        d2 = _dist2(X, P)
        assignment = np.argmin(d2, axis=1)
        delta = float(d2[np.arange(n), assignment].sum())
        history.append(delta)
        if prev_assign is not None and np.array_equal(assignment, prev_assign):
            break
        if prev_delta is not None and abs(prev_delta - delta) <= _CRITERION_RTOL * max(
            abs(prev_delta), 1e-300
        ):
            break
        if it == max_iter - 1:
            break
        members = [np.flatnonzero(assignment == c) for c in range(k)]
        for c in range(k):
            if members[c].size:
                P[c] = _proto_feat(X, members[c])
        for c in range(k):
            if members[c].size:
                continue
            # reseed with the individual farthest from its own prototype,
            # restricted to donors that keep at least one member
            sizes = np.array([members[cc].size for cc in range(k)])
            diff = X - P[assignment]
            own = np.einsum("id,id->i", diff, diff)
            own[sizes[assignment] < 2] = -np.inf
            i_star = int(np.argmax(own))
            donor = int(assignment[i_star])
            members[donor] = members[donor][members[donor] != i_star]
            members[c] = np.array([i_star])
            assignment[i_star] = c
            P[c] = X[i_star]
            P[donor] = _proto_feat(X, members[donor])
        prev_assign = assignment
        prev_delta = delta
    return assignment, P, members, history


def _prototype_from_members(space: _Space, idx: np.ndarray) -> Prototype:
    comps = []
    for j in range(space.var_lo.shape[0]):
        b_lo, b_hi = _mean_rows(space.var_lo[j][idx], space.var_hi[j][idx])
        b_lo, b_hi = _monotone_fixup(b_lo, b_hi)
        comps.append(QuantileFunction(t=space.grid, q_lo=b_lo, q_hi=b_hi))
    return Prototype(components=tuple(comps))


def _codeviance_matrix(columns: Sequence[Sequence[QuantileFunction]]) -> np.ndarray:
    p = len(columns)
    ss = np.zeros((p, p))
    for h in range(p):
        for k2 in range(h, p):
            value = codeviance(columns[h], columns[k2])
            ss[h, k2] = value
            ss[k2, h] = value
    return ss


def _weight_matrix(columns, metric: str, spd: SpdMatrix | None, ridge: float) -> SpdMatrix | None:
    if metric == "wasserstein":
        return None
    if metric != "mahalanobis":
        raise ValidationError(f"unknown metric {metric!r}; use 'wasserstein' or 'mahalanobis'")
    if spd is not None:
        return spd
    n = len(columns[0])
    cov = _codeviance_matrix(columns) / n
    return invert_spd(cov, ridge=ridge)


# ---- public operations ----------------------------------------------------


def _as_components(proto) -> tuple[QuantileFunction, ...]:
    if isinstance(proto, Prototype):
        return proto.components
    return tuple(proto)


def assign(
    rows: Sequence[Sequence[QuantileFunction]],
    prototypes: Sequence,
    metric: str = "wasserstein",
    spd: SpdMatrix | None = None,
) -> Partition:
    """Map every individual to its nearest prototype (squared distance,
    ties to the lowest cluster index). For the Mahalanobis metric, ``spd``
    must carry the weight (inverse covariance) matrix."""
    if len(rows) == 0:
        raise EmptyInputError("assignment needs at least one individual")
    if len(prototypes) == 0:
        raise EmptyInputError("assignment needs at least one prototype")
    proto_rows = [_as_components(pr) for pr in prototypes]
    p = len(rows[0])
    for row in list(rows) + proto_rows:
        if len(row) != p:
            raise ShapeMismatchError("rows and prototypes must share the variable count")
    chol = None
    if metric == "mahalanobis":
        if spd is None:
            raise ValidationError("the Mahalanobis metric requires an spd weight matrix")
        chol = np.linalg.cholesky(spd.entries)
    elif metric != "wasserstein":
        raise ValidationError(f"unknown metric {metric!r}; use 'wasserstein' or 'mahalanobis'")
    everything = [list(r) for r in rows] + [list(r) for r in proto_rows]
    columns = [[row[j] for row in everything] for j in range(p)]
    space = _build_space(columns, chol)
    n = len(rows)
    d2 = _dist2(space.X[:n], space.X[n:])
    labels = np.argmin(d2, axis=1)
    return Partition(assignments=tuple(int(a) for a in labels), k=len(prototypes))


def update_prototypes(
    rows: Sequence[Sequence[QuantileFunction]],
    partition: Partition,
    metric: str = "wasserstein",
    spd: SpdMatrix | None = None,
) -> tuple[Prototype, ...]:
    """Componentwise barycenter of every cluster.

    An empty cluster is reseeded with the individual farthest from its
    own cluster's new prototype (among clusters that can spare a member);
    the reassignment itself takes effect at the next assignment pass.
    """
    n = len(rows)
    if partition.n != n:
        raise ShapeMismatchError("partition length does not match the number of rows")
    p = len(rows[0])
    member_sets = [list(partition.members(c)) for c in range(partition.k)]
    protos: list[tuple[QuantileFunction, ...] | None] = [None] * partition.k

    def _bary(idx: Sequence[int]) -> tuple[QuantileFunction, ...]:
        return tuple(barycenter([rows[i][j] for i in idx]) for j in range(p))

    for c, idx in enumerate(member_sets):
        if idx:
            protos[c] = _bary(idx)

    def _delta(i: int, comps: tuple[QuantileFunction, ...]) -> float:
        if metric == "mahalanobis":
            return mahalanobis_wasserstein(rows[i], comps, spd) ** 2
        return sum(distance_squared(rows[i][j], comps[j]) for j in range(p))

    current = list(partition.assignments)
    for c in range(partition.k):
        if member_sets[c]:
            continue
        best_i, best_d = -1, -np.inf
        for i in range(n):
            donor = current[i]
            if len(member_sets[donor]) < 2:
                continue
            d = _delta(i, protos[donor])
            if d > best_d:
                best_i, best_d = i, d
        if best_i < 0:
            raise ValidationError("cannot repair empty cluster: no donor cluster has two members")
        donor = current[best_i]
        member_sets[donor].remove(best_i)
        member_sets[c] = [best_i]
        current[best_i] = c
        protos[c] = tuple(rows[best_i])
        protos[donor] = _bary(member_sets[donor])
    return tuple(Prototype(components=comps) for comps in protos)


def cluster(
    table: DistributionalTable,
    k: int,
    metric: str = "wasserstein",
    standardize: bool = False,
    restarts: int = 100,
    max_iter: int = 100,
    seed: int = 0,
    ridge: float = DEFAULT_RIDGE,
    resolution: int = DEFAULT_RESOLUTION,
) -> ClusteringResult:
    """Best-of-restarts dynamic clustering of a distributional table.

    Each restart starts from ``k`` distinct individuals drawn without
    replacement (one child seed per restart, spawned from ``seed``), then
    alternates assignment and barycenter updates until the assignment is
    stable, the criterion change falls below 1e-10 relative, or
    ``max_iter`` passes. For the Mahalanobis metric the inverse covariance
    is computed once from the full table and held fixed. Labels of the
    winning restart are renumbered in order of first occurrence.
    """
    n = table.n
    k = int(k)
    if k < 1 or k > n:
        raise InvalidKError(f"k must lie in [1, {n}], got {k}")
    restarts = int(restarts)
    max_iter = int(max_iter)
    if restarts < 1:
        raise ValidationError("restarts must be at least 1")
    if max_iter < 1:
        raise ValidationError("max_iter must be at least 1")
    seed = int(seed)
    if seed < 0 or seed >= 2**64:
        raise ValidationError("seed must be an unsigned 64-bit integer")
    columns = table.quantile_columns(resolution=resolution)
    if standardize:
        columns = [_standardize_column(col) for col in columns]
    weight = _weight_matrix(columns, metric, None, ridge)
    chol = np.linalg.cholesky(weight.entries) if weight is not None else None
    space = _build_space(columns, chol)
    X = space.X

    best = None
    children = np.random.SeedSequence(seed).spawn(restarts)
    for r in range(restarts):
        rng = np.random.default_rng(children[r])
        init_idx = rng.choice(n, size=k, replace=False)
        assignment, P, members, history = _lloyd(X, init_idx, k, max_iter)
        if best is None or history[-1] < best[3][-1]:
            best = (assignment, P, members, history)
    assignment, P, members, history = best

    # canonical labels: order of first occurrence, stale clusters last
    order: list[int] = []
    for a in assignment:
        if a not in order:
            order.append(int(a))
    for c in range(k):
        if c not in order:
            order.append(c)
    relabel = {old: new for new, old in enumerate(order)}
    labels = tuple(relabel[int(a)] for a in assignment)
    prototypes = tuple(_prototype_from_members(space, members[old]) for old in order)

    criterion = history[-1]
    global_feat = _proto_feat(X, np.arange(n))
    total = float(_dist2(X, global_feat[None, :]).sum())
    q = 0.0 if total == 0.0 else 1.0 - criterion / total
    return ClusteringResult(
        partition=Partition(assignments=labels, k=k),
        prototypes=prototypes,
        criterion=criterion,
        quality=q,
        iterations=len(history),
        restarts_run=restarts,
        seed=seed,
        metric=metric,
        standardized=bool(standardize),
        criterion_history=tuple(history),
        metric_matrix=weight,
    )


def quality(
    rows: Sequence[Sequence[QuantileFunction]],
    result: ClusteringResult,
) -> float:
    """Recompute the explained-criterion index ``1 - within / total`` for
    ``result`` on ``rows``, using the same metric for both sums."""
    n = len(rows)
    if result.partition.n != n:
        raise ShapeMismatchError("partition length does not match the number of rows")
    p = len(rows[0])
    columns = [[row[j] for row in rows] for j in range(p)]
    weight = result.metric_matrix
    if result.metric == "mahalanobis" and weight is None:
        weight = _weight_matrix(columns, "mahalanobis", None, DEFAULT_RIDGE)

    def _delta(row, comps) -> float:
        if result.metric == "mahalanobis":
            return mahalanobis_wasserstein(row, comps, weight) ** 2
        return sum(distance_squared(row[j], comps[j]) for j in range(p))

    within = sum(
        _delta(rows[i], result.prototypes[result.partition.assignments[i]].components)
        for i in range(n)
    )
    global_proto = tuple(barycenter(col) for col in columns)
    total = sum(_delta(rows[i], global_proto) for i in range(n))
    if total == 0.0:
        return 0.0
    return 1.0 - within / total


def cross_tabulate(a, b) -> np.ndarray:
    """Contingency counts between two partitions of the same individuals."""
    la = np.asarray(a.assignments if isinstance(a, Partition) else a, dtype=np.intp)
    lb = np.asarray(b.assignments if isinstance(b, Partition) else b, dtype=np.intp)
    if la.shape != lb.shape:
        raise ShapeMismatchError("partitions must cover the same individuals")
    if la.size == 0:
        raise EmptyInputError("partitions must not be empty")
    ka = (a.k if isinstance(a, Partition) else int(la.max()) + 1)
    kb = (b.k if isinstance(b, Partition) else int(lb.max()) + 1)
    out = np.zeros((ka, kb), dtype=np.int64)
    np.add.at(out, (la, lb), 1)
    return out
