"""k-cluster partitioning of a patient population from its distance matrix.

The main route is k-medoids (alternating assign/update), which only needs
pairwise distances and so works for the tree metrics too. Several seeded runs
are combined by majority vote over canonically relabeled partitions.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, TextIO

import numpy as np

from .distance_matrix import DistanceMatrix

MAX_ITER = 100
ROLE_SIMILAR = "similar"
ROLE_NON_SIMILAR = "non-similar"
ROLE_OTHERS = "others"


class ParameterError(ValueError):
    pass


@dataclass(frozen=True)
class Partition:
    ids: tuple[str, ...]
    labels: tuple[int, ...]  # cluster index in 1..k, aligned with ids
    k: int
    medoids: tuple[str, ...]  # medoids[c - 1] is the medoid of cluster c
    cost: float
    seed: int | None = None
    history: tuple[float, ...] = field(default=(), compare=False)

    @property
    def assignment(self) -> dict[str, int]:
        return dict(zip(self.ids, self.labels))

    def members(self, cluster: int) -> list[str]:
        return [i for i, c in zip(self.ids, self.labels) if c == cluster]


@dataclass(frozen=True)
class ClusterSummary:
    counts: dict[int, int]
    mean_distance: dict[int, float]
    roles: dict[int, str]

    def ordered(self) -> list[int]:
        """Cluster indices ordered similar, non-similar, then the others."""
        rank = {ROLE_SIMILAR: 0, ROLE_NON_SIMILAR: 1, ROLE_OTHERS: 2}
        return sorted(self.counts, key=lambda c: (rank[self.roles[c]], c))


def _check_k(k: int, n: int) -> None:
    if not 1 <= k <= n:
        raise ParameterError(f"k must be between 1 and {n}, got {k}")


def _initial_medoids(D: np.ndarray, k: int, rng: np.random.Generator) -> list[int]:
    """k-medoids++ seeding: later medoids drawn with probability ~ squared
    distance to the nearest medoid chosen so far."""
    n = len(D)
    chosen = [int(rng.integers(n))]
    nearest = D[chosen[0]].astype(float).copy()
    while len(chosen) < k:
        weights = nearest ** 2
        total = weights.sum()
        if total > 0:
            i = int(rng.choice(n, p=weights / total))
        else:
            # only duplicates of existing medoids remain
            i = int(rng.choice([j for j in range(n) if j not in chosen]))
        chosen.append(i)
        nearest = np.minimum(nearest, D[i])
    return chosen


def _assign(D: np.ndarray, medoids: list[int]) -> np.ndarray:
    labels = np.argmin(D[:, medoids], axis=1)
    # a medoid always belongs to its own cluster, even when tied with another
    for c, m in enumerate(medoids):
        labels[m] = c
    return labels


def kmedoids(m: DistanceMatrix, k: int, seed: int = 0, max_iter: int = MAX_ITER) -> Partition:
    D = m.values
    n = len(D)
    _check_k(k, n)
    rng = np.random.default_rng(seed)
    medoids = _initial_medoids(D, k, rng)
    rows = np.arange(n)
    history: list[float] = []

    for _ in range(max_iter):
        labels = _assign(D, medoids)
        cost = float(D[rows, np.asarray(medoids)[labels]].sum())
        if history and cost > history[-1] + 1e-9 * max(1.0, history[-1]):
            raise RuntimeError(f"k-medoids cost increased from {history[-1]} to {cost}")
        history.append(cost)

        updated = []
        for c, current in enumerate(medoids):
            members = np.flatnonzero(labels == c)
            totals = D[np.ix_(members, members)].sum(axis=1)
            best = int(members[np.argmin(totals)])
            cur_total = totals[np.searchsorted(members, current)]
            updated.append(current if cur_total <= totals.min() else best)
        if updated == medoids:
            break
        medoids = updated
    else:
        labels = _assign(D, medoids)
        history.append(float(D[rows, np.asarray(medoids)[labels]].sum()))

    return Partition(
        ids=m.ids,
        labels=tuple(int(c) + 1 for c in labels),
        k=k,
        medoids=tuple(m.ids[i] for i in medoids),
        cost=history[-1],
        seed=seed,
        history=tuple(history),
    )


def kmeans(
    points: np.ndarray, ids, k: int, seed: int = 0, max_iter: int = MAX_ITER
) -> Partition:
    """Lloyd's k-means over coordinate rows.

    ``cost`` is the within-cluster sum of squared distances to the centroids;
    each cluster's medoid is its member nearest the centroid.
    """
    X = np.asarray(points, dtype=float)
    n = len(X)
    _check_k(k, n)
    rng = np.random.default_rng(seed)
    centroids = X[_initial_centroids(X, k, rng)].copy()
    labels = np.full(n, -1)
    history: list[float] = []
    for _ in range(max_iter):
        dist = ((X[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        new = np.argmin(dist, axis=1)
        for c in range(k):
            if not np.any(new == c):
                # steal the point farthest from its centroid
                far = int(np.argmax(dist[np.arange(n), new]))
                new[far] = c
        history.append(float(dist[np.arange(n), new].sum()))
        if np.array_equal(new, labels):
            break
        labels = new
        centroids = np.stack([X[labels == c].mean(axis=0) for c in range(k)])

    medoids = []
    for c in range(k):
        members = np.flatnonzero(labels == c)
        d = ((X[members] - centroids[c]) ** 2).sum(axis=1)
        medoids.append(ids[int(members[np.argmin(d)])])
    return Partition(
        ids=tuple(ids),
        labels=tuple(int(c) + 1 for c in labels),
        k=k,
        medoids=tuple(medoids),
        cost=history[-1],
        seed=seed,
        history=tuple(history),
    )


def _initial_centroids(X: np.ndarray, k: int, rng: np.random.Generator) -> list[int]:
    # k-means++ on squared euclidean distance, one row at a time
    n = len(X)
    chosen = [int(rng.integers(n))]
    nearest = ((X - X[chosen[0]]) ** 2).sum(axis=1)
    while len(chosen) < k:
        total = nearest.sum()
        if total > 0:
            i = int(rng.choice(n, p=nearest / total))
        else:
            i = int(rng.choice([j for j in range(n) if j not in chosen]))
        chosen.append(i)
        nearest = np.minimum(nearest, ((X - X[i]) ** 2).sum(axis=1))
    return chosen


def canonicalize(p: Partition) -> Partition:
    """Relabel clusters 1..k by ascending smallest member id."""
    smallest: dict[int, str] = {}
    for pid, c in zip(p.ids, p.labels):
        if c not in smallest or pid < smallest[c]:
            smallest[c] = pid
    order = sorted(smallest, key=smallest.get)
    remap = {old: new for new, old in enumerate(order, 1)}
    return Partition(
        ids=p.ids,
        labels=tuple(remap[c] for c in p.labels),
        k=p.k,
        medoids=tuple(p.medoids[old - 1] for old in order),
        cost=p.cost,
        seed=p.seed,
        history=p.history,
    )


def consensus_partition(
    m: DistanceMatrix,
    k: int,
    restarts: int = 10,
    base_seed: int = 0,
    runner: Callable[[int], Partition] | None = None,
) -> Partition:
    """Most frequent canonical partition over ``restarts`` seeded runs.

    Ties go to the lower cost, then the lower seed. ``runner`` maps a seed to a
    partition and defaults to k-medoids on ``m``.
    """
    if restarts < 1:
        raise ParameterError(f"restarts must be >= 1, got {restarts}")
    _check_k(k, len(m))
    if runner is None:
        runner = lambda s: kmedoids(m, k, seed=s)  # noqa: E731
    runs = [canonicalize(runner(base_seed + r)) for r in range(restarts)]
    votes = Counter(run.labels for run in runs)
    best = {}
    for run in runs:
        cur = best.get(run.labels)
        if cur is None or (run.cost, run.seed) < (cur.cost, cur.seed):
            best[run.labels] = run
    winner = min(votes, key=lambda lab: (-votes[lab], best[lab].cost, best[lab].seed))
    return best[winner]


def summarize_clusters(p: Partition, m: DistanceMatrix) -> ClusterSummary:
    """Cluster sizes, mean within-cluster distance and role labels."""
    if p.ids != m.ids:
        idx = [m.index(i) for i in p.ids]
        D = m.values[np.ix_(idx, idx)]
    else:
        D = m.values
    labels = np.asarray(p.labels)
    counts, means = {}, {}
    for c in range(1, p.k + 1):
        members = np.flatnonzero(labels == c)
        counts[c] = int(members.size)
        if members.size < 2:
            means[c] = 0.0
        else:
            sub = D[np.ix_(members, members)]
            means[c] = float(sub[np.triu_indices(members.size, k=1)].mean())

    clusters = sorted(means)
    similar = min(clusters, key=lambda c: (means[c], c))
    roles = {c: ROLE_OTHERS for c in clusters}
    roles[similar] = ROLE_SIMILAR
    rest = [c for c in clusters if c != similar]
    if rest:
        roles[min(rest, key=lambda c: (-means[c], c))] = ROLE_NON_SIMILAR
    return ClusterSummary(counts, means, roles)


def _mds(D: np.ndarray, dims: int | None) -> np.ndarray:
    n = len(D)
    J = np.eye(n) - np.full((n, n), 1.0 / n)
    B = -0.5 * J @ (D ** 2) @ J
    B = (B + B.T) / 2
    evals, evecs = np.linalg.eigh(B)
    order = np.argsort(evals)[::-1]
    evals, evecs = evals[order], evecs[:, order]
    if dims is None:
        tol = max(1e-9, 1e-9 * abs(evals[0]))
        dims = max(1, int(np.sum(evals > tol)))
    coords = np.zeros((n, dims))
    take = min(dims, n)
    scale = np.sqrt(np.clip(evals[:take], 0.0, None))
    coords[:, :take] = evecs[:, :take] * scale
    coords[np.abs(coords) < 1e-12] = 0.0
    for col in range(dims):
        c = coords[:, col]
        if np.any(c):
            if c[np.argmax(np.abs(c))] < 0:
                coords[:, col] = -c
    return coords


def embed_2d(m: DistanceMatrix) -> np.ndarray:
    """Classical MDS coordinates, shape (n, 2), with a fixed sign convention."""
    return _mds(m.values, 2)


def embed(m: DistanceMatrix) -> np.ndarray:
    """Classical MDS over every positive-eigenvalue dimension."""
    return _mds(m.values, None)


def write_partition(fh: TextIO, p: Partition, summary: ClusterSummary) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["patient_id", "cluster", "role"])
    for pid, c in zip(p.ids, p.labels):
        w.writerow([pid, c, summary.roles[c]])


def write_summary(fh: TextIO, summary: ClusterSummary, metric: str = "") -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["metric", "cluster", "role", "count", "mean_within_distance"])
    for c in summary.ordered():
        w.writerow([metric, c, summary.roles[c], summary.counts[c], f"{summary.mean_distance[c]:.6f}"])


def write_embedding(fh: TextIO, p: Partition, coords: np.ndarray) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["patient_id", "x", "y", "cluster"])
    for pid, (x, y), c in zip(p.ids, coords[:, :2], p.labels):
        w.writerow([pid, _fmt(x), _fmt(y), c])


def _fmt(v: float) -> str:
    # no "-0.000000" for values that round to zero
    return f"{round(float(v), 6) + 0.0:.6f}"
