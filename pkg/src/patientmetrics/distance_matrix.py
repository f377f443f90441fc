"""All-pairs distance matrices over a patient dataset.

Tree metrics (``ted``, ``pqgram``) run on :func:`ingestion.build_tree` output,
vector metrics on the frequency-table rows. Matrices are written as CSV with
the patient ids as header row and first column, floats at 6 decimals.
"""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

import numpy as np

from . import vector_metrics
from .edit_distance import ted
from .ingestion import PatientDataset, build_frequency_table, build_tree
from .pqgram import PQParams, pqgram_profile, profile_distance
from .tree import tree_size

VECTOR_METRICS = ("euclidean", "minkowski", "manhattan", "hamming")
TREE_METRICS = ("ted", "pqgram")
METRICS = VECTOR_METRICS + TREE_METRICS
NORMALIZE_MODES = ("native", "minmax", "none")


@dataclass(frozen=True)
class MetricSpec:
    name: str
    p: float | None = None
    q: int | None = None

    def __post_init__(self):
        if self.name not in METRICS:
            raise ValueError(f"unknown metric {self.name!r}; choose from {', '.join(METRICS)}")
        if self.name == "minkowski":
            p = 3 if self.p is None else self.p
            if not p >= 1:
                raise vector_metrics.ParameterError(f"Minkowski order must be >= 1, got {p}")
            object.__setattr__(self, "p", p)
        elif self.name == "pqgram":
            params = PQParams(1 if self.p is None else self.p, 3 if self.q is None else self.q)
            object.__setattr__(self, "p", int(params.p))
            object.__setattr__(self, "q", int(params.q))

    @property
    def tag(self) -> str:
        if self.name == "minkowski":
            return f"minkowski(p={self.p:g})"
        if self.name == "pqgram":
            return f"pqgram(p={self.p},q={self.q})"
        return self.name

    @property
    def is_tree_metric(self) -> bool:
        return self.name in TREE_METRICS


@dataclass
class DistanceMatrix:
    ids: tuple[str, ...]
    values: np.ndarray
    metric: str = ""
    normalized: bool = False
    raw: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.ids = tuple(self.ids)
        self.values = np.asarray(self.values, dtype=float)
        n = len(self.ids)
        if self.values.shape != (n, n):
            raise ValueError(f"matrix shape {self.values.shape} does not match {n} ids")
        if len(set(self.ids)) != n:
            raise ValueError("duplicate ids")
        if np.any(np.diag(self.values) != 0):
            raise ValueError("non-zero diagonal")
        if not np.array_equal(self.values, self.values.T):
            raise ValueError("matrix is not symmetric")
        if np.any(self.values < 0):
            raise ValueError("negative distance")
        if self.normalized and np.any(self.values > 1):
            raise ValueError("normalized matrix has entries above 1")

    def __len__(self) -> int:
        return len(self.ids)

    def index(self, patient_id: str) -> int:
        try:
            return self.ids.index(patient_id)
        except ValueError:
            raise KeyError(f"unknown patient id {patient_id!r}") from None

    def get(self, a: str, b: str) -> float:
        return float(self.values[self.index(a), self.index(b)])

    def off_diagonal(self) -> np.ndarray:
        return self.values[np.triu_indices(len(self.ids), k=1)]

    def raw_range(self) -> tuple[float, float]:
        src = self.raw if self.raw is not None else self.values
        off = src[np.triu_indices(len(self.ids), k=1)]
        return float(off.min()), float(off.max())

    def write_csv(self, fh: TextIO) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", *self.ids])
        for pid, row in zip(self.ids, self.values):
            w.writerow([pid, *(f"{v:.6f}" for v in row)])

    @classmethod
    def read_csv(cls, fh: TextIO, metric: str = "", normalized: bool = False) -> DistanceMatrix:
        rows = list(csv.reader(fh))
        if not rows or rows[0][:1] != ["id"]:
            raise ValueError("matrix CSV must start with an 'id' header cell")
        ids = rows[0][1:]
        if [r[0] for r in rows[1:]] != ids:
            raise ValueError("row ids do not match header ids")
        values = np.array([[float(v) for v in r[1:]] for r in rows[1:]], dtype=float)
        return cls(tuple(ids), values, metric, normalized)


def _tree_rows(args):
    """Upper-triangle rows ``rows`` of a tree-metric matrix (picklable worker)."""
    kind, objs, rows = args
    out = []
    for i in rows:
        if kind == "ted":
            vals = [ted(objs[i], objs[j]) for j in range(i + 1, len(objs))]
        else:
            vals = [profile_distance(objs[i], objs[j]) for j in range(i + 1, len(objs))]
        out.append((i, vals))
    return out


def _tree_matrix(kind: str, objs: list, workers: int) -> np.ndarray:
    n = len(objs)
    D = np.zeros((n, n))
    rows = list(range(n - 1))
    if workers > 1 and n > 2:
        # interleave rows so each worker gets long and short rows alike
        chunks = [rows[k::workers] for k in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = pool.map(_tree_rows, [(kind, objs, c) for c in chunks if c])
            parts = [r for chunk in results for r in chunk]
    else:
        parts = _tree_rows((kind, objs, rows))
    for i, vals in parts:
        D[i, i + 1:] = vals
    return D + D.T


def pairwise_distances(
    dataset: PatientDataset,
    metric: MetricSpec | str,
    normalize: str = "native",
    workers: int = 1,
) -> DistanceMatrix:
    """Distance matrix for every patient pair.

    ``normalize`` is ``"native"`` (tree metrics use their own normalized form,
    vector metrics min-max), ``"minmax"`` (min-max for every metric) or
    ``"none"`` (raw values).
    """
    if isinstance(metric, str):
        metric = MetricSpec(metric)
    if normalize not in NORMALIZE_MODES:
        raise ValueError(f"normalize must be one of {NORMALIZE_MODES}, got {normalize!r}")
    if len(dataset) < 2:
        raise ValueError("need at least two patients")
    ids = tuple(dataset.ids)

    native = None
    if metric.name in VECTOR_METRICS:
        table = build_frequency_table(dataset)
        raw = vector_metrics.pairwise(table.rows, metric.name, p=metric.p or 3)
    else:
        trees = [build_tree(p) for p in dataset.patients]
        if metric.name == "ted":
            raw = _tree_matrix("ted", trees, workers)
            sizes = np.array([tree_size(t) for t in trees], dtype=float)
            native = raw / (sizes[:, None] + sizes[None, :])
        else:
            params = PQParams(metric.p, metric.q)
            profs = [pqgram_profile(t, params) for t in trees]
            raw = _tree_matrix("pqgram", profs, workers)
            # with union U and distance d, U - intersection == (U + d) / 2
            sizes = np.array([len(pr) for pr in profs], dtype=float)
            union = sizes[:, None] + sizes[None, :]
            native = 2 * raw / (union + raw)

    m = DistanceMatrix(ids, raw, metric.tag, normalized=False)
    if normalize == "none":
        return m
    if normalize == "native" and native is not None:
        np.fill_diagonal(native, 0.0)
        return DistanceMatrix(ids, native, metric.tag, normalized=True, raw=raw)
    return minmax_normalize(m)


def minmax_normalize(m: DistanceMatrix) -> DistanceMatrix:
    """Map off-diagonal entries onto [0, 1]; already-normalized input is returned as is."""
    if m.normalized:
        return m
    off = m.off_diagonal()
    lo, hi = (float(off.min()), float(off.max())) if off.size else (0.0, 0.0)
    if hi == lo:
        values = np.zeros_like(m.values)
    else:
        values = (m.values - lo) / (hi - lo)
        np.fill_diagonal(values, 0.0)
    return DistanceMatrix(m.ids, values, m.metric, normalized=True, raw=m.values)


def smallest_pairs(m: DistanceMatrix, limit: int) -> list[tuple[str, str, float]]:
    """Off-diagonal pairs in ascending distance order, ties by id pair."""
    if limit <= 0:
        return []
    n = len(m.ids)
    pairs = []
    for i in range(n):
        for j in range(i + 1, n):
            a, b = sorted((m.ids[i], m.ids[j]))
            pairs.append((float(m.values[i, j]), a, b))
    pairs.sort()
    return [(a, b, d) for d, a, b in pairs[:limit]]


REPORT_COLUMNS: tuple[tuple[str, MetricSpec], ...] = (
    ("euclidean", MetricSpec("euclidean")),
    ("minkowski", MetricSpec("minkowski", p=3)),
    ("manhattan", MetricSpec("manhattan")),
    ("hamming", MetricSpec("hamming")),
    ("edit_distance", MetricSpec("ted")),
    ("pq_1_3", MetricSpec("pqgram", p=1, q=3)),
    ("pq_2_3", MetricSpec("pqgram", p=2, q=3)),
)


def report_columns(pq_settings: Sequence[tuple[int, int]] | None = None):
    """The seven report columns, or the four vector metrics + TED + the given (p, q) grams."""
    if pq_settings is None:
        return REPORT_COLUMNS
    cols = list(REPORT_COLUMNS[:5])
    cols += [(f"pq_{p}_{q}", MetricSpec("pqgram", p=p, q=q)) for p, q in pq_settings]
    return tuple(cols)


def all_matrices(
    dataset: PatientDataset,
    columns=REPORT_COLUMNS,
    normalize: str = "native",
    workers: int = 1,
) -> dict[str, DistanceMatrix]:
    return {name: pairwise_distances(dataset, spec, normalize, workers) for name, spec in columns}


@dataclass
class CrossMetricReport:
    columns: tuple[str, ...]
    rows: list[tuple[str, str, tuple[float, ...]]]

    def write_csv(self, fh: TextIO) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["patient_a", "patient_b", *self.columns])
        for a, b, vals in self.rows:
            w.writerow([a, b, *(f"{v:.6f}" for v in vals)])


def cross_metric_report(
    matrices: dict[str, DistanceMatrix], pairs: Iterable[tuple[str, str]]
) -> CrossMetricReport:
    """One row per pair holding its normalized distance under every metric."""
    mats = list(matrices.values())
    if any(m.ids != mats[0].ids for m in mats[1:]):
        raise ValueError("matrices do not share the same id ordering")
    rows = []
    for a, b in pairs:
        rows.append((a, b, tuple(m.get(a, b) for m in mats)))
    return CrossMetricReport(tuple(matrices), rows)


def rank_pairs(
    matrices: dict[str, DistanceMatrix], limit: int, rank_by: str = "mean"
) -> list[tuple[str, str]]:
    """The ``limit`` closest pairs by one column, or by the mean over all columns."""
    if rank_by == "mean":
        mats = list(matrices.values())
        values = sum(m.values for m in mats) / len(mats)
        key = DistanceMatrix(mats[0].ids, values, "mean", normalized=all(m.normalized for m in mats))
    else:
        try:
            key = matrices[rank_by]
        except KeyError:
            raise ValueError(f"cannot rank by {rank_by!r}; columns are {', '.join(matrices)}") from None
    return [(a, b) for a, b, _ in smallest_pairs(key, limit)]


def describe(m: DistanceMatrix) -> str:
    lo, hi = m.raw_range()
    return f"n={len(m)} metric={m.metric} raw_min={lo:.6f} raw_max={hi:.6f}"

