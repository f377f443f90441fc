"""Command-line front end: ``gen | dist | cluster | compare``.

Exit codes: 0 success, 1 data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import os
import sys
from pathlib import Path

from . import clustering
from .distance_matrix import (
    METRICS,
    MetricSpec,
    all_matrices,
    cross_metric_report,
    describe,
    pairwise_distances,
    rank_pairs,
    report_columns,
)
from .ingestion import IngestError, build_frequency_table, load_records
from .synthetic import generate

EXIT_OK, EXIT_DATA, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("patientmetrics")


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


@contextlib.contextmanager
def _output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
        return
    try:
        fh = open(path, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc.strerror}") from None
    with fh:
        yield fh


def _load(args):
    path = Path(args.input)
    if not path.is_file():
        raise UsageError(f"input file not found: {path}")
    try:
        ds = load_records(path, strict=args.strict)
    except IngestError as exc:
        raise DataError(f"{path}: {exc}") from None
    if ds.skipped:
        print(f"warning: skipped {ds.skipped} malformed row(s) in {path}", file=sys.stderr)
    if len(ds) < 2:
        raise DataError(f"{path}: need at least two patients, found {len(ds)}")
    return ds


def _metric(args) -> MetricSpec:
    try:
        return MetricSpec(args.metric, p=args.p, q=args.q if args.metric == "pqgram" else None)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _pq_pair(text: str) -> tuple[int, int]:
    try:
        p, q = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected P,Q, got {text!r}") from None
    if p < 1 or q < 1:
        raise argparse.ArgumentTypeError(f"p and q must be >= 1, got {text!r}")
    return p, q


def _id_pair(text: str) -> tuple[str, str]:
    parts = [v.strip() for v in text.split(",")]
    if len(parts) != 2 or not all(parts):
        raise argparse.ArgumentTypeError(f"expected ID,ID, got {text!r}")
    return parts[0], parts[1]


def cmd_gen(args) -> int:
    if min(args.n_patients, args.n_codes, args.planted) < 1:
        raise UsageError("--n-patients, --n-codes and --planted must all be >= 1")
    data = generate(args.n_patients, args.n_codes, args.planted, seed=args.seed)
    with _output(args.out) as fh:
        data.write_csv(fh)
    if args.truth:
        with _output(args.truth) as fh:
            data.write_groups(fh)
    return EXIT_OK


def cmd_dist(args) -> int:
    spec = _metric(args)
    ds = _load(args)
    m = pairwise_distances(ds, spec, normalize=args.normalize, workers=args.workers)
    with _output(args.out) as fh:
        m.write_csv(fh)
    print(describe(m), file=sys.stdout if args.out else sys.stderr)
    return EXIT_OK


def cmd_cluster(args) -> int:
    spec = _metric(args)
    if args.k < 1:
        raise UsageError(f"--k must be >= 1, got {args.k}")
    if args.restarts < 1:
        raise UsageError(f"--restarts must be >= 1, got {args.restarts}")
    ds = _load(args)
    if args.k > len(ds):
        raise UsageError(f"--k {args.k} exceeds the number of patients ({len(ds)})")
    m = pairwise_distances(ds, spec, normalize=args.normalize, workers=args.workers)

    if args.mode == "kmeans":
        if spec.name == "euclidean":
            points = build_frequency_table(ds).rows
        else:
            points = clustering.embed(m)
        runner = lambda s: clustering.kmeans(points, m.ids, args.k, seed=s)  # noqa: E731
    else:
        runner = None
    part = clustering.consensus_partition(m, args.k, args.restarts, args.seed, runner=runner)
    summary = clustering.summarize_clusters(part, m)
    coords = clustering.embed_2d(m)

    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise DataError(f"cannot create {out}: {exc.strerror}") from None
    with _output(os.fspath(out / "partition.csv")) as fh:
        clustering.write_partition(fh, part, summary)
    with _output(os.fspath(out / "summary.csv")) as fh:
        clustering.write_summary(fh, summary, spec.tag)
    with _output(os.fspath(out / "embedding.csv")) as fh:
        clustering.write_embedding(fh, part, coords)

    cells = [f"cluster {c} ({summary.roles[c]}): {summary.counts[c]}" for c in summary.ordered()]
    print(f"{spec.tag}: " + ", ".join(cells))
    return EXIT_OK


def cmd_compare(args) -> int:
    if not args.pair and args.smallest is None:
        raise UsageError("give --pair ID,ID (repeatable) or --smallest N")
    ds = _load(args)
    columns = report_columns(args.pq)
    mats = all_matrices(ds, columns, normalize=args.normalize, workers=args.workers)
    if args.pair:
        known = set(ds.ids)
        for a, b in args.pair:
            for pid in (a, b):
                if pid not in known:
                    raise UsageError(f"unknown patient id {pid!r}")
        pairs = list(args.pair)
    else:
        try:
            pairs = rank_pairs(mats, args.smallest, args.rank_by)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    report = cross_metric_report(mats, pairs)
    with _output(args.out) as fh:
        report.write_csv(fh)
    return EXIT_OK


def _add_common(sp: argparse.ArgumentParser, metric: bool = True) -> None:
    sp.add_argument("--input", required=True, help="event CSV (patient_id,sex,age,event_code)")
    if metric:
        sp.add_argument("--metric", choices=METRICS, default="pqgram")
        sp.add_argument("--p", type=float, default=None,
                        help="pq-gram stem length (default 1) or Minkowski order (default 3)")
        sp.add_argument("--q", type=int, default=None, help="pq-gram base length (default 3)")
    sp.add_argument("--normalize", choices=("native", "minmax", "none"), default="native")
    sp.add_argument("--strict", action="store_true", help="abort on the first malformed row")
    sp.add_argument("--workers", type=int, default=1, help="processes for tree metrics")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="patientmetrics", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("gen", help="write synthetic event records")
    sp.add_argument("--n-patients", type=int, default=60)
    sp.add_argument("--n-codes", type=int, default=30)
    sp.add_argument("--planted", type=int, default=3, help="number of planted similar-patient groups")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None, help="records CSV (default stdout)")
    sp.add_argument("--truth", default=None, help="optional CSV of planted group per patient")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("dist", help="write a normalized distance matrix")
    _add_common(sp)
    sp.add_argument("--out", default=None, help="matrix CSV (default stdout)")
    sp.set_defaults(func=cmd_dist)

    sp = sub.add_parser("cluster", help="partition patients into k clusters")
    _add_common(sp)
    sp.add_argument("--k", type=int, default=3)
    sp.add_argument("--restarts", type=int, default=10)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--mode", choices=("kmedoids", "kmeans"), default="kmedoids",
                    help="kmeans runs on frequency rows (euclidean) or MDS coordinates")
    sp.add_argument("--out", required=True, help="output directory")
    sp.set_defaults(func=cmd_cluster)

    sp = sub.add_parser("compare", help="cross-metric table for selected patient pairs")
    _add_common(sp, metric=False)
    sp.add_argument("--pair", type=_id_pair, action="append", help="ID,ID (repeatable)")
    sp.add_argument("--smallest", type=int, default=None, help="report the N closest pairs")
    sp.add_argument("--rank-by", default="mean",
                    help="column used to pick --smallest pairs, or 'mean' over all columns")
    sp.add_argument("--pq", type=_pq_pair, action="append", default=None,
                    help="pq-gram column as P,Q (repeatable; default 1,3 and 2,3)")
    sp.add_argument("--out", default=None, help="report CSV (default stdout)")
    sp.set_defaults(func=cmd_compare)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
