"""Command-line interface: summaries, association matrices, distances,
barycenters and clusterings of distributional tables, emitted as
deterministic JSON or CSV reports.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from ._version import __version__
from .association import association_matrix
from .clustering import cluster, cross_tabulate
from .errors import DistroStatsError, ParseError, ValidationError
from .io import ReportDocument, TableDocument, dumps_canonical, emit_report, parse_table
from .metric import decompose, distance_squared
from .modal import DEFAULT_RESOLUTION
from .quantile import QuantileFunction
from .stats import barycenter, summarize

__all__ = ["run_command", "main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="distrostats",
        description="Statistics and clustering for distribution-valued tables.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", required=True, help="table file (JSON or CSV)")
    common.add_argument(
        "--input-format",
        choices=("json", "csv"),
        default=None,
        help="table format; inferred from the file extension by default",
    )
    common.add_argument(
        "--format", choices=("json", "csv"), default="json", help="report format"
    )
    common.add_argument("--output", default="-", help="report path ('-' for stdout)")
    common.add_argument(
        "--resolution",
        type=int,
        default=DEFAULT_RESOLUTION,
        help="knot count for lowering parametric cells",
    )

    sub.add_parser("summary", parents=[common], help="per-variable variability statistics")
    sub.add_parser("assoc", parents=[common], help="codeviance/covariance/correlation matrices")

    p_dist = sub.add_parser("dist", parents=[common], help="distance between two individuals")
    p_dist.add_argument("--i", required=True, help="first individual id")
    p_dist.add_argument("--j", required=True, help="second individual id")
    p_dist.add_argument(
        "--decompose", action="store_true", help="include the location/size/shape split"
    )

    p_bary = sub.add_parser("barycenter", parents=[common], help="barycenter of one variable")
    p_bary.add_argument("--var", required=True, help="variable name")
    p_bary.add_argument(
        "--bins", type=int, default=10, help="equal-probability bins for the histogram view"
    )

    p_cluster = sub.add_parser("cluster", parents=[common], help="dynamic clustering")
    p_cluster.add_argument("-k", "--k", type=int, required=True, dest="k")
    p_cluster.add_argument(
        "--metric", choices=("wasserstein", "mahalanobis"), default="wasserstein"
    )
    p_cluster.add_argument("--standardize", action="store_true")
    p_cluster.add_argument("--restarts", type=int, default=100)
    p_cluster.add_argument("--max-iter", type=int, default=100)
    p_cluster.add_argument("--seed", type=int, default=0)
    p_cluster.add_argument(
        "--compare",
        default=None,
        help="path to a previous cluster report; adds a cross-tabulation",
    )
    return parser


def _infer_format(path: str, explicit: str | None) -> str:
    if explicit is not None:
        return explicit
    return "csv" if path.lower().endswith(".csv") else "json"


def _load_document(args) -> tuple[TableDocument, str]:
    with open(args.input, "rb") as fh:
        raw = fh.read()
    digest = "sha256:" + hashlib.sha256(raw).hexdigest()
    doc = parse_table(raw, fmt=_infer_format(args.input, args.input_format))
    return doc, digest


def _segments_payload(qf: QuantileFunction) -> list[list[float]]:
    return [list(seg) for seg in qf.segments]


def _equal_probability_bins(qf: QuantileFunction, count: int) -> list[list[float]]:
    """Rebin a quantile function as ``count`` equal-probability bins;
    flat stretches collapse to zero-width (atom) bins."""
    if count < 1:
        raise ValidationError("bin count must be at least 1")
    edges = [qf.evaluate(i / count) for i in range(count + 1)]
    weight = 1.0 / count
    bins: list[list[float]] = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        if bins and bins[-1][0] == bins[-1][1] == lo == hi:
            bins[-1][2] += weight  # merge repeated atoms
        else:
            bins.append([lo, hi, weight])
    return bins


def _payload_summary(doc: TableDocument, resolution: int) -> dict:
    table = doc.to_table()
    rows = []
    for j, name in enumerate(table.variable_names):
        s = summarize(table.quantile_column(j, resolution=resolution))
        rows.append(
            {
                "name": name,
                "barycenter_mean": s.barycenter_mean,
                "barycenter_std": s.barycenter_std,
                "variance": s.variance,
                "std": s.std,
                "ss": s.ss,
                "n": s.n,
            }
        )
    return {"variables": rows}


def _payload_assoc(doc: TableDocument, resolution: int) -> dict:
    am = association_matrix(doc.to_table(), resolution=resolution)
    return {
        "names": list(am.names),
        "n": len(doc.individuals),
        "ss": [[float(v) for v in row] for row in am.ss],
        "cov": [[float(v) for v in row] for row in am.cov],
        "corr": [[float(v) for v in row] for row in am.corr],
    }


def _payload_dist(doc: TableDocument, resolution: int, args) -> dict:
    i = doc.index_of(args.i)
    j = doc.index_of(args.j)
    table = doc.to_table()
    xi = [mv.to_quantile(resolution=resolution) for mv in table.cells[i]]
    xj = [mv.to_quantile(resolution=resolution) for mv in table.cells[j]]
    per_variable = []
    total = 0.0
    for name, a, b in zip(table.variable_names, xi, xj):
        entry = {"name": name}
        if args.decompose:
            dec = decompose(a, b)
            d2 = dec.total
            entry.update(
                distance_squared=d2,
                distance=math.sqrt(max(d2, 0.0)),
                location=dec.location,
                size=dec.size,
                shape=dec.shape,
            )
        else:
            d2 = distance_squared(a, b)
            entry.update(distance_squared=d2, distance=math.sqrt(max(d2, 0.0)))
        per_variable.append(entry)
        total += d2
    return {
        "i": args.i,
        "j": args.j,
        "decomposed": bool(args.decompose),
        "per_variable": per_variable,
        "total_squared": total,
        "total_distance": math.sqrt(max(total, 0.0)),
    }


def _payload_barycenter(doc: TableDocument, resolution: int, args) -> dict:
    table = doc.to_table()
    if args.var not in table.variable_names:
        raise ValidationError(f"unknown variable {args.var!r}")
    j = table.variable_names.index(args.var)
    bary = barycenter(table.quantile_column(j, resolution=resolution))
    return {
        "variable": args.var,
        "mean": bary.mean(),
        "std": bary.std(),
        "segments": _segments_payload(bary),
        "histogram": {"bins": _equal_probability_bins(bary, args.bins)},
    }


def _load_compare_partition(path: str, ids: Sequence[str]) -> list[int]:
    with open(path, "rb") as fh:
        try:
            other = json.loads(fh.read().decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ParseError(f"comparison report {path!r} is not valid JSON: {exc}") from None
    payload = other.get("payload") if isinstance(other, dict) else None
    if not isinstance(payload, dict) or "assignments" not in payload or "ids" not in payload:
        raise ValidationError(
            f"comparison report {path!r} does not look like a cluster report"
        )
    other_ids = [str(x) for x in payload["ids"]]
    if sorted(other_ids) != sorted(ids):
        raise ValidationError("comparison report covers a different set of individuals")
    by_id = dict(zip(other_ids, payload["assignments"]))
    return [int(by_id[i]) for i in ids]


def _payload_cluster(doc: TableDocument, resolution: int, args) -> dict:
    table = doc.to_table()
    result = cluster(
        table,
        k=args.k,
        metric=args.metric,
        standardize=args.standardize,
        restarts=args.restarts,
        max_iter=args.max_iter,
        seed=args.seed,
        resolution=resolution,
    )
    assignments = list(result.partition.assignments)
    clusters = []
    for c in range(result.partition.k):
        member_ids = [doc.ids[i] for i in result.partition.members(c)]
        clusters.append({"index": c, "size": len(member_ids), "member_ids": member_ids})
    prototypes = []
    for proto in result.prototypes:
        prototypes.append(
            {
                "components": [
                    {"name": name, "segments": _segments_payload(qf)}
                    for name, qf in zip(table.variable_names, proto.components)
                ]
            }
        )
    payload = {
        "k": result.partition.k,
        "metric": result.metric,
        "standardized": result.standardized,
        "seed": result.seed,
        "restarts": result.restarts_run,
        "max_iter": args.max_iter,
        "iterations": result.iterations,
        "criterion": result.criterion,
        "quality": result.quality,
        "denominator_metric": result.metric,
        "weight_matrix": "inverse-covariance" if result.metric == "mahalanobis" else "identity",
        "weight_matrix_regularized": (
            result.metric_matrix.regularized if result.metric_matrix is not None else False
        ),
        "ids": list(doc.ids),
        "assignments": assignments,
        "clusters": clusters,
        "criterion_history": list(result.criterion_history),
        "prototypes": prototypes,
        "cross_tabulation": None,
    }
    if args.compare is not None:
        other = _load_compare_partition(args.compare, doc.ids)
        counts = cross_tabulate(assignments, other)
        # best one-to-one label matching, for an agreement rate
        pad = max(counts.shape)
        square = np.zeros((pad, pad), dtype=np.int64)
        square[: counts.shape[0], : counts.shape[1]] = counts
        rows, cols = linear_sum_assignment(square, maximize=True)
        agreement = int(square[rows, cols].sum())
        payload["cross_tabulation"] = {
            "counts": [[int(v) for v in row] for row in counts],
            "row_totals": [int(v) for v in counts.sum(axis=1)],
            "col_totals": [int(v) for v in counts.sum(axis=0)],
            "n": int(counts.sum()),
            "best_match_agreement": agreement,
            "best_match_agreement_rate": agreement / counts.sum(),
        }
    return payload


def _parameters(args) -> dict:
    params = {
        "input_format": _infer_format(args.input, args.input_format),
        "report_format": args.format,
        "resolution": args.resolution,
    }
    if args.command == "dist":
        params.update(i=args.i, j=args.j, decompose=bool(args.decompose))
    elif args.command == "barycenter":
        params.update(var=args.var, bins=args.bins)
    elif args.command == "cluster":
        params.update(
            k=args.k,
            metric=args.metric,
            standardize=bool(args.standardize),
            restarts=args.restarts,
            max_iter=args.max_iter,
            seed=args.seed,
            compare=args.compare,
        )
    return params


def _write_output(path: str, data: bytes) -> None:
    if path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        with open(path, "wb") as fh:
            fh.write(data)


def _structured_error(exc: BaseException) -> None:
    doc = {"error": {"type": type(exc).__name__, "message": str(exc)}}
    sys.stderr.write(dumps_canonical(doc))
    sys.stderr.flush()


def run_command(argv: Sequence[str]) -> int:
    """Run one CLI invocation; returns the exit status (0 on success)."""
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:  # argparse reports usage errors itself
        return int(exc.code or 0)
    try:
        doc, digest = _load_document(args)
        if args.command == "summary":
            payload = _payload_summary(doc, args.resolution)
        elif args.command == "assoc":
            payload = _payload_assoc(doc, args.resolution)
        elif args.command == "dist":
            payload = _payload_dist(doc, args.resolution, args)
        elif args.command == "barycenter":
            payload = _payload_barycenter(doc, args.resolution, args)
        elif args.command == "cluster":
            payload = _payload_cluster(doc, args.resolution, args)
        else:  # unreachable: argparse enforces the choices
            raise ValidationError(f"unknown command {args.command!r}")
        report = ReportDocument(
            command=args.command,
            parameters=_parameters(args),
            payload=payload,
            input_digest=digest,
        )
        _write_output(args.output, emit_report(report, fmt=args.format))
        return 0
    except (DistroStatsError, OSError) as exc:
        _structured_error(exc)
        return 1
    except Exception as exc:  # never let a malformed input escape as a traceback
        _structured_error(exc)
        return 1


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))
