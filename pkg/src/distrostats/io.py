"""Table ingestion (JSON and CSV) and deterministic report emission.

Serialization is byte-reproducible: object keys are written in a fixed
order and floats are rendered with 17 significant digits, which
round-trips doubles exactly. NaN (used internally for undefined
correlations) is emitted as JSON ``null`` or an empty CSV cell.
"""

from __future__ import annotations

import csv
import io as _stringio
import json
import math
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

from ._version import __version__
from .errors import ParseError, ValidationError
from .modal import Discrete, Histogram, Interval, ModalValue, Parametric, Point
from .table import DistributionalTable

__all__ = [
    "SCHEMA_VERSION",
    "VariableDecl",
    "Individual",
    "TableDocument",
    "ReportDocument",
    "parse_table",
    "emit_table",
    "emit_report",
]

SCHEMA_VERSION = 1
TABLE_KINDS = ("point", "interval", "histogram", "discrete", "parametric", "mixed")
_CSV_KINDS = ("point", "interval", "histogram", "discrete")


# ---- canonical JSON ---------------------------------------------------------


def format_float(x: float) -> str:
    """Shortest fixed policy that round-trips doubles: 17 significant digits."""
    return f"{float(x):.17g}"


def _write_json(obj: Any, out: list[str], level: int, indent: int) -> None:
    pad = " " * (indent * (level + 1))
    closing = " " * (indent * level)
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        if math.isnan(obj):
            out.append("null")
        elif math.isinf(obj):
            raise ValidationError("cannot serialize an infinite value")
        else:
            out.append(format_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, Mapping):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (key, value) in enumerate(obj.items()):
            out.append(pad)
            out.append(json.dumps(str(key), ensure_ascii=False))
            out.append(": ")
            _write_json(value, out, level + 1, indent)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(closing + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for i, value in enumerate(obj):
            out.append(pad)
            _write_json(value, out, level + 1, indent)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(closing + "]")
    else:
        raise ValidationError(f"cannot serialize value of type {type(obj).__name__}")


def dumps_canonical(obj: Any) -> str:
    out: list[str] = []
    _write_json(obj, out, 0, indent=2)
    out.append("\n")
    return "".join(out)


# ---- modal value literals ---------------------------------------------------


def cell_to_jsonable(mv: ModalValue) -> dict:
    if isinstance(mv, Point):
        return {"kind": "point", "value": mv.value}
    if isinstance(mv, Interval):
        return {"kind": "interval", "lo": mv.lo, "hi": mv.hi}
    if isinstance(mv, Histogram):
        return {"kind": "histogram", "bins": [list(b) for b in mv.bins]}
    if isinstance(mv, Discrete):
        return {"kind": "discrete", "atoms": [list(a) for a in mv.atoms]}
    if isinstance(mv, Parametric):
        return {
            "kind": "parametric",
            "family": mv.family,
            "params": {k: mv.params[k] for k in sorted(mv.params)},
        }
    raise ValidationError(f"unknown modal value type {type(mv).__name__}")


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{where}: expected a number, got {value!r}")
    return float(value)


def cell_from_jsonable(obj: Any, where: str) -> ModalValue:
    if not isinstance(obj, Mapping):
        raise ValidationError(f"{where}: cell must be an object with a 'kind' field")
    kind = obj.get("kind")
    try:
        if kind == "point":
            return Point(value=_number(obj.get("value"), where))
        if kind == "interval":
            return Interval(lo=_number(obj.get("lo"), where), hi=_number(obj.get("hi"), where))
        if kind == "histogram":
            bins = obj.get("bins")
            if not isinstance(bins, Sequence) or isinstance(bins, (str, bytes)):
                raise ValidationError(f"{where}: histogram needs a 'bins' array")
            return Histogram(
                bins=tuple(
                    (
                        _number(b[0], where),
                        _number(b[1], where),
                        _number(b[2], where),
                    )
                    if isinstance(b, Sequence) and len(b) == 3
                    else _bad_bin(where)
                    for b in bins
                )
            )
        if kind == "discrete":
            atoms = obj.get("atoms")
            if not isinstance(atoms, Sequence) or isinstance(atoms, (str, bytes)):
                raise ValidationError(f"{where}: discrete needs an 'atoms' array")
            return Discrete(
                atoms=tuple(
                    (_number(a[0], where), _number(a[1], where))
                    if isinstance(a, Sequence) and len(a) == 2
                    else _bad_atom(where)
                    for a in atoms
                )
            )
        if kind == "parametric":
            params = obj.get("params")
            if not isinstance(params, Mapping):
                raise ValidationError(f"{where}: parametric needs a 'params' object")
            return Parametric(family=str(obj.get("family")), params=dict(params))
    except ValidationError as exc:
        msg = str(exc)
        raise ValidationError(msg if msg.startswith(where) else f"{where}: {msg}") from None
    raise ValidationError(f"{where}: unknown cell kind {kind!r}")


def _bad_bin(where: str):
    raise ValidationError(f"{where}: each histogram bin must be a [lo, hi, weight] triple")


def _bad_atom(where: str):
    raise ValidationError(f"{where}: each discrete atom must be a [value, weight] pair")


# ---- table documents --------------------------------------------------------


@dataclass(frozen=True)
class VariableDecl:
    name: str
    kind: str = "mixed"

    def __post_init__(self) -> None:
        object.__setattr__(self, "name", str(self.name))
        object.__setattr__(self, "kind", str(self.kind))
        if self.kind not in TABLE_KINDS:
            raise ValidationError(
                f"variable {self.name!r}: declared kind {self.kind!r} not in {TABLE_KINDS}"
            )


@dataclass(frozen=True)
class Individual:
    id: str
    values: tuple[ModalValue, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "id", str(self.id))
        object.__setattr__(self, "values", tuple(self.values))


@dataclass(frozen=True)
class TableDocument:
    """A parsed distributional table: declared variables plus one row of
    modal values per identified individual. Cell kinds may differ from the
    declared column kind; everything lowers to quantile functions."""

    variables: tuple[VariableDecl, ...]
    individuals: tuple[Individual, ...]

    def __post_init__(self) -> None:
        variables = tuple(self.variables)
        individuals = tuple(self.individuals)
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "individuals", individuals)
        if not variables:
            raise ValidationError("table must declare at least one variable")
        if not individuals:
            raise ValidationError("table must contain at least one individual")
        names = [v.name for v in variables]
        if len(set(names)) != len(names):
            raise ValidationError("variable names must be unique")
        ids = [ind.id for ind in individuals]
        if len(set(ids)) != len(ids):
            raise ValidationError("individual ids must be unique")
        for ind in individuals:
            if len(ind.values) != len(variables):
                raise ValidationError(
                    f"individual {ind.id!r} has {len(ind.values)} values, "
                    f"expected {len(variables)}"
                )

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(ind.id for ind in self.individuals)

    @property
    def variable_names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def index_of(self, individual_id: str) -> int:
        for i, ind in enumerate(self.individuals):
            if ind.id == individual_id:
                return i
        raise ValidationError(f"unknown individual id {individual_id!r}")

    def to_table(self) -> DistributionalTable:
        return DistributionalTable(
            variable_names=self.variable_names,
            cells=tuple(ind.values for ind in self.individuals),
        )


# ---- parsing ----------------------------------------------------------------


def _as_text(data: bytes | str) -> str:
    if isinstance(data, bytes):
        try:
            return data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not valid UTF-8: {exc}") from None
    return data


def _parse_json_table(text: str) -> TableDocument:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(doc, Mapping):
        raise ParseError("table document must be a JSON object")
    raw_vars = doc.get("variables")
    raw_inds = doc.get("individuals")
    if not isinstance(raw_vars, Sequence) or isinstance(raw_vars, (str, bytes)):
        raise ParseError("table document needs a 'variables' array")
    if not isinstance(raw_inds, Sequence) or isinstance(raw_inds, (str, bytes)):
        raise ParseError("table document needs an 'individuals' array")
    variables = []
    for i, rv in enumerate(raw_vars):
        if not isinstance(rv, Mapping) or "name" not in rv:
            raise ParseError(f"variables[{i}] must be an object with a 'name'")
        variables.append(VariableDecl(name=str(rv["name"]), kind=str(rv.get("kind", "mixed"))))
    individuals = []
    for i, ri in enumerate(raw_inds):
        if not isinstance(ri, Mapping) or "id" not in ri:
            raise ParseError(f"individuals[{i}] must be an object with an 'id'")
        values = ri.get("values")
        if not isinstance(values, Sequence) or isinstance(values, (str, bytes)):
            raise ParseError(f"individual {ri['id']!r} needs a 'values' array")
        cells = tuple(
            cell_from_jsonable(
                cell,
                f"individual {ri['id']!r}, variable "
                f"{variables[j].name if j < len(variables) else j!r}",
            )
            for j, cell in enumerate(values)
        )
        individuals.append(Individual(id=str(ri["id"]), values=cells))
    return TableDocument(variables=tuple(variables), individuals=tuple(individuals))


def _csv_number(text: str, where: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"{where}: {text!r} is not a number") from None


def _csv_cell(kind: str, text: str, where: str) -> ModalValue:
    text = text.strip()
    if not text:
        raise ParseError(f"{where}: empty cell")
    try:
        if kind == "point":
            return Point(value=_csv_number(text, where))
        if kind == "interval":
            parts = text.split(":")
            if len(parts) != 2:
                raise ParseError(f"{where}: interval cells use 'lo:hi'")
            return Interval(lo=_csv_number(parts[0], where), hi=_csv_number(parts[1], where))
        if kind == "histogram":
            bins = []
            for piece in text.split(";"):
                nums = piece.split(":")
                if len(nums) != 3:
                    raise ParseError(f"{where}: histogram cells use 'lo:hi:weight;...'")
                bins.append(tuple(_csv_number(v, where) for v in nums))
            return Histogram(bins=tuple(bins))
        if kind == "discrete":
            atoms = []
            for piece in text.split(";"):
                nums = piece.split(":")
                if len(nums) != 2:
                    raise ParseError(f"{where}: discrete cells use 'value:weight;...'")
                atoms.append(tuple(_csv_number(v, where) for v in nums))
            return Discrete(atoms=tuple(atoms))
    except ValidationError as exc:
        raise ValidationError(f"{where}: {exc}") from None
    raise ParseError(f"{where}: kind {kind!r} cannot be read from CSV")


def _parse_csv_table(text: str) -> TableDocument:
    rows = [
        (lineno, row)
        for lineno, row in enumerate(csv.reader(_stringio.StringIO(text)), start=1)
        if any(cell.strip() for cell in row)
    ]
    if not rows:
        raise ParseError("CSV table is empty")
    _, header = rows[0]
    if len(header) < 2 or header[0].strip().lower() != "id":
        raise ParseError("CSV header must be 'id' followed by 'name:kind' columns")
    variables = []
    for cell in header[1:]:
        name, sep, kind = cell.strip().partition(":")
        if not sep or kind not in _CSV_KINDS:
            raise ParseError(
                f"CSV column {cell!r} must be 'name:kind' with kind one of {_CSV_KINDS}"
            )
        variables.append(VariableDecl(name=name, kind=kind))
    individuals = []
    for lineno, row in rows[1:]:
        if len(row) != len(header):
            raise ParseError(
                f"line {lineno}: expected {len(header)} cells, found {len(row)}"
            )
        ind_id = row[0].strip()
        cells = tuple(
            _csv_cell(variables[j].kind, row[j + 1], f"line {lineno}, variable {variables[j].name!r}")
            for j in range(len(variables))
        )
        individuals.append(Individual(id=ind_id, values=cells))
    return TableDocument(variables=tuple(variables), individuals=tuple(individuals))


def parse_table(data: bytes | str, fmt: str = "json") -> TableDocument:
    """Parse a table document; ``fmt`` is ``json`` or ``csv``."""
    text = _as_text(data)
    if fmt == "json":
        return _parse_json_table(text)
    if fmt == "csv":
        return _parse_csv_table(text)
    raise ValidationError(f"unknown table format {fmt!r}; use 'json' or 'csv'")


# ---- table emission ---------------------------------------------------------


def _csv_cell_text(mv: ModalValue, declared: str, where: str) -> str:
    if mv.kind != declared:
        raise ValidationError(
            f"{where}: cell kind {mv.kind!r} does not match declared column kind "
            f"{declared!r}; CSV requires uniform columns"
        )
    if isinstance(mv, Point):
        return format_float(mv.value)
    if isinstance(mv, Interval):
        return f"{format_float(mv.lo)}:{format_float(mv.hi)}"
    if isinstance(mv, Histogram):
        return ";".join(f"{format_float(a)}:{format_float(b)}:{format_float(w)}" for a, b, w in mv.bins)
    if isinstance(mv, Discrete):
        return ";".join(f"{format_float(x)}:{format_float(w)}" for x, w in mv.atoms)
    raise ValidationError(f"{where}: kind {mv.kind!r} cannot be written to CSV")


def emit_table(doc: TableDocument, fmt: str = "json") -> bytes:
    """Serialize a table document; inverse of :func:`parse_table`."""
    if fmt == "json":
        payload = {
            "schema_version": SCHEMA_VERSION,
            "variables": [{"name": v.name, "kind": v.kind} for v in doc.variables],
            "individuals": [
                {"id": ind.id, "values": [cell_to_jsonable(mv) for mv in ind.values]}
                for ind in doc.individuals
            ],
        }
        return dumps_canonical(payload).encode("utf-8")
    if fmt == "csv":
        for v in doc.variables:
            if v.kind not in _CSV_KINDS:
                raise ValidationError(
                    f"variable {v.name!r}: declared kind {v.kind!r} cannot be written to CSV"
                )
        buf = _stringio.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["id"] + [f"{v.name}:{v.kind}" for v in doc.variables])
        for ind in doc.individuals:
            writer.writerow(
                [ind.id]
                + [
                    _csv_cell_text(mv, doc.variables[j].kind, f"individual {ind.id!r}")
                    for j, mv in enumerate(ind.values)
                ]
            )
        return buf.getvalue().encode("utf-8")
    raise ValidationError(f"unknown table format {fmt!r}; use 'json' or 'csv'")


# ---- reports ----------------------------------------------------------------


@dataclass(frozen=True)
class ReportDocument:
    """A command result: payload plus enough metadata (tool version, input
    digest, parameters including the seed) to reproduce it exactly."""

    command: str
    parameters: dict
    payload: dict
    input_digest: str
    tool: str = "distrostats"
    version: str = __version__
    schema_version: int = SCHEMA_VERSION


def _csv_num(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return "" if math.isnan(value) else format_float(value)
    return str(value)


def _matrix_rows(names: Sequence[str], matrix: Sequence[Sequence[float]]) -> list[list[str]]:
    rows = [["name"] + list(names)]
    for name, row in zip(names, matrix):
        rows.append([name] + [_csv_num(v) for v in row])
    return rows


def _csv_summary(report: ReportDocument) -> list[list[str]]:
    cols = ["name", "barycenter_mean", "barycenter_std", "variance", "std", "ss", "n"]
    rows = [["# variables"], cols]
    for entry in report.payload["variables"]:
        rows.append([_csv_num(entry[c]) if c != "name" else entry[c] for c in cols])
    return rows


def _csv_assoc(report: ReportDocument) -> list[list[str]]:
    names = report.payload["names"]
    rows: list[list[str]] = []
    for key in ("ss", "cov", "corr"):
        rows.append([f"# {key}"])
        rows.extend(_matrix_rows(names, report.payload[key]))
    return rows


def _csv_dist(report: ReportDocument) -> list[list[str]]:
    decomposed = report.payload["decomposed"]
    cols = ["variable", "distance_squared", "distance"]
    if decomposed:
        cols += ["location", "size", "shape"]
    rows = [["# distances"], cols]
    for entry in report.payload["per_variable"]:
        rows.append([entry["name"]] + [_csv_num(entry[c]) for c in cols[1:]])
    total = ["(total)", _csv_num(report.payload["total_squared"]), _csv_num(report.payload["total_distance"])]
    if decomposed:
        total += ["", "", ""]
    rows.append(total)
    return rows


def _csv_barycenter(report: ReportDocument) -> list[list[str]]:
    rows = [["# moments"], ["mean", "std"]]
    rows.append([_csv_num(report.payload["mean"]), _csv_num(report.payload["std"])])
    rows.append(["# segments"])
    rows.append(["t_lo", "t_hi", "q_lo", "q_hi"])
    for seg in report.payload["segments"]:
        rows.append([_csv_num(v) for v in seg])
    rows.append(["# histogram"])
    rows.append(["lo", "hi", "weight"])
    for b in report.payload["histogram"]["bins"]:
        rows.append([_csv_num(v) for v in b])
    return rows


def _csv_cluster(report: ReportDocument) -> list[list[str]]:
    payload = report.payload
    rows = [["# meta"], ["key", "value"]]
    for key in (
        "k",
        "metric",
        "standardized",
        "seed",
        "restarts",
        "max_iter",
        "iterations",
        "criterion",
        "quality",
    ):
        rows.append([key, _csv_num(payload[key])])
    rows.append(["# assignments"])
    rows.append(["id", "cluster"])
    for ind_id, label in zip(payload["ids"], payload["assignments"]):
        rows.append([ind_id, _csv_num(label)])
    rows.append(["# criterion_history"])
    rows.append(["iteration", "criterion"])
    for i, value in enumerate(payload["criterion_history"], start=1):
        rows.append([_csv_num(i), _csv_num(value)])
    if payload.get("cross_tabulation") is not None:
        ct = payload["cross_tabulation"]
        rows.append(["# cross_tabulation"])
        rows.append([""] + [f"other_{j}" for j in range(len(ct["counts"][0]))] + ["total"])
        for i, row in enumerate(ct["counts"]):
            rows.append([f"this_{i}"] + [_csv_num(v) for v in row] + [_csv_num(ct["row_totals"][i])])
        rows.append(["total"] + [_csv_num(v) for v in ct["col_totals"]] + [_csv_num(ct["n"])])
    return rows


_CSV_RENDERERS = {
    "summary": _csv_summary,
    "assoc": _csv_assoc,
    "dist": _csv_dist,
    "barycenter": _csv_barycenter,
    "cluster": _csv_cluster,
}


def emit_report(report: ReportDocument, fmt: str = "json") -> bytes:
    """Serialize a report; two emissions of the same report are
    byte-identical."""
    if fmt == "json":
        envelope = {
            "schema_version": report.schema_version,
            "tool": report.tool,
            "version": report.version,
            "command": report.command,
            "input_digest": report.input_digest,
            "parameters": report.parameters,
            "payload": report.payload,
        }
        return dumps_canonical(envelope).encode("utf-8")
    if fmt == "csv":
        renderer = _CSV_RENDERERS.get(report.command)
        if renderer is None:
            raise ValidationError(f"no CSV rendering for command {report.command!r}")
        buf = _stringio.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["# report"])
        writer.writerow(["key", "value"])
        for key in ("tool", "version", "schema_version", "command", "input_digest"):
            writer.writerow([key, _csv_num(getattr(report, key))])
        for key, value in report.parameters.items():
            writer.writerow([f"param.{key}", _csv_num(value)])
        for row in renderer(report):
            writer.writerow(row)
        return buf.getvalue().encode("utf-8")
    raise ValidationError(f"unknown report format {fmt!r}; use 'json' or 'csv'")
