"""The language core: card sequences, static validation, step-wise execution.

A pipeline is a straight line of placed cards. Validation checks the
sequence against each card category's input/output signature and
propagates the statically-known table schema through transforms, so most
mistakes surface before anything runs. Execution then produces one
intermediate output per card, which is what makes the environment
teachable: every card's effect is visible on its own.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import charts
from .catalog import Catalog, CardSpec
from .datasets import DatasetRegistry
from .errors import CardpipeError
from .fetch import fetch_csv_url
from .table import INTEGER, REAL, TEXT, Cell, Column, Table, format_cell, parse_csv

COMPARATORS = ("==", "!=", ">", "<", ">=", "<=", "contains")
ORDERED_COMPARATORS = (">", "<", ">=", "<=")

TABLE, SCALAR, CHART = "table", "scalar", "chart"


class EngineError(CardpipeError):
    """Runtime failure inside one card."""

    code = "RUNTIME"


class InvalidPipelineError(CardpipeError):
    """execute() was called on a pipeline that does not validate."""

    code = "INVALID_PIPELINE"

    def __init__(self, report: "ValidationReport"):
        first = report.errors[0]
        super().__init__(f"pipeline does not validate: step {first.step_index}: {first.message}")
        self.report = report


# --------------------------------------------------------------------------
# documents


@dataclass(frozen=True)
class CardInstance:
    card_id: str
    inputs: dict

    def to_json(self) -> dict:
        return {"card": self.card_id, "inputs": dict(self.inputs)}


@dataclass(frozen=True)
class Pipeline:
    cards: tuple[CardInstance, ...]

    def to_json(self) -> dict:
        return {"cards": [c.to_json() for c in self.cards]}

    @staticmethod
    def from_json(doc: dict) -> "Pipeline":
        if not isinstance(doc, dict) or not isinstance(doc.get("cards"), list):
            raise CardpipeError("pipeline document needs a 'cards' list", code="BAD_DOCUMENT")
        cards = []
        for raw in doc["cards"]:
            if not isinstance(raw, dict) or "card" not in raw:
                raise CardpipeError("each entry needs a 'card' id", code="BAD_DOCUMENT")
            inputs = raw.get("inputs", {})
            if not isinstance(inputs, dict):
                raise CardpipeError("'inputs' must be an object", code="BAD_DOCUMENT")
            cards.append(CardInstance(str(raw["card"]), inputs))
        return Pipeline(tuple(cards))


@dataclass(frozen=True)
class Scalar:
    dtype: str
    value: Cell

    def to_json(self) -> dict:
        return {"dtype": self.dtype, "value": self.value}


@dataclass(frozen=True)
class StepOutput:
    step_index: int
    card_id: str
    value: Table | Scalar | charts.ChartSpec
    summary: str

    @property
    def kind(self) -> str:
        return value_kind(self.value)


@dataclass(frozen=True)
class StepError:
    step_index: int
    code: str
    message: str

    def to_json(self) -> dict:
        return {"step_index": self.step_index, "code": self.code, "message": self.message}


@dataclass(frozen=True)
class ExecutionTrace:
    steps: tuple[StepOutput, ...]
    variables_after: tuple[str, ...]
    error: StepError | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    @property
    def final(self) -> StepOutput:
        if self.error is not None:
            raise EngineError(f"execution failed at step {self.error.step_index}: {self.error.message}")
        return self.steps[-1]

    def to_json(self, *, max_rows: int | None = None) -> dict:
        return {
            "steps": [_step_to_json(s, max_rows) for s in self.steps],
            "variables_after": list(self.variables_after),
            "error": self.error.to_json() if self.error else None,
        }


def value_kind(value) -> str:
    if isinstance(value, Table):
        return TABLE
    if isinstance(value, Scalar):
        return SCALAR
    return CHART


def _step_to_json(step: StepOutput, max_rows: int | None) -> dict:
    doc = {"step_index": step.step_index, "card": step.card_id, "kind": step.kind,
           "summary": step.summary}
    if isinstance(step.value, Table):
        table_doc = step.value.to_json()
        if max_rows is not None and table_doc["row_count"] > max_rows:
            table_doc = {
                "columns": [
                    {"name": c["name"], "dtype": c["dtype"], "cells": c["cells"][:max_rows]}
                    for c in table_doc["columns"]
                ],
                "row_count": max_rows,
                "total_rows": step.value.row_count,
            }
        else:
            table_doc["total_rows"] = table_doc["row_count"]
        doc["table"] = table_doc
    elif isinstance(step.value, Scalar):
        doc["scalar"] = step.value.to_json()
    else:
        doc["chart"] = step.value.to_json()
    return doc


class VariableStore:
    """Per-session name -> table bindings; rebinding replaces."""

    def __init__(self):
        self._bindings: dict[str, Table] = {}

    def bind(self, name: str, table: Table):
        if not name:
            raise EngineError("variable name must be non-empty", code="EMPTY_NAME")
        self._bindings[name] = table

    def get(self, name: str) -> Table:
        if name not in self._bindings:
            raise EngineError(f"variable {name!r} is not bound", code="UNBOUND_VARIABLE")
        return self._bindings[name]

    def names(self) -> tuple[str, ...]:
        return tuple(sorted(self._bindings))

    def __len__(self) -> int:
        return len(self._bindings)


@dataclass
class Env:
    """Everything execution needs besides the pipeline itself."""

    catalog: Catalog
    registry: DatasetRegistry
    store: VariableStore = field(default_factory=VariableStore)
    fetcher: object = fetch_csv_url
    allow_filesystem: bool = True


# --------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationIssue:
    step_index: int
    code: str
    message: str

    def to_json(self) -> dict:
        return {"step_index": self.step_index, "code": self.code, "message": self.message}


@dataclass(frozen=True)
class ValidationReport:
    errors: tuple[ValidationIssue, ...]

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_json(self) -> dict:
        return {"ok": self.ok, "errors": [e.to_json() for e in self.errors]}

    def to_text(self) -> str:
        if self.ok:
            return "pipeline is valid"
        return "\n".join(f"step {e.step_index}: {e.code}: {e.message}" for e in self.errors)


_FIELD_SHAPES = {
    "COLUMN_NAME": str,
    "VARIABLE_NAME": str,
    "URL": str,
    "FILE": str,
    "TEXT": str,
}

Schema = list[tuple[str, str]]  # ordered (name, dtype); None when unknown


def _check_inputs(step: int, card: CardSpec, inputs: dict, errors: list[ValidationIssue]) -> bool:
    """Field presence and shape; returns False when follow-up checks are moot."""
    known = {f.name for f in card.input_fields}
    ok = True
    for name in inputs:
        if name not in known:
            errors.append(ValidationIssue(step, "UNKNOWN_INPUT",
                                          f"card {card.id!r} has no input field {name!r}"))
            ok = False
    for f in card.input_fields:
        if f.name not in inputs:
            if f.required:
                errors.append(ValidationIssue(step, "MISSING_INPUT",
                                              f"card {card.id!r} requires input {f.name!r}"))
                ok = False
            continue
        value = inputs[f.name]
        if f.kind in _FIELD_SHAPES:
            if not isinstance(value, str):
                errors.append(ValidationIssue(step, "TYPE_MISMATCH",
                                              f"input {f.name!r} must be text"))
                ok = False
            elif f.kind == "VARIABLE_NAME" and not value:
                errors.append(ValidationIssue(step, "EMPTY_NAME",
                                              f"input {f.name!r} must be non-empty"))
                ok = False
            elif f.kind == "TEXT" and not value:
                errors.append(ValidationIssue(step, "EMPTY_VALUE",
                                              f"input {f.name!r} must be non-empty"))
                ok = False
        elif f.kind == "COMPARATOR":
            if value not in COMPARATORS:
                errors.append(ValidationIssue(step, "BAD_COMPARATOR",
                                              f"unknown comparator {value!r}"))
                ok = False
        elif f.kind == "LITERAL":
            if isinstance(value, bool) or not isinstance(value, (str, int, float)):
                errors.append(ValidationIssue(step, "TYPE_MISMATCH",
                                              f"input {f.name!r} must be text or a number"))
                ok = False
        elif f.kind == "COLUMN_LIST":
            if (not isinstance(value, list) or not value
                    or not all(isinstance(v, str) for v in value)):
                errors.append(ValidationIssue(step, "TYPE_MISMATCH",
                                              f"input {f.name!r} must be a non-empty list of column names"))
                ok = False
            elif len(set(value)) != len(value):
                errors.append(ValidationIssue(step, "DUPLICATE_COLUMN",
                                              f"input {f.name!r} lists a column twice"))
                ok = False
    return ok


def _check_column(step: int, schema: Schema | None, name: str,
                  errors: list[ValidationIssue]) -> str | None:
    """Column dtype under the known schema; None when unknown or missing."""
    if schema is None:
        return None
    for col, dtype in schema:
        if col == name:
            return dtype
    errors.append(ValidationIssue(step, "UNKNOWN_COLUMN", f"no column {name!r} in this table"))
    return None


def _source_schema(card_id: str, inputs: dict, registry: DatasetRegistry) -> Schema | None:
    if card_id == "open_csv_file":
        ref = inputs.get("file")
        if isinstance(ref, str) and registry.has_dataset(ref):
            return list(registry.get_manifest(ref).schema)
        return None
    ref = inputs.get("url")
    if isinstance(ref, str):
        dataset_id = registry.resolve_url(ref)
        if dataset_id is not None:
            return list(registry.get_manifest(dataset_id).schema)
    return None


def validate(pipeline: Pipeline, catalog: Catalog, registry: DatasetRegistry) -> ValidationReport:
    """Static checks: composition, inputs, and schema-known column references."""
    errors: list[ValidationIssue] = []
    if not pipeline.cards:
        return ValidationReport((ValidationIssue(0, "EMPTY_PIPELINE", "pipeline has no cards"),))

    state: str | None = None  # value kind flowing into the next card; None before any
    schema: Schema | None = None
    saved: dict[str, Schema | None] = {}
    chart_seen = False
    unknown_state = False

    for step, inst in enumerate(pipeline.cards):
        if not catalog.has_card(inst.card_id):
            errors.append(ValidationIssue(step, "UNKNOWN_CARD", f"unknown card {inst.card_id!r}"))
            unknown_state = True
            continue
        card = catalog.get_card(inst.card_id)
        sig = catalog.signature_of(inst.card_id)
        inputs_ok = _check_inputs(step, card, inst.inputs, errors)

        # composition against the flowing value kind
        is_source_like = sig.input is None or inst.card_id == "load_variable"
        if step == 0:
            if not is_source_like:
                if card.category == "CHART_ELEMENT":
                    errors.append(ValidationIssue(
                        step, "ELEMENT_BEFORE_CHART",
                        "chart element cards come after a visualization card"))
                else:
                    errors.append(ValidationIssue(
                        step, "TYPE_MISMATCH",
                        f"{inst.card_id!r} needs a {sig.input} but the pipeline has no source yet"))
                unknown_state = True
        elif not unknown_state:
            if card.category == "VISUALIZATION" and chart_seen:
                errors.append(ValidationIssue(step, "MULTIPLE_CHARTS",
                                              "a pipeline can draw at most one chart"))
                unknown_state = True
            elif card.category == "CHART_ELEMENT" and state != CHART:
                errors.append(ValidationIssue(step, "ELEMENT_BEFORE_CHART",
                                              "chart element cards come after a visualization card"))
                unknown_state = True
            elif sig.input is None:
                errors.append(ValidationIssue(step, "TYPE_MISMATCH",
                                              f"{inst.card_id!r} starts a pipeline and cannot follow another card"))
                unknown_state = True
            elif sig.input != state:
                errors.append(ValidationIssue(
                    step, "TYPE_MISMATCH",
                    f"{inst.card_id!r} needs a {sig.input} but the previous card produced a {state}"))
                unknown_state = True

        if card.category == "VISUALIZATION" and not chart_seen and not unknown_state:
            chart_seen = True

        # schema propagation and column checks
        if unknown_state or not inputs_ok:
            schema = None
            state = sig.output
            continue

        if card.category == "SOURCE":
            schema = _source_schema(inst.card_id, inst.inputs, registry)
        elif inst.card_id == "load_variable":
            schema = saved.get(inst.inputs.get("name"), None)
        elif inst.card_id == "save_variable":
            saved[inst.inputs["name"]] = schema
        elif inst.card_id == "filter":
            dtype = _check_column(step, schema, inst.inputs["column"], errors)
            cmp = inst.inputs["comparator"]
            if dtype is not None and cmp in COMPARATORS:
                if cmp in ORDERED_COMPARATORS and dtype == TEXT:
                    errors.append(ValidationIssue(step, "BAD_COMPARATOR",
                                                  f"{cmp!r} needs a number column, {inst.inputs['column']!r} is text"))
                elif cmp == "contains" and dtype != TEXT:
                    errors.append(ValidationIssue(step, "BAD_COMPARATOR",
                                                  f"'contains' needs a text column, {inst.inputs['column']!r} is numeric"))
        elif inst.card_id == "select_columns":
            names = inst.inputs["columns"]
            for name in names:
                _check_column(step, schema, name, errors)
            if schema is not None and all(any(c == n for c, _ in schema) for n in names):
                by_name = dict(schema)
                schema = [(n, by_name[n]) for n in names]
        elif inst.card_id == "group_count":
            key = inst.inputs["column"]
            dtype = _check_column(step, schema, key, errors)
            if schema is not None and dtype is not None:
                count_name = "count" if key != "count" else "row_count"
                schema = [(key, dtype), (count_name, INTEGER)]
        elif card.category == "AGGREGATE":
            if "column" in {f.name for f in card.input_fields}:
                _check_column(step, schema, inst.inputs["column"], errors)
            schema = None
        elif card.category == "VISUALIZATION":
            for f in card.input_fields:
                _check_column(step, schema, inst.inputs[f.name], errors)
            schema = None

        state = sig.output

    return ValidationReport(tuple(errors))


# --------------------------------------------------------------------------
# operations


def _lookup(t: Table, name: str) -> Column:
    if not t.has_column(name):
        raise EngineError(f"no column {name!r} in this table", code="UNKNOWN_COLUMN")
    return t.column(name)


def _coerce_literal(value, dtype: str) -> Cell:
    if isinstance(value, bool):
        raise EngineError(f"cannot compare {dtype} column to {value!r}", code="UNCOERCIBLE_LITERAL")
    if dtype == INTEGER:
        if isinstance(value, int):
            return value
        if isinstance(value, float) and value.is_integer():
            return int(value)
        if isinstance(value, str):
            from .table import _parse_int

            parsed = _parse_int(value)
            if parsed is not None:
                return parsed
    elif dtype == REAL:
        if isinstance(value, (int, float)):
            return float(value)
        if isinstance(value, str):
            from .table import _parse_real

            parsed = _parse_real(value)
            if parsed is not None:
                return parsed
    else:
        if isinstance(value, str):
            return value
    raise EngineError(
        f"cannot compare {dtype} column to {value!r}", code="UNCOERCIBLE_LITERAL"
    )


def op_filter(t: Table, column: str, comparator: str, value) -> Table:
    """Rows passing the predicate, order preserved; missing never matches."""
    col = _lookup(t, column)
    if comparator not in COMPARATORS:
        raise EngineError(f"unknown comparator {comparator!r}", code="BAD_COMPARATOR")
    if comparator in ORDERED_COMPARATORS and col.dtype == TEXT:
        raise EngineError(f"{comparator!r} needs a number column", code="BAD_COMPARATOR")
    if comparator == "contains" and col.dtype != TEXT:
        raise EngineError("'contains' needs a text column", code="BAD_COMPARATOR")
    literal = _coerce_literal(value, col.dtype)

    def keep(cell: Cell) -> bool:
        if cell is None:
            return False
        if comparator == "==":
            return cell == literal
        if comparator == "!=":
            return cell != literal
        if comparator == ">":
            return cell > literal
        if comparator == "<":
            return cell < literal
        if comparator == ">=":
            return cell >= literal
        if comparator == "<=":
            return cell <= literal
        return str(literal).lower() in str(cell).lower()

    indexes = [i for i, cell in enumerate(col.cells) if keep(cell)]
    return t.take_rows(indexes)


def op_select_columns(t: Table, names: list[str]) -> Table:
    if not names:
        raise EngineError("select needs at least one column", code="MISSING_INPUT")
    if len(set(names)) != len(names):
        raise EngineError("the same column is listed twice", code="DUPLICATE_COLUMN")
    cols = tuple(_lookup(t, name) for name in names)
    return Table(cols, t.provenance)


def op_save_variable(t: Table, name: str, store: VariableStore) -> Table:
    store.bind(name, t)
    return t


def op_load_variable(name: str, store: VariableStore) -> Table:
    return store.get(name)


def op_aggregate(t: Table, kind: str, column: str | None = None) -> Scalar:
    """AVERAGE/MIN/MAX over a numeric column (missing skipped) or COUNT of rows."""
    if kind == "COUNT":
        return Scalar(INTEGER, t.row_count)
    col = _lookup(t, column)
    if col.dtype not in (INTEGER, REAL):
        raise EngineError(f"column {column!r} is not numeric", code="NON_NUMERIC_COLUMN")
    values = [c for c in col.cells if c is not None]
    if not values:
        raise EngineError(f"column {column!r} has no values to aggregate", code="EMPTY_AGGREGATE")
    if kind == "AVERAGE":
        return Scalar(REAL, sum(values) / len(values))
    if kind == "MIN":
        return Scalar(col.dtype, min(values))
    if kind == "MAX":
        return Scalar(col.dtype, max(values))
    raise EngineError(f"unknown aggregate {kind!r}", code="BAD_AGGREGATE")


def op_group_count(t: Table, column: str) -> Table:
    """One row per distinct value with its count, sorted ascending, missing last."""
    col = _lookup(t, column)
    counts: dict = {}
    for cell in col.cells:
        counts[cell] = counts.get(cell, 0) + 1
    present = sorted(k for k in counts if k is not None)
    keys: list[Cell] = list(present) + ([None] if None in counts else [])
    count_name = "count" if column != "count" else "row_count"
    return Table(
        (
            Column(column, col.dtype, tuple(keys)),
            Column(count_name, INTEGER, tuple(counts[k] for k in keys)),
        ),
        t.provenance,
    )


# --------------------------------------------------------------------------
# execution

_AGGREGATE_KINDS = {"average": "AVERAGE", "minimum": "MIN", "maximum": "MAX", "count": "COUNT"}
_ELEMENT_CARDS = {
    "set_title": charts.TITLE,
    "set_x_label": charts.X_LABEL,
    "set_y_label": charts.Y_LABEL,
    "set_legend": charts.LEGEND,
}
_CHART_CARDS = {
    "show_table": (charts.TABLE_VIEW, ()),
    "line_chart": (charts.LINE, ("x", "y")),
    "bar_chart": (charts.BAR, ("x", "y")),
    "pie_chart": (charts.PIE, ("category", "value")),
    "map_chart": (charts.MAP, ("region", "value")),
}


def _open_file(ref: str, env: Env) -> Table:
    if env.registry.has_dataset(ref):
        return env.registry.load_dataset(ref)
    if not env.allow_filesystem:
        raise EngineError(
            f"{ref!r} is not a known dataset and local files are not allowed here",
            code="FILE_FORBIDDEN",
        )
    try:
        with open(ref, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise EngineError(f"cannot read {ref!r}: {exc.strerror}", code="FILE_NOT_FOUND") from None
    return parse_csv(data, provenance=ref)


def _open_url(url: str, env: Env) -> Table:
    dataset_id = env.registry.resolve_url(url)
    if dataset_id is not None:
        data = env.registry.raw_bytes(dataset_id)
    else:
        data = env.fetcher(url)
    return parse_csv(data, provenance=url)


def _table_summary(verb: str, t: Table) -> str:
    return f"{verb}: {t.row_count} rows × {len(t.columns)} columns"


def _run_card(inst: CardInstance, value, env: Env):
    """One card -> (new value, summary)."""
    cid = inst.card_id
    if cid == "open_csv_file":
        t = _open_file(inst.inputs["file"], env)
        return t, _table_summary(f"opened {inst.inputs['file']}", t)
    if cid == "open_csv_url":
        t = _open_url(inst.inputs["url"], env)
        return t, _table_summary(f"opened {inst.inputs['url']}", t)
    if cid == "filter":
        before = value.row_count
        t = op_filter(value, inst.inputs["column"], inst.inputs["comparator"], inst.inputs["value"])
        return t, (
            f"filter {inst.inputs['column']} {inst.inputs['comparator']} "
            f"{inst.inputs['value']}: kept {t.row_count} of {before} rows"
        )
    if cid == "select_columns":
        t = op_select_columns(value, list(inst.inputs["columns"]))
        return t, f"selected columns {', '.join(inst.inputs['columns'])}"
    if cid == "group_count":
        t = op_group_count(value, inst.inputs["column"])
        return t, f"counted rows per {inst.inputs['column']}: {t.row_count} groups"
    if cid == "save_variable":
        t = op_save_variable(value, inst.inputs["name"], env.store)
        return t, f"saved variable {inst.inputs['name']!r}"
    if cid == "load_variable":
        t = op_load_variable(inst.inputs["name"], env.store)
        return t, _table_summary(f"loaded variable {inst.inputs['name']!r}", t)
    if cid in _AGGREGATE_KINDS:
        kind = _AGGREGATE_KINDS[cid]
        scalar = op_aggregate(value, kind, inst.inputs.get("column"))
        label = cid if kind == "COUNT" else f"{cid}({inst.inputs['column']})"
        return scalar, f"{label} = {format_cell(scalar.value)}"
    if cid in _CHART_CARDS:
        kind, fields = _CHART_CARDS[cid]
        mapping = {f: inst.inputs[f] for f in fields}
        spec = charts.build_chart(value, kind, mapping)
        return spec, f"{kind.lower().replace('_', ' ')} with {spec.point_count()} data points"
    if cid in _ELEMENT_CARDS:
        element = _ELEMENT_CARDS[cid]
        spec = charts.apply_element(value, element, inst.inputs["text"])
        return spec, f"set {element.lower().replace('_', ' ')}"
    raise EngineError(f"card {cid!r} has no runtime behavior", code="UNKNOWN_CARD")


def execute(pipeline: Pipeline, env: Env) -> ExecutionTrace:
    """Run the pipeline card by card, producing one output per step.

    The pipeline must validate first; runtime failures (fetches, literal
    coercion, dynamic data surprises) truncate the trace at the failing
    step. Only save_variable mutates the store.
    """
    report = validate(pipeline, env.catalog, env.registry)
    if not report.ok:
        raise InvalidPipelineError(report)

    steps: list[StepOutput] = []
    value = None
    for index, inst in enumerate(pipeline.cards):
        try:
            value, summary = _run_card(inst, value, env)
        except CardpipeError as exc:
            return ExecutionTrace(
                tuple(steps), env.store.names(),
                StepError(index, exc.code, str(exc)),
            )
        steps.append(StepOutput(index, inst.card_id, value, summary))
    return ExecutionTrace(tuple(steps), env.store.names(), None)


def trace_json_text(trace: ExecutionTrace, *, max_rows: int | None = None) -> str:
    """Canonical trace serialization (stable key order, shortest float form)."""
    return json.dumps(trace.to_json(max_rows=max_rows), ensure_ascii=False, indent=2) + "\n"
