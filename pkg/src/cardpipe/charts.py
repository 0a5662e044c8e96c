"""Declarative chart specs, chart-element application, and completeness.

A chart spec is the value a visualization card produces: the chart kind,
the encoded data series, and the presentation elements (title, axis
labels, legend). Element cards only touch presentation; the data never
changes after the chart is built. Completeness against the kind's
required element set is what the hint game is scored on.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from importlib import resources

from .errors import CardpipeError
from .table import INTEGER, REAL, TEXT, Cell, Table

TABLE_VIEW = "TABLE_VIEW"
LINE = "LINE"
BAR = "BAR"
PIE = "PIE"
MAP = "MAP"
CHART_KINDS = (TABLE_VIEW, LINE, BAR, PIE, MAP)

TITLE = "TITLE"
X_LABEL = "X_LABEL"
Y_LABEL = "Y_LABEL"
LEGEND = "LEGEND"
ELEMENTS = (TITLE, X_LABEL, Y_LABEL, LEGEND)

# pies and maps have no axes, so a legend stands in for axis labels
REQUIRED_ELEMENTS = {
    LINE: (TITLE, X_LABEL, Y_LABEL),
    BAR: (TITLE, X_LABEL, Y_LABEL),
    PIE: (TITLE, LEGEND),
    MAP: (TITLE, LEGEND),
    TABLE_VIEW: (TITLE,),
}

SPEC_VERSION = 1


class ChartError(CardpipeError):
    code = "CHART"


@dataclass(frozen=True)
class ChartSpec:
    kind: str
    data: dict
    title: str | None = None
    x_label: str | None = None
    y_label: str | None = None
    legend: tuple[str, ...] | None = None

    def element_value(self, element: str):
        return {
            TITLE: self.title,
            X_LABEL: self.x_label,
            Y_LABEL: self.y_label,
            LEGEND: self.legend,
        }[element]

    def point_count(self) -> int:
        """Number of data points the chart encodes."""
        if self.kind in (LINE, BAR):
            return len(self.data["x"])
        if self.kind == PIE:
            return len(self.data["values"])
        if self.kind == MAP:
            return len(self.data["regions"])
        table = self.data["table"]
        return table["row_count"] * len(table["columns"])

    def to_json(self) -> dict:
        doc: dict = {"spec_version": SPEC_VERSION, "kind": self.kind, "data": self.data}
        doc["title"] = self.title
        doc["x_label"] = self.x_label
        doc["y_label"] = self.y_label
        doc["legend"] = list(self.legend) if self.legend is not None else None
        return doc

    @staticmethod
    def from_json(doc: dict) -> "ChartSpec":
        if doc.get("kind") not in CHART_KINDS:
            raise ChartError(f"unknown chart kind {doc.get('kind')!r}", code="BAD_KIND")
        legend = doc.get("legend")
        return ChartSpec(
            kind=doc["kind"],
            data=doc["data"],
            title=doc.get("title"),
            x_label=doc.get("x_label"),
            y_label=doc.get("y_label"),
            legend=tuple(legend) if legend is not None else None,
        )


@dataclass(frozen=True)
class CompletenessReport:
    missing: tuple[str, ...]
    complete: bool


@dataclass(frozen=True)
class ChartElementCard:
    element: str
    tip: str

    def __post_init__(self):
        if self.element not in ELEMENTS:
            raise ChartError(f"unknown chart element {self.element!r}", code="BAD_ELEMENT")
        if not self.tip:
            raise ChartError("element card tip must be non-empty", code="EMPTY_VALUE")


def _country_codes() -> dict[str, str]:
    text = resources.files("cardpipe.data").joinpath("countries.json").read_text("utf-8")
    return json.loads(text)


_COUNTRIES: dict[str, str] | None = None


def resolve_region(name: str) -> str:
    """Country name or alpha-3 code -> alpha-3 code."""
    global _COUNTRIES
    if _COUNTRIES is None:
        _COUNTRIES = _country_codes()
    if name in _COUNTRIES:
        return _COUNTRIES[name]
    if len(name) == 3 and name.isupper() and name in _COUNTRIES.values():
        return name
    raise ChartError(f"unknown region {name!r}", code="BAD_REGION_CODE")


def _column(t: Table, name: str):
    if not t.has_column(name):
        raise ChartError(f"unknown column {name!r}", code="UNKNOWN_COLUMN")
    return t.column(name)


def _numeric(col, role: str):
    if col.dtype not in (INTEGER, REAL):
        raise ChartError(f"{role} column {col.name!r} is not numeric", code="NON_NUMERIC_VALUE")


def _paired(a: list[Cell], b: list[Cell]) -> tuple[list[Cell], list[Cell]]:
    # rows with a missing cell in either mapped column are skipped
    xs, ys = [], []
    for x, y in zip(a, b):
        if x is None or y is None:
            continue
        xs.append(x)
        ys.append(y)
    return xs, ys


def build_chart(t: Table, kind: str, mapping: dict[str, str]) -> ChartSpec:
    """Encode a table as a chart of ``kind``; all elements start unset.

    Mapping keys by kind: LINE/BAR ``x``/``y``, PIE ``category``/``value``,
    MAP ``region``/``value``; TABLE_VIEW takes no mapping.
    """
    if kind not in CHART_KINDS:
        raise ChartError(f"unknown chart kind {kind!r}", code="BAD_KIND")
    if kind == TABLE_VIEW:
        return ChartSpec(TABLE_VIEW, {"table": t.to_json()})
    if kind in (LINE, BAR):
        x_col = _column(t, mapping["x"])
        y_col = _column(t, mapping["y"])
        _numeric(y_col, "y")
        xs, ys = _paired(list(x_col.cells), list(y_col.cells))
        return ChartSpec(kind, {"x": xs, "y": ys})
    if kind == PIE:
        cat_col = _column(t, mapping["category"])
        val_col = _column(t, mapping["value"])
        if cat_col.dtype != TEXT:
            raise ChartError(
                f"category column {cat_col.name!r} must be text", code="NON_TEXT_CATEGORY"
            )
        _numeric(val_col, "value")
        cats, vals = _paired(list(cat_col.cells), list(val_col.cells))
        if any(v < 0 for v in vals) or not any(v > 0 for v in vals):
            raise ChartError(
                "pie values must be non-negative with at least one positive",
                code="INVALID_PIE_VALUES",
            )
        return ChartSpec(PIE, {"categories": cats, "values": vals})
    region_col = _column(t, mapping["region"])
    val_col = _column(t, mapping["value"])
    if region_col.dtype != TEXT:
        raise ChartError(
            f"region column {region_col.name!r} must be text", code="NON_TEXT_CATEGORY"
        )
    _numeric(val_col, "value")
    names, vals = _paired(list(region_col.cells), list(val_col.cells))
    regions = [resolve_region(str(n)) for n in names]
    return ChartSpec(MAP, {"regions": regions, "values": vals})


def apply_element(spec: ChartSpec, element: str, value: str) -> ChartSpec:
    """Set one presentation element; reapplying overwrites."""
    if element not in ELEMENTS:
        raise ChartError(f"unknown chart element {element!r}", code="BAD_ELEMENT")
    if not value:
        raise ChartError(f"{element} value must be non-empty", code="EMPTY_VALUE")
    if element == TITLE:
        return replace(spec, title=value)
    if element == X_LABEL:
        return replace(spec, x_label=value)
    if element == Y_LABEL:
        return replace(spec, y_label=value)
    entries = tuple(part.strip() for part in value.split(",") if part.strip())
    if not entries:
        raise ChartError("legend value must name at least one series", code="EMPTY_VALUE")
    return replace(spec, legend=entries)


def check_completeness(spec: ChartSpec) -> CompletenessReport:
    required = REQUIRED_ELEMENTS[spec.kind]
    missing = tuple(e for e in required if spec.element_value(e) in (None, ()))
    return CompletenessReport(missing=missing, complete=not missing)


def pie_angles(values: list[float]) -> list[float]:
    """Slice angles in degrees, proportional to each value's share."""
    total = float(sum(values))
    if total <= 0 or not math.isfinite(total):
        raise ChartError("pie total must be positive", code="INVALID_PIE_VALUES")
    return [360.0 * v / total for v in values]
