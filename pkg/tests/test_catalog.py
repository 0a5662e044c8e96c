from __future__ import annotations

import json

import pytest

from cardpipe.catalog import (
    CatalogParseError,
    CatalogValidationError,
    builtin_catalog,
    load_catalog,
    serialize_catalog,
)
from cardpipe.errors import NotFoundError

BUILTIN_CARD_IDS = {
    "open_csv_file", "open_csv_url", "filter", "select_columns", "save_variable",
    "load_variable", "average", "minimum", "maximum", "count", "group_count",
    "show_table", "line_chart", "bar_chart", "pie_chart", "map_chart",
    "set_title", "set_x_label", "set_y_label", "set_legend",
}

FALLACY_NAMES = [
    "cherry-picking", "survivorship bias", "false causality", "gerrymandering",
    "sampling bias", "overfitting", "gambler's fallacy", "Hawthorne effect",
    "danger of summary metrics",
]


def test_builtin_contains_expected_cards(catalog):
    assert {c.id for c in catalog.cards} == BUILTIN_CARD_IDS


def test_builtin_fallacy_names_exact(catalog):
    assert sorted(f.name for f in catalog.fallacies) == sorted(FALLACY_NAMES)


def test_nine_fallacies_three_samples_each(catalog):
    assert len(catalog.fallacies) == 9
    for card in catalog.fallacies:
        assert len(card.samples) == 3
        assert all(s for s in card.samples)


def test_empty_document_is_empty_catalog():
    cat = load_catalog('{"categories": [], "cards": [], "fallacies": []}')
    assert cat.cards == ()
    assert cat.categories == ()
    assert cat.fallacies == ()


def test_get_card_case_sensitive(catalog):
    spec = catalog.get_card("filter")
    assert [(f.name, f.kind) for f in spec.input_fields] == [
        ("column", "COLUMN_NAME"), ("comparator", "COMPARATOR"), ("value", "LITERAL"),
    ]
    with pytest.raises(NotFoundError, match="FILTER"):
        catalog.get_card("FILTER")


def test_line_chart_is_visualization(catalog):
    assert catalog.get_card("line_chart").category == "VISUALIZATION"


def test_list_by_category(catalog):
    viz = catalog.list_by_category("VISUALIZATION")
    assert len(viz) == 5
    assert {c.id for c in viz} == {"show_table", "line_chart", "bar_chart", "pie_chart", "map_chart"}
    elements = catalog.list_by_category("CHART_ELEMENT")
    assert len(elements) >= 3
    sources = catalog.list_by_category("SOURCE")
    assert {c.id for c in sources} == {"open_csv_file", "open_csv_url"}
    assert [c.id for c in viz] == sorted(c.id for c in viz)


def test_list_by_unknown_category(catalog):
    with pytest.raises(NotFoundError):
        catalog.list_by_category("NOPE")


def test_category_colors_distinct(catalog):
    colors = [c.color for c in catalog.categories]
    assert len(set(colors)) == len(colors)
    assert all(c.startswith("#") and len(c) == 7 for c in colors)


def test_signature_derivable_from_category(catalog):
    for card in catalog.cards:
        assert catalog.signature_of(card.id) == catalog.category(card.category).io_signature


def test_every_card_has_definition_and_example(catalog):
    for card in catalog.cards:
        assert card.definition
        assert card.example_usage


def test_chart_cards_carry_tips(catalog):
    for card in catalog.list_by_category("VISUALIZATION"):
        assert card.tips
    for card in catalog.list_by_category("CHART_ELEMENT"):
        assert card.tips


def test_cards_ordered_by_category_then_id(catalog):
    keys = [(c.category, c.id) for c in catalog.cards]
    assert keys == sorted(keys)


def test_roundtrip(catalog):
    doc = serialize_catalog(catalog)
    again = load_catalog(json.dumps(doc))
    assert again == catalog


def test_builtin_document_matches_schema(catalog):
    import schemas

    schemas.check("catalog.schema.json", serialize_catalog(catalog))


def test_parse_error_carries_position():
    with pytest.raises(CatalogParseError, match="line"):
        load_catalog('{"categories": [,]}')


def test_duplicate_card_id_named():
    doc = serialize_catalog(builtin_catalog())
    doc["cards"].append(dict(doc["cards"][0]))
    with pytest.raises(CatalogValidationError, match=doc["cards"][0]["id"]):
        load_catalog(json.dumps(doc))


def test_duplicate_category_color_rejected():
    doc = serialize_catalog(builtin_catalog())
    doc["categories"][1]["color"] = doc["categories"][0]["color"]
    with pytest.raises(CatalogValidationError, match="distinct"):
        load_catalog(json.dumps(doc))


def test_fallacy_needs_three_samples():
    doc = serialize_catalog(builtin_catalog())
    doc["fallacies"][0]["samples"] = doc["fallacies"][0]["samples"][:2]
    with pytest.raises(CatalogValidationError, match="3 samples"):
        load_catalog(json.dumps(doc))


def test_card_with_unknown_category_rejected():
    doc = {"categories": [], "cards": [{
        "id": "x", "category": "NOPE", "title": "X", "definition": "d",
        "example_usage": "e", "input_fields": [],
    }], "fallacies": []}
    with pytest.raises(CatalogValidationError, match="unknown category"):
        load_catalog(json.dumps(doc))
