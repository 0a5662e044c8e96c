"""The fixed vocabulary of programming cards.

A catalog bundles the color-coded card categories, the card specs
(front: title and example, back: definition and input fields), and the
nine data-fallacy content cards. Catalogs are immutable after load and
safe to share.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

from .errors import CardpipeError, NotFoundError

FIELD_KINDS = (
    "COLUMN_NAME",
    "COMPARATOR",
    "LITERAL",
    "COLUMN_LIST",
    "VARIABLE_NAME",
    "URL",
    "FILE",
    "TEXT",
)

# the five legal input/output signatures, written "input->output"
SIGNATURES = ("none->table", "table->table", "table->scalar", "table->chart", "chart->chart")


class CatalogParseError(CardpipeError):
    code = "CATALOG_PARSE"


class CatalogValidationError(CardpipeError):
    code = "CATALOG_INVALID"


@dataclass(frozen=True)
class IoSignature:
    input: str | None  # None, "table" or "chart"
    output: str  # "table", "scalar" or "chart"

    @staticmethod
    def parse(text: str) -> "IoSignature":
        if text not in SIGNATURES:
            raise CatalogValidationError(f"unknown io_signature {text!r}")
        left, right = text.split("->")
        return IoSignature(None if left == "none" else left, right)

    def __str__(self) -> str:
        return f"{self.input or 'none'}->{self.output}"


@dataclass(frozen=True)
class CardCategory:
    id: str
    display_name: str
    color: str
    io_signature: IoSignature


@dataclass(frozen=True)
class InputFieldSpec:
    name: str
    kind: str
    required: bool = True


@dataclass(frozen=True)
class CardSpec:
    id: str
    category: str
    title: str
    definition: str
    example_usage: str
    input_fields: tuple[InputFieldSpec, ...] = ()
    tips: str | None = None


@dataclass(frozen=True)
class FallacyCard:
    id: str
    name: str
    description: str
    samples: tuple[str, str, str]


@dataclass(frozen=True)
class Catalog:
    categories: tuple[CardCategory, ...]
    cards: tuple[CardSpec, ...]
    fallacies: tuple[FallacyCard, ...]
    _by_id: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        self._by_id.update({c.id: c for c in self.cards})

    def get_card(self, card_id: str) -> CardSpec:
        card = self._by_id.get(card_id)
        if card is None:
            raise NotFoundError("card", card_id)
        return card

    def has_card(self, card_id: str) -> bool:
        return card_id in self._by_id

    def category(self, category_id: str) -> CardCategory:
        for cat in self.categories:
            if cat.id == category_id:
                return cat
        raise NotFoundError("category", category_id)

    def list_by_category(self, category_id: str) -> list[CardSpec]:
        self.category(category_id)
        return sorted((c for c in self.cards if c.category == category_id), key=lambda c: c.id)

    def signature_of(self, card_id: str) -> IoSignature:
        return self.category(self.get_card(card_id).category).io_signature


def _require(cond: bool, message: str):
    if not cond:
        raise CatalogValidationError(message)


def _check_unique(kind: str, ids: list[str]):
    seen = set()
    for ident in ids:
        _require(ident not in seen, f"duplicate {kind} id: {ident!r}")
        seen.add(ident)


def load_catalog(source: str | bytes | dict) -> Catalog:
    """Parse and validate a catalog document.

    Cards are reordered deterministically by (category, id); categories and
    fallacies keep document order.
    """
    if isinstance(source, (str, bytes)):
        try:
            doc = json.loads(source)
        except json.JSONDecodeError as exc:
            raise CatalogParseError(
                f"malformed catalog document at line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from None
    else:
        doc = source
    _require(isinstance(doc, dict), "catalog document must be a JSON object")
    for key in ("categories", "cards", "fallacies"):
        _require(isinstance(doc.get(key), list), f"catalog document needs a {key!r} list")

    categories = []
    for raw in doc["categories"]:
        color = raw["color"]
        _require(
            isinstance(color, str) and len(color) == 7 and color.startswith("#"),
            f"category {raw.get('id')!r}: color must be #rrggbb, got {color!r}",
        )
        categories.append(
            CardCategory(raw["id"], raw["display_name"], color, IoSignature.parse(raw["io_signature"]))
        )
    _check_unique("category", [c.id for c in categories])
    colors = [c.color for c in categories]
    _require(len(set(colors)) == len(colors), "category colors must be distinct")
    category_ids = {c.id for c in categories}

    cards = []
    for raw in doc["cards"]:
        _require(raw["category"] in category_ids, f"card {raw['id']!r}: unknown category {raw['category']!r}")
        _require(bool(raw.get("definition")), f"card {raw['id']!r}: definition must be non-empty")
        _require(bool(raw.get("example_usage")), f"card {raw['id']!r}: example_usage must be non-empty")
        fields = []
        for f in raw.get("input_fields", []):
            _require(f["kind"] in FIELD_KINDS, f"card {raw['id']!r}: unknown field kind {f['kind']!r}")
            fields.append(InputFieldSpec(f["name"], f["kind"], bool(f.get("required", True))))
        names = [f.name for f in fields]
        _require(len(set(names)) == len(names), f"card {raw['id']!r}: duplicate input field name")
        cards.append(
            CardSpec(
                raw["id"],
                raw["category"],
                raw["title"],
                raw["definition"],
                raw["example_usage"],
                tuple(fields),
                raw.get("tips"),
            )
        )
    _check_unique("card", [c.id for c in cards])
    cards.sort(key=lambda c: (c.category, c.id))

    fallacies = []
    for raw in doc["fallacies"]:
        samples = raw.get("samples", [])
        _require(
            len(samples) == 3, f"fallacy {raw.get('id')!r}: needs exactly 3 samples, got {len(samples)}"
        )
        _require(bool(raw.get("name")), f"fallacy {raw.get('id')!r}: name must be non-empty")
        _require(bool(raw.get("description")), f"fallacy {raw.get('id')!r}: description must be non-empty")
        fallacies.append(FallacyCard(raw["id"], raw["name"], raw["description"], tuple(samples)))
    _check_unique("fallacy", [f.id for f in fallacies])

    return Catalog(tuple(categories), tuple(cards), tuple(fallacies))


def serialize_catalog(catalog: Catalog) -> dict:
    return {
        "categories": [
            {
                "id": c.id,
                "display_name": c.display_name,
                "color": c.color,
                "io_signature": str(c.io_signature),
            }
            for c in catalog.categories
        ],
        "cards": [
            {
                "id": c.id,
                "category": c.category,
                "title": c.title,
                "definition": c.definition,
                "example_usage": c.example_usage,
                "input_fields": [
                    {"name": f.name, "kind": f.kind, "required": f.required} for f in c.input_fields
                ],
                **({"tips": c.tips} if c.tips is not None else {}),
            }
            for c in catalog.cards
        ],
        "fallacies": [
            {"id": f.id, "name": f.name, "description": f.description, "samples": list(f.samples)}
            for f in catalog.fallacies
        ],
    }


def builtin_catalog() -> Catalog:
    """The catalog shipped with the package (also available as catalog.json)."""
    text = resources.files("cardpipe.data").joinpath("catalog.json").read_text("utf-8")
    return load_catalog(text)
