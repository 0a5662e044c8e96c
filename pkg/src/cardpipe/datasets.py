"""Bundled workshop datasets plus registration of external CSV URLs.

Every dataset is a CSV with a manifest describing its schema. Bundled
fixtures ship inside the package; external datasets are registered by URL
and fetched on demand. The registry also answers "does this URL belong to
one of my datasets?" so source cards can run offline against fixtures.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from urllib.parse import urlparse

from . import fetch
from .errors import CardpipeError, NotFoundError
from .table import Table, parse_csv

BUNDLED_IDS = ("city_bikes", "forest_area", "plastic_production", "players", "research_budgets")


class RegistryError(CardpipeError):
    code = "REGISTRY"


@dataclass(frozen=True)
class DatasetManifest:
    id: str
    title: str
    description: str
    schema: tuple[tuple[str, str], ...]  # (column, dtype) pairs
    source_note: str
    sdg_tags: tuple[int, ...] | None = None

    def to_json(self) -> dict:
        doc = {
            "id": self.id,
            "title": self.title,
            "description": self.description,
            "schema": [{"column": c, "dtype": d} for c, d in self.schema],
            "source_note": self.source_note,
        }
        if self.sdg_tags is not None:
            doc["sdg_tags"] = list(self.sdg_tags)
        return doc

    @staticmethod
    def from_json(doc: dict) -> "DatasetManifest":
        return DatasetManifest(
            id=doc["id"],
            title=doc["title"],
            description=doc["description"],
            schema=tuple((e["column"], e["dtype"]) for e in doc["schema"]),
            source_note=doc.get("source_note", ""),
            sdg_tags=tuple(doc["sdg_tags"]) if "sdg_tags" in doc else None,
        )


class DatasetRegistry:
    """Immutable after the startup registration phase; concurrent reads are safe."""

    def __init__(self):
        self._manifests: dict[str, DatasetManifest] = {}
        self._bundled_bytes: dict[str, bytes] = {}
        self._external_urls: dict[str, str] = {}  # id -> url
        self._tables: dict[str, Table] = {}

    # -- construction ------------------------------------------------------

    def add_bundled(self, manifest: DatasetManifest, data: bytes):
        if manifest.id in self._manifests:
            raise RegistryError(f"duplicate dataset id: {manifest.id!r}")
        self._manifests[manifest.id] = manifest
        self._bundled_bytes[manifest.id] = data

    def register_url(self, dataset_id: str, url: str, manifest: DatasetManifest):
        if dataset_id in self._manifests:
            raise RegistryError(f"duplicate dataset id: {dataset_id!r}")
        scheme = urlparse(url).scheme.lower()
        if scheme not in ("http", "https"):
            raise RegistryError(f"dataset URL must be http(s), got {url!r}")
        self._manifests[dataset_id] = manifest
        self._external_urls[dataset_id] = url

    # -- queries -----------------------------------------------------------

    def list_datasets(self) -> list[DatasetManifest]:
        return [self._manifests[k] for k in sorted(self._manifests)]

    def has_dataset(self, dataset_id: str) -> bool:
        return dataset_id in self._manifests

    def get_manifest(self, dataset_id: str) -> DatasetManifest:
        try:
            return self._manifests[dataset_id]
        except KeyError:
            raise NotFoundError("dataset", dataset_id) from None

    def raw_bytes(self, dataset_id: str) -> bytes:
        """CSV bytes for a dataset; external datasets are fetched."""
        self.get_manifest(dataset_id)
        if dataset_id in self._bundled_bytes:
            return self._bundled_bytes[dataset_id]
        return fetch.fetch_csv_url(self._external_urls[dataset_id])

    def load_dataset(self, dataset_id: str) -> Table:
        if dataset_id in self._tables:
            return self._tables[dataset_id]
        data = self.raw_bytes(dataset_id)
        table = parse_csv(data, provenance=f"dataset:{dataset_id}")
        if dataset_id in self._bundled_bytes:
            self._tables[dataset_id] = table
        return table

    def resolve_url(self, url: str) -> str | None:
        """Dataset id a URL refers to, if any.

        Matches exact registered URLs first, then the canonical serving path
        ``.../datasets/{id}.csv`` for any known dataset.
        """
        for dataset_id, registered in self._external_urls.items():
            if url == registered:
                return dataset_id
        path = urlparse(url).path
        if path.endswith(".csv"):
            parts = path.rsplit("/", 2)
            if len(parts) == 3 and parts[1] == "datasets":
                candidate = parts[2][: -len(".csv")]
                if candidate in self._manifests:
                    return candidate
        return None


def default_registry() -> DatasetRegistry:
    """Registry preloaded with the five bundled workshop datasets."""
    registry = DatasetRegistry()
    root = resources.files("cardpipe.data").joinpath("datasets")
    for dataset_id in BUNDLED_IDS:
        manifest = DatasetManifest.from_json(
            json.loads(root.joinpath(f"{dataset_id}.manifest.json").read_text("utf-8"))
        )
        data = root.joinpath(f"{dataset_id}.csv").read_bytes()
        registry.add_bundled(manifest, data)
    return registry
