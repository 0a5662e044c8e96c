"""Independent brute-force oracle over raw CSV rows.

Deliberately avoids the package's table/engine code paths: rows come
straight from stdlib csv, predicates and aggregates are written long-hand.
Acceptance compares engine results to what this module computes.
"""
from __future__ import annotations

import csv
import io
from pathlib import Path

DATASETS = Path(__file__).resolve().parents[1] / "src" / "cardpipe" / "data" / "datasets"


def read_raw(dataset_id: str) -> tuple[list[str], list[list[str]]]:
    text = (DATASETS / f"{dataset_id}.csv").read_text("utf-8")
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


def column(dataset_id: str, name: str) -> list[str]:
    header, rows = read_raw(dataset_id)
    idx = header.index(name)
    return [row[idx] for row in rows]


def filter_eq(dataset_id: str, name: str, value: str) -> list[list[str]]:
    header, rows = read_raw(dataset_id)
    idx = header.index(name)
    return [row for row in rows if row[idx] == value]


def filter_gt(dataset_id: str, name: str, value: float) -> list[list[str]]:
    header, rows = read_raw(dataset_id)
    idx = header.index(name)
    return [row for row in rows if row[idx] != "" and float(row[idx]) > value]


def average_where(dataset_id: str, where: str, equals: str, target: str) -> float:
    header, rows = read_raw(dataset_id)
    wi, ti = header.index(where), header.index(target)
    values = [float(row[ti]) for row in rows if row[wi] == equals and row[ti] != ""]
    return sum(values) / len(values)


def extreme(dataset_id: str, name: str, largest: bool) -> float:
    values = [float(v) for v in column(dataset_id, name) if v != ""]
    return max(values) if largest else min(values)


def group_counts(dataset_id: str, name: str) -> dict[str, int]:
    counts: dict[str, int] = {}
    for v in column(dataset_id, name):
        counts[v] = counts.get(v, 0) + 1
    return counts
