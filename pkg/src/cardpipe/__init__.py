"""Card-based data programming for the classroom.

A fixed vocabulary of color-coded programming cards composes into
straight-line pipelines over CSV tables; pipelines execute one card at a
time so every intermediate result is visible. Charts, a gamified question
bank with hint cards, a CLI, and an HTTP API round out the toolkit.
"""

from .catalog import Catalog, CardSpec, builtin_catalog, load_catalog, serialize_catalog
from .charts import ChartSpec, apply_element, build_chart, check_completeness
from .datasets import DatasetRegistry, default_registry
from .engine import (
    CardInstance,
    Env,
    ExecutionTrace,
    Pipeline,
    Scalar,
    VariableStore,
    execute,
    validate,
)
from .svg import render_svg
from .table import Column, Table, infer_schema, parse_csv, serialize_csv

__version__ = "0.1.0"

__all__ = [
    "Catalog",
    "CardSpec",
    "builtin_catalog",
    "load_catalog",
    "serialize_catalog",
    "ChartSpec",
    "apply_element",
    "build_chart",
    "check_completeness",
    "DatasetRegistry",
    "default_registry",
    "CardInstance",
    "Env",
    "ExecutionTrace",
    "Pipeline",
    "Scalar",
    "VariableStore",
    "execute",
    "validate",
    "render_svg",
    "Column",
    "Table",
    "infer_schema",
    "parse_csv",
    "serialize_csv",
    "__version__",
]
