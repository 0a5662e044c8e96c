"""Shared error types.

Every domain error carries a stable machine-readable ``code`` so the CLI,
the HTTP API, and the grader can surface the same vocabulary.
"""
from __future__ import annotations


class CardpipeError(Exception):
    """Base class for all domain errors."""

    code = "ERROR"

    def __init__(self, message: str, *, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code

    @property
    def message(self) -> str:
        return str(self)


class NotFoundError(CardpipeError):
    """A lookup by id failed (card, category, dataset, question, ...)."""

    code = "NOT_FOUND"

    def __init__(self, kind: str, ident: str):
        super().__init__(f"unknown {kind}: {ident!r}")
        self.kind = kind
        self.ident = ident
