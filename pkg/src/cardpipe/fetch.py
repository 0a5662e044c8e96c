"""HTTP fetching for the open-by-URL source card.

Small wrapper around requests with a size cap and distinct, typed
failures so classroom error messages can say exactly what went wrong.
"""
from __future__ import annotations

from urllib.parse import urlparse

import requests

from .errors import CardpipeError

MAX_BYTES_DEFAULT = 10 * 1024 * 1024
TIMEOUT_DEFAULT = 10.0


class FetchError(CardpipeError):
    code = "FETCH"

    def __init__(self, message: str, url: str):
        super().__init__(f"{message} ({url})")
        self.url = url


class FetchBadScheme(FetchError):
    code = "BAD_SCHEME"


class FetchNotFound(FetchError):
    code = "NOT_FOUND"


class FetchHttpStatus(FetchError):
    code = "HTTP_STATUS"

    def __init__(self, status: int, url: str):
        super().__init__(f"HTTP status {status}", url)
        self.status = status


class FetchTimeout(FetchError):
    code = "TIMEOUT"


class FetchTooLarge(FetchError):
    code = "TOO_LARGE"


class FetchConnectionError(FetchError):
    code = "CONNECTION"


def fetch_csv_url(
    url: str,
    *,
    max_bytes: int = MAX_BYTES_DEFAULT,
    timeout: float = TIMEOUT_DEFAULT,
) -> bytes:
    """Fetch ``url`` and return the body bytes.

    Only http(s) is accepted; the body is read incrementally and aborted
    once it exceeds ``max_bytes``.
    """
    scheme = urlparse(url).scheme.lower()
    if scheme not in ("http", "https"):
        raise FetchBadScheme(f"unsupported scheme {scheme!r}", url)
    try:
        with requests.get(url, stream=True, timeout=timeout) as resp:
            if resp.status_code == 404:
                raise FetchNotFound("HTTP status 404", url)
            if resp.status_code != 200:
                raise FetchHttpStatus(resp.status_code, url)
            chunks: list[bytes] = []
            size = 0
            for chunk in resp.iter_content(chunk_size=65536):
                size += len(chunk)
                if size > max_bytes:
                    raise FetchTooLarge(f"body exceeds {max_bytes} bytes", url)
                chunks.append(chunk)
            return b"".join(chunks)
    except requests.Timeout:
        raise FetchTimeout(f"no response within {timeout}s", url) from None
    except requests.RequestException as exc:
        raise FetchConnectionError(str(exc), url) from None
