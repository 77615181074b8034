"""Redirect-chain following with loop, depth and time limits."""

from __future__ import annotations

import json
import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, NamedTuple, Optional, Protocol
from urllib.parse import urljoin, urlsplit

import requests

logger = logging.getLogger(__name__)

REDIRECT_CODES = frozenset({301, 302, 303, 307, 308})
USER_AGENT = "vaxnet-link-resolver/0.1"


class Status(str, Enum):
    RESOLVED = "Resolved"
    TIMEOUT = "Timeout"
    LOOP = "Loop"
    DEPTH_EXCEEDED = "DepthExceeded"
    ERROR = "Error"


@dataclass(frozen=True)
class ResolutionOutcome:
    url: str
    status: Status
    final_url: Optional[str]
    chain: tuple[str, ...]
    detail: str = ""


class Hop(NamedTuple):
    status_code: int
    location: Optional[str]


class FetchTimeout(Exception):
    pass


class FetchError(Exception):
    pass


class Fetcher(Protocol):
    def fetch(self, url: str, timeout: float) -> Hop: ...


class HttpFetcher:
    """One GET per hop with redirects disabled; the body is never read."""

    def __init__(self, user_agent: str = USER_AGENT):
        self.headers = {"User-Agent": user_agent}

    def fetch(self, url: str, timeout: float) -> Hop:
        try:
            with requests.get(
                url, allow_redirects=False, timeout=timeout, stream=True, headers=self.headers
            ) as resp:
                return Hop(resp.status_code, resp.headers.get("Location"))
        except requests.Timeout as exc:
            raise FetchTimeout(str(exc)) from exc
        except requests.RequestException as exc:
            raise FetchError(f"{type(exc).__name__}: {exc}") from exc


@dataclass
class FixtureFetcher:
    """Offline stand-in for the network, backed by a JSON mapping.

    Each entry maps a URL to ``{"status": int, "location": str}``,
    ``{"timeout": true}`` or ``{"error": "message"}``. URLs absent from the
    mapping answer 200.
    """

    entries: dict = field(default_factory=dict)

    @classmethod
    def load(cls, path) -> "FixtureFetcher":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(data, dict):
            raise ValueError(f"{path}: chain fixture must be a JSON object")
        return cls(data)

    def fetch(self, url: str, timeout: float) -> Hop:
        entry = self.entries.get(url)
        if entry is None:
            return Hop(200, None)
        if entry.get("timeout"):
            raise FetchTimeout("fixture timeout")
        if "error" in entry:
            raise FetchError(str(entry["error"]))
        return Hop(int(entry.get("status", 200)), entry.get("location"))


def _valid_absolute(url: str) -> bool:
    try:
        parts = urlsplit(url)
    except ValueError:
        return False
    return parts.scheme in ("http", "https") and bool(parts.netloc)


def resolve(
    url: str,
    max_depth: int = 20,
    timeout: float = 5.0,
    budget: float = 30.0,
    fetcher: Optional[Fetcher] = None,
) -> ResolutionOutcome:
    """Follow 3xx ``Location`` hops from ``url``.

    Stops at the first non-redirect (Resolved), a revisited URL (Loop), a
    per-hop or total time overrun (Timeout), or after ``max_depth`` redirects
    (DepthExceeded), so the chain never exceeds ``max_depth + 1`` URLs.
    Failures are reported as outcomes, never raised.
    """
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    fetcher = fetcher or HttpFetcher()
    chain = [url]
    if not _valid_absolute(url):
        return ResolutionOutcome(url, Status.ERROR, None, tuple(chain), "not an absolute http(s) URL")
    started = time.monotonic()
    current = url
    while True:
        remaining = budget - (time.monotonic() - started)
        if remaining <= 0:
            return ResolutionOutcome(url, Status.TIMEOUT, None, tuple(chain), "total budget exhausted")
        try:
            hop = fetcher.fetch(current, min(timeout, remaining))
        except FetchTimeout as exc:
            return ResolutionOutcome(url, Status.TIMEOUT, None, tuple(chain), str(exc))
        except FetchError as exc:
            return ResolutionOutcome(url, Status.ERROR, None, tuple(chain), str(exc))
        except Exception as exc:  # a broken fetcher must not take the batch down
            logger.exception("fetcher failed on %s", current)
            return ResolutionOutcome(url, Status.ERROR, None, tuple(chain), f"{type(exc).__name__}: {exc}")

        if hop.status_code not in REDIRECT_CODES:
            return ResolutionOutcome(url, Status.RESOLVED, current, tuple(chain), str(hop.status_code))
        if not hop.location:
            return ResolutionOutcome(url, Status.ERROR, None, tuple(chain), f"{hop.status_code} without Location")
        nxt = urljoin(current, hop.location)
        if len(chain) > max_depth:
            return ResolutionOutcome(url, Status.DEPTH_EXCEEDED, None, tuple(chain), f"more than {max_depth} redirects")
        if nxt in chain:
            chain.append(nxt)
            return ResolutionOutcome(url, Status.LOOP, None, tuple(chain), f"revisited {nxt}")
        if not _valid_absolute(nxt):
            return ResolutionOutcome(url, Status.ERROR, None, tuple(chain), f"bad Location {hop.location!r}")
        chain.append(nxt)
        current = nxt


def resolve_batch(
    urls: Iterable[str],
    workers: int = 8,
    max_in_flight: Optional[int] = None,
    **resolve_kwargs,
) -> dict[str, ResolutionOutcome]:
    """Resolve many URLs on a bounded thread pool.

    Each distinct URL is resolved once. At most ``max_in_flight`` (default
    ``2 * workers``) jobs are queued or running at any time. Results are keyed
    by input URL, so ordering does not matter to callers.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    unique = list(dict.fromkeys(urls))
    if workers == 1:
        return {u: resolve(u, **resolve_kwargs) for u in unique}
    slots = threading.BoundedSemaphore(max_in_flight or 2 * workers)
    results: dict[str, ResolutionOutcome] = {}

    def job(u):
        try:
            return u, resolve(u, **resolve_kwargs)
        finally:
            slots.release()

    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = []
        for u in unique:
            slots.acquire()
            futures.append(pool.submit(job, u))
        for fut in futures:
            u, outcome = fut.result()
            results[u] = outcome
    return results
