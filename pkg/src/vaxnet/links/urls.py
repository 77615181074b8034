"""Base-URL normalization and domain categories."""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Mapping
from urllib.parse import urlsplit

import yaml

CATEGORIES = ("commercial", "conspiracy", "news", "pseudoscience", "science", "social", "youtube")
UNCATEGORIZED = "uncategorized"

DEFAULT_CATEGORY_TABLE = {
    "commercial": [
        "articles.mercola.com", "go.thetruthaboutvaccines.com", "greenmedinfo.com",
        "healthimpactnews.com", "healthnutnews.com", "infowars.com", "naturalnews.com",
        "newstarget.com", "vaccineimpact.com",
    ],
    "conspiracy": [
        "awarenessact.com", "newspunch.com", "newstarget.com", "therealstrategy.com", "worldtruth.tv",
    ],
    "news": [
        "bbc.co.uk", "bbc.com", "bioportfolio.com", "cbc.ca", "choice.npr.org", "cnn.com",
        "edition.cnn.com", "forbes.com", "foxnews.com", "huffingtonpost.com",
        "medicalnewstoday.com", "nbcnews.com", "nytimes.com", "reuters.com", "sciencedaily.com",
        "statnews.com", "theguardian.com", "time.com", "whitehouse.gov",
    ],
    "pseudoscience": [
        "collective-evolution.com", "inshapetoday.com", "realfarmacy.com", "seattleorganicrestaurants.com",
    ],
    "science": [
        "bioportfolio.com", "cdc.gov", "medicalnewstoday.com", "sciencedaily.com", "statnews.com", "webmd.com",
    ],
    "social": ["facebook.com", "instagram.com", "reddit.com"],
    "youtube": ["youtube.com"],
}


_SCHEME_ONLY = re.compile(r"^[a-z][a-z0-9+.-]*:(?!\d)", re.I)


def base_url(url: str) -> str:
    """Lowercased host without scheme, port, path, query or leading ``www.``.

    Deeper subdomains are kept, so ``articles.mercola.com`` stays as is.
    """
    parts = urlsplit(url.strip())
    # bare hosts ("bbc.co.uk", "host:8080") get a scheme; "mailto:x" does not
    if not parts.netloc and "://" not in url and not _SCHEME_ONLY.match(url.strip()):
        parts = urlsplit("http://" + url.strip())
    try:
        host = parts.hostname
    except ValueError as exc:
        raise ValueError(f"invalid host in {url!r}") from exc
    if not host:
        raise ValueError(f"URL has no host: {url!r}")
    host = host.rstrip(".")
    if ":" in host:  # IPv6 literal
        return f"[{host}]"
    while host.startswith("www.") and host.count(".") > 1:
        host = host[4:]
    if not host:
        raise ValueError(f"URL has no host: {url!r}")
    return host


class CategoryMap:
    """base-url -> set of category tags; a base may carry several tags."""

    def __init__(self, table: Mapping[str, list[str]] = DEFAULT_CATEGORY_TABLE):
        index: dict[str, set[str]] = {}
        for category, bases in table.items():
            if category not in CATEGORIES:
                raise ValueError(f"unknown category {category!r}; allowed: {', '.join(CATEGORIES)}")
            for b in bases:
                index.setdefault(base_url(b), set()).add(category)
        self._index = {b: frozenset(c) for b, c in index.items()}

    def __getitem__(self, base: str) -> frozenset[str]:
        return self._index.get(base, frozenset())

    def __contains__(self, base: str) -> bool:
        return base in self._index

    def __len__(self) -> int:
        return len(self._index)

    def table(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {}
        for base, cats in sorted(self._index.items()):
            for c in cats:
                out.setdefault(c, []).append(base)
        return {c: sorted(out[c]) for c in sorted(out)}

    @classmethod
    def load(cls, path) -> "CategoryMap":
        text = Path(path).read_text(encoding="utf-8")
        table = json.loads(text) if str(path).endswith(".json") else yaml.safe_load(text)
        if not isinstance(table, dict):
            raise ValueError(f"{path}: category map must be a mapping of category -> list of base URLs")
        return cls(table)

    def save(self, path) -> None:
        Path(path).write_text(yaml.safe_dump(self.table(), sort_keys=True), encoding="utf-8")


def categorize(base: str, mapping: CategoryMap) -> frozenset[str]:
    """Categories of ``base``; unknown bases get the empty set (reported as uncategorized)."""
    return mapping[base]
