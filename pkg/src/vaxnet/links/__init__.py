"""Link unshortening, base-URL normalization and link taxonomy reports."""

from .reports import category_timeseries, top_domains
from .resolver import FixtureFetcher, HttpFetcher, ResolutionOutcome, Status, resolve, resolve_batch
from .urls import CategoryMap, base_url, categorize

__all__ = [
    "CategoryMap",
    "FixtureFetcher",
    "HttpFetcher",
    "ResolutionOutcome",
    "Status",
    "base_url",
    "categorize",
    "category_timeseries",
    "resolve",
    "resolve_batch",
    "top_domains",
]
