"""Per-group link statistics and CSV I/O for resolver runs."""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from ..corpus import TimeWindow, assign_window
from .resolver import ResolutionOutcome, Status
from .urls import CATEGORIES, UNCATEGORIZED, CategoryMap, base_url


@dataclass(frozen=True)
class LinkRow:
    tweet_id: str
    author_id: str
    timestamp: float
    url: str


def domain_shares(bases: Iterable[str]) -> list[tuple[str, float]]:
    """Every domain with its percentage of all links, most linked first."""
    counts = Counter(bases)
    total = sum(counts.values())
    if not total:
        return []
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [(base, 100.0 * c / total) for base, c in ranked]


def top_domains(links_by_group: Mapping[str, Iterable[str]], n: int = 10) -> dict[str, list[tuple[str, float]]]:
    """Top ``n`` base URLs per group; percentages are of all the group's links."""
    return {group: domain_shares(bases)[:n] for group, bases in links_by_group.items()}


def category_timeseries(
    links: Iterable[tuple[float, str]],
    bins: Sequence[TimeWindow],
    mapping: CategoryMap,
    categories: Sequence[str] = CATEGORIES + (UNCATEGORIZED,),
) -> list[dict[str, float]]:
    """Per-bin share of links falling in each category.

    A link with several categories counts once for each, so a row can sum to
    more than 1. Empty bins are all zeros.
    """
    totals = [0] * len(bins)
    hits = [Counter() for _ in bins]
    for ts, base in links:
        idx = assign_window(ts, bins)
        if idx is None:
            continue
        totals[idx] += 1
        cats = mapping[base] or frozenset({UNCATEGORIZED})
        hits[idx].update(cats)
    return [
        {c: (hits[i][c] / totals[i] if totals[i] else 0.0) for c in categories}
        for i in range(len(bins))
    ]


def final_base(outcome: ResolutionOutcome) -> Optional[str]:
    """Base URL of where a link ended up.

    Unresolved links fall back to the last URL reached in their chain.
    """
    target = outcome.final_url if outcome.status is Status.RESOLVED else outcome.chain[-1]
    try:
        return base_url(target)
    except ValueError:
        return None


def read_links_csv(path) -> list[LinkRow]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for col in ("tweet_id", "author_id", "timestamp", "url"):
            if col not in (reader.fieldnames or []):
                raise ValueError(f"{path}: missing column {col!r}")
        return [LinkRow(r["tweet_id"], r["author_id"], float(r["timestamp"]), r["url"]) for r in reader]


def write_links_csv(rows: Iterable[LinkRow], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["tweet_id", "author_id", "timestamp", "url"])
        for r in rows:
            w.writerow([r.tweet_id, r.author_id, repr(float(r.timestamp)), r.url])


OUTCOME_COLUMNS = ["tweet_id", "author_id", "timestamp", "url", "status", "final_url", "base_url", "hops", "chain", "detail"]


def write_outcomes_csv(rows: Iterable[LinkRow], outcomes: Mapping[str, ResolutionOutcome], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(OUTCOME_COLUMNS)
        for r in rows:
            o = outcomes[r.url]
            w.writerow(
                [
                    r.tweet_id, r.author_id, repr(float(r.timestamp)), r.url, o.status.value,
                    o.final_url or "", final_base(o) or "", len(o.chain) - 1, " ".join(o.chain), o.detail,
                ]
            )


def write_top_domains_csv(top: Mapping[str, list[tuple[str, float]]], mapping: CategoryMap, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["group", "rank", "base_url", "percent", "categories"])
        for group in sorted(top):
            for rank, (base, pct) in enumerate(top[group], start=1):
                w.writerow([group, rank, base, f"{pct:.4f}", ";".join(sorted(mapping[base]))])


def write_timeseries_csv(series: Mapping[str, list[dict[str, float]]], bins: Sequence[TimeWindow], path) -> None:
    cats = list(CATEGORIES) + [UNCATEGORIZED]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["group", "bin", "start", *cats])
        for group in sorted(series):
            for window, row in zip(bins, series[group]):
                w.writerow([group, window.index, repr(window.start), *(f"{row[c]:.6f}" for c in cats)])
