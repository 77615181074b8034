"""Tiered location estimation: coordinates, optional geocoder, gazetteer lookup."""

from __future__ import annotations

import csv
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional, Protocol

import requests

from .corpus import TweetRecord

logger = logging.getLogger(__name__)


class LocationKind(str, Enum):
    POINT = "Point"
    REGION_DISTRIBUTION = "RegionDistribution"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class LocationEstimate:
    kind: LocationKind
    point: Optional[tuple[float, float]] = None
    distribution: Mapping[str, float] = field(default_factory=dict)
    tier: int = 0

    @classmethod
    def unknown(cls) -> "LocationEstimate":
        return cls(LocationKind.UNKNOWN)


def validate_distribution(dist: Mapping[str, float], tol: float = 1e-9) -> None:
    if not dist:
        raise ValueError("empty distribution")
    if any(p < 0 or not math.isfinite(p) for p in dist.values()):
        raise ValueError("probabilities must be finite and nonnegative")
    total = math.fsum(dist.values())
    if abs(total - 1.0) > tol:
        raise ValueError(f"probabilities sum to {total}, not 1")


def normalize_location_string(text: Optional[str]) -> str:
    """Case-fold, trim, and collapse runs of (unicode) whitespace to one space."""
    if not text:
        return ""
    return " ".join(text.casefold().split())


class Geocoder(Protocol):
    """Maps normalized location text to a region distribution, or None if unknown."""

    def geocode(self, text: str) -> Optional[dict[str, float]]: ...


class DisabledGeocoder:
    """Default geocoder: never answers, so lookups fall through to the gazetteer."""

    def geocode(self, text: str) -> Optional[dict[str, float]]:
        return None


class EndpointGeocoder:
    """Nominatim-style search endpoint.

    Sends ``GET <endpoint>?q=<text>&format=json&addressdetails=1`` and reads the
    first hit's ``address["ISO3166-2-lvl4"]`` (e.g. ``US-NY``) as a certain region.
    """

    def __init__(self, endpoint: str, timeout: float = 5.0):
        self.endpoint = endpoint
        self.timeout = timeout

    def geocode(self, text: str) -> Optional[dict[str, float]]:
        resp = requests.get(
            self.endpoint,
            params={"q": text, "format": "json", "addressdetails": 1},
            timeout=self.timeout,
        )
        resp.raise_for_status()
        hits = resp.json()
        if not hits:
            return None
        region = (hits[0].get("address") or {}).get("ISO3166-2-lvl4")
        return {region: 1.0} if region else None


class Gazetteer:
    def __init__(self, table: Optional[Mapping[str, Mapping[str, float]]] = None):
        self._table: dict[str, dict[str, float]] = {}
        for key, dist in (table or {}).items():
            self.add(key, dist)

    def add(self, text: str, dist: Mapping[str, float]) -> None:
        validate_distribution(dist)
        self._table[normalize_location_string(text)] = dict(sorted(dist.items()))

    def lookup(self, text: str) -> Optional[dict[str, float]]:
        return self._table.get(normalize_location_string(text))

    def __len__(self) -> int:
        return len(self._table)

    @classmethod
    def load_csv(cls, path, tol: float = 1e-9) -> "Gazetteer":
        """Rows of ``location, region, probability``; each location must sum to 1."""
        grouped: dict[str, dict[str, float]] = defaultdict(dict)
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            for col in ("location", "region", "probability"):
                if col not in (reader.fieldnames or []):
                    raise ValueError(f"{path}: missing column {col!r}")
            for row in reader:
                key = normalize_location_string(row["location"])
                grouped[key][row["region"].strip()] = grouped[key].get(row["region"].strip(), 0.0) + float(
                    row["probability"]
                )
        gaz = cls()
        for key, dist in grouped.items():
            try:
                validate_distribution(dist, tol)
            except ValueError as exc:
                raise ValueError(f"{path}: location {key!r}: {exc}") from exc
            gaz._table[key] = dict(sorted(dist.items()))
        return gaz


def resolve_location(
    record: TweetRecord,
    gazetteer: Gazetteer,
    geocoder: Optional[Geocoder] = None,
) -> LocationEstimate:
    """Raw coordinates first, then the geocoder (if any), then the gazetteer."""
    if record.coordinates is not None:
        return LocationEstimate(LocationKind.POINT, point=record.coordinates, tier=1)
    text = normalize_location_string(record.location_string)
    if not text:
        return LocationEstimate.unknown()
    if geocoder is not None:
        try:
            found = geocoder.geocode(text)
        except Exception as exc:
            logger.warning("geocoder failed for %r: %s", text, exc)
            found = None
        if found:
            try:
                validate_distribution(found)
            except ValueError as exc:
                logger.warning("geocoder returned an invalid distribution for %r: %s", text, exc)
            else:
                return LocationEstimate(LocationKind.REGION_DISTRIBUTION, distribution=dict(found), tier=2)
    dist = gazetteer.lookup(text)
    if dist is not None:
        return LocationEstimate(LocationKind.REGION_DISTRIBUTION, distribution=dict(dist), tier=3)
    return LocationEstimate.unknown()


def write_locations_csv(rows, path) -> None:
    """``rows`` are ``(record_id, LocationEstimate)`` pairs."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "kind", "tier", "lat", "lon", "distribution"])
        for rid, est in rows:
            lat, lon = est.point if est.point else ("", "")
            dist = ";".join(f"{k}:{v:.6f}" for k, v in sorted(est.distribution.items()))
            w.writerow([rid, est.kind.value, est.tier, lat, lon, dist])
