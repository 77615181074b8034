"""Record parsing, keyword filtering, interaction extraction and time windowing."""

from __future__ import annotations

import bisect
import json
import logging
import re
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence

logger = logging.getLogger(__name__)

DEFAULT_KEYWORDS = (
    "unvaccinated",
    "unvaccined",
    "vaccinate",
    "vaccinated",
    "vaccinating",
    "vaccination",
    "vaccinations",
    "vaccinator",
    "vaccinators",
    "vaccine",
    "vaccined",
    "vaccinering",
    "vaccines",
    "vaccinology",
    "vaxx",
)

REQUIRED_FIELDS = ("id", "author_id", "timestamp", "text")


class RecordError(ValueError):
    """A raw line could not be turned into a TweetRecord."""


@dataclass
class TweetRecord:
    id: str
    author_id: str
    timestamp: float
    text: str
    hashtags: list[str] = field(default_factory=list)
    mention_ids: list[str] = field(default_factory=list)
    reply_to: Optional[str] = None
    retweet_of: Optional[str] = None
    urls: list[str] = field(default_factory=list)
    coordinates: Optional[tuple[float, float]] = None
    location_string: Optional[str] = None

    def to_json(self) -> str:
        obj = {
            "id": self.id,
            "author_id": self.author_id,
            "timestamp": self.timestamp,
            "text": self.text,
            "hashtags": list(self.hashtags),
            "mention_ids": list(self.mention_ids),
            "reply_to": self.reply_to,
            "retweet_of": self.retweet_of,
            "urls": list(self.urls),
            "lat": self.coordinates[0] if self.coordinates else None,
            "lon": self.coordinates[1] if self.coordinates else None,
            "location": self.location_string,
        }
        return json.dumps(obj, ensure_ascii=False, sort_keys=True)


@dataclass(frozen=True)
class TimeWindow:
    index: int
    start: float
    end: float

    def __post_init__(self):
        if self.index < 0:
            raise ValueError("window index must be >= 0")
        if not self.start < self.end:
            raise ValueError(f"window {self.index}: start must precede end")

    def contains(self, t: float) -> bool:
        return self.start <= t < self.end


@dataclass(frozen=True)
class KeywordSet:
    keywords: tuple[str, ...] = DEFAULT_KEYWORDS

    def __post_init__(self):
        if not self.keywords:
            raise ValueError("keyword set must be nonempty")
        if any(k != k.lower() for k in self.keywords):
            raise ValueError("keywords must be lowercase")
        # longest first so the alternation prefers full words
        alternation = "|".join(
            re.escape(k) for k in sorted(set(self.keywords), key=lambda k: (-len(k), k))
        )
        pattern = re.compile(rf"\b(?:{alternation})|(?:{alternation})\b")
        object.__setattr__(self, "_pattern", pattern)

    @classmethod
    def of(cls, keywords: Iterable[str]) -> "KeywordSet":
        return cls(tuple(k.lower() for k in keywords))


class Interaction(NamedTuple):
    source: str
    target: str
    timestamp: float


def parse_timestamp(value) -> float:
    """Accept epoch seconds (int, float or numeric string) or ISO-8601 text."""
    if isinstance(value, bool):
        raise RecordError("timestamp must not be boolean")
    if isinstance(value, (int, float)):
        ts = float(value)
    elif isinstance(value, str):
        try:
            ts = float(value)
        except ValueError:
            text = value.strip()
            if text.endswith("Z"):
                text = text[:-1] + "+00:00"
            try:
                parsed = datetime.fromisoformat(text)
            except ValueError as exc:
                raise RecordError(f"unparseable timestamp {value!r}") from exc
            if parsed.tzinfo is None:
                parsed = parsed.replace(tzinfo=timezone.utc)
            ts = parsed.timestamp()
    else:
        raise RecordError(f"unsupported timestamp type {type(value).__name__}")
    if not ts > 0:
        raise RecordError(f"timestamp must be positive, got {ts}")
    return ts


def _id_list(obj, key) -> list[str]:
    value = obj.get(key)
    if value is None:
        return []
    if isinstance(value, (str, int)):
        value = [value]
    if not isinstance(value, list):
        raise RecordError(f"{key} must be a list")
    return [str(v) for v in value if v not in (None, "")]


def _optional_id(obj, key) -> Optional[str]:
    value = obj.get(key)
    if value in (None, ""):
        return None
    return str(value)


def parse_record(line: str) -> TweetRecord:
    """Parse one JSON line into a TweetRecord.

    Raises:
        RecordError: on malformed JSON, missing required fields or
            out-of-range values.
    """
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise RecordError(f"malformed JSON: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise RecordError("record is not a JSON object")
    missing = [k for k in REQUIRED_FIELDS if obj.get(k) is None or (k != "text" and obj.get(k) == "")]
    if missing:
        raise RecordError(f"missing required field(s): {', '.join(missing)}")
    if not isinstance(obj["text"], str):
        raise RecordError("text must be a string")

    hashtags = [str(h).lower().lstrip("#") for h in (obj.get("hashtags") or [])]
    hashtags = [h for h in hashtags if h]

    urls = obj.get("urls") or []
    if isinstance(urls, str):
        urls = [urls]

    lat, lon = obj.get("lat"), obj.get("lon")
    coordinates = None
    if lat is not None and lon is not None:
        try:
            lat, lon = float(lat), float(lon)
        except (TypeError, ValueError) as exc:
            raise RecordError("lat/lon must be numeric") from exc
        if not (-90.0 <= lat <= 90.0 and -180.0 <= lon <= 180.0):
            raise RecordError(f"coordinates out of range: ({lat}, {lon})")
        coordinates = (lat, lon)

    location = obj.get("location")
    return TweetRecord(
        id=str(obj["id"]),
        author_id=str(obj["author_id"]),
        timestamp=parse_timestamp(obj["timestamp"]),
        text=obj["text"],
        hashtags=hashtags,
        mention_ids=_id_list(obj, "mention_ids"),
        reply_to=_optional_id(obj, "reply_to"),
        retweet_of=_optional_id(obj, "retweet_of"),
        urls=[str(u) for u in urls if u],
        coordinates=coordinates,
        location_string=str(location) if location not in (None, "") else None,
    )


def iter_records(lines: Iterable[str], rejects: Optional[list] = None) -> Iterator[TweetRecord]:
    """Parse a stream of lines, skipping (and logging) rejected ones.

    If ``rejects`` is given, ``(line_number, message)`` pairs are appended to it.
    """
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            yield parse_record(line)
        except RecordError as exc:
            logger.warning("line %d rejected: %s", lineno, exc)
            if rejects is not None:
                rejects.append((lineno, str(exc)))


def read_records(path, rejects: Optional[list] = None) -> list[TweetRecord]:
    with open(path, encoding="utf-8") as fh:
        return list(iter_records(fh, rejects))


def write_records(records: Iterable[TweetRecord], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(rec.to_json() + "\n")


def matches_keywords(record: TweetRecord, ks: KeywordSet = KeywordSet()) -> bool:
    """True if a keyword touches a word boundary somewhere in the case-folded text.

    A keyword may start a word ("vaccinated" matches "vaccinate") or end one
    ("provaxx" matches "vaxx").
    """
    return ks._pattern.search(record.text.casefold()) is not None


def extract_interactions(record: TweetRecord) -> list[Interaction]:
    targets = list(record.mention_ids)
    if record.reply_to:
        targets.append(record.reply_to)
    if record.retweet_of:
        targets.append(record.retweet_of)
    seen = set()
    events = []
    for target in targets:
        if target == record.author_id or target in seen:
            continue
        seen.add(target)
        events.append(Interaction(record.author_id, target, record.timestamp))
    return events


def _add_months(d: date, months: int) -> date:
    total = d.year * 12 + (d.month - 1) + months
    return date(total // 12, total % 12 + 1, d.day)


def _epoch(d: date) -> float:
    return datetime(d.year, d.month, d.day, tzinfo=timezone.utc).timestamp()


def window_schedule(start: date = date(2013, 9, 1), count: int = 13, months: int = 3) -> list[TimeWindow]:
    """Contiguous calendar windows of ``months`` months each, starting on ``start``.

    The default covers September 2013 through November 2016 in 13 quarters.
    """
    if count < 1 or months < 1:
        raise ValueError("count and months must be positive")
    if start.day > 28:
        raise ValueError("window start day must be <= 28")
    bounds = [_add_months(start, i * months) for i in range(count + 1)]
    return [TimeWindow(i, _epoch(bounds[i]), _epoch(bounds[i + 1])) for i in range(count)]


def check_contiguous(schedule: Sequence[TimeWindow]) -> None:
    for i, w in enumerate(schedule):
        if w.index != i:
            raise ValueError(f"window at position {i} has index {w.index}")
        if i and schedule[i - 1].end != w.start:
            raise ValueError(f"windows {i - 1} and {i} are not contiguous")


def assign_window(t: float, schedule: Sequence[TimeWindow]) -> Optional[int]:
    if not schedule or t < schedule[0].start or t >= schedule[-1].end:
        return None
    pos = bisect.bisect_right([w.start for w in schedule], t) - 1
    return schedule[pos].index


def bucket_interactions(
    events: Iterable[Interaction], schedule: Sequence[TimeWindow]
) -> dict[int, list[Interaction]]:
    """Group events by window index; events outside the schedule are dropped."""
    starts = [w.start for w in schedule]
    out: dict[int, list[Interaction]] = {w.index: [] for w in schedule}
    for ev in events:
        if not schedule or ev.timestamp < schedule[0].start or ev.timestamp >= schedule[-1].end:
            continue
        pos = bisect.bisect_right(starts, ev.timestamp) - 1
        out[schedule[pos].index].append(ev)
    return out


def load_schedule(spec: dict) -> list[TimeWindow]:
    """Build a schedule from a config mapping with ``start``, ``count``, ``months``."""
    start = spec.get("start", "2013-09-01")
    if isinstance(start, str):
        start = date.fromisoformat(start)
    return window_schedule(start, int(spec.get("count", 13)), int(spec.get("months", 3)))

