"""Per-author stance aggregation, the profile labeling rule, and activity inequality."""

from __future__ import annotations

import csv
import statistics
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .stance.model import StanceScore


class Label(str, Enum):
    ANTI = "Anti"
    PRO = "Pro"
    UNLABELED = "Unlabeled"


@dataclass
class ProfileSummary:
    author_id: str
    anti_scores: list[float] = field(default_factory=list)
    pro_scores: list[float] = field(default_factory=list)
    label: Label = Label.UNLABELED

    @property
    def n_vaccine_tweets(self) -> int:
        return len(self.anti_scores)

    @property
    def median_anti(self) -> float:
        return statistics.median(self.anti_scores) if self.anti_scores else 0.0

    @property
    def median_pro(self) -> float:
        return statistics.median(self.pro_scores) if self.pro_scores else 0.0

    def add(self, score: StanceScore) -> None:
        self.anti_scores.append(score.p_anti)
        self.pro_scores.append(score.p_pro)

    def merge(self, other: "ProfileSummary") -> "ProfileSummary":
        if other.author_id != self.author_id:
            raise ValueError("cannot merge summaries of different authors")
        return ProfileSummary(
            self.author_id,
            self.anti_scores + other.anti_scores,
            self.pro_scores + other.pro_scores,
        )


def label_profile(summary: ProfileSummary, threshold: float = 0.5, majority: float = 0.5) -> Label:
    """Anti (Pro) when strictly more than ``majority`` of the tweets score at least
    ``threshold`` for that class. Both holding at once counts as Unlabeled.
    """
    n = summary.n_vaccine_tweets
    if n < 1:
        raise ValueError(f"profile {summary.author_id!r} has no vaccine tweets")
    if len(summary.pro_scores) != n:
        raise ValueError("anti and pro score lists differ in length")
    anti = sum(1 for p in summary.anti_scores if p >= threshold) > majority * n
    pro = sum(1 for p in summary.pro_scores if p >= threshold) > majority * n
    if anti and not pro:
        return Label.ANTI
    if pro and not anti:
        return Label.PRO
    return Label.UNLABELED


def aggregate_scores(
    scored: Iterable[tuple[str, StanceScore]],
    into: Optional[dict[str, ProfileSummary]] = None,
) -> dict[str, ProfileSummary]:
    """Fold ``(author_id, score)`` pairs into per-author summaries."""
    profiles = {} if into is None else into
    for author, score in scored:
        profiles.setdefault(author, ProfileSummary(author)).add(score)
    return profiles


def merge_profiles(*parts: Mapping[str, ProfileSummary]) -> dict[str, ProfileSummary]:
    merged: dict[str, ProfileSummary] = {}
    for part in parts:
        for author, summary in part.items():
            if author in merged:
                merged[author] = merged[author].merge(summary)
            else:
                merged[author] = ProfileSummary(author, list(summary.anti_scores), list(summary.pro_scores))
    return merged


def label_all(profiles: Mapping[str, ProfileSummary], threshold: float = 0.5) -> dict[str, Label]:
    labels = {}
    for author in sorted(profiles):
        summary = profiles[author]
        summary.label = label_profile(summary, threshold)
        labels[author] = summary.label
    return labels


def _validated(values) -> np.ndarray:
    x = np.asarray(values, dtype=np.float64).ravel()
    if x.size == 0:
        raise ValueError("need at least one value")
    if (x < 0).any() or not np.isfinite(x).all():
        raise ValueError("values must be finite and nonnegative")
    if not (x > 0).any():
        raise ValueError("need at least one positive value")
    return x


def gini(values) -> float:
    """Mean-absolute-difference Gini, sum_ij |x_i - x_j| / (2 n^2 mean).

    Computed in O(n log n) from the sorted values.
    """
    x = np.sort(_validated(values))
    n = x.size
    ranks = np.arange(1, n + 1)
    return float(np.sum((2 * ranks - n - 1) * x) / (n * x.sum()))


@dataclass
class LorenzCurve:
    points: list[tuple[float, float]]
    gini: float

    def area(self) -> float:
        xs, ys = zip(*self.points)
        return float(np.trapezoid(ys, xs))


def lorenz_points(values) -> LorenzCurve:
    x = np.sort(_validated(values))
    n = x.size
    population = np.arange(n + 1) / n
    content = np.concatenate([[0.0], np.cumsum(x) / x.sum()])
    content[-1] = 1.0
    return LorenzCurve(list(zip(population.tolist(), content.tolist())), gini(x))


def share_for_half(values) -> float:
    """Smallest fraction of holders whose combined value reaches half the total."""
    x = np.sort(_validated(values))[::-1]
    cumulative = np.cumsum(x)
    k = int(np.searchsorted(cumulative, x.sum() / 2.0, side="left")) + 1
    return k / x.size


@dataclass(frozen=True)
class ActivityBin:
    n_tweets: int
    profiles: int
    median_probability: float


def activity_histogram(summaries: Iterable[ProfileSummary], group: Label) -> list[ActivityBin]:
    """Profiles of ``group`` binned by vaccine-tweet count, with the median of their
    per-profile median group probability."""
    if group not in (Label.ANTI, Label.PRO):
        raise ValueError("group must be Anti or Pro")
    bins: dict[int, list[float]] = {}
    for s in summaries:
        if s.label != group:
            continue
        med = s.median_anti if group is Label.ANTI else s.median_pro
        bins.setdefault(s.n_vaccine_tweets, []).append(med)
    return [ActivityBin(k, len(v), statistics.median(v)) for k, v in sorted(bins.items())]


def write_profiles_csv(profiles: Mapping[str, ProfileSummary], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["author_id", "n_vaccine_tweets", "median_anti", "median_pro", "label"])
        for author in sorted(profiles):
            s = profiles[author]
            w.writerow([author, s.n_vaccine_tweets, f"{s.median_anti:.6f}", f"{s.median_pro:.6f}", s.label.value])


def read_profile_labels(path) -> dict[str, Label]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if "author_id" not in (reader.fieldnames or []) or "label" not in (reader.fieldnames or []):
            raise ValueError(f"{path}: profile CSV needs author_id and label columns")
        return {row["author_id"]: Label(row["label"]) for row in reader}


def write_lorenz_csv(curve: LorenzCurve, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["population_share", "content_share"])
        for px, py in curve.points:
            w.writerow([f"{px:.6f}", f"{py:.6f}"])


def write_activity_csv(bins: Sequence[ActivityBin], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n_tweets", "profiles", "median_probability"])
        for b in bins:
            w.writerow([b.n_tweets, b.profiles, f"{b.median_probability:.6f}"])
