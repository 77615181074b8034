"""Pipeline configuration loaded from YAML."""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

import yaml

from .corpus import DEFAULT_KEYWORDS, KeywordSet, TimeWindow, load_schedule
from .stance.training import DEFAULT_HASHTAGS, Hyperparams


class ConfigError(ValueError):
    pass


PATH_KEYS = ("corpus", "labels", "ratings", "gazetteer", "category_map", "chain_fixture", "model", "pretrain_corpus")
REQUIRED_PATHS = ("corpus",)


@dataclass
class PipelineConfig:
    paths: dict[str, Optional[Path]]
    seed: int
    workers: int = 4
    offline: bool = False
    keywords: tuple[str, ...] = DEFAULT_KEYWORDS
    windows: dict = field(default_factory=lambda: {"start": "2013-09-01", "count": 13, "months": 3})
    link_bins: Optional[dict] = None
    classifier: dict = field(default_factory=dict)
    pretrain: bool = True
    hashtags: tuple[str, ...] = DEFAULT_HASHTAGS
    evaluate: bool = True
    folds: int = 10
    probability_threshold: float = 0.5
    count_retweets: bool = True
    min_windows: int = 2
    degree_cap: Optional[int] = 500
    layout_iterations: int = 200
    top_n: int = 10
    dedup_links: bool = False
    max_depth: int = 20
    timeout_ms: int = 5000
    budget_ms: int = 30000

    @property
    def hyperparams(self) -> Hyperparams:
        return Hyperparams.from_dict({**self.classifier, "seed": self.seed})

    @property
    def keyword_set(self) -> KeywordSet:
        return KeywordSet.of(self.keywords)

    def schedule(self) -> list[TimeWindow]:
        return load_schedule(self.windows)

    def link_schedule(self) -> list[TimeWindow]:
        return load_schedule(self.link_bins or self.windows)

    def validate(self) -> None:
        if self.seed is None:
            raise ConfigError("seed is mandatory")
        for key in REQUIRED_PATHS:
            if not self.paths.get(key):
                raise ConfigError(f"paths.{key} is required")
        if not (self.paths.get("labels") or self.paths.get("ratings") or self.paths.get("model")):
            raise ConfigError("one of paths.labels, paths.ratings or paths.model is required")
        if self.offline and self.paths.get("chain_fixture") is None:
            raise ConfigError("offline link resolution needs paths.chain_fixture")
        for key, p in self.paths.items():
            if p is not None and not p.exists():
                raise ConfigError(f"paths.{key}: no such file {p}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        try:
            self.hyperparams
            self.schedule()
            self.link_schedule()
            self.keyword_set
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_dict(cls, raw: dict, base_dir: Path = Path(".")) -> "PipelineConfig":
        base_dir = Path(base_dir)
        raw = dict(raw or {})
        paths_raw = raw.pop("paths", {}) or {}
        unknown = set(paths_raw) - set(PATH_KEYS)
        if unknown:
            raise ConfigError(f"unknown path key(s): {sorted(unknown)}")
        paths = {k: (base_dir / paths_raw[k]) if paths_raw.get(k) else None for k in PATH_KEYS}
        allowed = {f.name for f in fields(cls)} - {"paths"}
        unknown = set(raw) - allowed
        if unknown:
            raise ConfigError(f"unknown config key(s): {sorted(unknown)}")
        for key in ("keywords", "hashtags"):
            if key in raw:
                raw[key] = tuple(str(x).lower() for x in raw[key])
        if "seed" not in raw:
            raise ConfigError("seed is mandatory")
        return cls(paths=paths, **raw)

    @classmethod
    def load(cls, path) -> "PipelineConfig":
        path = Path(path)
        try:
            raw = yaml.safe_load(path.read_text(encoding="utf-8"))
        except FileNotFoundError as exc:
            raise ConfigError(f"no such config file: {path}") from exc
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: config must be a mapping")
        try:
            return cls.from_dict(raw, path.parent)
        except TypeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
