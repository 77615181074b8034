"""End-to-end orchestration: ingest, classify, profiles, graph, links, geo, report, render.

Each stage writes its artifacts under the output directory and later stages
read what they need back from disk, so stages can also run one at a time.
"""

from __future__ import annotations

import csv
import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from . import render
from .config import PipelineConfig
from .corpus import TweetRecord, extract_interactions, matches_keywords, read_records
from .geo import Gazetteer, resolve_location, write_locations_csv
from .links.reports import (
    LinkRow,
    category_timeseries,
    final_base,
    top_domains,
    write_links_csv,
    write_outcomes_csv,
    write_timeseries_csv,
    write_top_domains_csv,
)
from .links.resolver import FixtureFetcher, HttpFetcher, Status, resolve_batch
from .links.urls import CategoryMap
from .netgraph import (
    aggregate,
    assortativity_binary,
    build_window_graphs,
    degree_distribution,
    edge_jaccard_matrix,
    export_graph,
    filter_repeated_edges,
    fit_stretched_exponential,
    giant_component,
    induce_labeled_subgraph,
    layout_force_directed,
)
from .netgraph.export import write_degree_csv, write_fit_csv, write_jaccard_csv, write_layout_csv
from .profiles import (
    Label,
    ProfileSummary,
    activity_histogram,
    gini,
    label_all,
    lorenz_points,
    read_profile_labels,
    share_for_half,
    write_activity_csv,
    write_lorenz_csv,
    write_profiles_csv,
)
from .stance import (
    STANCE_CLASSES,
    LabeledExample,
    NgramLinearModel,
    StanceScore,
    consensus_filter,
    cross_validate,
    pretrain_hashtags,
    train,
    transfer,
)
from .stance.data import read_labeled_csv, read_ratings_csv

logger = logging.getLogger(__name__)

STAGES = ("ingest", "classify", "profiles", "graph", "links", "geo", "report", "render")

# Headline figures from the original private corpus; kept for comparison only.
PUBLISHED_TARGETS = {
    "stance_micro_f1": 0.762,
    "binary_accuracy_percent": {"mean": 90.4, "std": 1.4},
    "assortativity": 0.813,
    "giant_component_nodes": 3359,
    "giant_component_anti": {"nodes": 395, "percent": 11.76},
    "share_for_half_percent": {"Anti": 3.75, "Pro": 9.16},
}


class StageError(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"stage '{stage}' failed: {message}")
        self.stage = stage


class NoDataError(RuntimeError):
    pass


def _write_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _read_json(path: Path):
    return json.loads(path.read_text(encoding="utf-8"))


def _fmt(x: float) -> str:
    return repr(float(x))


def write_scores_csv(rows, path) -> None:
    """``rows`` are ``(record, StanceScore)`` pairs."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "author_id", "timestamp", "retweet", "p_anti", "p_pro", "p_neutral"])
        for rec, s in rows:
            w.writerow([rec.id, rec.author_id, _fmt(rec.timestamp), int(rec.retweet_of is not None),
                        _fmt(s.p_anti), _fmt(s.p_pro), _fmt(s.p_neutral)])


def read_scores_csv(path) -> list[tuple[str, str, bool, StanceScore]]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for r in csv.DictReader(fh):
            score = StanceScore(float(r["p_anti"]), float(r["p_pro"]), float(r["p_neutral"]))
            out.append((r["id"], r["author_id"], r["retweet"] == "1", score))
    return out


def stance_scores(model: NgramLinearModel, text: str) -> StanceScore:
    if set(model.class_names) != set(STANCE_CLASSES):
        raise ValueError(f"model classes {model.class_names} are not {STANCE_CLASSES}")
    probs = dict(zip(model.class_names, (float(p) for p in model.predict_proba(text))))
    return StanceScore(probs["anti"], probs["pro"], probs["neutral"])


@dataclass
class Pipeline:
    config: PipelineConfig
    out_dir: Path
    report: dict = field(default_factory=dict)
    _records: Optional[list[TweetRecord]] = None
    _rejects: list = field(default_factory=list)
    _model: Optional[NgramLinearModel] = None

    def __post_init__(self):
        self.out_dir = Path(self.out_dir)

    def _dir(self, name: str) -> Path:
        d = self.out_dir / name
        d.mkdir(parents=True, exist_ok=True)
        return d

    def _require(self, path: Path, stage: str, producer: str) -> Path:
        if not path.exists():
            raise StageError(stage, f"missing {path.relative_to(self.out_dir)}; run '{producer}' first")
        return path

    @property
    def records(self) -> list[TweetRecord]:
        if self._records is None:
            self._rejects = []
            self._records = read_records(self.config.paths["corpus"], self._rejects)
            for lineno, reason in self._rejects[:20]:
                logger.warning("rejected corpus line %s: %s", lineno, reason)
        return self._records

    def vaccine_records(self) -> list[TweetRecord]:
        ks = self.config.keyword_set
        return [r for r in self.records if matches_keywords(r, ks)]

    # --- stages -----------------------------------------------------------

    def ingest(self) -> dict:
        records = self.records
        if not records:
            raise NoDataError(f"no valid records in {self.config.paths['corpus']}")
        vaccine = self.vaccine_records()
        summary = {
            "records": len(records),
            "rejected": len(self._rejects),
            "vaccine_related": len(vaccine),
            "authors": len({r.author_id for r in records}),
            "vaccine_authors": len({r.author_id for r in vaccine}),
        }
        if not vaccine:
            raise NoDataError("no vaccine-related records after keyword filtering")
        _write_json(summary, self._dir("ingest") / "summary.json")
        return summary

    def _training_examples(self) -> list[LabeledExample]:
        paths = self.config.paths
        if paths.get("labels"):
            return read_labeled_csv(paths["labels"])
        if paths.get("ratings"):
            return consensus_filter(read_ratings_csv(paths["ratings"]))
        return []

    def _pretrain_texts(self) -> list[str]:
        path = self.config.paths.get("pretrain_corpus")
        return [r.text for r in (read_records(path) if path else self.records)]

    def fit_model(self, examples) -> tuple[NgramLinearModel, dict, Optional[NgramLinearModel]]:
        hp = self.config.hyperparams
        info: dict = {"training_examples": len(examples), "label_counts": dict(sorted(Counter(e.label for e in examples).items()))}
        pretrained = None
        if self.config.pretrain:
            try:
                pretrained = pretrain_hashtags(self._pretrain_texts(), self.config.hashtags, hp)
                info["pretrain_classes"] = list(pretrained.class_names)
            except ValueError as exc:
                logger.warning("hashtag pretraining skipped: %s", exc)
                info["pretrain_skipped"] = str(exc)
        if pretrained is not None:
            info["method"] = "transfer"
            return transfer(pretrained, examples, hp), info, pretrained
        info["method"] = "scratch"
        return train(examples, hp), info, None

    def classify(self) -> dict:
        out = self._dir("classify")
        hp = self.config.hyperparams
        examples = self._training_examples()
        pretrained = None
        if self.config.paths.get("model"):
            model = NgramLinearModel.load(self.config.paths["model"])
            info = {"method": "loaded"}
        else:
            model, info, pretrained = self.fit_model(examples)
        model.save(out / "model.bin")
        self._model = model

        if self.config.evaluate and examples:
            k = self.config.folds
            seed = self.config.seed
            evals = {"scratch": cross_validate(examples, k=k, seed=seed, hp=hp)}
            evals["binary_scratch"] = cross_validate(examples, k=k, binary=True, seed=seed, hp=hp)
            if pretrained is not None:
                fit = lambda tr: transfer(pretrained, tr, hp)  # noqa: E731
                evals["transfer"] = cross_validate(examples, k=k, seed=seed, fit=fit)
                evals["binary_transfer"] = cross_validate(examples, k=k, binary=True, seed=seed, fit=fit)
            info["evaluation"] = {name: rep.to_dict() for name, rep in sorted(evals.items())}
            _write_json(info["evaluation"], out / "eval.json")

        scored = [(r, stance_scores(model, r.text)) for r in self.vaccine_records()]
        write_scores_csv(scored, out / "scores.csv")
        info["scored_tweets"] = len(scored)
        return info

    def profiles(self) -> dict:
        scores = read_scores_csv(self._require(self.out_dir / "classify" / "scores.csv", "profiles", "classify"))
        summaries: dict[str, ProfileSummary] = {}
        for _, author, is_retweet, score in scores:
            if is_retweet and not self.config.count_retweets:
                continue
            summaries.setdefault(author, ProfileSummary(author)).add(score)
        if not summaries:
            raise NoDataError("no scored vaccine tweets to build profiles from")
        labels = label_all(summaries, self.config.probability_threshold)
        out = self._dir("profiles")
        write_profiles_csv(summaries, out / "profiles.csv")
        info: dict = {"profiles": len(summaries), "labels": dict(sorted(Counter(l.value for l in labels.values()).items()))}
        inequality = {}
        for group in (Label.ANTI, Label.PRO):
            members = [s for s in summaries.values() if s.label is group]
            tag = group.value.lower()
            write_activity_csv(activity_histogram(members, group), out / f"activity_{tag}.csv")
            counts = [s.n_vaccine_tweets for a, s in sorted(summaries.items()) if s.label is group]
            if counts:
                curve = lorenz_points(counts)
                write_lorenz_csv(curve, out / f"lorenz_{tag}.csv")
                inequality[group.value] = {
                    "profiles": len(counts),
                    "tweets": sum(counts),
                    "gini": gini(counts),
                    "share_for_half": share_for_half(counts),
                }
            else:
                (out / f"lorenz_{tag}.csv").unlink(missing_ok=True)
                inequality[group.value] = {"profiles": 0}
        info["inequality"] = inequality
        return info

    def _labels(self, stage: str) -> dict[str, str]:
        path = self._require(self.out_dir / "profiles" / "profiles.csv", stage, "profiles")
        return {a: l.value for a, l in read_profile_labels(path).items()}

    def graph(self) -> dict:
        labels = self._labels("graph")
        out = self._dir("graph")
        schedule = self.config.schedule()
        events = [ev for r in self.records for ev in extract_interactions(r)]
        windows = build_window_graphs(events, schedule)
        jac = edge_jaccard_matrix(windows)
        write_jaccard_csv(jac, out / "jaccard.csv", [w.index for w in windows])
        agg = aggregate(windows)
        info: dict = {
            "interactions": len(events),
            "window_edges": [len(w.edges) for w in windows],
            "aggregate": {"nodes": agg.number_of_nodes(), "edges": agg.number_of_edges()},
        }

        dist = degree_distribution(agg, self.config.degree_cap)
        write_degree_csv(dist, out / "degree_distribution.csv")
        info["degree"] = {"nodes": dist.n, "excluded_above_cap": dist.excluded, "cap": self.config.degree_cap}
        fit = None
        try:
            fit = fit_stretched_exponential(dist.ccdf)
            info["weibull_fit"] = {"lambda": fit.lam, "beta": fit.beta, "residual": fit.residual, "points": fit.points}
        except ValueError as exc:
            info["weibull_fit"] = {"error": str(exc)}
        write_fit_csv(fit, out / "weibull_fit.csv")

        repeated = filter_repeated_edges(agg, self.config.min_windows)
        labeled = induce_labeled_subgraph(repeated, labels)
        info["repeated"] = {"nodes": repeated.number_of_nodes(), "edges": repeated.number_of_edges()}
        info["labeled"] = {"nodes": labeled.number_of_nodes(), "edges": labeled.number_of_edges()}
        if not labeled.edges:
            info["giant_component"] = None
            for name in ("mmr_edges.csv", "layout.csv", "mmr.graphml"):
                (out / name).unlink(missing_ok=True)
            return info
        gc = giant_component(labeled)
        n_anti = sum(1 for v in gc.nodes.values() if v == Label.ANTI.value)
        gc_info: dict = {
            "nodes": gc.number_of_nodes(),
            "edges": gc.number_of_edges(),
            "anti_nodes": n_anti,
            "anti_percent": 100.0 * n_anti / gc.number_of_nodes(),
        }
        try:
            gc_info["assortativity"] = assortativity_binary(gc)
        except ValueError as exc:
            gc_info["assortativity"] = None
            gc_info["assortativity_error"] = str(exc)
        info["giant_component"] = gc_info
        coords = layout_force_directed(gc, iterations=self.config.layout_iterations, seed=self.config.seed)
        export_graph(gc, out / "mmr.graphml", coords=coords)
        write_layout_csv(coords, gc.nodes, out / "layout.csv")
        with open(out / "mmr_edges.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["source", "target", "windows"])
            for (u, v), ws in sorted(gc.edges.items()):
                w.writerow([u, v, " ".join(map(str, sorted(ws)))])
        return info

    def links(self) -> dict:
        labels = self._labels("links")
        out = self._dir("links")
        cfg = self.config
        rows = []
        seen = set()
        for r in self.vaccine_records():
            if labels.get(r.author_id) not in (Label.ANTI.value, Label.PRO.value):
                continue
            for u in r.urls:
                if cfg.dedup_links:
                    # one count per (profile, link)
                    if (r.author_id, u) in seen:
                        continue
                    seen.add((r.author_id, u))
                rows.append(LinkRow(r.id, r.author_id, r.timestamp, u))
        write_links_csv(rows, out / "links.csv")
        fetcher = FixtureFetcher.load(cfg.paths["chain_fixture"]) if cfg.offline else HttpFetcher()
        outcomes = resolve_batch(
            (r.url for r in rows),
            workers=cfg.workers,
            max_depth=cfg.max_depth,
            timeout=cfg.timeout_ms / 1000.0,
            budget=cfg.budget_ms / 1000.0,
            fetcher=fetcher,
        )
        write_outcomes_csv(rows, outcomes, out / "outcomes.csv")
        mapping = CategoryMap.load(cfg.paths["category_map"]) if cfg.paths.get("category_map") else CategoryMap()
        by_group: dict[str, list[str]] = {Label.ANTI.value: [], Label.PRO.value: []}
        timed: dict[str, list[tuple[float, str]]] = {Label.ANTI.value: [], Label.PRO.value: []}
        for r in rows:
            base = final_base(outcomes[r.url])
            if base is None:
                continue
            group = labels[r.author_id]
            by_group[group].append(base)
            timed[group].append((r.timestamp, base))
        top = top_domains(by_group, cfg.top_n)
        write_top_domains_csv(top, mapping, out / "top_domains.csv")
        bins = cfg.link_schedule()
        series = {g: category_timeseries(v, bins, mapping) for g, v in timed.items()}
        write_timeseries_csv(series, bins, out / "category_timeseries.csv")
        statuses = Counter(o.status.value for o in outcomes.values())
        return {
            "links": len(rows),
            "unique_urls": len(outcomes),
            "status": {s.value: statuses.get(s.value, 0) for s in Status},
            "top_domains": {g: [[b, p] for b, p in v] for g, v in sorted(top.items())},
        }

    def geo(self) -> dict:
        out = self._dir("geo")
        path = self.config.paths.get("gazetteer")
        gaz = Gazetteer.load_csv(path) if path else Gazetteer()
        rows = [(r.id, resolve_location(r, gaz)) for r in self.records]
        write_locations_csv(rows, out / "locations.csv")
        kinds = Counter(est.kind.value for _, est in rows)
        return {"records": len(rows), "kinds": dict(sorted(kinds.items()))}

    def write_report(self) -> dict:
        report = {
            "seed": self.config.seed,
            "offline": self.config.offline,
            "stages": {k: v for k, v in self.report.items()},
            "published_targets": {"reproducible": False, **PUBLISHED_TARGETS},
        }
        _write_json(report, self.out_dir / "report.json")
        return report

    def render(self) -> dict:
        written = render.render_bundle(self.out_dir, self.out_dir / "figures")
        return {"figures": sorted(p.name for p in written)}

    # --- driver -----------------------------------------------------------

    def run_stage(self, name: str) -> dict:
        fn: Callable[[], dict] = {
            "ingest": self.ingest,
            "classify": self.classify,
            "profiles": self.profiles,
            "graph": self.graph,
            "links": self.links,
            "geo": self.geo,
            "report": self.write_report,
            "render": self.render,
        }[name]
        logger.info("stage %s", name)
        try:
            result = fn()
        except (StageError, NoDataError):
            raise
        except Exception as exc:
            raise StageError(name, f"{type(exc).__name__}: {exc}") from exc
        if name not in ("report", "render"):
            self.report[name] = result
        return result

    def run(self, stages=STAGES) -> dict:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        for name in stages:
            self.run_stage(name)
        return _read_json(self.out_dir / "report.json") if (self.out_dir / "report.json").exists() else self.report
