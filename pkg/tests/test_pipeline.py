import csv
import json
import socket

import pytest
import yaml

from vaxnet.config import PipelineConfig
from vaxnet.pipeline import STAGES, Pipeline, StageError

EXPECTED = [
    "ingest/summary.json",
    "classify/model.bin", "classify/eval.json", "classify/scores.csv",
    "profiles/profiles.csv", "profiles/activity_anti.csv", "profiles/activity_pro.csv",
    "profiles/lorenz_anti.csv", "profiles/lorenz_pro.csv",
    "graph/jaccard.csv", "graph/degree_distribution.csv", "graph/weibull_fit.csv",
    "graph/mmr.graphml", "graph/layout.csv", "graph/mmr_edges.csv",
    "links/links.csv", "links/outcomes.csv", "links/top_domains.csv", "links/category_timeseries.csv",
    "geo/locations.csv", "report.json",
    "figures/fig_top_domains.svg", "figures/fig_link_categories.svg", "figures/fig_activity.svg",
    "figures/fig_lorenz.svg", "figures/fig_network.svg", "figures/fig_degree.svg", "figures/fig_jaccard.svg",
]


@pytest.fixture(scope="module")
def runs(tmp_path_factory):
    from conftest import FIXTURES

    attempts = []
    real_connect = socket.socket.connect

    def guarded(self, address):
        attempts.append(address)
        raise OSError("network disabled in offline test")

    socket.socket.connect = guarded
    try:
        cfg = PipelineConfig.load(FIXTURES / "config.yaml")
        outs = []
        for i in range(2):
            out = tmp_path_factory.mktemp(f"run{i}")
            Pipeline(cfg, out).run(STAGES)
            outs.append(out)
    finally:
        socket.socket.connect = real_connect
    return outs, attempts


def test_all_artifacts(runs):
    (out, _), _ = runs
    for rel in EXPECTED:
        assert (out / rel).is_file() and (out / rel).stat().st_size > 0, rel


def test_reruns_identical(runs):
    (a, b), _ = runs
    files_a = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file())
    files_b = sorted(p.relative_to(b) for p in b.rglob("*") if p.is_file())
    assert files_a == files_b
    for rel in files_a:
        assert (a / rel).read_bytes() == (b / rel).read_bytes(), rel


def test_offline_makes_no_connections(runs):
    _, attempts = runs
    assert attempts == []


def test_report_contents(runs):
    (out, _), _ = runs
    report = json.loads((out / "report.json").read_text())
    assert report["offline"] is True and report["seed"] == 11
    assert report["published_targets"]["reproducible"] is False
    assert set(report["stages"]) >= {"ingest", "classify", "profiles", "graph", "links", "geo"}
    assert report["stages"]["classify"]["evaluation"]["scratch"]["micro_f1"] >= 0.95
    assert -1 <= report["stages"]["graph"]["giant_component"]["assortativity"] <= 1
    with open(out / "graph/layout.csv", newline="") as fh:
        stances = {r["stance"] for r in csv.DictReader(fh)}
    assert stances == {"Anti", "Pro"}


def test_scores_are_distributions(runs):
    (out, _), _ = runs
    with open(out / "classify/scores.csv", newline="") as fh:
        for row in csv.DictReader(fh):
            total = float(row["p_anti"]) + float(row["p_pro"]) + float(row["p_neutral"])
            assert abs(total - 1) < 1e-5


def test_outcome_counts(runs):
    (out, _), _ = runs
    with open(out / "links/outcomes.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    statuses = {r["status"] for r in rows}
    assert statuses <= {"Resolved", "Timeout", "Loop", "DepthExceeded", "Error"}
    assert "Resolved" in statuses


def test_stage_alone_needs_prerequisites(tmp_path):
    from conftest import FIXTURES

    cfg = PipelineConfig.load(FIXTURES / "config.yaml")
    with pytest.raises(StageError, match="graph"):
        Pipeline(cfg, tmp_path).run_stage("graph")


def test_config_paths_relative_to_file(tmp_path):
    from conftest import FIXTURES

    raw = yaml.safe_load((FIXTURES / "config.yaml").read_text())
    cfg = PipelineConfig.from_dict(raw, str(FIXTURES))
    assert cfg.paths["corpus"] == FIXTURES / "corpus.jsonl"


def test_dedup_links_flag(runs, tmp_path):
    import dataclasses
    import shutil

    from conftest import FIXTURES

    (src, _), _ = runs
    shutil.copytree(src, tmp_path / "b")
    cfg = dataclasses.replace(PipelineConfig.load(FIXTURES / "config.yaml"), dedup_links=True)
    Pipeline(cfg, tmp_path / "b").run_stage("links")

    def pairs(path):
        with open(path, newline="") as fh:
            return [(r["author_id"], r["url"]) for r in csv.DictReader(fh)]

    full = pairs(src / "links/links.csv")
    deduped = pairs(tmp_path / "b/links/links.csv")
    assert len(deduped) == len(set(deduped)) == len(set(full))
