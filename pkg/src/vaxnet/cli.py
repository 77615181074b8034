"""Command-line entry point: ``vaxnet <command> [options]``.

Exit codes: 0 success (including a clean "no data" run), 1 stage failure,
2 usage or validation error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

import yaml

from . import render
from .config import ConfigError, PipelineConfig
from .corpus import RecordError, matches_keywords, read_records, write_records
from .pipeline import STAGES, NoDataError, Pipeline, StageError
from .stance import Hyperparams, NgramLinearModel, consensus_filter, cross_validate, pretrain_hashtags, train, transfer
from .stance.data import SchemaError as DataSchemaError
from .stance.data import read_labeled_csv, read_ratings_csv
from .stance.training import DEFAULT_HASHTAGS

logger = logging.getLogger("vaxnet")

EXIT_OK, EXIT_STAGE, EXIT_USAGE = 0, 1, 2

RENDER_KINDS = {
    "top-domains": (render.render_top_domains, 1),
    "categories": (render.render_category_timeseries, 1),
    "activity": (lambda a, p, out: render.render_activity({"Anti": a, "Pro": p}, out), 2),
    "lorenz": (lambda a, p, out: render.render_lorenz({"Anti": a, "Pro": p}, out), 2),
    "network": (render.render_network, 2),
    "degree": (render.render_degree, 2),
    "jaccard": (render.render_jaccard, 1),
}


class UsageError(Exception):
    pass


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--config", type=Path, default=d(None), help="pipeline YAML config")
    parser.add_argument("--seed", type=int, default=d(None), help="random seed (overrides config)")
    parser.add_argument("--workers", type=int, default=d(None), help="link resolver threads")
    parser.add_argument("--offline", action="store_true", default=d(False), help="resolve links from the chain fixture")
    parser.add_argument("--out-dir", type=Path, default=d(Path("out")), help="output bundle directory")
    parser.add_argument("-v", "--verbose", action="count", default=d(0))


def _hp_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--set", dest="hp", action="append", default=[], metavar="KEY=VALUE",
                   help="override a classifier hyperparameter (repeatable)")


def _data_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--labels", type=Path, help="CSV with text,label")
    g.add_argument("--ratings", type=Path, help="CSV with text,r1,r2,r3; unanimous rows are kept")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vaxnet", description="Vaccine-stance network analysis pipeline.")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        _global_flags(p, suppress=True)
        return p

    p = add("ingest", "parse and keyword-filter the corpus")
    p.add_argument("--corpus", type=Path, help="JSONL corpus (defaults to the config's)")
    p.add_argument("--write", type=Path, help="also write the vaccine-related records as JSONL")

    p = add("pretrain", "train the hashtag source model")
    p.add_argument("--corpus", type=Path, help="JSONL records whose hashtags are the targets")
    p.add_argument("--hashtags", help="comma-separated hashtag classes")
    p.add_argument("--out", type=Path, help="model file (default <out-dir>/pretrain.bin)")
    _hp_flags(p)

    p = add("train", "train the stance classifier")
    _data_flags(p)
    p.add_argument("--pretrained", type=Path, help="hashtag model to transfer from")
    p.add_argument("--out", type=Path, help="model file (default <out-dir>/model.bin)")
    _hp_flags(p)

    p = add("eval", "k-fold cross-validation of the stance classifier")
    _data_flags(p)
    p.add_argument("--pretrained", type=Path, help="evaluate transfer from this hashtag model")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--binary", action="store_true", help="anti vs not-anti")
    p.add_argument("--out", type=Path, help="write the report JSON here as well as stdout")
    _hp_flags(p)

    add("classify", "score vaccine-related tweets")
    add("profiles", "aggregate scores and label profiles")
    add("graph", "build the mutual-interaction graph and its statistics")
    p = add("links", "resolve and categorize links")
    p.add_argument("--max-depth", type=int, help="redirect hop limit")
    p.add_argument("--timeout-ms", type=int, help="per-hop timeout in milliseconds")
    add("geo", "estimate tweet locations")

    p = add("render", "render SVG figures from CSV outputs")
    p.add_argument("kind", nargs="?", choices=sorted(RENDER_KINDS), help="single figure kind (default: whole bundle)")
    p.add_argument("inputs", nargs="*", type=Path, help="input CSVs for a single figure")
    p.add_argument("--out", type=Path, help="output SVG for a single figure")
    p.add_argument("--bundle", type=Path, help="bundle directory (default <out-dir>)")

    p = add("pipeline", "run every stage")
    p.add_argument("--max-depth", type=int, help="redirect hop limit")
    p.add_argument("--timeout-ms", type=int, help="per-hop timeout in milliseconds")
    return parser


def _parse_value(text: str):
    return yaml.safe_load(text)


def _hyperparams(args, cfg: Optional[PipelineConfig]) -> Hyperparams:
    raw = dict(cfg.classifier) if cfg else {}
    for item in getattr(args, "hp", []):
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
        raw[key.strip()] = _parse_value(value)
    seed = args.seed if args.seed is not None else (cfg.seed if cfg else None)
    if seed is None:
        raise UsageError("a seed is required: pass --seed or a config with 'seed'")
    raw["seed"] = seed
    try:
        return Hyperparams.from_dict(raw)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _load_config(args, required: bool) -> Optional[PipelineConfig]:
    if args.config is None:
        if required:
            raise UsageError("--config is required for this command")
        return None
    cfg = PipelineConfig.load(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.offline:
        overrides["offline"] = True
    if getattr(args, "max_depth", None) is not None:
        overrides["max_depth"] = args.max_depth
    if getattr(args, "timeout_ms", None) is not None:
        overrides["timeout_ms"] = args.timeout_ms
    cfg = replace(cfg, **overrides)
    cfg.validate()
    return cfg


def _examples(args, cfg: Optional[PipelineConfig]):
    labels = args.labels or (cfg.paths.get("labels") if cfg else None)
    ratings = args.ratings or (None if args.labels else (cfg.paths.get("ratings") if cfg else None))
    if labels:
        return read_labeled_csv(labels)
    if ratings:
        return consensus_filter(read_ratings_csv(ratings))
    raise UsageError("training data required: --labels or --ratings")


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def cmd_ingest(args) -> int:
    cfg = _load_config(args, required=args.corpus is None)
    path = args.corpus or cfg.paths["corpus"]
    rejects: list = []
    records = read_records(path, rejects)
    ks = cfg.keyword_set if cfg else None
    vaccine = [r for r in records if (matches_keywords(r, ks) if ks else matches_keywords(r))]
    if args.write:
        write_records(vaccine, args.write)
    _emit({"records": len(records), "rejected": len(rejects), "vaccine_related": len(vaccine)})
    return EXIT_OK


def cmd_pretrain(args) -> int:
    cfg = _load_config(args, required=False)
    hp = _hyperparams(args, cfg)
    path = args.corpus or (cfg.paths.get("pretrain_corpus") or cfg.paths["corpus"] if cfg else None)
    if path is None:
        raise UsageError("--corpus is required without a config")
    hashtags = args.hashtags.split(",") if args.hashtags else (cfg.hashtags if cfg else DEFAULT_HASHTAGS)
    model = pretrain_hashtags([r.text for r in read_records(path)], hashtags, hp)
    out = args.out or args.out_dir / "pretrain.bin"
    out.parent.mkdir(parents=True, exist_ok=True)
    model.save(out)
    _emit({"model": str(out), "classes": list(model.class_names)})
    return EXIT_OK


def cmd_train(args) -> int:
    cfg = _load_config(args, required=False)
    hp = _hyperparams(args, cfg)
    examples = _examples(args, cfg)
    if args.pretrained:
        model = transfer(NgramLinearModel.load(args.pretrained), examples, hp)
    else:
        model = train(examples, hp)
    out = args.out or args.out_dir / "model.bin"
    out.parent.mkdir(parents=True, exist_ok=True)
    model.save(out)
    _emit({"model": str(out), "classes": list(model.class_names), "examples": len(examples)})
    return EXIT_OK


def cmd_eval(args) -> int:
    cfg = _load_config(args, required=False)
    hp = _hyperparams(args, cfg)
    examples = _examples(args, cfg)
    fit = None
    if args.pretrained:
        pretrained = NgramLinearModel.load(args.pretrained)
        fit = lambda tr: transfer(pretrained, tr, hp)  # noqa: E731
    report = cross_validate(examples, k=args.folds, binary=args.binary, seed=hp.seed, fit=fit, hp=hp)
    text = report.to_json()
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


def cmd_render(args) -> int:
    if args.kind:
        fn, n_inputs = RENDER_KINDS[args.kind]
        if len(args.inputs) != n_inputs or args.out is None:
            raise UsageError(f"render {args.kind} needs {n_inputs} input CSV(s) and --out")
        for p in args.inputs:
            if not p.exists():
                raise FileNotFoundError(str(p))
        fn(*args.inputs, args.out)
        _emit({"figures": [str(args.out)]})
        return EXIT_OK
    bundle = args.bundle or args.out_dir
    if not bundle.is_dir():
        raise FileNotFoundError(str(bundle))
    written = render.render_bundle(bundle, args.out or bundle / "figures")
    _emit({"figures": sorted(p.name for p in written)})
    return EXIT_OK


def cmd_stage(args) -> int:
    cfg = _load_config(args, required=True)
    pipe = Pipeline(cfg, args.out_dir)
    if args.command == "pipeline":
        report = pipe.run(STAGES)
        _emit({"out_dir": str(args.out_dir), "stages": sorted(report.get("stages", {}))})
    else:
        _emit(pipe.run_stage(args.command))
    return EXIT_OK


COMMANDS = {
    "ingest": cmd_ingest,
    "pretrain": cmd_pretrain,
    "train": cmd_train,
    "eval": cmd_eval,
    "render": cmd_render,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    handler = COMMANDS.get(args.command, cmd_stage)
    try:
        return handler(args)
    except NoDataError as exc:
        print(f"vaxnet: no data: {exc}", file=sys.stderr)
        return EXIT_OK
    except StageError as exc:
        print(f"vaxnet: {exc}", file=sys.stderr)
        return EXIT_STAGE
    except (UsageError, ConfigError, FileNotFoundError, DataSchemaError, render.SchemaError, RecordError) as exc:
        print(f"vaxnet: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"vaxnet: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
