"""Command-line interface: mine, corpus, split, run, resume, report."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import corpus as corpus_mod
from . import miner, pipeline
from .evaluate import BuildProfile


def _cmd_mine(args) -> int:
    criteria = miner.FilterCriteria(
        min_stars=args.min_stars,
        min_assertions=args.min_assertions,
        source_path_filter=args.source_path,
    )
    candidates = miner.load_candidates(args.candidates)
    stars_client = miner.StarsClient(
        cache_path=args.stars_cache, stars_file=args.stars_file
    )
    clones_dir = Path(args.clones)
    clones_dir.mkdir(parents=True, exist_ok=True)
    for repo in candidates:
        if repo.stars < 0:
            try:
                repo.stars = stars_client.stars(repo)
            except Exception as e:
                logging.warning("stars lookup failed for %s: %s", repo.full_name, e)
                continue
        if repo.stars < criteria.min_stars:
            continue  # skip cloning repositories that already fail the bar
        dest = clones_dir / repo.name
        if not dest.exists():
            try:
                miner.clone_pinned(repo, dest)
            except ConnectionError as e:
                logging.warning("%s", e)
                continue
        count, _warnings = miner.count_production_assertions(dest, criteria)
        repo.assertion_count = count
    result = miner.filter_repositories(candidates, criteria)
    miner.save_accepted(result.accepted, args.out)
    for name, reason in result.errors:
        print(f"excluded {name}: {reason}", file=sys.stderr)
    print(f"accepted {len(result.accepted)} of {len(candidates)} candidates")
    return 0


def _cmd_corpus(args) -> int:
    snapshots = [Path(p) for p in args.snapshots]
    corpus = corpus_mod.build_corpus(snapshots)
    corpus.save(args.out)
    s = corpus.stats
    print(
        f"files={s.files} classes={s.classes} methods={s.methods} "
        f"with_assertions={s.methods_with_assertions} assertions={s.assertions}"
    )
    return 0


def _cmd_split(args) -> int:
    corpus = corpus_mod.Corpus.load(args.corpus)
    corpus_mod.split_dataset(corpus, args.eval_fraction, args.seed)
    corpus.save(args.out or args.corpus)
    n_eval = sum(1 for v in corpus.split.values() if v == corpus_mod.EVAL)
    n_fsl = sum(1 for v in corpus.split.values() if v == corpus_mod.FSL)
    print(f"EVAL={n_eval} FSL={n_fsl}")
    return 0


def _load_config(args) -> pipeline.ExperimentConfig:
    cfg = pipeline.ExperimentConfig.load(args.config)
    cfg.out_dir = args.out or cfg.out_dir
    if args.backend:
        cfg.backend = args.backend
    if args.cassette:
        cfg.cassette = args.cassette
    if args.levels:
        cfg.levels = list(args.levels)
    if args.models:
        wanted = set(args.models.split(","))
        cfg.models = [m for m in cfg.models if m.name in wanted]
        if not cfg.models:
            raise SystemExit(f"no configured model matches {args.models!r}")
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg


def _cmd_run(args) -> int:
    cfg = _load_config(args)
    paths = pipeline.run_experiment(cfg)
    print(pipeline.report(sorted(paths.values())))
    return 0


def _cmd_resume(args) -> int:
    paths = pipeline.resume(args.run_dir)
    print(pipeline.report(sorted(paths.values())))
    return 0


def _cmd_report(args) -> int:
    print(pipeline.report(args.results, csv_path=args.csv))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="assertify",
        description="Generate and evaluate production assertions for Java methods.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mine", help="filter and clone candidate repositories")
    p.add_argument("candidates", help="JSON array of {url, stars?} entries")
    p.add_argument("--out", required=True, help="accepted repo list (JSON)")
    p.add_argument("--clones", required=True, help="directory for clones")
    p.add_argument("--min-stars", type=int, default=500)
    p.add_argument("--min-assertions", type=int, default=50)
    p.add_argument("--source-path", default="src/main/java")
    p.add_argument("--stars-cache", default=None)
    p.add_argument("--stars-file", default=None, help="offline owner/name->stars map")
    p.set_defaults(func=_cmd_mine)

    p = sub.add_parser("corpus", help="build the method corpus from snapshots")
    p.add_argument("snapshots", nargs="+", help="repository snapshot roots")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_corpus)

    p = sub.add_parser("split", help="label EVAL/FSL records")
    p.add_argument("corpus")
    p.add_argument("--eval-fraction", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="defaults to in-place")
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("run", help="run the experiment grid")
    p.add_argument("--config", required=True)
    p.add_argument("--backend", choices=["live", "mock", "replay"], default=None)
    p.add_argument("--cassette", default=None)
    p.add_argument("--levels", default=None, help="e.g. AE or ABCDE")
    p.add_argument("--models", default=None, help="comma-separated model names")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="run output directory")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("resume", help="continue a partial run")
    p.add_argument("run_dir")
    p.set_defaults(func=_cmd_resume)

    p = sub.add_parser("report", help="tabulate results files")
    p.add_argument("results", nargs="+")
    p.add_argument("--csv", default=None)
    p.set_defaults(func=_cmd_report)

    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
