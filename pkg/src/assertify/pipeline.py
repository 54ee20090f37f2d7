"""End-to-end experiment runs over the (model x prompt level) grid.

A run directory holds a manifest (config/corpus/cassette hashes), an
append-only records journal for resumability, and per-cell results files
with canonical record order. No timestamps are written to results, so
replayed runs are byte-identical.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from . import prompts as P
from .corpus import Corpus, EVAL
from .evaluate import (
    BuildProfile,
    EvaluationRecord,
    ParseOutcome,
    RougeScore,
    aggregate,
    assertion_document_tokens,
    check_semantics,
    check_syntax,
    classify_strength,
    normalize_assertion,
    rouge_l,
)
from .llm import (
    LLMClient,
    LiveBackend,
    MockBackend,
    ModelConfig,
    RateLimiter,
    RecordingBackend,
    ReplayBackend,
    ReplayMiss,
    TransportError,
    get_tokenizer,
)
from .postprocess import (
    StaleSnapshotError,
    filter_pairs,
    insert_assertions,
    parse_response,
    replace_method,
    restore_method,
)
from .preprocess import PruneError, prune

log = logging.getLogger(__name__)

RESULTS_SCHEMA_VERSION = 1


@dataclass
class ExperimentConfig:
    corpus_path: str
    levels: list[str]
    models: list[ModelConfig]
    backend: str = "mock"  # live | mock | replay
    cassette: str | None = None
    record: bool = False  # record a cassette while running live/mock
    similarity_k: int = 3
    similarity_threshold: float = 0.5
    seed: int = 0
    out_dir: str = "run"
    snapshots_dir: str | None = None  # baseline duplicates, one per repo
    build_profiles: dict[str, BuildProfile] = field(default_factory=dict)
    eval_limit: int | None = None  # cap on evaluation methods (smoke runs)
    mock_reply: str | None = None  # fixed mock reply (tests)

    def __post_init__(self):
        if not self.models:
            raise ValueError("at least one model is required")
        if not self.levels:
            raise ValueError("at least one prompt level is required")
        bad = [l for l in self.levels if l not in P.LEVELS]
        if bad:
            raise ValueError(f"unknown prompt levels: {bad}")
        if self.backend not in ("live", "mock", "replay"):
            raise ValueError(f"unknown backend: {self.backend!r}")
        if self.backend == "replay" and not self.cassette:
            raise ValueError("replay backend requires a cassette path")

    def to_dict(self) -> dict:
        return {
            "corpus_path": self.corpus_path,
            "levels": list(self.levels),
            "models": [
                {
                    "name": m.name,
                    "context_limit": m.context_limit,
                    "price_in": m.price_in,
                    "price_out": m.price_out,
                    "tokenizer": m.tokenizer,
                    "response_reserve": m.response_reserve,
                }
                for m in self.models
            ],
            "backend": self.backend,
            "cassette": self.cassette,
            "similarity_k": self.similarity_k,
            "similarity_threshold": self.similarity_threshold,
            "seed": self.seed,
            "snapshots_dir": self.snapshots_dir,
            "build_profiles": {
                k: {
                    "build_command": v.build_command,
                    "toolchain_version": v.toolchain_version,
                    "timeout_seconds": v.timeout_seconds,
                }
                for k, v in sorted(self.build_profiles.items())
            },
            "eval_limit": self.eval_limit,
            "mock_reply": self.mock_reply,
        }

    def config_hash(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        d["models"] = [ModelConfig.from_dict(m) for m in d["models"]]
        d["build_profiles"] = {
            k: BuildProfile.from_dict(v)
            for k, v in d.get("build_profiles", {}).items()
        }
        d.pop("out_dir", None)
        d.pop("record", None)
        return cls(out_dir="run", **d)

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        d = json.loads(Path(path).read_text(encoding="utf-8"))
        cfg = cls.from_dict(d)
        return cfg


def _file_hash(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _make_backend(config: ExperimentConfig):
    if config.backend == "mock":
        backend = MockBackend(fixed_text=config.mock_reply)
    elif config.backend == "replay":
        backend = ReplayBackend(config.cassette)
    elif config.backend == "live":
        backend = LiveBackend()
    else:
        raise ValueError(f"unknown backend mode: {config.backend}")
    if config.record and config.backend != "replay":
        if not config.cassette:
            raise ValueError("recording requires a cassette path")
        backend = RecordingBackend(backend, config.cassette)
    return backend


class Runner:
    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.out = Path(config.out_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        self.corpus = Corpus.load(config.corpus_path)
        self.backend = _make_backend(config)
        self.cache = P.SummaryCache.load(self.out / "summaries.jsonl")
        self.journal = self.out / "records.jsonl"
        self._examples_cache: dict[str, list[P.FewShotExample]] = {}

    # -- manifest ----------------------------------------------------------

    def manifest(self) -> dict:
        return {
            "config_hash": self.config.config_hash(),
            "corpus_hash": _file_hash(self.config.corpus_path),
            "cassette_id": _file_hash(self.config.cassette)
            if self.config.cassette and Path(self.config.cassette).exists()
            else None,
            "tokenizers": {
                m.name: get_tokenizer(m.tokenizer)[0] for m in self.config.models
            },
            "config": self.config.to_dict(),
        }

    def _write_manifest(self) -> None:
        path = self.out / "manifest.json"
        manifest = self.manifest()
        if path.exists():
            existing = json.loads(path.read_text(encoding="utf-8"))
            if existing["config_hash"] != manifest["config_hash"]:
                diffs = _config_diff(existing["config"], manifest["config"])
                raise RuntimeError(
                    "run directory was produced by a different configuration; "
                    f"differing keys: {diffs}"
                )
        else:
            path.write_text(
                json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                encoding="utf-8",
            )

    # -- journal -----------------------------------------------------------

    def _done_cells(self) -> set[tuple[str, str, str]]:
        done = set()
        if self.journal.exists():
            with self.journal.open(encoding="utf-8") as f:
                for line in f:
                    line = line.strip()
                    if not line:
                        continue
                    d = json.loads(line)
                    done.add((d["model"], d["level"], d["record"]["method_id"]))
        return done

    def _append_record(self, model: str, level: str, record: EvaluationRecord) -> None:
        with self.journal.open("a", encoding="utf-8") as f:
            f.write(
                json.dumps(
                    {"model": model, "level": level, "record": record.to_dict()},
                    ensure_ascii=False,
                )
                + "\n"
            )

    # -- per-method evaluation ---------------------------------------------

    def _eval_methods(self):
        methods = self.corpus.labeled(EVAL)
        if self.config.eval_limit is not None:
            methods = methods[: self.config.eval_limit]
        return methods

    def _examples_for(self, method) -> list[P.FewShotExample]:
        if method.record_id not in self._examples_cache:
            self._examples_cache[method.record_id] = P.prepare_examples(
                method,
                self.corpus,
                k=self.config.similarity_k,
                threshold=self.config.similarity_threshold,
            )
        return self._examples_cache[method.record_id]

    def _process(self, client: LLMClient, level: str, method) -> EvaluationRecord:
        model = client.model
        # fresh per-method accounting: subtracting running totals is not
        # float-stable across resumed runs
        client.total_cost = 0.0
        client.total_latency_ms = 0
        failure = None
        pairs, rejected = [], []
        try:
            pruned = prune(method)
        except PruneError as e:
            return EvaluationRecord(
                method_id=method.record_id,
                level=level,
                model=model.name,
                pairs_raw=0,
                pairs_valid=0,
                pairs_dropped=0,
                parse=ParseOutcome(ok=False, diagnostic=str(e)),
                compile=None,
                rouge=RougeScore(0.0, 0.0, 0.0),
                strength="undefined",
                failure="prune_error",
            )
        try:
            kwargs: dict = {}
            if level >= "B":
                kwargs["self_summary"] = P.summarize_method(
                    method.record_id, method.body_text, method.signature,
                    client, self.cache,
                )
            if level >= "C":
                kwargs["io_description"] = P.describe_io(method)
            if level >= "D":
                deps = P.extract_dependencies(method, self.corpus)
                dep_summaries = []
                for dep in deps:
                    dep_summaries.append(
                        (
                            dep.method_name,
                            P.summarize_method(
                                dep.record_id, dep.body_text, dep.signature,
                                client, self.cache, kind=P.DEP_SUMMARY,
                            ),
                        )
                    )
                kwargs["dep_summaries"] = dep_summaries
            if level == "E":
                kwargs["examples"] = self._examples_for(method)
            bundle = P.build_prompt(level, method, pruned, model, **kwargs)
            bundle = P.enforce_budget(bundle, model)
            result = client.infer(bundle.system_text, bundle.messages)
            pairs, rejected = parse_response(result.raw_text)
            if not pairs:
                failure = "parse_response_empty"
        except P.OverBudgetError:
            failure = "over_budget"
        except ReplayMiss:
            failure = "replay_miss"
        except TransportError:
            failure = "transport"

        valid, dropped = filter_pairs(pairs, pruned)
        new_text = insert_assertions(pruned, valid)
        parse = check_syntax(new_text)
        compile_outcome = None
        if parse.ok and self.config.snapshots_dir and valid:
            profile = self.config.build_profiles.get(method.repo_id)
            snapshot = Path(self.config.snapshots_dir) / method.repo_id
            if profile and snapshot.is_dir():
                try:
                    replace_method(snapshot, method, new_text)
                    try:
                        compile_outcome = check_semantics(snapshot, profile)
                    finally:
                        restore_method(snapshot, method, new_text)
                except StaleSnapshotError:
                    failure = failure or "stale_span"
        reference = assertion_document_tokens([a.text for a in method.assertions])
        candidate = assertion_document_tokens(
            [p.assertion for p in sorted(valid, key=lambda p: p.line)]
        )
        rouge = rouge_l(reference, candidate)
        strength = classify_strength(
            {normalize_assertion(a.text) for a in method.assertions},
            {normalize_assertion(p.assertion) for p in valid},
        )
        return EvaluationRecord(
            method_id=method.record_id,
            level=level,
            model=model.name,
            pairs_raw=len(pairs) + len(rejected),
            pairs_valid=len(valid),
            pairs_dropped=len(dropped),
            parse=parse,
            compile=compile_outcome,
            rouge=rouge,
            strength=strength,
            latency_ms=client.total_latency_ms,
            cost=client.total_cost,
            failure=failure,
        )

    # -- run ---------------------------------------------------------------

    def run(self) -> dict[tuple[str, str], Path]:
        self._write_manifest()
        done = self._done_cells()
        methods = self._eval_methods()
        for model_cfg in self.config.models:
            client = LLMClient(
                model=model_cfg,
                backend=self.backend,
                rate_limiter=RateLimiter(model_cfg.rate_limit_per_minute),
            )
            for level in self.config.levels:
                for method in methods:
                    key = (model_cfg.name, level, method.record_id)
                    if key in done:
                        continue
                    record = self._process(client, level, method)
                    self._append_record(model_cfg.name, level, record)
                    done.add(key)
        return self._write_results()

    def _write_results(self) -> dict[tuple[str, str], Path]:
        by_cell: dict[tuple[str, str], dict[str, EvaluationRecord]] = {}
        with self.journal.open(encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if not line:
                    continue
                d = json.loads(line)
                rec = EvaluationRecord.from_dict(d["record"])
                by_cell.setdefault((d["model"], d["level"]), {})[rec.method_id] = rec
        out_paths: dict[tuple[str, str], Path] = {}
        for (model, level), recs in sorted(by_cell.items()):
            ordered = [recs[k] for k in sorted(recs)]
            summary = aggregate(ordered)
            doc = {
                "schema": RESULTS_SCHEMA_VERSION,
                "config_hash": self.config.config_hash(),
                "model": model,
                "level": level,
                "records": [r.to_dict() for r in ordered],
                "summary": summary.to_dict(),
            }
            path = self.out / f"results_{model}_{level}.json"
            path.write_text(
                json.dumps(doc, indent=2, ensure_ascii=False) + "\n",
                encoding="utf-8",
            )
            out_paths[(model, level)] = path
        return out_paths


def _config_diff(a: dict, b: dict) -> list[str]:
    keys = sorted(set(a) | set(b))
    return [k for k in keys if a.get(k) != b.get(k)]


def run_experiment(config: ExperimentConfig) -> dict[tuple[str, str], Path]:
    """Execute (or resume) the full grid; returns per-cell results paths."""
    runner = Runner(config)
    # persist the config next to the manifest for `resume <dir>`
    cfg_path = runner.out / "config.json"
    if not cfg_path.exists():
        cfg_path.write_text(
            json.dumps(config.to_dict(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
    return runner.run()


def resume(run_dir: str | Path) -> dict[tuple[str, str], Path]:
    """Continue a partial run from its journal; no-op when complete."""
    run_dir = Path(run_dir)
    cfg = ExperimentConfig.from_dict(
        json.loads((run_dir / "config.json").read_text(encoding="utf-8"))
    )
    cfg.out_dir = str(run_dir)
    return run_experiment(cfg)


# -- reporting ---------------------------------------------------------------


def load_results(paths) -> list[dict]:
    """Validated results documents; accepts one path or a list of paths."""
    if isinstance(paths, (str, Path)):
        paths = [paths]
    docs = []
    for p in paths:
        doc = json.loads(Path(p).read_text(encoding="utf-8"))
        for key in ("model", "level", "records", "summary"):
            if key not in doc:
                raise ValueError(f"{p}: results file missing {key!r}")
        for i, rec in enumerate(doc["records"]):
            try:
                EvaluationRecord.from_dict(rec)
            except (KeyError, TypeError) as e:
                raise ValueError(f"{p}: record {i} invalid: {e}") from e
        docs.append(doc)
    return docs


def report(paths: list[str | Path], csv_path: str | Path | None = None) -> str:
    """Human-readable per-cell table; optionally also CSV."""
    docs = load_results(paths)
    docs.sort(key=lambda d: (d["model"], d["level"]))
    headers = [
        "model", "level", "n", "sne_rate", "sme_rate", "syn_acc", "sem_acc",
        "mean_P", "mean_R", "mean_F1", "weaker", "equal", "stronger",
        "incomparable", "undefined", "total_cost", "mean_latency_ms",
    ]
    rows = []
    for d in docs:
        s = d["summary"]
        hist = s["strength_histogram"]
        rows.append(
            [
                d["model"],
                d["level"],
                str(s["n_methods"]),
                f"{s['sne_rate']:.3f}",
                f"{s['sme_rate']:.3f}",
                f"{s['syntactic_accuracy']:.3f}",
                f"{s['semantic_accuracy']:.3f}",
                f"{s['mean_precision']:.3f}",
                f"{s['mean_recall']:.3f}",
                f"{s['mean_f1']:.3f}",
                str(hist["weaker"]),
                str(hist["equal"]),
                str(hist["stronger"]),
                str(hist["incomparable"]),
                str(hist["undefined"]),
                f"{s['total_cost']:.4f}",
                f"{s['mean_latency_ms']:.1f}",
            ]
        )
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(headers)]
    lines = [
        "  ".join(h.ljust(w) for h, w in zip(headers, widths)),
        "  ".join("-" * w for w in widths),
    ]
    for r in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)))
    table = "\n".join(lines)
    if csv_path is not None:
        import csv

        with Path(csv_path).open("w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(headers)
            writer.writerows(rows)
    return table
