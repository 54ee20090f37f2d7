import json
from pathlib import Path

import pytest

from assertify.corpus import EVAL, build_corpus
from assertify.llm import ModelConfig
from assertify.pipeline import (
    ExperimentConfig,
    Runner,
    load_results,
    report,
    resume,
    run_experiment,
)
from conftest import MINI_REPO, label_split

GOOD_REPLY = '```json\n[{"line": 2, "assertion": "assert x != 0;"}]\n```'


def model():
    return ModelConfig(name="mock-1", context_limit=16_000, price_in=0.001,
                       price_out=0.002)


@pytest.fixture()
def corpus_path(tmp_path):
    corpus = build_corpus([MINI_REPO])
    label_split(corpus, 4)
    path = tmp_path / "corpus.json"
    corpus.save(path)
    return path


def config(corpus_path, out_dir, **kw):
    base = dict(
        corpus_path=str(corpus_path),
        levels=["A"],
        models=[model()],
        backend="mock",
        seed=3,
        out_dir=str(out_dir),
        mock_reply=GOOD_REPLY,
    )
    base.update(kw)
    return ExperimentConfig(**base)


def test_config_validation(corpus_path, tmp_path):
    with pytest.raises(ValueError):
        config(corpus_path, tmp_path, levels=["Z"])
    with pytest.raises(ValueError):
        config(corpus_path, tmp_path, backend="carrier-pigeon")
    with pytest.raises(ValueError):
        config(corpus_path, tmp_path, backend="replay", cassette=None)
    with pytest.raises(ValueError):
        config(corpus_path, tmp_path, models=[])


def test_config_hash_ignores_out_dir(corpus_path, tmp_path):
    a = config(corpus_path, tmp_path / "x")
    b = config(corpus_path, tmp_path / "y")
    assert a.config_hash() == b.config_hash()
    c = config(corpus_path, tmp_path / "x", seed=4)
    assert a.config_hash() != c.config_hash()


def test_config_round_trip(corpus_path, tmp_path):
    cfg = config(corpus_path, tmp_path / "run")
    again = ExperimentConfig.from_dict(cfg.to_dict())
    assert again.config_hash() == cfg.config_hash()


def test_run_produces_results_per_cell(corpus_path, tmp_path):
    cfg = config(corpus_path, tmp_path / "run", levels=["A", "E"])
    paths = run_experiment(cfg)
    assert set(paths) == {("mock-1", "A"), ("mock-1", "E")}
    for p in paths.values():
        doc = load_results(p)[0]
        assert doc["summary"]["n_methods"] == 4
        assert doc["summary"]["syntactic_accuracy"] == 1.0
        assert len(doc["records"]) == 4


def test_records_are_sorted_and_costed(corpus_path, tmp_path):
    cfg = config(corpus_path, tmp_path / "run")
    paths = run_experiment(cfg)
    doc = load_results(paths[("mock-1", "A")])[0]
    ids = [r["method_id"] for r in doc["records"]]
    assert ids == sorted(ids)
    assert all(r["cost"] > 0 for r in doc["records"])


def test_resume_completes_an_interrupted_run(corpus_path, tmp_path):
    run_dir = tmp_path / "run"
    cfg = config(corpus_path, run_dir)
    full = run_experiment(cfg)
    reference = Path(full[("mock-1", "A")]).read_bytes()

    cut = tmp_path / "cut"
    cut.mkdir()
    (cut / "config.json").write_bytes((run_dir / "config.json").read_bytes())
    (cut / "manifest.json").write_bytes((run_dir / "manifest.json").read_bytes())
    journal = (run_dir / "records.jsonl").read_text().splitlines()
    (cut / "records.jsonl").write_text("\n".join(journal[:2]) + "\n")

    paths = resume(cut)
    assert Path(paths[("mock-1", "A")]).read_bytes() == reference
    resumed_journal = (cut / "records.jsonl").read_text().splitlines()
    assert len(resumed_journal) == len(journal)


def test_resume_skips_completed_work(corpus_path, tmp_path):
    run_dir = tmp_path / "run"
    run_experiment(config(corpus_path, run_dir))
    before = (run_dir / "records.jsonl").read_text()
    resume(run_dir)
    assert (run_dir / "records.jsonl").read_text() == before


def test_manifest_mismatch_rejected(corpus_path, tmp_path):
    run_dir = tmp_path / "run"
    run_experiment(config(corpus_path, run_dir))
    cfg2 = config(corpus_path, run_dir, seed=99)
    with pytest.raises(RuntimeError):
        Runner(cfg2).run()


def test_eval_limit(corpus_path, tmp_path):
    cfg = config(corpus_path, tmp_path / "run", eval_limit=2)
    paths = run_experiment(cfg)
    doc = load_results(paths[("mock-1", "A")])[0]
    assert doc["summary"]["n_methods"] == 2


def test_report_table_and_csv(corpus_path, tmp_path):
    paths = run_experiment(config(corpus_path, tmp_path / "run", levels=["A", "B"]))
    csv_path = tmp_path / "out.csv"
    text = report(sorted(paths.values()), csv_path=csv_path)
    lines = text.splitlines()
    assert lines[0].split()[:3] == ["model", "level", "n"]
    assert len(lines) == 4  # header, rule, one row per cell
    rows = csv_path.read_text().splitlines()
    assert rows[0].startswith("model,level,n")
    assert len(rows) == 3


def test_results_schema_versioned(corpus_path, tmp_path):
    paths = run_experiment(config(corpus_path, tmp_path / "run"))
    doc = json.loads(Path(paths[("mock-1", "A")]).read_text())
    assert doc["schema"] >= 1
    assert "config_hash" in doc
