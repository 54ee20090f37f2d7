import json

import pytest

from assertify.corpus import (
    EVAL,
    FSL,
    Corpus,
    build_corpus,
    is_test_path,
    split_dataset,
)
from conftest import MINI_REPO


def test_stats(mini_corpus):
    s = mini_corpus.stats
    assert s.files == 1  # the test-directory file is excluded entirely
    assert s.methods == 13
    assert s.methods_with_assertions == 12
    assert s.assertions == 12


def test_record_ids_unique_and_sorted(mini_corpus):
    ids = [m.record_id for m in mini_corpus.methods]
    assert len(ids) == len(set(ids))
    keys = [(m.repo_id, m.file_path, m.byte_span[0]) for m in mini_corpus.methods]
    assert keys == sorted(keys)


def test_byte_span_round_trip(mini_corpus):
    for m in mini_corpus.methods:
        data = (MINI_REPO / m.file_path).read_bytes()
        sliced = data[m.byte_span[0]:m.byte_span[1]].decode("utf-8")
        assert sliced == m.body_text


def test_canonical_json_is_stable(mini_corpus, tmp_path):
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    mini_corpus.save(p1)
    Corpus.load(p1).save(p2)
    assert p1.read_bytes() == p2.read_bytes()
    doc = json.loads(p1.read_text())
    assert doc["version"] == 1


def test_is_test_path():
    assert is_test_path("src/test/java/com/ex/LibTest.java")
    assert is_test_path("module/tests/Helper.java")
    assert not is_test_path("src/main/java/com/ex/Lib.java")
    assert not is_test_path("src/main/java/com/ex/testing/Lib.java")


def test_split_disjoint_and_deterministic(mini_corpus):
    split_dataset(mini_corpus, 0.5, seed=11)
    first = dict(mini_corpus.split)
    split_dataset(mini_corpus, 0.5, seed=11)
    assert dict(mini_corpus.split) == first
    labels = set(first.values())
    assert labels <= {EVAL, FSL}
    split_dataset(mini_corpus, 0.5, seed=12)
    assert dict(mini_corpus.split) != first  # a new seed reshuffles


def test_split_covers_only_assertion_bearing(mini_corpus):
    split_dataset(mini_corpus, 0.5, seed=1)
    by_id = mini_corpus.by_id()
    for rid, label in mini_corpus.split.items():
        assert by_id[rid].assertions
        assert label in (EVAL, FSL)


def test_split_fraction_requires_open_interval(mini_corpus):
    with pytest.raises(ValueError):
        split_dataset(mini_corpus, 0.0, seed=1)
    with pytest.raises(ValueError):
        split_dataset(mini_corpus, 1.0, seed=1)


def test_labeled_selection(mini_corpus):
    split_dataset(mini_corpus, 0.5, seed=3)
    n_eval = len(mini_corpus.labeled(EVAL))
    n_fsl = len(mini_corpus.labeled(FSL))
    assert n_eval + n_fsl == len(mini_corpus.split)
    assert n_eval == round(0.5 * len(mini_corpus.split))


def test_build_corpus_repo_id_is_root_name(mini_corpus):
    assert {m.repo_id for m in mini_corpus.methods} == {"mini"}
