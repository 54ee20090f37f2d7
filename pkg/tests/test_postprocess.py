import pytest

from assertify.corpus import extract_file_methods
from assertify.postprocess import (
    AssertionPair,
    StaleSnapshotError,
    filter_pairs,
    insert_assertions,
    parse_response,
    replace_method,
    restore_method,
)
from assertify.preprocess import prune

SOURCE = """\
class Box {
    public void write(int dest, int mapping) {
        // checks happen here
        assert dest >= 0;
        sink[dest] = mapping;
        count += 1;
        flush();
    }
}
"""


def pruned_write():
    rec = next(
        r
        for r in extract_file_methods(SOURCE, "Box.java", "r")
        if r.method_name == "write"
    )
    return rec, prune(rec)


# -- parse_response ----------------------------------------------------------


def test_parse_fenced_json():
    raw = '```json\n[{"line": 2, "assertion": "assert x > 0;"}]\n```'
    pairs, rejected = parse_response(raw)
    assert pairs == [AssertionPair(2, "assert x > 0;")]
    assert rejected == []


def test_parse_bare_json_array():
    pairs, _ = parse_response('[{"line": 3, "assertion": "assert a != b;"}]')
    assert pairs == [AssertionPair(3, "assert a != b;")]


def test_parse_non_json_yields_nothing():
    pairs, rejected = parse_response("I cannot help with that.")
    assert pairs == []
    assert rejected


def test_parse_rejects_malformed_entries():
    raw = (
        '[{"line": 2, "assertion": "assert ok;"},'
        ' {"line": "two", "assertion": "assert x;"},'
        ' {"line": 0, "assertion": "assert x;"},'
        ' {"line": true, "assertion": "assert x;"},'
        ' {"line": 3, "assertion": "not an assert;"},'
        ' {"line": 4, "assertion": "assert missing_semicolon"},'
        ' {"line": 5}]'
    )
    pairs, rejected = parse_response(raw)
    assert pairs == [AssertionPair(2, "assert ok;")]
    assert len(rejected) == 6


def test_parse_rejects_multi_statement_assertion():
    pairs, rejected = parse_response(
        '[{"line": 2, "assertion": "assert a; assert b;"}]'
    )
    assert pairs == []
    assert rejected


# -- filter_pairs ------------------------------------------------------------


def test_filter_bounds():
    _, pruned = pruned_write()
    pairs = [
        AssertionPair(1, "assert a;"),   # signature line: dropped
        AssertionPair(2, "assert b;"),   # first body line: kept
        AssertionPair(pruned.body_close_line, "assert c;"),  # last: kept
        AssertionPair(pruned.body_close_line + 1, "assert d;"),  # past end
        AssertionPair(99, "assert e;"),
    ]
    valid, dropped = filter_pairs(pairs, pruned)
    assert [p.line for p in valid] == [2, pruned.body_close_line]
    assert len(dropped) == 3


# -- insert_assertions -------------------------------------------------------


def test_insertion_example_from_two_pairs():
    text = (
        "void f() {\n"
        "    first();\n"
        "    second();\n"
        "    third();\n"
        "}"
    )
    rec = next(
        r
        for r in extract_file_methods("class A {\n" + text + "\n}", "A.java", "r")
        if r.method_name == "f"
    )
    pruned = prune(rec)
    out = insert_assertions(
        pruned, [AssertionPair(3, "assert a1;"), AssertionPair(4, "assert a2;")]
    )
    # each assertion lands directly above its anchor line
    assert out.splitlines()[2] == "    assert a1;"
    assert out.splitlines()[4] == "    assert a2;"
    assert out.splitlines()[3] == "    second();"


def test_insertion_copies_anchor_indentation():
    _, pruned = pruned_write()
    out = insert_assertions(pruned, [AssertionPair(2, "assert dest >= 0;")])
    body_indent = pruned.text.splitlines()[1][: len(pruned.text.splitlines()[1])
                                              - len(pruned.text.splitlines()[1].lstrip())]
    assert f"{body_indent}assert dest >= 0;" in out.splitlines()


def test_insertion_same_line_keeps_response_order():
    _, pruned = pruned_write()
    out = insert_assertions(
        pruned, [AssertionPair(2, "assert first;"), AssertionPair(2, "assert second;")]
    )
    lines = [l.strip() for l in out.splitlines()]
    assert lines.index("assert first;") < lines.index("assert second;")


def test_insertion_deduplicates_exact_pairs():
    _, pruned = pruned_write()
    pair = AssertionPair(2, "assert once;")
    out = insert_assertions(pruned, [pair, pair])
    assert out.count("assert once;") == 1


def test_insertion_round_trip():
    _, pruned = pruned_write()
    pairs = [AssertionPair(2, "assert a;"), AssertionPair(3, "assert b;")]
    out = insert_assertions(pruned, pairs)
    kept = [l for l in out.splitlines() if l.strip() not in ("assert a;", "assert b;")]
    assert "\n".join(kept) == pruned.text


def test_insert_nothing_returns_pruned_text():
    _, pruned = pruned_write()
    assert insert_assertions(pruned, []) == pruned.text


# -- snapshot splicing -------------------------------------------------------


def make_snapshot(tmp_path):
    repo = tmp_path / "r"
    (repo / "src").mkdir(parents=True)
    (repo / "src" / "Box.java").write_text(SOURCE)
    recs = extract_file_methods(SOURCE, "src/Box.java", "r")
    return repo, next(r for r in recs if r.method_name == "write")


def test_replace_and_restore_round_trip(tmp_path):
    repo, rec = make_snapshot(tmp_path)
    original = (repo / "src" / "Box.java").read_bytes()
    new_text = "public void write(int dest, int mapping) {\n        flush();\n    }"
    replace_method(repo, rec, new_text)
    patched = (repo / "src" / "Box.java").read_text()
    assert new_text in patched
    assert "sink[dest] = mapping;" not in patched
    restore_method(repo, rec, new_text)
    assert (repo / "src" / "Box.java").read_bytes() == original


def test_replace_detects_stale_snapshot(tmp_path):
    repo, rec = make_snapshot(tmp_path)
    path = repo / "src" / "Box.java"
    path.write_text(path.read_text().replace("count += 1;", "count += 2;"))
    with pytest.raises(StaleSnapshotError):
        replace_method(repo, rec, "void write() { }")
