import pytest

from assertify.corpus import build_corpus
from assertify.javasrc.methods import extract_methods
from assertify.corpus import extract_file_methods
from assertify.preprocess import PruneError, prune, snapshot_repository
from conftest import MINI_REPO

SOURCE = """\
package com.ex;

class Box {
    /** Stores a value. */
    public void write(int dest) {
        // pre-checks
        assert dest >= 0 : "dest=" + dest;
        prepare(dest);
        sink = dest; /* store */
        assert sink == dest;
        flush();
    }
}
"""


def record_for(source, name):
    records = extract_file_methods(source, "Box.java", "r")
    return next(r for r in records if r.method_name == name)


def test_prune_removes_comments_and_asserts():
    pruned = prune(record_for(SOURCE, "write"))
    assert pruned.text == (
        "public void write(int dest) {\n"
        "        prepare(dest);\n"
        "        sink = dest;\n"
        "        flush();\n"
        "    }"
    )
    assert pruned.line_count == 5


def test_prune_line_map_points_at_original_lines():
    pruned = prune(record_for(SOURCE, "write"))
    # original method starts on file line 5; pruned lines map past the
    # removed doc comment, inline comment, and assertions
    assert pruned.line_map == [5, 8, 9, 11, 12]


def test_prune_body_bounds():
    pruned = prune(record_for(SOURCE, "write"))
    assert pruned.body_open_line == 1
    assert pruned.body_close_line == 5


def test_prune_keeps_string_contents():
    src = SOURCE.replace('"dest=" + dest', '"// keep"')
    text = 'class A {\n  void f() {\n    s = "// keep";\n  }\n}\n'
    pruned = prune(record_for(text, "f"))
    assert '"// keep"' in pruned.text


def test_prune_bodyless_method_rejected():
    text = "abstract class A {\n  abstract void f();\n}\n"
    with pytest.raises(PruneError):
        prune(record_for(text, "f"))


def test_snapshot_repository(tmp_path):
    dest = tmp_path / "snap"
    snapshot_repository(MINI_REPO, dest)
    assert (dest / "src/main/java/com/ex/Lib.java").read_bytes() == (
        MINI_REPO / "src/main/java/com/ex/Lib.java"
    ).read_bytes()
    with pytest.raises(FileExistsError):
        snapshot_repository(MINI_REPO, dest)


def test_prune_is_reparseable():
    from assertify.javasrc.syntax import validate_method_text

    pruned = prune(record_for(SOURCE, "write"))
    assert validate_method_text(pruned.text) is None
