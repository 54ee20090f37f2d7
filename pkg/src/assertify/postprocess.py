"""Postprocessing: reply parsing, line filtering, insertion, splicing.

The model replies with a JSON array of {"line", "assertion"} objects in
pruned-method coordinates. A pair is insertable only strictly inside the
body (after the opening-brace line, no later than the closing-brace
line). Insertion applies pairs in descending line order, placing each
assertion as a new line immediately before its target line, so deleting
exactly the inserted lines restores the pruned text byte-for-byte.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

from .corpus import MethodRecord
from .javasrc.lexer import JavaLexError, tokenize
from .preprocess import PrunedMethod


@dataclass(frozen=True)
class AssertionPair:
    line: int  # 1-based, pruned-method coordinates
    assertion: str  # complete assert statement ending in ';'


@dataclass(frozen=True)
class RejectedFragment:
    fragment: str
    reason: str


_FENCE_RE = re.compile(r"```(?:json|java)?\s*\n(.*?)\n\s*```", re.DOTALL)


def _statement_is_assert(text: str) -> bool:
    """Whether text is a single well-formed assert statement."""
    s = text.strip()
    if not s.startswith("assert") or not s.endswith(";"):
        return False
    try:
        toks = tokenize(s)
    except JavaLexError:
        return False
    if not toks or toks[0].text != "assert" or toks[0].kind != "keyword":
        return False
    if toks[-1].text != ";":
        return False
    # exactly one statement: no further ';' at depth 0 before the last token
    depth = 0
    for t in toks[1:-1]:
        if t.text in ("(", "[", "{"):
            depth += 1
        elif t.text in (")", "]", "}"):
            depth -= 1
        elif t.text == ";" and depth == 0:
            return False
    return len(toks) > 2  # needs a condition


def parse_response(raw_text: str) -> tuple[list[AssertionPair], list[RejectedFragment]]:
    """Extract (assertion, line) pairs from a model reply."""
    text = raw_text.strip()
    m = _FENCE_RE.search(text)
    if m:
        text = m.group(1).strip()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError:
        return [], [RejectedFragment(raw_text, "reply is not a JSON array")]
    if not isinstance(doc, list):
        return [], [RejectedFragment(raw_text, "reply JSON is not an array")]
    pairs: list[AssertionPair] = []
    rejected: list[RejectedFragment] = []
    for entry in doc:
        frag = json.dumps(entry, ensure_ascii=False)
        if not isinstance(entry, dict):
            rejected.append(RejectedFragment(frag, "entry is not an object"))
            continue
        line = entry.get("line")
        assertion = entry.get("assertion")
        if not isinstance(line, int) or isinstance(line, bool):
            rejected.append(RejectedFragment(frag, "non-integer line"))
            continue
        if not isinstance(assertion, str):
            rejected.append(RejectedFragment(frag, "missing assertion text"))
            continue
        if line < 1:
            rejected.append(RejectedFragment(frag, "line must be >= 1"))
            continue
        if not _statement_is_assert(assertion):
            rejected.append(
                RejectedFragment(frag, "not a single well-formed assert statement")
            )
            continue
        pairs.append(AssertionPair(line=line, assertion=assertion.strip()))
    return pairs, rejected


@dataclass(frozen=True)
class DroppedPair:
    pair: AssertionPair
    reason: str


def filter_pairs(
    pairs: list[AssertionPair], pruned: PrunedMethod
) -> tuple[list[AssertionPair], list[DroppedPair]]:
    """Keep pairs strictly inside the method body, in original order."""
    valid: list[AssertionPair] = []
    dropped: list[DroppedPair] = []
    for p in pairs:
        if p.line <= pruned.body_open_line:
            dropped.append(DroppedPair(p, "line precedes the method body"))
        elif p.line > pruned.body_close_line:
            dropped.append(DroppedPair(p, "line is beyond the closing brace"))
        else:
            valid.append(p)
    return valid, dropped


def _indent_of(line: str) -> str:
    return line[: len(line) - len(line.lstrip())]


def insert_assertions(pruned: PrunedMethod, valid: list[AssertionPair]) -> str:
    """Insert each assertion immediately before its pruned target line.

    Pairs are applied in descending line order so earlier insertions never
    shift later targets; pairs aimed at the same line keep response order.
    Duplicate (line, assertion) pairs collapse to one.
    """
    lines = pruned.text.split("\n")
    seen: set[AssertionPair] = set()
    unique: list[tuple[int, AssertionPair]] = []
    for order, p in enumerate(valid):
        if p in seen:
            import logging

            logging.getLogger(__name__).warning(
                "duplicate assertion pair collapsed: line %d %r", p.line, p.assertion
            )
            continue
        seen.add(p)
        unique.append((order, p))
    # descending target line; among equal lines, later response order first,
    # so that after all insertions the earlier pair ends up on top.
    unique.sort(key=lambda op: (-op[1].line, -op[0]))
    for _, p in unique:
        anchor = lines[p.line - 1]
        lines.insert(p.line - 1, _indent_of(anchor) + p.assertion.strip())
    return "\n".join(lines)


class StaleSnapshotError(RuntimeError):
    pass


def replace_method(
    snapshot: str | Path, record: MethodRecord, new_text: str
) -> Path:
    """Splice new_text over the record's byte span in the snapshot copy."""
    path = Path(snapshot) / record.file_path
    data = path.read_bytes()
    start, end = record.byte_span
    current = data[start:end]
    expected = record.body_text.encode("utf-8")
    if current != expected:
        raise StaleSnapshotError(
            f"{record.file_path} no longer matches the corpus span "
            f"[{start}:{end}] for {record.record_id}"
        )
    patched = data[:start] + new_text.encode("utf-8") + data[end:]
    path.write_bytes(patched)
    return path


def restore_method(snapshot: str | Path, record: MethodRecord, patched_text: str) -> Path:
    """Undo a replace_method call (splice the original bytes back)."""
    path = Path(snapshot) / record.file_path
    data = path.read_bytes()
    start = record.byte_span[0]
    new_bytes = patched_text.encode("utf-8")
    end = start + len(new_bytes)
    if data[start:end] != new_bytes:
        raise StaleSnapshotError(
            f"{record.file_path}: cannot restore, patched bytes not found"
        )
    original = record.body_text.encode("utf-8")
    path.write_bytes(data[:start] + original + data[end:])
    return path
