"""Preprocessing: assertion/comment pruning and repository duplication.

The pruned method is the coordinate system the model's line numbers refer
to, so the line map back to the original file must be exact. Pruning is
span-based: comment and assert-statement character ranges are removed,
lines emptied solely by the removal are deleted, and modified lines are
right-stripped (trailing-comment removal keeps the code portion).
"""

from __future__ import annotations

import shutil
from dataclasses import dataclass
from pathlib import Path

from .corpus import MethodRecord
from .javasrc.lexer import COMMENT, tokenize
from .javasrc.methods import extract_methods


class PruneError(ValueError):
    pass


@dataclass
class PrunedMethod:
    text: str
    line_count: int
    body_open_line: int  # pruned-coordinate line holding the body's '{'
    body_close_line: int  # pruned-coordinate line of the closing '}'
    line_map: list[int]  # pruned line i (1-based) -> original file line at [i-1]


def _method_shape(text: str) -> tuple[int, int]:
    """(body_open_offset, close_offset) of a lone method declaration,
    computed by parsing it inside a class wrapper."""
    prefix = "class __PruneWrapper {\n"
    wrapped = prefix + text + "\n}"
    methods = extract_methods(wrapped, "<prune>")
    if len(methods) != 1:
        raise PruneError(
            f"expected exactly one method declaration, found {len(methods)}"
        )
    m = methods[0]
    if not m.has_body or m.body_open_offset is None:
        raise PruneError("cannot prune a bodyless method declaration")
    off = len(prefix)
    return m.body_open_offset - off, m.span[1] - 1 - off


def _removal_spans(text: str) -> list[tuple[int, int]]:
    """Character spans of all comments and all assert statements."""
    spans: list[tuple[int, int]] = []
    tokens = tokenize(text, include_comments=True)
    code = [t for t in tokens if t.kind != COMMENT]
    spans.extend((t.start, t.end) for t in tokens if t.kind == COMMENT)
    i = 0
    boundary = {"{", "}", ";", ":", ")", "else", "do", "->"}
    while i < len(code):
        tok = code[i]
        if tok.kind == "keyword" and tok.text == "assert":
            prev_ok = i == 0 or code[i - 1].text in boundary
            if prev_ok:
                j = i
                depth = 0
                while j < len(code):
                    txt = code[j].text
                    if txt in ("(", "[", "{"):
                        depth += 1
                    elif txt in (")", "]", "}"):
                        depth -= 1
                    elif txt == ";" and depth == 0:
                        break
                    j += 1
                if j < len(code) and code[j].text == ";":
                    spans.append((tok.start, code[j].end))
                    i = j + 1
                    continue
        i += 1
    return spans


def prune(method: MethodRecord) -> PrunedMethod:
    """Remove all assert statements and comments from a method record."""
    text = method.body_text
    if not text.strip():
        raise PruneError(f"method {method.record_id} has no body to prune")
    body_open_off, _close_off = _method_shape(text)
    spans = _removal_spans(text)
    removed = bytearray(len(text))
    for a, b in spans:
        for k in range(a, b):
            removed[k] = 1

    lines = text.split("\n")
    # character offset of each line start
    starts = [0]
    for ln in lines[:-1]:
        starts.append(starts[-1] + len(ln) + 1)

    pruned_lines: list[str] = []
    line_map: list[int] = []
    body_open_line = None
    for idx, line in enumerate(lines):
        a = starts[idx]
        b = a + len(line)
        kept = "".join(line[k - a] for k in range(a, b) if not removed[k])
        touched = kept != line
        if touched:
            kept = kept.rstrip()
        if not kept.strip() and line.strip():
            continue  # emptied (or fully removed) line
        pruned_lines.append(kept)
        line_map.append(method.start_line + idx)
        if body_open_line is None and a <= body_open_off < b:
            body_open_line = len(pruned_lines)
    if body_open_line is None:
        raise PruneError("body opening brace lost during pruning")
    return PrunedMethod(
        text="\n".join(pruned_lines),
        line_count=len(pruned_lines),
        body_open_line=body_open_line,
        body_close_line=len(pruned_lines),
        line_map=line_map,
    )


def snapshot_repository(
    repo_root: str | Path, dest: str | Path, exclude_vcs: bool = True
) -> Path:
    """Byte-identical duplicate of repo_root at dest (dest must not exist)."""
    repo_root = Path(repo_root)
    dest = Path(dest)
    if dest.exists():
        raise FileExistsError(f"snapshot destination already exists: {dest}")
    ignore = shutil.ignore_patterns(".git", ".hg", ".svn") if exclude_vcs else None
    shutil.copytree(repo_root, dest, ignore=ignore)
    return dest
