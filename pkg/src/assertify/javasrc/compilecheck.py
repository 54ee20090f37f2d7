"""Lightweight static checker for Java repositories without a JDK.

Emits javac-style diagnostics for the assertion-related error classes the
evaluator classifies: references to undeclared symbols, statements after a
return, and null comparisons against primitive-typed operands. It is a
deliberately narrow checker meant to serve as a BuildProfile command in
environments where `javac` is unavailable; it is not a Java compiler.

Usage: assertify-javacheck [ROOT]
Exit code 0 when no findings, 1 otherwise.
"""

from __future__ import annotations

import sys
from pathlib import Path

from .lexer import IDENT, KEYWORD, PRIMITIVE_TYPES, tokenize
from .methods import JavaParseError, extract_methods

# Names assumed resolvable without project knowledge.
_COMMON_SYMBOLS = frozenset(
    """String Object Integer Long Double Float Boolean Character Byte Short
    Math System Objects List Map Set Arrays Collections Optional StringBuilder
    Exception RuntimeException IllegalArgumentException IllegalStateException
    NullPointerException Number CharSequence Iterable Comparable length size
    isEmpty equals hashCode toString getClass valueOf parseInt format out err
    println print MAX_VALUE MIN_VALUE""".split()
)


def _field_decls(text: str) -> dict[str, str]:
    """Field name -> declared type for every class-level declaration."""
    fields: dict[str, str] = {}
    try:
        toks = tokenize(text)
    except Exception:
        return fields
    # heuristic: `type name = ...;` or `type name;` directly after a
    # modifier/brace/semicolon boundary at class-body depth
    for i in range(1, len(toks) - 1):
        t = toks[i]
        if t.kind != IDENT:
            continue
        nxt = toks[i + 1].text
        prev = toks[i - 1]
        if nxt in ("=", ";") and (
            prev.kind == IDENT
            or (prev.kind == KEYWORD and prev.text in PRIMITIVE_TYPES)
            or prev.text in ("]", ">")
        ):
            # walk back to the start of the type
            j = i - 1
            while j > 0 and toks[j - 1].text in (".", "<", ">", "[", "]"):
                j -= 1
            fields[t.text] = toks[j].text if j >= 0 else ""
    return fields


def _check_method(method, fields: dict[str, str], known: set[str], path: str,
                  findings: list[str]) -> None:
    try:
        toks = tokenize(method.text)
    except Exception:
        return
    # local declarations: name -> (type, declaration line)
    locals_: dict[str, tuple[str, int]] = {
        name: (ptype, method.start_line) for name, ptype in method.parameters
    }
    return_lines: list[tuple[int, int]] = []  # (line, brace depth)
    depth = 0
    i = 0
    while i < len(toks):
        t = toks[i]
        if t.text == "{":
            depth += 1
        elif t.text == "}":
            depth -= 1
            return_lines = [(ln, d) for ln, d in return_lines if d <= depth]
        elif t.kind == KEYWORD and t.text == "return":
            return_lines.append((method.start_line + t.line - 1, depth))
        elif (
            (t.kind == IDENT or (t.kind == KEYWORD and t.text in PRIMITIVE_TYPES))
            and i + 1 < len(toks)
            and toks[i + 1].kind == IDENT
            and i + 2 < len(toks)
            and toks[i + 2].text in ("=", ";", ":")
        ):
            # local declaration `Type name = ...` / `Type name;`
            locals_[toks[i + 1].text] = (t.text, method.start_line + t.line - 1)
        elif t.kind == KEYWORD and t.text == "assert":
            file_line = method.start_line + t.line - 1
            # statement token span
            j = i + 1
            d2 = 0
            stmt = []
            while j < len(toks):
                txt = toks[j].text
                if txt in ("(", "[", "{"):
                    d2 += 1
                elif txt in (")", "]", "}"):
                    d2 -= 1
                elif txt == ";" and d2 == 0:
                    break
                stmt.append(toks[j])
                j += 1
            # unreachable: an assert after a return in the same or outer block
            if any(d <= depth for _, d in return_lines):
                findings.append(f"{path}:{file_line}: error: unreachable statement")
            # undefined / primitive-vs-null checks on statement identifiers
            for k2, st in enumerate(stmt):
                if st.kind != IDENT:
                    continue
                prev_txt = stmt[k2 - 1].text if k2 > 0 else ""
                next_txt = stmt[k2 + 1].text if k2 + 1 < len(stmt) else ""
                if prev_txt == ".":
                    continue  # member access: receiver already checked
                if next_txt == "(":
                    continue  # method call: not resolved by this checker
                declared = locals_.get(st.text)
                if declared is None and st.text not in fields \
                        and st.text not in known and st.text not in _COMMON_SYMBOLS:
                    findings.append(
                        f"{path}:{file_line}: error: cannot find symbol\n"
                        f"  symbol:   variable {st.text}"
                    )
                    continue
                if declared is not None and declared[1] > file_line:
                    findings.append(
                        f"{path}:{file_line}: error: cannot find symbol\n"
                        f"  symbol:   variable {st.text}"
                    )
                    continue
                # primitive compared against null
                vtype = declared[0] if declared else fields.get(st.text)
                if vtype in PRIMITIVE_TYPES and next_txt in ("==", "!=") \
                        and k2 + 2 < len(stmt) and stmt[k2 + 2].text == "null":
                    findings.append(
                        f"{path}:{file_line}: error: bad operand types for binary "
                        f"operator '{next_txt}'\n  first type:  {vtype}\n"
                        f"  second type: <null>"
                    )
            i = j
            continue
        i += 1


def check_tree(root: str | Path) -> list[str]:
    root = Path(root)
    findings: list[str] = []
    for p in sorted(root.rglob("*.java")):
        rel = p.relative_to(root).as_posix()
        try:
            text = p.read_text(encoding="utf-8")
            methods = extract_methods(text, rel)
        except (JavaParseError, UnicodeDecodeError) as e:
            findings.append(f"{rel}: error: {e}")
            continue
        fields = _field_decls(text)
        known = {m.method_name for m in methods} | {m.class_fqn.split(".")[-1] for m in methods}
        for m in methods:
            if m.has_body:
                _check_method(m, fields, known, rel, findings)
    return findings


def main(argv: list[str] | None = None) -> int:
    args = sys.argv[1:] if argv is None else argv
    root = args[0] if args else "."
    findings = check_tree(root)
    for f in findings:
        print(f, file=sys.stderr)
    if findings:
        print(f"{len(findings)} error(s)", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
