"""Lexer for Java source text.

Produces a flat token stream with character offsets and 1-based line
numbers. Comments are emitted as tokens only on request so that callers
needing comment spans (pruning, doc-comment capture) and callers needing
code tokens (method extraction, ROUGE tokenization) share one scanner.
"""

from __future__ import annotations

from dataclasses import dataclass

KEYWORDS = frozenset(
    """abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package private
    protected public return short static strictfp super switch synchronized
    this throw throws transient try void volatile while record yield var
    true false null""".split()
)

PRIMITIVE_TYPES = frozenset(
    {"boolean", "byte", "char", "short", "int", "long", "float", "double"}
)

MODIFIERS = frozenset(
    """public private protected static final abstract synchronized native
    strictfp transient volatile default""".split()
)

# Longest-match-first operator table.
_OPERATORS = sorted(
    [
        ">>>=", ">>>", ">>=", "<<=", "...", "->", "::", "==", "!=", "<=", ">=",
        "&&", "||", "++", "--", "+=", "-=", "*=", "/=", "&=", "|=", "^=",
        "%=", "<<", ">>", "+", "-", "*", "/", "%", "=", "<", ">", "!", "&",
        "|", "^", "~", "?", ":", ";", ",", ".", "(", ")", "{", "}", "[", "]",
        "@",
    ],
    key=len,
    reverse=True,
)

IDENT = "ident"
KEYWORD = "keyword"
NUMBER = "number"
STRING = "string"
CHAR = "char"
OP = "op"
COMMENT = "comment"


class JavaLexError(ValueError):
    """Raised on unterminated strings, chars, or block comments."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    start: int  # character offset, inclusive
    end: int  # character offset, exclusive
    line: int  # 1-based line of the first character


def _is_ident_start(c: str) -> bool:
    return c.isalpha() or c in "_$"


def _is_ident_part(c: str) -> bool:
    return c.isalnum() or c in "_$"


def tokenize(text: str, include_comments: bool = False) -> list[Token]:
    """Tokenize Java source. Whitespace is dropped; comments optional."""
    tokens: list[Token] = []
    i = 0
    n = len(text)
    line = 1
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            i += 1
            continue
        if c.isspace():
            i += 1
            continue
        if c == "/" and i + 1 < n and text[i + 1] == "/":
            j = text.find("\n", i)
            if j == -1:
                j = n
            if include_comments:
                tokens.append(Token(COMMENT, text[i:j], i, j, line))
            i = j
            continue
        if c == "/" and i + 1 < n and text[i + 1] == "*":
            j = text.find("*/", i + 2)
            if j == -1:
                raise JavaLexError("unterminated block comment", line)
            j += 2
            if include_comments:
                tokens.append(Token(COMMENT, text[i:j], i, j, line))
            line += text.count("\n", i, j)
            i = j
            continue
        if c == '"':
            # Text block?
            if text.startswith('"""', i):
                j = text.find('"""', i + 3)
                if j == -1:
                    raise JavaLexError("unterminated text block", line)
                j += 3
                tokens.append(Token(STRING, text[i:j], i, j, line))
                line += text.count("\n", i, j)
                i = j
                continue
            j = i + 1
            while j < n:
                if text[j] == "\\":
                    j += 2
                    continue
                if text[j] == '"':
                    break
                if text[j] == "\n":
                    raise JavaLexError("unterminated string literal", line)
                j += 1
            else:
                raise JavaLexError("unterminated string literal", line)
            j += 1
            tokens.append(Token(STRING, text[i:j], i, j, line))
            i = j
            continue
        if c == "'":
            j = i + 1
            while j < n:
                if text[j] == "\\":
                    j += 2
                    continue
                if text[j] == "'":
                    break
                if text[j] == "\n":
                    raise JavaLexError("unterminated char literal", line)
                j += 1
            else:
                raise JavaLexError("unterminated char literal", line)
            j += 1
            tokens.append(Token(CHAR, text[i:j], i, j, line))
            i = j
            continue
        if c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and (
                text[j].isalnum() or text[j] in "._xXbBeE+-"
            ):
                # '+'/'-' only valid directly after an exponent marker
                if text[j] in "+-" and text[j - 1] not in "eEpP":
                    break
                # '.' only as part of a floating literal, not a member access
                if text[j] == "." and not (
                    j + 1 < n and (text[j + 1].isdigit() or text[j + 1] in "eEfFdD")
                ):
                    break
                j += 1
            tokens.append(Token(NUMBER, text[i:j], i, j, line))
            i = j
            continue
        if _is_ident_start(c):
            j = i + 1
            while j < n and _is_ident_part(text[j]):
                j += 1
            word = text[i:j]
            kind = KEYWORD if word in KEYWORDS else IDENT
            tokens.append(Token(kind, word, i, j, line))
            i = j
            continue
        for op in _OPERATORS:
            if text.startswith(op, i):
                tokens.append(Token(OP, op, i, i + len(op), line))
                i += len(op)
                break
        else:
            raise JavaLexError(f"unexpected character {c!r}", line)
    return tokens


def lex_tokens_loose(text: str) -> list[str]:
    """Token texts for similarity / ROUGE use; never raises.

    Falls back to a character-class split on inputs the strict lexer
    rejects (e.g. truncated statements), so scoring stays total.
    """
    try:
        return [t.text for t in tokenize(text)]
    except JavaLexError:
        import re

        return re.findall(r"\w+|[^\w\s]", text)
