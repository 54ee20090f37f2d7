"""Structural syntax validation for a single Java method declaration.

This is a lightweight validator, not a full Java grammar: it checks the
declaration shape (annotations, modifiers, header, parameter list, body),
balanced delimiters, statement termination, and — strictly for assert
statements — expression-token adjacency. That is enough to accept
well-formed methods and to reject the observed failure shapes: statements
placed above the method signature, missing semicolons, and malformed
assert expressions.
"""

from __future__ import annotations

from .lexer import (
    CHAR,
    IDENT,
    KEYWORD,
    MODIFIERS,
    NUMBER,
    OP,
    PRIMITIVE_TYPES,
    STRING,
    JavaLexError,
    Token,
    tokenize,
)

_STATEMENT_KEYWORDS = {
    "if", "else", "for", "while", "do", "switch", "try", "catch", "finally",
    "return", "throw", "break", "continue", "assert", "synchronized", "yield",
}

_BLOCK_HEADS = {"if", "for", "while", "switch", "synchronized", "catch"}

# Tokens that can end an operand within an expression.
_OPERAND_END = {"this", "true", "false", "null", "class"}
# Tokens that can start an operand within an expression.
_OPERAND_START = {"this", "true", "false", "null", "new", "super"}


class _Invalid(Exception):
    pass


def _fail(msg: str) -> None:
    raise _Invalid(msg)


class _Checker:
    def __init__(self, tokens: list[Token]):
        self.t = tokens
        self.i = 0

    def peek(self) -> Token | None:
        return self.t[self.i] if self.i < len(self.t) else None

    def next_text(self) -> str | None:
        tok = self.peek()
        return tok.text if tok else None

    def expect(self, text: str) -> None:
        tok = self.peek()
        if tok is None or tok.text != text:
            _fail(f"expected {text!r}, found {tok.text if tok else 'end of input'!r}")
        self.i += 1

    def skip_balanced(self, open_: str, close: str) -> tuple[int, int]:
        """Current token must be open_; skip past the match. Returns the
        (start, end) token index range of the group, inclusive."""
        start = self.i
        depth = 0
        while self.i < len(self.t):
            txt = self.t[self.i].text
            if txt == open_:
                depth += 1
            elif txt == close:
                depth -= 1
                if depth == 0:
                    self.i += 1
                    return (start, self.i - 1)
            self.i += 1
        _fail(f"unbalanced {open_!r}")
        raise AssertionError

    def skip_annotation(self) -> None:
        self.expect("@")
        tok = self.peek()
        if tok is None or tok.kind != IDENT:
            _fail("annotation name expected after '@'")
        self.i += 1
        while self.next_text() == ".":
            self.i += 1
            tok = self.peek()
            if tok is None or tok.kind != IDENT:
                _fail("dotted annotation name")
            self.i += 1
        if self.next_text() == "(":
            self.skip_balanced("(", ")")

    def skip_generics(self) -> None:
        depth = 0
        while self.i < len(self.t):
            txt = self.t[self.i].text
            if txt == "<":
                depth += 1
            elif txt == ">":
                depth -= 1
            elif txt == ">>":
                depth -= 2
            elif txt == ">>>":
                depth -= 3
            self.i += 1
            if depth <= 0:
                return
        _fail("unbalanced type parameters")

    # -- declaration header -------------------------------------------------

    def check_method(self) -> None:
        while self.next_text() == "@":
            self.skip_annotation()
        while True:
            tok = self.peek()
            if tok and tok.kind == KEYWORD and tok.text in MODIFIERS:
                self.i += 1
            else:
                break
        if self.next_text() == "<":
            self.skip_generics()
        tok = self.peek()
        if tok is None:
            _fail("missing method header")
        if tok.kind == KEYWORD and tok.text in _STATEMENT_KEYWORDS:
            _fail(f"statement keyword {tok.text!r} where a declaration was expected")
        # return type (possibly absent for a constructor) then name then '('
        header_start = self.i
        while self.i < len(self.t) and self.next_text() != "(":
            tok = self.t[self.i]
            if tok.text in ("{", "}", ";", ")"):
                _fail("malformed method header")
            if tok.kind == KEYWORD and tok.text in _STATEMENT_KEYWORDS:
                _fail(f"unexpected {tok.text!r} in method header")
            if tok.text == "<":
                self.skip_generics()
                continue
            self.i += 1
        if self.i == header_start:
            _fail("missing method name")
        name_tok = self.t[self.i - 1]
        if name_tok.kind != IDENT:
            _fail("method name must be an identifier")
        self.skip_balanced("(", ")")
        # throws clause
        if self.next_text() == "throws":
            self.i += 1
            while self.i < len(self.t) and self.next_text() not in ("{", ";"):
                self.i += 1
        if self.next_text() == ";":
            self.i += 1
        elif self.next_text() == "{":
            self.check_block()
        else:
            _fail("expected method body or ';'")
        if self.peek() is not None:
            _fail(f"trailing tokens after method: {self.peek().text!r}")

    # -- statements ---------------------------------------------------------

    def check_block(self) -> None:
        self.expect("{")
        while True:
            tok = self.peek()
            if tok is None:
                _fail("unterminated block")
            if tok.text == "}":
                self.i += 1
                return
            self.check_statement()

    def check_statement(self) -> None:
        tok = self.peek()
        if tok is None:
            _fail("unterminated statement")
        txt = tok.text
        if txt == "{":
            self.check_block()
            return
        if txt == ";":
            self.i += 1
            return
        if txt == "assert":
            self.check_assert()
            return
        if txt in _BLOCK_HEADS:
            self.i += 1
            if self.next_text() != "(":
                _fail(f"'(' expected after {txt!r}")
            self.skip_balanced("(", ")")
            self.check_statement()
            return
        if txt in ("else", "finally"):
            self.i += 1
            self.check_statement()
            return
        if txt == "do":
            self.i += 1
            self.check_statement()
            self.expect("while")
            self.skip_balanced("(", ")")
            self.expect(";")
            return
        if txt == "try":
            self.i += 1
            if self.next_text() == "(":  # try-with-resources
                self.skip_balanced("(", ")")
            self.check_block()
            return
        if txt in ("case", "default"):
            self.i += 1
            while self.i < len(self.t) and self.next_text() not in (":", "->"):
                self.i += 1
            if self.peek() is None:
                _fail("unterminated switch label")
            self.i += 1
            return
        if txt in ("class", "interface", "enum"):
            # local class: skip to its body and over it
            while self.i < len(self.t) and self.next_text() != "{":
                self.i += 1
            start = self.i
            depth = 0
            while self.i < len(self.t):
                if self.next_text() == "{":
                    depth += 1
                elif self.next_text() == "}":
                    depth -= 1
                    if depth == 0:
                        self.i += 1
                        return
                self.i += 1
            _fail("unterminated local class")
        # simple statement (expression, declaration, return/throw/...):
        # consume until ';' at depth 0, allowing embedded balanced groups.
        depth = 0
        while self.i < len(self.t):
            txt = self.next_text()
            if txt in ("(", "[", "{"):
                depth += 1
            elif txt in (")", "]"):
                depth -= 1
                if depth < 0:
                    _fail("unbalanced ')' in statement")
            elif txt == "}":
                depth -= 1
                if depth < 0:
                    _fail("statement not terminated by ';'")
            elif txt == ";" and depth == 0:
                self.i += 1
                return
            self.i += 1
        _fail("statement not terminated by ';'")

    def check_assert(self) -> None:
        self.expect("assert")
        expr_start = self.i
        depth = 0
        pending_ternary = 0
        colon = None
        while self.i < len(self.t):
            txt = self.next_text()
            if txt in ("(", "[", "{"):
                depth += 1
            elif txt in (")", "]", "}"):
                depth -= 1
                if depth < 0:
                    _fail("assert statement not terminated by ';'")
            elif depth == 0 and txt == "?":
                pending_ternary += 1
            elif depth == 0 and txt == ":":
                if pending_ternary > 0:
                    pending_ternary -= 1
                elif colon is None:
                    colon = self.i
                else:
                    _fail("assert with more than one message separator")
            elif depth == 0 and txt == ";":
                break
            self.i += 1
        else:
            _fail("assert statement not terminated by ';'")
        end = self.i
        self.i += 1  # past ';'
        cond = self.t[expr_start : colon if colon is not None else end]
        msg = self.t[colon + 1 : end] if colon is not None else None
        if not cond:
            _fail("assert with empty condition")
        _check_expression(cond)
        if msg is not None:
            if not msg:
                _fail("assert with empty message")
            _check_expression(msg)


def _ends_operand(tok: Token) -> bool:
    if tok.kind in (IDENT, NUMBER, STRING, CHAR):
        return True
    if tok.kind == KEYWORD and tok.text in _OPERAND_END:
        return True
    return tok.text in (")", "]")


def _starts_operand(tok: Token) -> bool:
    if tok.kind in (IDENT, NUMBER, STRING, CHAR):
        return True
    if tok.kind == KEYWORD and (
        tok.text in _OPERAND_START or tok.text in PRIMITIVE_TYPES
    ):
        return True
    return False


def _paren_group_is_cast(tokens: list[Token], close_idx: int) -> bool:
    """Whether the group ending at tokens[close_idx] == ')' looks like a
    type cast: a dotted/generic/array type name only."""
    depth = 0
    start = None
    for j in range(close_idx, -1, -1):
        txt = tokens[j].text
        if txt == ")":
            depth += 1
        elif txt == "(":
            depth -= 1
            if depth == 0:
                start = j
                break
    if start is None:
        return False
    inner = tokens[start + 1 : close_idx]
    if not inner:
        return False
    for tok in inner:
        if tok.kind == IDENT:
            continue
        if tok.kind == KEYWORD and tok.text in PRIMITIVE_TYPES:
            continue
        if tok.text in (".", "<", ">", ">>", ",", "[", "]", "?", "extends", "super", "&"):
            continue
        return False
    return True


def _check_expression(tokens: list[Token]) -> None:
    """Reject adjacent operand boundaries that cannot occur inside one
    Java expression (e.g. `0 foo` from a swallowed next statement)."""
    for k in range(len(tokens) - 1):
        a, b = tokens[k], tokens[k + 1]
        if _ends_operand(a) and _starts_operand(b):
            if a.text == ")" and _paren_group_is_cast(tokens, k):
                continue  # cast
            if a.kind in (IDENT, KEYWORD) and b.text == "(":
                continue  # unreachable: '(' is not an operand start
            _fail(f"malformed expression near {a.text!r} {b.text!r}")
        if a.text == ";" or b.text == ";":
            _fail("unexpected ';' inside assert expression")


def validate_method_text(method_text: str) -> str | None:
    """None when the text parses as a single method declaration; otherwise
    a diagnostic string."""
    if not method_text.strip():
        return "empty method text"
    try:
        tokens = tokenize(method_text)
    except JavaLexError as e:
        return str(e)
    try:
        _Checker(tokens).check_method()
    except _Invalid as e:
        return str(e)
    return None
