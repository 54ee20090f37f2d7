"""Method-level extraction from Java source files.

Finds every method and constructor declaration in a compilation unit,
with exact character spans (the span slice reproduces the declaration
text), parameter lists, and statement-level assert detection. Methods
inside anonymous classes and lambda bodies are intentionally not lifted
out; their enclosing method is extracted and an anonymous-body counter
is kept for corpus statistics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .lexer import (
    COMMENT,
    IDENT,
    KEYWORD,
    MODIFIERS,
    OP,
    JavaLexError,
    Token,
    tokenize,
)

TYPE_KEYWORDS = {"class", "interface", "enum", "record"}

# Statement terminators/openers after which an `assert` keyword begins a
# new statement.
_STMT_BOUNDARY_TEXTS = {"{", "}", ";", ":", ")", "else", "do", "->"}


class JavaParseError(ValueError):
    """Raised when a file cannot be tokenized or structurally walked."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass
class JavaAssertion:
    text: str  # full statement including trailing ';'
    line: int  # 1-based line within the file
    condition: str
    message: str | None
    span: tuple[int, int]  # character span within the file


@dataclass
class JavaMethod:
    class_fqn: str
    method_name: str
    signature: str
    parameters: list[tuple[str, str]]  # (name, declared type)
    return_type: str | None
    text: str  # full declaration text (annotations through closing brace)
    start_line: int
    end_line: int
    span: tuple[int, int]  # character span within the file
    has_body: bool
    body_open_offset: int | None = None  # char offset of the body '{'
    assertions: list[JavaAssertion] = field(default_factory=list)
    doc_comment: str | None = None
    anonymous_bodies: int = 0


def _collapse_ws(s: str) -> str:
    return " ".join(s.split())


class _Walker:
    def __init__(self, text: str, path: str):
        self.text = text
        self.path = path
        try:
            all_tokens = tokenize(text, include_comments=True)
        except JavaLexError as e:
            raise JavaParseError(path, str(e)) from e
        self.comments = [t for t in all_tokens if t.kind == COMMENT]
        self.toks = [t for t in all_tokens if t.kind != COMMENT]
        self.methods: list[JavaMethod] = []
        self.package = self._parse_package()

    def _parse_package(self) -> str:
        t = self.toks
        if t and t[0].kind == KEYWORD and t[0].text == "package":
            parts = []
            i = 1
            while i < len(t) and t[i].text != ";":
                parts.append(t[i].text)
                i += 1
            return "".join(parts)
        return ""

    # -- token helpers ----------------------------------------------------

    def _skip_balanced(self, i: int, open_: str, close: str) -> int:
        """i points at open_; returns index just past the matching close."""
        t = self.toks
        depth = 0
        while i < len(t):
            txt = t[i].text
            if txt == open_:
                depth += 1
            elif txt == close:
                depth -= 1
                if depth == 0:
                    return i + 1
            i += 1
        raise JavaParseError(self.path, f"unbalanced {open_!r}")

    def _skip_annotation(self, i: int) -> int:
        """i points at '@'; returns index past the annotation (incl. args)."""
        t = self.toks
        i += 1  # '@'
        # dotted name
        while i < len(t) and (t[i].kind == IDENT or t[i].text == "."):
            i += 1
        if i < len(t) and t[i].text == "(":
            i = self._skip_balanced(i, "(", ")")
        return i

    def _find_type_body(self, i: int) -> int:
        """Scan forward to the '{' opening a type body (past extends etc.)."""
        t = self.toks
        while i < len(t) and t[i].text != "{":
            if t[i].text == "(":  # record header
                i = self._skip_balanced(i, "(", ")")
                continue
            i += 1
        if i >= len(t):
            raise JavaParseError(self.path, "type declaration without body")
        return i

    # -- top level ---------------------------------------------------------

    def walk(self) -> list[JavaMethod]:
        t = self.toks
        i = 0
        while i < len(t):
            tok = t[i]
            if tok.kind == KEYWORD and tok.text in TYPE_KEYWORDS:
                name = t[i + 1].text if i + 1 < len(t) else "?"
                body = self._find_type_body(i + 1)
                i = self._walk_type_body(
                    body, self._qualify(name), name, is_enum=tok.text == "enum"
                )
            else:
                i += 1
        return self.methods

    def _qualify(self, name: str) -> str:
        return f"{self.package}.{name}" if self.package else name

    # -- type bodies -------------------------------------------------------

    def _walk_type_body(
        self, i: int, fqn: str, simple_name: str, is_enum: bool = False
    ) -> int:
        """i points at the '{' of a type body; extracts members; returns
        the index just past the matching '}'."""
        t = self.toks
        end = self._skip_balanced(i, "{", "}")
        i += 1
        if is_enum:
            i = self._skip_enum_constants(i, end - 1)
        while i < end - 1:
            i = self._parse_member(i, end - 1, fqn, simple_name)
        return end

    def _skip_enum_constants(self, i: int, stop: int) -> int:
        t = self.toks
        while i < stop:
            txt = t[i].text
            if txt == ";":
                return i + 1
            if txt == "(":
                i = self._skip_balanced(i, "(", ")")
                continue
            if txt == "{":  # constant body
                i = self._skip_balanced(i, "{", "}")
                continue
            i += 1
        return stop

    def _parse_member(self, i: int, stop: int, fqn: str, simple_name: str) -> int:
        t = self.toks
        member_start = i
        # annotations
        while i < stop and t[i].text == "@":
            if i + 1 < stop and t[i + 1].text == "interface":
                break  # nested @interface declaration
            i = self._skip_annotation(i)
        sig_start = i  # first non-annotation token: modifiers onward
        # modifiers
        while i < stop and t[i].kind == KEYWORD and t[i].text in MODIFIERS:
            i += 1
        if i >= stop:
            return stop
        tok = t[i]
        if tok.text == ";":
            return i + 1
        if tok.text == "{":  # instance/static initializer
            return self._skip_balanced(i, "{", "}")
        if tok.text == "@" and i + 1 < stop and t[i + 1].text == "interface":
            body = self._find_type_body(i + 2)
            return self._skip_balanced(body, "{", "}")
        if tok.kind == KEYWORD and tok.text in TYPE_KEYWORDS:
            name = t[i + 1].text
            body = self._find_type_body(i + 1)
            return self._walk_type_body(
                body, f"{fqn}.{name}", name, is_enum=tok.text == "enum"
            )
        # field or method: scan for the first of '=', '(', ';' at depth 0
        j = i
        angle = 0
        kind_idx = None
        while j < stop:
            txt = t[j].text
            if angle == 0 and txt in ("=", "(", ";"):
                kind_idx = j
                break
            if txt == "<":
                angle += 1
            elif txt == ">":
                angle = max(0, angle - 1)
            elif txt == ">>":
                angle = max(0, angle - 2)
            elif txt == ">>>":
                angle = max(0, angle - 3)
            j += 1
        if kind_idx is None:
            return stop
        if t[kind_idx].text in ("=", ";"):
            return self._skip_field(kind_idx)
        return self._parse_method(member_start, sig_start, kind_idx, fqn, simple_name)

    def _skip_field(self, i: int) -> int:
        """i points at '=' or ';' of a field; skip to past its ';'."""
        t = self.toks
        while i < len(t):
            txt = t[i].text
            if txt == ";":
                return i + 1
            if txt == "{":
                i = self._skip_balanced(i, "{", "}")
                continue
            if txt == "(":
                i = self._skip_balanced(i, "(", ")")
                continue
            i += 1
        return i

    # -- methods -----------------------------------------------------------

    def _parse_method(
        self, member_start: int, sig_start: int, paren: int, fqn: str, simple_name: str
    ) -> int:
        t = self.toks
        name_tok = t[paren - 1]
        params_end = self._skip_balanced(paren, "(", ")")  # past ')'
        # throws clause / annotation default, then '{' or ';'
        i = params_end
        while i < len(t) and t[i].text not in ("{", ";"):
            if t[i].text == "(":
                i = self._skip_balanced(i, "(", ")")
                continue
            i += 1
        if i >= len(t):
            raise JavaParseError(self.path, "method header without body or ';'")
        has_body = t[i].text == "{"
        anon = 0
        assertions: list[JavaAssertion] = []
        body_open_offset = None
        if has_body:
            body_open = i
            body_open_offset = t[i].start
            end = self._skip_balanced(i, "{", "}")
            assertions = self._find_assertions(body_open, end)
            anon = self._count_anonymous_bodies(body_open, end)
        else:
            end = i + 1
        start_tok = t[member_start]
        end_tok = t[end - 1]
        span = (start_tok.start, end_tok.end)
        is_ctor = name_tok.text == simple_name and paren - 1 == self._type_name_pos(
            sig_start, paren
        )
        signature = _collapse_ws(self.text[t[sig_start].start : t[params_end - 1].end])
        return_type = (
            None
            if is_ctor
            else _collapse_ws(self._return_type_text(sig_start, paren - 1))
        )
        self.methods.append(
            JavaMethod(
                class_fqn=fqn,
                method_name=name_tok.text,
                signature=signature,
                parameters=self._parse_params(paren, params_end - 1),
                return_type=return_type,
                text=self.text[span[0] : span[1]],
                start_line=start_tok.line,
                end_line=end_tok.line,
                span=span,
                has_body=has_body,
                body_open_offset=body_open_offset,
                assertions=assertions,
                doc_comment=self._doc_comment_before(start_tok),
                anonymous_bodies=anon,
            )
        )
        return end

    def _type_name_pos(self, sig_start: int, paren: int) -> int:
        """Index of the first non-modifier token; equals paren-1 only for
        constructors (no return type between modifiers and name)."""
        t = self.toks
        i = sig_start
        while i < paren and t[i].kind == KEYWORD and t[i].text in MODIFIERS:
            i += 1
        return i

    def _return_type_text(self, sig_start: int, name_idx: int) -> str:
        t = self.toks
        i = self._type_name_pos(sig_start, name_idx)
        if t[i].text == "<":  # generic method type parameters
            depth = 0
            while i < name_idx:
                if t[i].text == "<":
                    depth += 1
                elif t[i].text == ">":
                    depth -= 1
                    if depth == 0:
                        i += 1
                        break
                elif t[i].text == ">>":
                    depth -= 2
                    if depth <= 0:
                        i += 1
                        break
                i += 1
        if i >= name_idx:
            return ""
        return self.text[t[i].start : t[name_idx - 1].end]

    def _parse_params(self, paren: int, close: int) -> list[tuple[str, str]]:
        """Parameters between toks[paren]='(' and toks[close]=')'."""
        t = self.toks
        params: list[tuple[str, str]] = []
        i = paren + 1
        start = i
        depth = 0
        groups: list[tuple[int, int]] = []
        while i < close:
            txt = t[i].text
            if txt in ("(", "[", "<"):
                depth += 1
            elif txt in (")", "]", ">"):
                depth -= 1
            elif txt == ">>":
                depth -= 2
            elif txt == ">>>":
                depth -= 3
            elif txt == "," and depth == 0:
                groups.append((start, i))
                start = i + 1
            i += 1
        if start < close:
            groups.append((start, close))
        for a, b in groups:
            toks = list(range(a, b))
            # strip leading 'final' and annotations
            k = a
            while k < b:
                if t[k].text == "final":
                    k += 1
                elif t[k].text == "@":
                    k = self._skip_annotation(k)
                else:
                    break
            if k >= b:
                continue
            name_idx = None
            for j in range(b - 1, k - 1, -1):
                if t[j].kind == IDENT:
                    name_idx = j
                    break
            if name_idx is None or name_idx == k:
                # receiver parameter or malformed; record raw text
                params.append((t[b - 1].text, _collapse_ws(
                    self.text[t[k].start : t[b - 1].end])))
                continue
            type_text = _collapse_ws(self.text[t[k].start : t[name_idx - 1].end])
            # trailing array brackets after the name: int a[]
            if name_idx + 1 < b:
                type_text += self.text[t[name_idx + 1].start : t[b - 1].end].strip()
            params.append((t[name_idx].text, type_text))
        return params

    def _find_assertions(self, body_open: int, body_end: int) -> list[JavaAssertion]:
        """Statement-level assert statements between body braces."""
        t = self.toks
        out: list[JavaAssertion] = []
        i = body_open + 1
        while i < body_end - 1:
            tok = t[i]
            if tok.kind == KEYWORD and tok.text == "assert":
                prev = t[i - 1]
                if prev.text in _STMT_BOUNDARY_TEXTS or i == body_open + 1:
                    j = i
                    depth = 0
                    q = 0  # pending '?' of ternaries
                    colon = None
                    while j < body_end:
                        txt = t[j].text
                        if txt in ("(", "[", "{"):
                            depth += 1
                        elif txt in (")", "]", "}"):
                            depth -= 1
                        elif txt == "?" and depth == 0:
                            q += 1
                        elif txt == ":" and depth == 0:
                            if q > 0:
                                q -= 1
                            elif colon is None:
                                colon = j
                        elif txt == ";" and depth == 0:
                            break
                        j += 1
                    if j < body_end and t[j].text == ";":
                        text = self.text[tok.start : t[j].end]
                        if colon is not None:
                            cond = self.text[t[i + 1].start : t[colon - 1].end]
                            msg = self.text[t[colon + 1].start : t[j - 1].end]
                        else:
                            cond = self.text[t[i + 1].start : t[j - 1].end]
                            msg = None
                        out.append(
                            JavaAssertion(
                                text=text,
                                line=tok.line,
                                condition=cond.strip(),
                                message=msg.strip() if msg else None,
                                span=(tok.start, t[j].end),
                            )
                        )
                        i = j + 1
                        continue
            i += 1
        return out

    def _count_anonymous_bodies(self, body_open: int, body_end: int) -> int:
        t = self.toks
        count = 0
        i = body_open + 1
        while i < body_end - 1:
            if t[i].kind == KEYWORD and t[i].text == "new":
                j = i + 1
                while j < body_end and (
                    t[j].kind == IDENT
                    or t[j].text in (".", "<", ">", ">>", ",", "[", "]")
                    or t[j].kind == KEYWORD
                    and t[j].text in ("int", "long", "byte", "short", "char",
                                      "float", "double", "boolean")
                ):
                    j += 1
                if j < body_end and t[j].text == "(":
                    j = self._skip_balanced(j, "(", ")")
                    if j < body_end and t[j].text == "{":
                        count += 1
            i += 1
        return count

    def _doc_comment_before(self, start_tok: Token) -> str | None:
        """Nearest comment separated from the declaration by whitespace only,
        absorbing directly adjacent '//' lines above it."""
        cands = [c for c in self.comments if c.end <= start_tok.start]
        if not cands:
            return None
        last = cands[-1]
        if self.text[last.end : start_tok.start].strip():
            return None
        block = [last]
        if last.text.startswith("//"):
            for c in reversed(cands[:-1]):
                if not c.text.startswith("//"):
                    break
                if self.text[c.end : block[0].start].strip():
                    break
                if block[0].line - (c.line + c.text.count("\n")) > 1:
                    break
                block.insert(0, c)
        return "\n".join(c.text for c in block)


def extract_methods(text: str, path: str = "<memory>") -> list[JavaMethod]:
    """All method and constructor declarations of one compilation unit."""
    return _Walker(text, path).walk()
