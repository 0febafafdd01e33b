"""Lightweight structural parser for Java source files.

This is not a full Java front end. It tokenizes a source file, matches
braces, and extracts the declarations the rest of the engine needs:
package, imports, top-level and static nested type declarations, and the
fields and methods inside each type -- all with exact byte spans so that
class text can be sliced, methods removed, and edits applied without a
round-trip through an AST printer.

Deliberately unsupported: anonymous classes and lambdas are swallowed by
brace matching (their enclosing method keeps them in its span), generics
are carried as raw text, and type resolution is left to the index layer.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

JAVA_KEYWORDS = frozenset({
    "abstract", "assert", "boolean", "break", "byte", "case", "catch",
    "char", "class", "const", "continue", "default", "do", "double",
    "else", "enum", "extends", "final", "finally", "float", "for", "goto",
    "if", "implements", "import", "instanceof", "int", "interface", "long",
    "native", "new", "package", "private", "protected", "public", "return",
    "short", "static", "strictfp", "super", "switch", "synchronized",
    "this", "throw", "throws", "transient", "try", "void", "volatile",
    "while", "var", "record", "yield",
})

MODIFIERS = frozenset({
    "public", "protected", "private", "static", "final", "abstract",
    "synchronized", "native", "strictfp", "transient", "volatile",
    "default",
})

PRIMITIVES = frozenset({
    "void", "boolean", "byte", "char", "short", "int", "long", "float",
    "double", "var",
})


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT, NUMBER, STRING, CHAR, COMMENT, PUNCT
    text: str
    start: int  # byte offset
    end: int  # byte offset, exclusive


_TOKEN_RE = re.compile(
    rb"""
    (?P<COMMENT>//[^\n]*|/\*.*?\*/)
  | (?P<STRING>"(?:\\.|[^"\\])*")
  | (?P<CHAR>'(?:\\.|[^'\\])')
  | (?P<IDENT>[A-Za-z_$][A-Za-z0-9_$]*)
  | (?P<NUMBER>\.?[0-9][0-9A-Za-z_.]*)
  | (?P<PUNCT>\.\.\.|::|->|[{}()\[\];,.<>=+\-*/%!&|^~?:@])
    """,
    re.VERBOSE | re.DOTALL,
)


def tokenize(data: bytes, keep_comments: bool = False) -> list[Token]:
    """Tokenize Java source bytes, returning tokens with byte offsets.

    Unrecognized bytes (stray characters, encoding oddities) are skipped;
    parsing stays best-effort rather than failing the file.
    """
    tokens: list[Token] = []
    pos = 0
    n = len(data)
    while pos < n:
        m = _TOKEN_RE.search(data, pos)
        if m is None:
            break
        kind = m.lastgroup or "PUNCT"
        if kind != "COMMENT" or keep_comments:
            tokens.append(
                Token(kind, m.group().decode("utf-8", errors="replace"), m.start(), m.end())
            )
        pos = m.end()
    return tokens


@dataclass
class RawParam:
    type_text: str
    name: str


@dataclass
class RawMethod:
    name: str
    annotations: list[str]
    modifiers: list[str]
    return_type: str | None  # None for constructors
    params: list[RawParam]
    span: tuple[int, int]  # full declaration incl. attached javadoc/annotations
    body_tokens: list[Token]  # tokens strictly inside the braces (empty for abstract)
    has_body: bool
    doc: str | None


@dataclass
class RawField:
    name: str
    type_text: str
    modifiers: list[str]
    span: tuple[int, int]


@dataclass
class RawType:
    kind: str  # class | interface | enum
    name: str
    modifiers: list[str]
    super_types: list[str]  # raw names from extends/implements
    span: tuple[int, int]  # full declaration incl. attached javadoc
    body_open: int  # byte offset of '{'
    body_close: int  # byte offset of matching '}'
    doc: str | None
    fields: list[RawField] = field(default_factory=list)
    methods: list[RawMethod] = field(default_factory=list)
    nested: list["RawType"] = field(default_factory=list)


@dataclass
class RawFile:
    package: str
    imports: list[tuple[str, bool, bool]]  # (dotted path, is_static, is_wildcard)
    types: list[RawType]


class _TokenCursor:
    """Cursor over a token list with brace-aware helpers."""

    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self, offset: int = 0) -> Token | None:
        j = self.i + offset
        return self.tokens[j] if j < len(self.tokens) else None

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def at_end(self) -> bool:
        return self.i >= len(self.tokens)

    def skip_balanced(self, open_text: str, close_text: str) -> int:
        """Skip past a balanced pair starting at the current token.

        Returns the index one past the closing token. The current token
        must be the opener.
        """
        depth = 0
        while not self.at_end():
            tok = self.advance()
            if tok.text == open_text:
                depth += 1
            elif tok.text == close_text:
                depth -= 1
                if depth == 0:
                    return self.i
        return self.i


def _strip_generics(type_text: str) -> str:
    out: list[str] = []
    depth = 0
    for ch in type_text:
        if ch == "<":
            depth += 1
        elif ch == ">":
            depth -= 1
        elif depth == 0:
            out.append(ch)
    return "".join(out)


def normalize_type_text(type_text: str) -> str:
    """Strip generics and whitespace from a raw type, keeping array suffixes."""
    flat = _strip_generics(type_text).replace(" ", "")
    return flat


def parse_file(data: bytes) -> RawFile:
    """Parse one Java file into its structural skeleton."""
    tokens = tokenize(data)
    comments = [t for t in tokenize(data, keep_comments=True) if t.kind == "COMMENT"]
    cur = _TokenCursor(tokens)

    package = ""
    imports: list[tuple[str, bool, bool]] = []
    types: list[RawType] = []

    while not cur.at_end():
        tok = cur.peek()
        assert tok is not None
        if tok.kind == "IDENT" and tok.text == "package":
            cur.advance()
            package = _read_dotted(cur)
            _skip_to_semicolon(cur)
        elif tok.kind == "IDENT" and tok.text == "import":
            cur.advance()
            is_static = False
            nxt = cur.peek()
            if nxt is not None and nxt.text == "static":
                is_static = True
                cur.advance()
            path = _read_dotted(cur)
            is_wildcard = False
            nxt = cur.peek()
            if nxt is not None and nxt.text == "*":
                is_wildcard = True
                cur.advance()
            if path.endswith("."):
                path = path[:-1]
            _skip_to_semicolon(cur)
            imports.append((path, is_static, is_wildcard))
        elif tok.kind == "IDENT" and tok.text in ("class", "interface", "enum") or (
            tok.kind == "IDENT" and tok.text in MODIFIERS
        ) or tok.text == "@":
            decl = _parse_type_decl(cur, data, comments)
            if decl is not None:
                types.append(decl)
            else:
                cur.advance()
        else:
            cur.advance()
    return RawFile(package=package, imports=imports, types=types)


def _read_dotted(cur: _TokenCursor) -> str:
    parts: list[str] = []
    while not cur.at_end():
        tok = cur.peek()
        assert tok is not None
        if tok.kind == "IDENT":
            parts.append(tok.text)
            cur.advance()
            nxt = cur.peek()
            if nxt is not None and nxt.text == ".":
                cur.advance()
                continue
        break
    return ".".join(parts)


def _skip_to_semicolon(cur: _TokenCursor) -> None:
    while not cur.at_end():
        if cur.advance().text == ";":
            return


def _attach_doc(
    comments: list[Token], data: bytes, decl_start: int
) -> tuple[int, str | None]:
    """Find a comment block directly above decl_start (whitespace gap only).

    Returns (possibly widened span start, docstring text or None).
    """
    best: Token | None = None
    for c in comments:
        if c.end <= decl_start and data[c.end:decl_start].strip() == b"":
            if best is None or c.start > best.start:
                best = c
    if best is None:
        return decl_start, None
    text = best.text
    if text.startswith("/**"):
        doc = _clean_javadoc(text)
        return best.start, doc
    # Plain comments travel with the declaration but are not docstrings.
    return best.start, None


def _clean_javadoc(text: str) -> str:
    body = text
    if body.startswith("/**"):
        body = body[3:]
    if body.endswith("*/"):
        body = body[:-2]
    lines = []
    for line in body.splitlines():
        line = line.strip()
        if line.startswith("*"):
            line = line[1:].strip()
        lines.append(line)
    return "\n".join(lines).strip()


def _parse_type_decl(
    cur: _TokenCursor, data: bytes, comments: list[Token]
) -> RawType | None:
    """Parse a type declaration starting at the current token, or return None."""
    start_index = cur.i
    modifiers: list[str] = []
    annotations: list[str] = []
    first_tok = cur.peek()
    if first_tok is None:
        return None
    decl_start = first_tok.start

    while not cur.at_end():
        tok = cur.peek()
        assert tok is not None
        if tok.text == "@":
            cur.advance()
            name_tok = cur.peek()
            if name_tok is not None and name_tok.kind == "IDENT":
                if name_tok.text == "interface":  # annotation type declaration
                    cur.i = start_index
                    return None
                annotations.append(name_tok.text)
                cur.advance()
                nxt = cur.peek()
                if nxt is not None and nxt.text == "(":
                    cur.skip_balanced("(", ")")
        elif tok.kind == "IDENT" and tok.text in MODIFIERS:
            modifiers.append(tok.text)
            cur.advance()
        elif tok.kind == "IDENT" and tok.text in ("class", "interface", "enum"):
            kind = tok.text
            cur.advance()
            name_tok = cur.peek()
            if name_tok is None or name_tok.kind != "IDENT":
                return None
            name = name_tok.text
            cur.advance()
            super_types: list[str] = []
            # Skip generics, gather extends/implements names until '{'.
            while not cur.at_end():
                tok2 = cur.peek()
                assert tok2 is not None
                if tok2.text == "<":
                    _skip_angle(cur)
                elif tok2.text in ("extends", "implements"):
                    cur.advance()
                    super_types.extend(_read_type_name_list(cur))
                elif tok2.text == "{":
                    body_open = tok2.start
                    cur.skip_balanced("{", "}")
                    body_close = cur.tokens[cur.i - 1].end
                    span_start, doc = _attach_doc(comments, data, decl_start)
                    raw = RawType(
                        kind=kind,
                        name=name,
                        modifiers=modifiers,
                        super_types=super_types,
                        span=(span_start, body_close),
                        body_open=body_open,
                        body_close=body_close,
                        doc=doc,
                    )
                    _parse_type_body(raw, data, comments)
                    return raw
                else:
                    cur.advance()
            return None
        else:
            cur.i = start_index
            return None
    return None


def _skip_angle(cur: _TokenCursor) -> None:
    depth = 0
    while not cur.at_end():
        tok = cur.advance()
        if tok.text == "<":
            depth += 1
        elif tok.text == ">":
            depth -= 1
            if depth == 0:
                return


def _read_type_name_list(cur: _TokenCursor) -> list[str]:
    """Read comma-separated type names until '{', 'extends'/'implements', or EOF."""
    names: list[str] = []
    current: list[str] = []
    while not cur.at_end():
        tok = cur.peek()
        assert tok is not None
        if tok.text == "{" or tok.text in ("extends", "implements"):
            break
        if tok.text == "<":
            _skip_angle(cur)
            continue
        if tok.text == ",":
            if current:
                names.append(".".join(current))
                current = []
            cur.advance()
            continue
        if tok.kind == "IDENT":
            current.append(tok.text)
            cur.advance()
            nxt = cur.peek()
            if nxt is not None and nxt.text == ".":
                cur.advance()
            continue
        cur.advance()
    if current:
        names.append(".".join(current))
    return names


def _parse_type_body(raw: RawType, data: bytes, comments: list[Token]) -> None:
    """Parse members between raw.body_open and raw.body_close."""
    inner = tokenize(data[raw.body_open + 1 : raw.body_close - 1])
    base = raw.body_open + 1
    tokens = [Token(t.kind, t.text, t.start + base, t.end + base) for t in inner]
    cur = _TokenCursor(tokens)

    if raw.kind == "enum":
        _skip_enum_constants(cur)

    while not cur.at_end():
        tok = cur.peek()
        assert tok is not None
        if tok.text == ";":
            cur.advance()
            continue
        if tok.text == "{":  # instance initializer block
            cur.skip_balanced("{", "}")
            continue
        if tok.text == "static":
            nxt = cur.peek(1)
            if nxt is not None and nxt.text == "{":  # static initializer
                cur.advance()
                cur.skip_balanced("{", "}")
                continue
        member = _parse_member(cur, data, comments, raw)
        if member is None:
            cur.advance()


def _skip_enum_constants(cur: _TokenCursor) -> None:
    """Skip enum constant list: everything up to the first ';' at depth 0."""
    while not cur.at_end():
        tok = cur.peek()
        assert tok is not None
        if tok.text == ";":
            cur.advance()
            return
        if tok.text == "(":
            cur.skip_balanced("(", ")")
            continue
        if tok.text == "{":
            cur.skip_balanced("{", "}")
            continue
        cur.advance()


def _parse_member(
    cur: _TokenCursor, data: bytes, comments: list[Token], owner: RawType
) -> object | None:
    """Parse one member (field, method, constructor, or nested type)."""
    start_index = cur.i
    first = cur.peek()
    assert first is not None
    decl_start = first.start

    annotations: list[str] = []
    modifiers: list[str] = []

    while not cur.at_end():
        tok = cur.peek()
        assert tok is not None
        if tok.text == "@":
            cur.advance()
            name_tok = cur.peek()
            if name_tok is not None and name_tok.kind == "IDENT":
                annotations.append(name_tok.text)
                cur.advance()
                nxt = cur.peek()
                if nxt is not None and nxt.text == "(":
                    cur.skip_balanced("(", ")")
            continue
        if tok.kind == "IDENT" and tok.text in MODIFIERS:
            modifiers.append(tok.text)
            cur.advance()
            continue
        break

    tok = cur.peek()
    if tok is None:
        return None

    if tok.kind == "IDENT" and tok.text in ("class", "interface", "enum"):
        cur.i = start_index
        nested = _parse_type_decl(cur, data, comments)
        if nested is not None:
            owner.nested.append(nested)
            return nested
        return None

    # Generic method type parameters: <T> ReturnType name(...)
    if tok.text == "<":
        _skip_angle(cur)
        tok = cur.peek()
        if tok is None:
            return None

    # Collect header tokens up to '(', '=', ';', or '{'.
    header: list[Token] = []
    while not cur.at_end():
        tok = cur.peek()
        assert tok is not None
        if tok.text in ("(", "=", ";", "{"):
            break
        if tok.text == "<":
            lo = cur.i
            _skip_angle(cur)
            header.extend(cur.tokens[lo:cur.i])
            continue
        header.append(tok)
        cur.advance()

    tok = cur.peek()
    if tok is None:
        return None

    if tok.text == "(" and header:
        name = header[-1].text
        type_tokens = header[:-1]
        return_type = _join_type(type_tokens) if type_tokens else None
        params = _parse_params(cur)
        # throws clause, then body or ';'
        has_body = False
        body_tokens: list[Token] = []
        end = cur.tokens[cur.i - 1].end if cur.i > 0 else tok.end
        while not cur.at_end():
            t2 = cur.peek()
            assert t2 is not None
            if t2.text == "{":
                lo = cur.i
                cur.skip_balanced("{", "}")
                body_tokens = cur.tokens[lo + 1 : cur.i - 1]
                end = cur.tokens[cur.i - 1].end
                has_body = True
                break
            if t2.text == ";":
                cur.advance()
                end = cur.tokens[cur.i - 1].end
                break
            cur.advance()
        span_start, doc = _attach_doc(comments, data, decl_start)
        method = RawMethod(
            name=name,
            annotations=annotations,
            modifiers=modifiers,
            return_type=return_type,
            params=params,
            span=(span_start, end),
            body_tokens=body_tokens,
            has_body=has_body,
            doc=doc,
        )
        owner.methods.append(method)
        return method

    if tok.text in ("=", ";") and len(header) >= 2:
        # Field declaration: type is everything before the first name.
        type_tokens = header[:-1]
        names = [header[-1].text]
        # Consume initializer and any extra declarators.
        while not cur.at_end():
            t2 = cur.advance()
            if t2.text == ";":
                break
            if t2.text == "(":
                cur.i -= 1
                cur.skip_balanced("(", ")")
            elif t2.text == "{":
                cur.i -= 1
                cur.skip_balanced("{", "}")
            elif t2.text == ",":
                nxt = cur.peek()
                if nxt is not None and nxt.kind == "IDENT":
                    after = cur.peek(1)
                    if after is not None and after.text in ("=", ",", ";"):
                        names.append(nxt.text)
                        cur.advance()
        end = cur.tokens[cur.i - 1].end if cur.i > 0 else tok.end
        span_start, _doc = _attach_doc(comments, data, decl_start)
        type_text = _join_type(type_tokens)
        fields = [
            RawField(name=n, type_text=type_text, modifiers=modifiers, span=(span_start, end))
            for n in names
        ]
        owner.fields.extend(fields)
        return fields[0] if fields else None

    return None


def _join_type(tokens: list[Token]) -> str:
    parts: list[str] = []
    for t in tokens:
        parts.append(t.text)
    text = "".join(
        p if p in ("<", ">", ",", ".", "[", "]", "?") else p + " " for p in parts
    ).strip()
    # Collapse artifacts like "List< String >" from naive joining.
    return text.replace(" <", "<").replace("< ", "<").replace(" >", ">").replace(" ,", ",").replace(" .", ".").replace(". ", ".").replace(" [", "[").replace("[ ", "[").replace(" ]", "]")


def _parse_params(cur: _TokenCursor) -> list[RawParam]:
    """Parse a parameter list; current token must be '('."""
    lo = cur.i
    cur.skip_balanced("(", ")")
    inside = cur.tokens[lo + 1 : cur.i - 1]
    groups: list[list[Token]] = [[]]
    depth_angle = 0
    depth_paren = 0
    for t in inside:
        if t.text == "<":
            depth_angle += 1
        elif t.text == ">":
            depth_angle -= 1
        elif t.text in ("(", "["):
            depth_paren += 1
        elif t.text in (")", "]"):
            depth_paren -= 1
        if t.text == "," and depth_angle == 0 and depth_paren == 0:
            groups.append([])
        else:
            groups[-1].append(t)
    params: list[RawParam] = []
    for group in groups:
        toks = [t for t in group]
        # Drop annotations and 'final'.
        cleaned: list[Token] = []
        i = 0
        while i < len(toks):
            t = toks[i]
            if t.text == "@":
                i += 2
                if i < len(toks) and toks[i].text == "(":
                    depth = 0
                    while i < len(toks):
                        if toks[i].text == "(":
                            depth += 1
                        elif toks[i].text == ")":
                            depth -= 1
                            if depth == 0:
                                i += 1
                                break
                        i += 1
                continue
            if t.kind == "IDENT" and t.text == "final":
                i += 1
                continue
            cleaned.append(t)
            i += 1
        if not cleaned:
            continue
        name_tok = None
        for t in reversed(cleaned):
            if t.kind == "IDENT":
                name_tok = t
                break
        if name_tok is None:
            continue
        idx = cleaned.index(name_tok)
        type_text = _join_type(cleaned[:idx])
        trailing = "".join(t.text for t in cleaned[idx + 1 :])  # e.g. args[]
        if trailing:
            type_text += trailing
        params.append(RawParam(type_text=type_text, name=name_tok.text))
    return params
