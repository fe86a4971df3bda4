"""USDA text parsing for the supported subset.

A regex tokenizer feeds a recursive-descent parser; syntax errors carry line
and column.  The parser is permissive about qualifiers (``custom``,
``uniform``, ``prepend``/``append``) and about value formatting, strict about
structure.
"""
from __future__ import annotations

import json
import re

import numpy as np

from ..core.properties import FileReference
from ..errors import UsdaSyntaxError
from .model import UsdaAttr, UsdaPath, UsdaPrim, UsdaStage

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>[ \t\r]+)
    | (?P<nl>\n)
    | (?P<comment>\#[^\n]*)
    | (?P<string>"(?:\\.|[^"\\\n])*")
    | (?P<asset>@[^@\n]*@)
    | (?P<pathref><[^>\n]*>)
    | (?P<number>[-+]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?)
    | (?P<ident>[A-Za-z_][A-Za-z0-9_:.]*)
    | (?P<punct>[(){}\[\]=,])
    """,
    re.VERBOSE,
)

_KEYWORDS = {"def", "over", "rel", "custom", "uniform", "prepend", "append", "true", "false"}


class _Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col

    def __repr__(self):
        return f"{self.kind}({self.text!r}) at {self.line}:{self.col}"


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line = 1
    line_start = 0
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise UsdaSyntaxError(
                f"unexpected character {text[pos]!r}", line, pos - line_start + 1
            )
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            tokens.append(_Token(kind, m.group(), line, m.start() - line_start + 1))
        pos = m.end()
    tokens.append(_Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        if not text.startswith("#usda"):
            raise UsdaSyntaxError("missing '#usda 1.0' magic header", 1, 1)
        self.tokens = _tokenize(text)
        self.pos = 0

    # -- token plumbing ------------------------------------------------------

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str, tok: _Token | None = None):
        tok = tok or self.peek()
        raise UsdaSyntaxError(message, tok.line, tok.col)

    def expect_punct(self, ch: str) -> _Token:
        tok = self.next()
        if tok.kind != "punct" or tok.text != ch:
            self.error(f"expected {ch!r}, got {tok.text!r}", tok)
        return tok

    def at_punct(self, ch: str) -> bool:
        tok = self.peek()
        return tok.kind == "punct" and tok.text == ch

    def eat_punct(self, ch: str) -> bool:
        if self.at_punct(ch):
            self.pos += 1
            return True
        return False

    # -- grammar -------------------------------------------------------------

    def parse_stage(self) -> UsdaStage:
        stage = UsdaStage()
        if self.at_punct("("):
            self.parse_layer_metadata(stage)
        while self.peek().kind != "eof":
            tok = self.peek()
            if tok.kind == "ident" and tok.text in ("def", "over"):
                stage.add_prim(self.parse_prim())
            else:
                self.error(f"expected a prim, got {tok.text!r}")
        return stage

    def parse_layer_metadata(self, stage: UsdaStage):
        self.expect_punct("(")
        while not self.eat_punct(")"):
            key = self.next()
            if key.kind != "ident":
                self.error("expected a metadata key", key)
            self.expect_punct("=")
            value = self.parse_value()
            if key.text == "subLayers":
                if not isinstance(value, list):
                    self.error("subLayers expects a list", key)
                stage.sublayers = [
                    v.path if isinstance(v, FileReference) else str(v) for v in value
                ]
            else:
                stage.metadata[key.text] = value

    def parse_prim(self) -> UsdaPrim:
        spec = self.next().text
        tok = self.peek()
        type_name = None
        if tok.kind == "ident":
            type_name = self.next().text
        name_tok = self.next()
        if name_tok.kind != "string":
            self.error("expected prim name string", name_tok)
        name = json.loads(name_tok.text)
        try:
            prim = UsdaPrim(name, type_name, spec)
        except Exception as exc:
            self.error(str(exc), name_tok)
        if self.at_punct("("):
            self.parse_prim_metadata(prim)
        self.expect_punct("{")
        while not self.eat_punct("}"):
            self.parse_prim_statement(prim)
        return prim

    def parse_prim_metadata(self, prim: UsdaPrim):
        self.expect_punct("(")
        while not self.eat_punct(")"):
            tok = self.next()
            if tok.kind != "ident":
                self.error("expected prim metadata", tok)
            word = tok.text
            if word in ("prepend", "append", "add"):
                tok = self.next()
                word = tok.text
            if word == "apiSchemas":
                self.expect_punct("=")
                value = self.parse_value()
                if not isinstance(value, list):
                    self.error("apiSchemas expects a list", tok)
                prim.api_schemas = [str(v) for v in value]
            else:
                # Unknown prim metadata is parsed and dropped.
                self.expect_punct("=")
                self.parse_value()

    def parse_prim_statement(self, prim: UsdaPrim):
        tok = self.peek()
        if tok.kind != "ident":
            self.error(f"expected attribute or child prim, got {tok.text!r}")
        if tok.text in ("def", "over"):
            prim.add_child(self.parse_prim())
            return

        custom = uniform = False
        while self.peek().kind == "ident" and self.peek().text in ("custom", "uniform"):
            word = self.next().text
            custom = custom or word == "custom"
            uniform = uniform or word == "uniform"

        head = self.next()
        if head.kind != "ident":
            self.error("expected attribute type", head)
        if head.text == "rel":
            name_tok = self.next()
            if name_tok.kind != "ident":
                self.error("expected relationship name", name_tok)
            if self.eat_punct("="):
                value = self.parse_value()
            else:
                value = None
            prim.attributes[name_tok.text] = UsdaAttr("rel", value, custom, uniform)
            return

        type_token = head.text
        if self.at_punct("["):
            # Array marker: '[' immediately followed by ']'.
            save = self.pos
            self.next()
            if self.eat_punct("]"):
                type_token += "[]"
            else:
                self.pos = save
        name_tok = self.next()
        if name_tok.kind != "ident":
            self.error("expected attribute name", name_tok)
        if self.eat_punct("="):
            raw = self.parse_value()
            value = self.coerce(type_token, raw, name_tok)
            prim.attributes[name_tok.text] = UsdaAttr(type_token, value, custom, uniform)
        # A bare declaration without a value contributes nothing.

    # -- values --------------------------------------------------------------

    def parse_value(self):
        tok = self.peek()
        if tok.kind == "number":
            self.next()
            text = tok.text
            if re.fullmatch(r"[-+]?\d+", text):
                return int(text)
            return float(text)
        if tok.kind == "string":
            self.next()
            try:
                return json.loads(tok.text)
            except json.JSONDecodeError:
                self.error("bad string literal", tok)
        if tok.kind == "asset":
            self.next()
            return FileReference(tok.text[1:-1])
        if tok.kind == "pathref":
            self.next()
            return UsdaPath(tok.text[1:-1])
        if tok.kind == "ident" and tok.text in ("true", "false"):
            self.next()
            return tok.text == "true"
        if self.at_punct("("):
            return self.parse_tuple()
        if self.at_punct("["):
            return self.parse_list()
        self.error(f"expected a value, got {tok.text!r}")

    def parse_tuple(self):
        self.expect_punct("(")
        items = []
        while not self.eat_punct(")"):
            items.append(self.parse_value())
            if not self.at_punct(")"):
                self.expect_punct(",")
        return tuple(items)

    def parse_list(self):
        self.expect_punct("[")
        items = []
        while not self.eat_punct("]"):
            items.append(self.parse_value())
            if not self.at_punct("]"):
                self.expect_punct(",")
        return items

    def coerce(self, type_token: str, raw, tok: _Token):
        """Shape a syntactic value into the attribute's declared type."""
        try:
            return _coerce_value(type_token, raw)
        except (TypeError, ValueError) as exc:
            self.error(f"bad {type_token} value: {exc}", tok)


def _coerce_value(type_token: str, raw):
    if type_token == "bool":
        if isinstance(raw, bool):
            return raw
        if raw in (0, 1):
            return bool(raw)
        raise ValueError(f"{raw!r} is not a bool")
    if type_token == "int":
        if isinstance(raw, bool) or not isinstance(raw, int):
            raise ValueError(f"{raw!r} is not an int")
        return raw
    if type_token in ("double", "float"):
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            raise ValueError(f"{raw!r} is not a number")
        return float(raw)
    if type_token in ("string", "token"):
        if not isinstance(raw, str):
            raise ValueError(f"{raw!r} is not a string")
        return raw
    if type_token == "asset":
        if not isinstance(raw, FileReference):
            raise ValueError(f"{raw!r} is not an asset path")
        return raw
    if type_token in ("double3", "float3", "color3f", "point3f", "normal3f"):
        arr = np.asarray(raw, dtype=float)
        if arr.shape != (3,):
            raise ValueError(f"expected 3 components, got shape {arr.shape}")
        return arr
    if type_token in ("quatd", "quatf"):
        arr = np.asarray(raw, dtype=float)
        if arr.shape != (4,):
            raise ValueError(f"expected 4 components, got shape {arr.shape}")
        return arr
    if type_token in ("matrix2d", "matrix3d", "matrix4d"):
        n = int(type_token[6])
        arr = np.asarray(raw, dtype=float)
        if arr.shape != (n, n):
            raise ValueError(f"expected {n}x{n} matrix, got shape {arr.shape}")
        return arr
    if type_token.endswith("[]"):
        base = type_token[:-2]
        if not isinstance(raw, list):
            raise ValueError("expected a [...] array")
        if base in ("double3", "float3", "color3f", "point3f", "normal3f"):
            if not raw:
                return np.zeros((0, 3))
            return np.asarray(raw, dtype=float).reshape(-1, 3)
        if base in ("quatd", "quatf"):
            if not raw:
                return np.zeros((0, 4))
            return np.asarray(raw, dtype=float).reshape(-1, 4)
        if base in ("double", "float"):
            return np.asarray(raw, dtype=float).reshape(-1)
        if base == "int":
            return np.asarray(raw, dtype=np.int64).reshape(-1)
        if base in ("string", "token"):
            return [_coerce_value(base, v) for v in raw]
        if base == "asset":
            return [_coerce_value(base, v) for v in raw]
        raise ValueError(f"unsupported array base type {base!r}")
    raise ValueError(f"unsupported attribute type {type_token!r}")


def read_usda(text: str) -> UsdaStage:
    """Parse USDA text into a stage; raises UsdaSyntaxError with line/column."""
    parser = _Parser(text)
    return parser.parse_stage()
