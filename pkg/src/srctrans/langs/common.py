"""Shared lexing and parsing scaffolding for the bundled frontends."""

from __future__ import annotations

from dataclasses import dataclass


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"line {line}, col {col}: {message}" if line else message)
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str  # num | name | string | op | eof
    value: str
    line: int
    col: int


def tokenize(
    text: str,
    operators: list[str],
    line_comment: str | None = None,
    strings: bool = False,
) -> list[Token]:
    """Longest-match lexer over names, integers, operators and strings."""
    ops = sorted(operators, key=len, reverse=True)
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c.isspace():
            i += 1
            col += 1
            continue
        if line_comment and text.startswith(line_comment, i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Token("num", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(Token("name", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if strings and c in "'\"":
            j = i + 1
            buf = []
            while j < n and text[j] != c:
                if text[j] == "\n":
                    raise ParseError("unterminated string", line, col)
                if text[j] == "\\" and j + 1 < n:
                    buf.append(text[j + 1])
                    j += 2
                else:
                    buf.append(text[j])
                    j += 1
            if j >= n:
                raise ParseError("unterminated string", line, col)
            toks.append(Token("string", "".join(buf), line, col))
            col += j + 1 - i
            i = j + 1
            continue
        for op in ops:
            if text.startswith(op, i):
                toks.append(Token("op", op, line, col))
                i += len(op)
                col += len(op)
                break
        else:
            raise ParseError(f"unexpected character {c!r}", line, col)
    toks.append(Token("eof", "", line, col))
    return toks


class TokenStream:
    """Cursor over a token list with the usual expect/accept helpers."""

    def __init__(self, tokens: list[Token], keywords: frozenset[str]):
        self.tokens = tokens
        self.pos = 0
        self.keywords = keywords

    def peek(self, ahead: int = 0) -> Token:
        i = min(self.pos + ahead, len(self.tokens) - 1)
        return self.tokens[i]

    def next(self) -> Token:
        tok = self.peek()
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def error(self, message: str) -> ParseError:
        tok = self.peek()
        return ParseError(message, tok.line, tok.col)

    def at_op(self, op: str) -> bool:
        tok = self.peek()
        return tok.kind == "op" and tok.value == op

    def at_kw(self, kw: str) -> bool:
        tok = self.peek()
        return tok.kind == "name" and tok.value == kw

    def accept_op(self, op: str) -> bool:
        if self.at_op(op):
            self.next()
            return True
        return False

    def accept_kw(self, kw: str) -> bool:
        if self.at_kw(kw):
            self.next()
            return True
        return False

    def expect_op(self, op: str) -> None:
        if not self.accept_op(op):
            raise self.error(f"expected {op!r}, got {self.peek().value!r}")

    def expect_kw(self, kw: str) -> None:
        if not self.accept_kw(kw):
            raise self.error(f"expected {kw!r}, got {self.peek().value!r}")

    def expect_name(self) -> str:
        tok = self.peek()
        if tok.kind != "name" or tok.value in self.keywords:
            raise self.error(f"expected an identifier, got {tok.value!r}")
        self.next()
        return tok.value

    def expect_eof(self) -> None:
        tok = self.peek()
        if tok.kind != "eof":
            raise self.error(f"trailing input {tok.value!r}")


class PrettyPrinter:
    """Indented line accumulator for layout-normalized output."""

    def __init__(self, indent_unit: str = "  "):
        self.lines: list[str] = []
        self.depth = 0
        self.indent_unit = indent_unit

    def line(self, text: str) -> None:
        self.lines.append(self.indent_unit * self.depth + text if text else "")

    def push(self) -> None:
        self.depth += 1

    def pop(self) -> None:
        self.depth -= 1

    def render(self) -> str:
        return "\n".join(self.lines) + "\n"
