"""Lexer, recursive-descent parser and canonical printer for CSM text."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Optional

from .model import (
    Block,
    Condition,
    ConstDecl,
    Guard,
    Model,
    SourceSpan,
    StateInvariant,
    StateRef,
    Transition,
)

__all__ = ["ParseError", "Token", "tokenize", "parse_csm", "parse_file", "print_csm"]

KEYWORDS = frozenset({"const", "block", "init", "tc", "tcd", "guard", "inv"})
NAT_MAX = 2**32 - 1
REQ_TAG = re.compile(r"\bREQ_[A-Z0-9_]+\b")

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<nat>[0-9]+)
  | (?P<punct>:=|[(){}\[\],:])
    """,
    re.VERBOSE,
)


class ParseError(Exception):
    def __init__(self, span: SourceSpan, expected: str, found: str):
        self.span = span
        self.expected = expected
        self.found = found
        super().__init__(f"{span}: expected {expected}, found {found}")


@dataclass(frozen=True)
class Token:
    kind: str  # keyword text, punctuation text, "IDENT", "NAT", "COMMENT" or "EOF"
    text: str
    span: SourceSpan

    def describe(self):
        if self.kind == "EOF":
            return "end of input"
        if self.kind in ("IDENT", "NAT"):
            return f"{self.kind.lower()} {self.text!r}"
        return repr(self.text)


def tokenize(text: str, file: str = "<string>") -> Iterator[Token]:
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        span = SourceSpan(file, line, pos - line_start + 1)
        if m is None:
            raise ParseError(span, "a token", repr(text[pos]))
        kind = m.lastgroup
        value = m.group()
        pos = m.end()
        if kind == "nl":
            line += 1
            line_start = pos
        elif kind == "comment":
            yield Token("COMMENT", value, span)
        elif kind == "ident":
            yield Token(value if value in KEYWORDS else "IDENT", value, span)
        elif kind == "nat":
            yield Token("NAT", value, span)
        elif kind == "punct":
            yield Token(value, value, span)
    yield Token("EOF", "", SourceSpan(file, line, pos - line_start + 1))


class _Parser:
    def __init__(self, text: str, file: str):
        self.comments: list[Token] = []
        self.tokens = []
        pending = []
        for tok in tokenize(text, file):
            if tok.kind == "COMMENT":
                pending.append(tok)
            else:
                self.tokens.append(tok)
                self.comments.append(pending)
                pending = []
        self.pos = 0
        self.consts: list[ConstDecl] = []
        self.blocks: list[Block] = []
        self.guards: list[Guard] = []
        self.invariants: list[StateInvariant] = []

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def fail(self, expected):
        raise ParseError(self.tok.span, expected, self.tok.describe())

    def expect(self, kind, expected=None) -> Token:
        if self.tok.kind != kind:
            self.fail(expected or repr(kind))
        tok = self.tok
        self.pos += 1
        return tok

    def accept(self, kind) -> Optional[Token]:
        if self.tok.kind == kind:
            return self.expect(kind)
        return None

    def ident(self) -> Token:
        return self.expect("IDENT", "an identifier")

    def nat(self) -> int:
        tok = self.expect("NAT", "a natural number")
        value = int(tok.text)
        if value > NAT_MAX:
            raise ParseError(tok.span, f"a natural number <= {NAT_MAX}", tok.describe())
        return value

    def model(self) -> Model:
        while self.tok.kind != "EOF":
            if self.tok.kind == "const":
                self.const()
            elif self.tok.kind == "block":
                self.block()
            else:
                self.fail("'const' or 'block'")
        return Model(tuple(self.consts), tuple(self.blocks),
                     tuple(self.guards), tuple(self.invariants))

    def const(self):
        start = self.expect("const")
        name = self.ident().text
        self.consts.append(ConstDecl(name, self.nat(), start.span))

    def block(self):
        tags = []
        for c in self.comments[self.pos]:
            tags.extend(REQ_TAG.findall(c.text))
        start = self.expect("block")
        name = self.ident().text
        self.expect(":=")
        init_tok = self.expect("init")
        self.expect("(")
        initial = self.ident().text
        self.expect(")")
        transitions = []
        while self.tok.kind in ("tc", "tcd", "guard", "inv"):
            kind = self.tok.kind
            if kind in ("tc", "tcd"):
                transitions.append(self.transition())
            elif kind == "guard":
                at = self.expect("guard").span
                self.expect("(")
                tc = self.ident().text
                self.expect(")")
                self.guards.append(Guard(tc, self.condition(), name, at))
            else:
                at = self.expect("inv").span
                self.expect("(")
                state = self.ident().text
                self.expect(")")
                self.invariants.append(StateInvariant(name, state, self.condition(), at))
        if self.tok.kind not in ("EOF", "const", "block"):
            self.fail("'tc', 'tcd', 'guard', 'inv', 'const', 'block' or end of input")
        self.blocks.append(Block(name, initial, tuple(transitions), tuple(tags),
                                 start.span, init_tok.span))

    def transition(self) -> Transition:
        start = self.tok
        param = None
        if self.accept("tcd"):
            self.expect("(")
            param = self.ident().text
            self.expect(")")
        else:
            self.expect("tc")
        name = self.ident().text
        self.expect("(")
        path = [self.ident().text]
        while len(path) < 3:
            self.expect(",", "',' (a path lists at least three states)")
            path.append(self.ident().text)
        while self.accept(","):
            path.append(self.ident().text)
        self.expect(")")
        self.expect("{")
        durations = [self.duration()]
        while self.accept(","):
            durations.append(self.duration())
        self.expect("}")
        return Transition(name, tuple(path), tuple(durations), param, span=start.span)

    def duration(self):
        if self.tok.kind == "NAT":
            return self.nat()
        if self.tok.kind == "IDENT":
            return self.ident().text
        self.fail("a duration (identifier or natural number)")

    def condition(self) -> Condition:
        start = self.expect("[")
        atoms = [self.atom()]
        while self.accept(","):
            atoms.append(self.atom())
        self.expect("]")
        return Condition(tuple(atoms), start.span)

    def atom(self) -> StateRef:
        block = self.ident()
        self.expect(":")
        state = self.ident().text
        return StateRef(block.text, state, block.span)


def parse_csm(text: str, file: str = "<string>") -> Model:
    """Parse CSM source text into an unvalidated :class:`Model`.

    Raises :class:`ParseError` at the first syntax error.
    """
    return _Parser(text, file).model()


def parse_file(path) -> Model:
    with open(path, encoding="utf-8") as fh:
        return parse_csm(fh.read(), str(path))


def _durations(t: Transition) -> str:
    return ", ".join(str(d) for d in t.durations)


def print_csm(model: Model) -> str:
    """Canonical CSM text for ``model``: constants, then blocks in order."""
    out = [f"const {c.name} {c.value}" for c in model.consts]
    for b in model.blocks:
        if out:
            out.append("")
        if b.requirement_tags:
            out.append("# " + ", ".join(b.requirement_tags))
        out.append(f"block {b.name} :=")
        out.append(f"  init ({b.initial})")
        for t in b.transitions:
            path = ",".join(t.path)
            if t.param is None:
                out.append(f"  tc {t.tc_name} ({path}) {{{_durations(t)}}}")
            else:
                out.append(f"  tcd ({t.param}) {t.tc_name} ({path}) {{{_durations(t)}}}")
        for g in model.guards:
            if g.block == b.name:
                out.append(f"  guard ({g.tc_name}) {g.condition}")
        for inv in model.invariants:
            if inv.block == b.name:
                out.append(f"  inv ({inv.state}) {inv.condition}")
    return "\n".join(out) + "\n" if out else ""
