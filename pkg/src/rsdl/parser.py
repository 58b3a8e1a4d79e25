"""Text format for theories and for 3-CNF formulas.

Theory files are a sequence of statements, each ended by ``.``::

    # comment
    variant: seq-single.          (optional)
    facts: alpha, beta, alpha.
    r0: alpha; beta => phi.
    r1: => psi.                   (empty body)
    sup: r0 > r1.

Arrows are ``->`` (strict), ``=>`` (defeasible) and ``~>`` (defeater).
``,`` separates multiset items and ``;`` sequence items.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .core import (
    Arrow,
    Body,
    Head,
    Literal,
    Rule,
    Structure,
    Theory,
    Variant,
)

KEYWORDS = frozenset({"facts", "sup", "variant"})


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int

    def __str__(self):
        return f"{self.line}:{self.column}"


class ParseError(ValueError):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{span}: {message}")
        self.message = message
        self.span = span


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: SourceSpan


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+|\#[^\n]*)
  | (?P<nl>\n)
  | (?P<arrow>->|=>|~>)
  | (?P<word>[A-Za-z_][A-Za-z0-9_]*(?:-[A-Za-z0-9_]+)*)
  | (?P<punct>[~,;.:>])
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        span = SourceSpan(line, pos - line_start + 1)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", span)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind != "ws":
            tokens.append(Token(kind if kind != "punct" else m.group(), m.group(), span))
        pos = m.end()
    tokens.append(Token("eof", "", SourceSpan(line, pos - line_start + 1)))
    return tokens


@dataclass
class _RawRule:
    label: str
    arrow: Arrow
    body: list[Literal]
    body_sep: Optional[str]
    head: list[Literal]
    head_sep: Optional[str]
    span: SourceSpan


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0
        self.facts: list[Literal] = []
        self.rules: list[_RawRule] = []
        self.sup: list[tuple[str, str, SourceSpan, SourceSpan]] = []
        self.variant: Optional[Variant] = None
        self.variant_span: Optional[SourceSpan] = None

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def expect(self, kind: str, what: str) -> Token:
        if self.tok.kind != kind:
            found = self.tok.text or "end of input"
            raise ParseError(f"expected {what}, found {found!r}", self.tok.span)
        return self.advance()

    def ident(self, what: str) -> Token:
        t = self.expect("word", what)
        if "-" in t.text:
            raise ParseError(f"invalid identifier {t.text!r}", t.span)
        return t

    def literal(self) -> Literal:
        negated = False
        if self.tok.kind == "~":
            self.advance()
            negated = True
        t = self.ident("a literal")
        if t.text in KEYWORDS:
            raise ParseError(f"reserved word {t.text!r} used as an atom", t.span)
        return Literal(t.text, negated)

    def items(self, stop: set[str]) -> tuple[list[Literal], Optional[str]]:
        """Parse a separated literal list up to (not including) a stop token."""
        out: list[Literal] = []
        sep: Optional[str] = None
        if self.tok.kind in stop:
            return out, sep
        out.append(self.literal())
        while self.tok.kind in (",", ";"):
            t = self.advance()
            if sep is None:
                sep = t.kind
            elif sep != t.kind:
                raise ParseError("mixed separators", t.span)
            out.append(self.literal())
        return out, sep

    def parse(self) -> None:
        while self.tok.kind != "eof":
            self.statement()

    def statement(self) -> None:
        start = self.ident("a statement")
        self.expect(":", "':'")
        if start.text == "facts":
            facts, _ = self.items({"."})
            self.facts.extend(facts)
        elif start.text == "sup":
            self.superiority()
        elif start.text == "variant":
            name = self.expect("word", "a variant name")
            try:
                variant = Variant(name.text)
            except ValueError:
                options = ", ".join(v.value for v in Variant)
                raise ParseError(f"unknown variant {name.text!r} (one of {options})", name.span)
            if self.variant is not None and variant is not self.variant:
                raise ParseError("conflicting variant directives", name.span)
            self.variant, self.variant_span = variant, name.span
        else:
            self.rule(start)
        self.expect(".", "'.'")

    def superiority(self) -> None:
        while True:
            a = self.ident("a rule label")
            self.expect(">", "'>'")
            b = self.ident("a rule label")
            self.sup.append((a.text, b.text, a.span, b.span))
            if self.tok.kind != ",":
                return
            self.advance()

    def rule(self, label: Token) -> None:
        body, body_sep = self.items({"arrow"})
        arrow_tok = self.expect("arrow", "an arrow (->, => or ~>)")
        head, head_sep = self.items({"."})
        if not head:
            raise ParseError("a rule needs at least one head literal", self.tok.span)
        self.rules.append(
            _RawRule(label.text, Arrow(arrow_tok.text), body, body_sep, head, head_sep, label.span)
        )


_SEP = {",": Structure.MULTISET, ";": Structure.SEQUENCE}


def _infer_variant(rules: list[_RawRule]) -> Variant:
    body = {_SEP[r.body_sep] for r in rules if r.body_sep}
    head = {_SEP[r.head_sep] for r in rules if r.head_sep}
    if len(body) > 1:
        bad = next(r for r in rules if r.body_sep == ";")
        raise ParseError("rules mix multiset and sequence bodies", bad.span)
    if len(head) > 1:
        bad = next(r for r in rules if r.head_sep == ";")
        raise ParseError("rules mix multiset and sequence heads", bad.span)
    if Structure.MULTISET in head:
        span = next(r for r in rules if r.head_sep == ",").span
        if Structure.MULTISET in body:
            raise ParseError("multi-literal heads need sequence bodies", span)
        raise ParseError("ambiguous variant (whole vs per-literal); add directive", span)
    if Structure.SEQUENCE in head:
        if Structure.MULTISET in body:
            span = next(r for r in rules if r.body_sep == ",").span
            raise ParseError("sequence heads need sequence bodies", span)
        return Variant.SEQ_SEQ_HEAD
    if Structure.SEQUENCE in body:
        return Variant.SEQ_SINGLE
    return Variant.MS_SINGLE


def _build_rule(raw: _RawRule, variant: Variant) -> Rule:
    if raw.body_sep and _SEP[raw.body_sep] is not variant.body_structure:
        raise ParseError(
            f"rule {raw.label}: {_SEP[raw.body_sep].value} body under variant {variant.value}",
            raw.span,
        )
    hs = variant.head_structure
    if hs is Structure.SINGLE and len(raw.head) > 1:
        raise ParseError(f"rule {raw.label}: variant {variant.value} allows one head literal", raw.span)
    if raw.head_sep and _SEP[raw.head_sep] is not hs:
        raise ParseError(
            f"rule {raw.label}: {_SEP[raw.head_sep].value} head under variant {variant.value}",
            raw.span,
        )
    return Rule(raw.label, raw.arrow, Body(variant.body_structure, raw.body), Head(hs, raw.head))


def parse_theory(text: str, variant: Optional[Variant] = None) -> Theory:
    """Parse a theory; ``variant`` overrides any directive in the text."""
    p = _Parser(text)
    p.parse()
    chosen = variant or p.variant or _infer_variant(p.rules)
    seen: dict[str, SourceSpan] = {}
    rules = []
    for raw in p.rules:
        if raw.label in KEYWORDS:
            raise ParseError(f"reserved word {raw.label!r} used as a label", raw.span)
        if raw.label in seen:
            raise ParseError(f"duplicate label {raw.label}", raw.span)
        seen[raw.label] = raw.span
        rules.append(_build_rule(raw, chosen))
    for a, b, sa, sb in p.sup:
        for name, span in ((a, sa), (b, sb)):
            if name not in seen:
                raise ParseError(f"unknown label {name}", span)
        if a == b:
            raise ParseError(f"reflexive superiority {a} > {a}", sa)
    sup = frozenset((a, b) for a, b, _, _ in p.sup)
    return Theory(tuple(p.facts), tuple(rules), sup, chosen)


def render_rule(r: Rule) -> str:
    return f"{r}."


def render_theory(t: Theory) -> str:
    lines = [f"variant: {t.variant.value}.", "facts: " + ", ".join(map(str, t.facts)) + "."]
    lines.extend(render_rule(r) for r in t.rules)
    if t.superiority:
        pairs = ", ".join(f"{a} > {b}" for a, b in sorted(t.superiority))
        lines.append(f"sup: {pairs}.")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CnfFormula:
    variables: frozenset[str]
    clauses: tuple[tuple[Literal, Literal, Literal], ...]

    @classmethod
    def of(cls, clauses) -> "CnfFormula":
        clauses = tuple(tuple(c) for c in clauses)
        for c in clauses:
            if len(c) != 3:
                raise ValueError(f"clause arity {len(c)}, expected 3")
        return cls(frozenset(x.atom for c in clauses for x in c), clauses)

    def evaluate(self, assignment: dict[str, bool]) -> bool:
        return all(any(assignment[x.atom] != x.negated for x in c) for c in self.clauses)

    def __str__(self):
        return "\n".join(" ".join(map(str, c)) for c in self.clauses)


_CNF_LITERAL = re.compile(r"~?[A-Za-z_][A-Za-z0-9_]*\Z")


def parse_cnf(text: str) -> CnfFormula:
    """One clause per line, three whitespace-separated literals, ``~`` negates."""
    clauses = []
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        words = []
        for m in re.finditer(r"\S+", line):
            if not _CNF_LITERAL.match(m.group()):
                raise ParseError(f"invalid literal {m.group()!r}", SourceSpan(n, m.start() + 1))
            words.append(Literal.parse(m.group()))
        if len(words) != 3:
            col = len(line) - len(line.lstrip()) + 1
            raise ParseError(f"clause arity {len(words)}, expected 3", SourceSpan(n, col))
        clauses.append(tuple(words))
    return CnfFormula.of(clauses)
