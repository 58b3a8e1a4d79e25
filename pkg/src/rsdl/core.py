"""Domain types for resource-driven substructural defeasible theories.

Everything here is an immutable value.  Literals are the unit of resource,
rules carry a structured body and head, and a theory bundles the initial
resources (facts, as a multiset), the rules, the superiority relation and
the structural variant that selects which proof conditions apply.
"""

from __future__ import annotations

import enum
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Optional

IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class _LiteralFields(NamedTuple):
    atom: str
    negated: bool = False


class Literal(_LiteralFields):
    """A signed atom.  A tuple underneath, so hashing and ordering stay cheap."""

    __slots__ = ()

    def __new__(cls, atom: str, negated: bool = False):
        if not isinstance(atom, str) or not IDENTIFIER.match(atom):
            raise ValueError(f"invalid atom name: {atom!r}")
        return super().__new__(cls, atom, bool(negated))

    def __str__(self):
        return ("~" if self.negated else "") + self.atom

    def __invert__(self) -> "Literal":
        return Literal(self.atom, not self.negated)

    @classmethod
    def parse(cls, text: str) -> "Literal":
        """Build a literal from ``atom`` or ``~atom``."""
        text = text.strip()
        if text.startswith("~"):
            return cls(text[1:].strip(), True)
        return cls(text)


def complement(x: Literal) -> Literal:
    return Literal(x.atom, not x.negated)


def lit(text: str) -> Literal:
    return Literal.parse(text)


class Arrow(enum.Enum):
    STRICT = "->"
    DEFEASIBLE = "=>"
    DEFEATER = "~>"


class Structure(enum.Enum):
    SINGLE = "single"
    MULTISET = "multiset"
    SEQUENCE = "sequence"


class Variant(enum.Enum):
    MS_SINGLE = "ms-single"
    SEQ_SINGLE = "seq-single"
    SEQ_SEQ_HEAD = "seq-seq"
    SEQ_MS_HEAD_WHOLE = "seq-ms-whole"
    SEQ_MS_HEAD_PER_LITERAL = "seq-ms-literal"

    @property
    def body_structure(self) -> Structure:
        if self is Variant.MS_SINGLE:
            return Structure.MULTISET
        return Structure.SEQUENCE

    @property
    def head_structure(self) -> Structure:
        if self in (Variant.MS_SINGLE, Variant.SEQ_SINGLE):
            return Structure.SINGLE
        if self is Variant.SEQ_SEQ_HEAD:
            return Structure.SEQUENCE
        return Structure.MULTISET


class Tag(enum.Enum):
    PLUS_DELTA = "+Δ"
    MINUS_DELTA = "-Δ"
    PLUS_PARTIAL = "+∂"
    MINUS_PARTIAL = "-∂"
    PLUS_SIGMA = "+σ"


class Strength(enum.Enum):
    """Which family of proof conditions a status query refers to."""

    DELTA = "delta"
    PARTIAL = "partial"
    SIGMA = "sigma"


@dataclass(frozen=True)
class Body:
    structure: Structure
    items: tuple[Literal, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if self.structure is Structure.SINGLE:
            raise ValueError("a body is either a multiset or a sequence")

    def __len__(self):
        return len(self.items)

    def counts(self) -> Counter:
        return Counter(self.items)

    @cached_property
    def multiplicities(self) -> tuple[tuple[Literal, int], ...]:
        """Sorted (literal, count) pairs; computed once per body."""
        return tuple(sorted(Counter(self.items).items()))


@dataclass(frozen=True)
class Head:
    structure: Structure
    items: tuple[Literal, ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if not self.items:
            raise ValueError("a head needs at least one literal")
        if self.structure is Structure.SINGLE and len(self.items) != 1:
            raise ValueError("a single head holds exactly one literal")

    def __len__(self):
        return len(self.items)


@dataclass(frozen=True)
class Rule:
    label: str
    arrow: Arrow
    body: Body
    head: Head

    @property
    def is_strict(self) -> bool:
        return self.arrow is Arrow.STRICT

    @property
    def is_defeater(self) -> bool:
        return self.arrow is Arrow.DEFEATER

    def concludes(self, x: Literal) -> bool:
        return x in self.head.items

    def __str__(self):
        sep = "; " if self.body.structure is Structure.SEQUENCE else ", "
        hsep = "; " if self.head.structure is Structure.SEQUENCE else ", "
        body = sep.join(map(str, self.body.items))
        head = hsep.join(map(str, self.head.items))
        lhs = f"{body} " if body else ""
        return f"{self.label}: {lhs}{self.arrow.value} {head}"


@dataclass(frozen=True)
class Theory:
    facts: tuple[Literal, ...] = ()
    rules: tuple[Rule, ...] = ()
    superiority: frozenset[tuple[str, str]] = frozenset()
    variant: Variant = Variant.MS_SINGLE

    def __post_init__(self):
        object.__setattr__(self, "facts", tuple(self.facts))
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "superiority", frozenset(self.superiority))

    def rule(self, label: str) -> Rule:
        for r in self.rules:
            if r.label == label:
                return r
        raise KeyError(label)

    def stronger(self, a: str, b: str) -> bool:
        return (a, b) in self.superiority

    def literals(self) -> frozenset[Literal]:
        """Every literal mentioned anywhere, closed under complement."""
        found = set(self.facts)
        for r in self.rules:
            found.update(r.body.items)
            found.update(r.head.items)
        return frozenset(found | {complement(x) for x in found})

    def atoms(self) -> frozenset[str]:
        return frozenset(x.atom for x in self.literals())

    def canonical_key(self):
        """Comparison key that ignores fact and rule ordering."""
        return (
            tuple(sorted(Counter(self.facts).items())),
            tuple(sorted(self.rules, key=lambda r: r.label)),
            tuple(sorted(self.superiority)),
            self.variant,
        )

    def same_as(self, other: "Theory") -> bool:
        return self.canonical_key() == other.canonical_key()


@dataclass(frozen=True, order=True)
class Instance:
    """One row of a proof matrix: a produced literal occurrence."""

    row: int
    column: int
    literal: Literal
    tag: Tag
    consumed_at: Optional[int] = field(default=None)

    def __post_init__(self):
        if self.tag not in (Tag.PLUS_DELTA, Tag.PLUS_PARTIAL):
            raise ValueError("instances carry +Δ or +∂ only")
        if self.row < 1 or self.column < 0:
            raise ValueError("rows start at 1, columns at 0")
        if self.consumed_at is not None and self.consumed_at <= self.column:
            raise ValueError("an instance is consumed strictly after its birth")

    @property
    def consumed(self) -> bool:
        return self.consumed_at is not None

    @property
    def is_delta(self) -> bool:
        return self.tag is Tag.PLUS_DELTA


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def _superiority_cycle(pairs: Iterable[tuple[str, str]]) -> bool:
    graph: dict[str, set[str]] = {}
    for a, b in pairs:
        graph.setdefault(a, set()).add(b)
    state: dict[str, int] = {}

    def visit(node: str) -> bool:
        state[node] = 1
        for nxt in graph.get(node, ()):
            mark = state.get(nxt, 0)
            if mark == 1 or (mark == 0 and visit(nxt)):
                return True
        state[node] = 2
        return False

    return any(state.get(n, 0) == 0 and visit(n) for n in list(graph))


def validate_theory(t: Theory) -> ValidationReport:
    violations: list[str] = []
    warnings: list[str] = []
    seen: set[str] = set()
    for r in t.rules:
        if r.label in seen:
            violations.append(f"duplicate label {r.label}")
        seen.add(r.label)
        if not IDENTIFIER.match(r.label):
            violations.append(f"invalid label {r.label!r}")
        if r.body.structure is not t.variant.body_structure:
            violations.append(
                f"rule {r.label}: {r.body.structure.value} body under variant {t.variant.value}"
            )
        if r.head.structure is not t.variant.head_structure:
            violations.append(
                f"rule {r.label}: {r.head.structure.value} head under variant {t.variant.value}"
            )
    for a, b in sorted(t.superiority):
        for name in sorted({a, b}):
            if name not in seen:
                violations.append(f"unknown label {name}")
        if a == b:
            violations.append(f"reflexive superiority {a} > {a}")
    if _superiority_cycle(t.superiority):
        warnings.append("superiority relation is cyclic")
    return ValidationReport(tuple(violations), tuple(warnings))
