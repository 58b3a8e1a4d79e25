"""3-SAT as resource contention: each clause fact can feed one selector.

For clause i with literals l1, l2, l3 the encoding adds the fact ci, three
selector rules ci => ci_x and three emission rules ci_x => lx.  Because ci
is a single resource, a derivation picks one literal per clause, and
complementary picks block each other (no superiority), so some extension
covers every clause exactly when the formula is satisfiable.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from .core import Arrow, Body, Head, Literal, Rule, Structure, Theory, Variant
from .enumerator import EnumerationResult, Extension, SearchBounds, enumerate_extensions
from .parser import CnfFormula


@dataclass(frozen=True)
class SatEncoding:
    formula: CnfFormula
    theory: Theory
    clause_atoms: dict[int, str]
    selector_atoms: dict[tuple[int, int], str]
    literal_map: dict[tuple[int, int], Literal]


def _fresh_suffix(f: CnfFormula) -> str:
    n = len(f.clauses)
    suffix = ""
    while True:
        names = {f"c{i}{suffix}" for i in range(1, n + 1)}
        names |= {f"c{i}_{x}{suffix}" for i in range(1, n + 1) for x in (1, 2, 3)}
        if not names & f.variables:
            return suffix
        suffix += "_f"


def _rule(label: str, body: Literal, head: Literal) -> Rule:
    return Rule(label, Arrow.DEFEASIBLE, Body(Structure.MULTISET, (body,)), Head(Structure.SINGLE, (head,)))


def encode_3sat(f: CnfFormula) -> SatEncoding:
    sfx = _fresh_suffix(f)
    clause_atoms, selector_atoms, literal_map = {}, {}, {}
    facts, selectors, emitters = [], [], []
    for i, clause in enumerate(f.clauses, start=1):
        c = f"c{i}{sfx}"
        clause_atoms[i] = c
        facts.append(Literal(c))
        for x, target in enumerate(clause, start=1):
            sel = f"c{i}_{x}{sfx}"
            selector_atoms[(i, x)] = sel
            literal_map[(i, x)] = target
            selectors.append(_rule(f"s{i}_{x}", Literal(c), Literal(sel)))
            emitters.append(_rule(f"e{i}_{x}", Literal(sel), target))
    theory = Theory(tuple(facts), tuple(selectors + emitters), frozenset(), Variant.MS_SINGLE)
    return SatEncoding(f, theory, clause_atoms, selector_atoms, literal_map)


def coverage_satisfied(e: Extension, enc: SatEncoding) -> bool:
    """Every clause has one of its literals among the extension's positives."""
    proven = e.positives()
    return all(
        any(enc.literal_map[(i, x)] in proven for x in (1, 2, 3))
        for i in enc.clause_atoms
    )


class SatStatus(enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class SatResult:
    status: SatStatus
    witness: Optional[Extension] = None
    encoding: Optional[SatEncoding] = None

    def assignment(self) -> dict[str, bool]:
        """Truth values read off the witness (unmentioned atoms default to False)."""
        if self.witness is None or self.encoding is None:
            return {}
        proven = self.witness.positives()
        return {v: Literal(v) in proven for v in sorted(self.encoding.formula.variables)}


def decide_sat(f: CnfFormula, bounds: SearchBounds = SearchBounds()) -> SatResult:
    enc = encode_3sat(f)
    res: EnumerationResult = enumerate_extensions(
        enc.theory, bounds, until=lambda e: coverage_satisfied(e, enc)
    )
    if res.found is not None:
        return SatResult(SatStatus.SAT, res.found, enc)
    if res.complete:
        return SatResult(SatStatus.UNSAT, None, enc)
    return SatResult(SatStatus.UNKNOWN, None, enc)
