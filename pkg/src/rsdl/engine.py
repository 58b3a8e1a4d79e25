"""Proof tags and single derivation steps for the five structural variants.

A derivation is a sequence of columns.  Each step (a :class:`Move`) fires
one rule, appends its conclusions as new rows and marks the spent premises
as consumed.  Negative tags (-Δ, -∂) and support (+σ) are not stored as rows;
they are recomputed for every column and attached to the state.

Team defeat: a defeasible conclusion needs every live attacker (a rule for
the complement that is neither discarded nor hopeless) to be beaten by a
consumable, strictly superior rule for the conclusion.  The resources spent
come from the rules that beat an applicable attacker, otherwise from the
firing rule itself.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache
from itertools import product
from typing import Iterable, Iterator, Optional, Sequence

from .conditions import Witness, consume, status, witnesses
from .core import (
    Instance,
    Literal,
    Rule,
    Strength,
    Structure,
    Tag,
    Theory,
    Variant,
    complement,
)
from .state import DerivationState, Pending

__all__ = [
    "DerivationState",
    "Engine",
    "Move",
    "MoveError",
    "ProofMatrix",
    "apply_move",
    "enabled_moves",
    "engine_for",
    "init_state",
    "refuted",
    "supported",
]


class MoveError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Move:
    """One derivation step.

    ``rule`` is ``None`` for the introduction of a fact (staggered facts).
    ``defeat`` lists (attacker, defender) pairs; ``spends`` lists the rules
    whose witnesses are consumed, each with the rows it uses.
    """

    rule: Optional[str]
    witness: Witness = ()
    defeat: tuple[tuple[str, str], ...] = ()
    spends: tuple[tuple[str, Witness], ...] = ()
    heads: tuple[Literal, ...] = ()
    tag: Tag = Tag.PLUS_PARTIAL
    continuation: bool = False

    @property
    def label(self) -> str:
        if self.rule is None:
            return "fact:" + ",".join(map(str, self.heads))
        return self.rule

    def sort_key(self):
        return (self.rule or "", self.witness, self.defeat, self.spends, self.heads, self.tag.value)

    def describe(self) -> str:
        heads = ", ".join(f"{self.tag.value}{h}" for h in self.heads)
        if self.rule is None:
            return f"fact {heads}"
        text = f"{self.rule} {heads}"
        if self.defeat:
            text += " [" + ", ".join(f"{t}>{s}" for s, t in self.defeat) + "]"
        return text


@dataclass(frozen=True)
class ProofMatrix:
    columns: tuple[DerivationState, ...]
    moves: tuple[Move, ...] = ()
    terminal: bool = True

    @property
    def final(self) -> DerivationState:
        return self.columns[-1]

    @property
    def rows(self) -> int:
        return self.final.rows

    def cell(self, row: int, column: int) -> Optional[str]:
        """Render P(row, column) as in a printed proof table (both 1-based)."""
        state = self.columns[column - 1]
        if row > state.rows:
            return None
        inst = state.instance(row)
        mark = "✓" if inst.consumed_at is not None else ""
        return f"{inst.tag.value}{inst.literal}{mark}"


@dataclass
class _Analysis:
    neg_delta: frozenset
    neg_partial: frozenset
    sigma: frozenset
    potential: frozenset


class Engine:
    """Proof conditions for one theory.

    Construction indexes the rules; every method is a pure function of the
    state passed in.
    """

    def __init__(self, theory: Theory, consume_per_attacker: bool = False):
        self.theory = theory
        self.consume_per_attacker = consume_per_attacker
        self.variant = theory.variant
        self.rules = {r.label: r for r in theory.rules}
        self.alphabet = theory.literals()
        self.fact_literals = frozenset(theory.facts)
        self.for_literal: dict[Literal, list[Rule]] = {}
        for r in theory.rules:
            for x in dict.fromkeys(r.head.items):
                self.for_literal.setdefault(x, []).append(r)
        self.producers = [r for r in theory.rules if not r.is_defeater]
        self.strict = [r for r in theory.rules if r.is_strict]
        self.comp = {x: complement(x) for x in self.alphabet}
        self.attackers = {x: self.for_literal.get(self.comp[x], []) for x in self.alphabet}
        self._producers_for = {
            x: [r for r in rules if not r.is_defeater] for x, rules in self.for_literal.items()
        }
        self._body_set = {r.label: frozenset(r.body.items) for r in theory.rules}
        self._stronger_attackers = {
            (r.label, x): [s for s in self.attackers[x] if theory.stronger(s.label, r.label)]
            for r in theory.rules for x in r.head.items
        }
        self._stronger_defenders = {
            (x, s.label): [t for t in self.rules_for(x) if theory.stronger(t.label, s.label)]
            for x in self.alphabet for s in self.attackers[x]
        }
        self._analysis_cache: dict = {}

    # -- states --------------------------------------------------------

    def init_state(self, stagger_facts: bool = False) -> DerivationState:
        facts = self.theory.facts
        if stagger_facts and facts:
            first = Instance(1, 0, facts[0], Tag.PLUS_DELTA)
            state = DerivationState(instances=(first,), awaiting=facts[1:])
        else:
            rows = [Instance(k + 1, 0, f, Tag.PLUS_DELTA) for k, f in enumerate(facts)]
            state = DerivationState(instances=rows)
        return self.close(state)

    def close(self, state: DerivationState) -> DerivationState:
        """Attach the negative tags, support set and potential set to ``state``."""
        a = self._analyse(state)
        return state.evolve(
            neg_delta=a.neg_delta,
            neg_partial=a.neg_partial,
            sigma=a.sigma,
            potential=a.potential,
        )

    def rules_for(self, x: Literal) -> list[Rule]:
        return self.for_literal.get(x, [])

    def _pending_items(self, state: DerivationState, strict: bool) -> list[Literal]:
        p = state.pending
        if p is None or (strict and p.tag is not Tag.PLUS_DELTA):
            return []
        return list(self.rules[p.rule].head.items[p.index:])

    def _potential(self, state: DerivationState, rules: Sequence[Rule], strict: bool) -> set:
        """Literals that some continuation of ``state`` could still produce."""
        if strict:
            pot = {i.literal for i in state.live() if i.is_delta}
        else:
            pot = {i.literal for i in state.live()}
        pot.update(state.awaiting)
        pot.update(self._pending_items(state, strict))
        changed = True
        while changed:
            changed = False
            for r in rules:
                if not r.body.items and r.label in state.spent_unconditional:
                    continue
                if all(x in pot for x in r.body.items):
                    new = [h for h in r.head.items if h not in pot]
                    if new:
                        pot.update(new)
                        changed = True
        return pot

    def _misordered(self, state: DerivationState) -> set[str]:
        """Sequence-bodied rules whose proven instances violate the body order."""
        if self.variant.body_structure is not Structure.SEQUENCE:
            return set()
        out = set()
        for r in self.theory.rules:
            st = status(r, replace(state, neg_partial=frozenset()), Strength.PARTIAL)
            if st.discarded:
                out.add(r.label)
        return out

    def _analyse(self, state: DerivationState) -> _Analysis:
        # the analysis only looks at which literals are present, not how often
        live = [i for i in state.instances if i.consumed_at is None]
        misordered = self._misordered(state)
        key = (
            frozenset(i.literal for i in live if i.is_delta),
            frozenset(i.literal for i in live),
            frozenset(i.literal for i in state.instances if i.is_delta),
            frozenset(i.literal for i in state.instances),
            state.awaiting,
            state.pending,
            state.spent_unconditional,
            frozenset(misordered),
        )
        found = self._analysis_cache.get(key)
        if found is None:
            found = self._analyse_uncached(state, misordered)
            self._analysis_cache[key] = found
        return found

    def _analyse_uncached(self, state: DerivationState, misordered: set) -> _Analysis:
        delta_pot = self._potential(state, self.strict, strict=True)
        partial_pot = self._potential(state, self.producers, strict=False)
        has_delta = {i.literal for i in state.instances if i.is_delta}
        has_any = {i.literal for i in state.instances}
        neg_delta = frozenset(
            x for x in self.alphabet
            if x not in self.fact_literals and x not in has_delta and x not in delta_pot
        )

        body_set = self._body_set

        def discarded(r: Rule, neg: set) -> bool:
            return r.label in misordered or not neg.isdisjoint(body_set[r.label])

        def sigma_closure(neg: set) -> set:
            sig = set(has_any)
            changed = True
            while changed:
                changed = False
                for r in self.producers:
                    if not body_set[r.label] <= sig:
                        continue
                    for x in r.head.items:
                        if x in sig:
                            continue
                        blockers = self._stronger_attackers[(r.label, x)]
                        if all(discarded(s, neg) for s in blockers):
                            sig.add(x)
                            changed = True
            return sig

        candidates = {x for x in neg_delta if x not in has_any}
        # refuted whatever happens: the complement is definite, or nothing produces x
        settled = {
            x for x in candidates
            if self.comp[x] in has_delta or not self._producers_for.get(x)
        }
        open_ = candidates - settled

        def refuted_partial(sig: set) -> set:
            neg = set(candidates)
            while True:
                dropped = set()
                for x in open_:
                    if x not in neg:
                        continue
                    if all(discarded(r, neg) for r in self._producers_for[x]):
                        continue
                    # some attacker that no undiscarded rule for x is stronger than
                    if any(
                        body_set[s.label] <= sig
                        and all(discarded(t, neg) for t in self._stronger_defenders[(x, s.label)])
                        for s in self.attackers.get(x, ())
                    ):
                        continue
                    dropped.add(x)
                if not dropped:
                    return neg
                neg -= dropped

        neg_partial: set = set()
        while True:
            sigma = sigma_closure(neg_partial)
            new = refuted_partial(sigma)
            # without superiority, support does not depend on refutation
            if new == neg_partial or not self.theory.superiority:
                neg_partial = new
                break
            neg_partial = new
        return _Analysis(neg_delta, frozenset(neg_partial), frozenset(sigma), frozenset(partial_pot))

    # -- queries -------------------------------------------------------

    def refuted(self, state: DerivationState, x: Literal, strength: Strength) -> bool:
        a = self._analyse(state)
        if strength is Strength.DELTA:
            return x in a.neg_delta
        return x in a.neg_partial

    def supported(self, state: DerivationState, x: Literal) -> bool:
        return x in self._analyse(state).sigma

    def hopeless(self, r: Rule, state: DerivationState) -> bool:
        """Some body literal has never been proven and can no longer be produced."""
        proven = state.proven(Strength.PARTIAL)
        return any(x not in proven and x not in state.potential for x in r.body.items)

    def live_attackers(self, state: DerivationState, x: Literal) -> list[Rule]:
        out = []
        proven = None
        for s in self.attackers.get(x, ()):
            if s.body.structure is Structure.MULTISET:
                if not self._body_set[s.label].isdisjoint(state.neg_partial):
                    continue
            elif status(s, state, Strength.PARTIAL).discarded:
                continue
            if proven is None:
                proven = state.proven(Strength.PARTIAL)
            if any(y not in proven and y not in state.potential for y in s.body.items):
                continue
            out.append(s)
        return out

    # -- moves ---------------------------------------------------------

    def enabled_moves(self, state: DerivationState) -> list[Move]:
        if state.awaiting:
            return [Move(None, heads=(state.awaiting[0],), tag=Tag.PLUS_DELTA)]
        if state.pending is not None:
            moves = list(self._continuations(state))
            if moves:
                return sorted(moves, key=Move.sort_key)
        moves = []
        available = {i.literal for i in state.instances if i.consumed_at is None}
        for r in self.producers:
            if not self._body_set[r.label] <= available:
                continue
            moves.extend(self._strict_moves(r, state))
            moves.extend(self._defeasible_moves(r, state))
        return sorted(set(moves), key=Move.sort_key)

    def _emitted(self, r: Rule) -> tuple[Literal, ...]:
        if r.head.structure is Structure.MULTISET:
            return r.head.items
        return r.head.items[:1]

    def _strict_moves(self, r: Rule, state: DerivationState) -> Iterator[Move]:
        if not r.is_strict:
            return
        for w in witnesses(r, state, Strength.DELTA):
            yield Move(r.label, w, (), ((r.label, w),), self._emitted(r), Tag.PLUS_DELTA)

    def _all_delta(self, state: DerivationState, w: Witness) -> bool:
        return all(state.instance(row).is_delta for row in w)

    def _defeat_options(self, r_label: str, x: Literal, state: DerivationState):
        """Every way to beat the live attackers of ``x``; ``None`` if -Δ~x fails."""
        if self.comp[x] not in state.neg_delta:
            return None
        per_attacker = []
        for s in self.live_attackers(state, x):
            defenders = [
                t.label for t in self.rules_for(x)
                if not t.is_defeater
                and self.theory.stronger(t.label, s.label)
                and status(t, state, Strength.PARTIAL).consumable
            ]
            if not defenders:
                return None
            per_attacker.append([(s.label, t) for t in defenders])
        return [tuple(c) for c in product(*per_attacker)]

    def _spenders(self, r: Rule, choice, heads, state: DerivationState) -> list[str]:
        """Rules whose premises a defeasible step consumes."""
        units: list[str] = []
        own = not choice
        for s_label, t_label in choice:
            beats_applicable = any(
                self.theory.stronger(t_label, w.label)
                and status(w, state, Strength.PARTIAL).applicable
                for x in heads
                for w in self.attackers.get(x, ())
            )
            if beats_applicable:
                if self.consume_per_attacker or t_label not in units:
                    units.append(t_label)
            else:
                own = True
        if own and r.label not in units:
            units.append(r.label)
        return units

    def _joint(self, units: Sequence[str], state: DerivationState, exclude: frozenset):
        """Pairwise disjoint witnesses for every spending unit."""
        if not units:
            yield ()
            return
        rule = self.rules[units[0]]
        if not rule.body.items and rule.label in units[1:]:
            return
        for w in witnesses(rule, state, Strength.PARTIAL, exclude):
            for rest in self._joint(units[1:], state, exclude | frozenset(w)):
                yield ((rule.label, w),) + rest

    def _defeasible_moves(self, r: Rule, state: DerivationState) -> Iterator[Move]:
        own = list(witnesses(r, state, Strength.PARTIAL))
        if r.is_strict:
            own = [w for w in own if not self._all_delta(state, w)]
        if not own:
            return
        heads = self._emitted(r)
        options = {}
        for x in dict.fromkeys(heads):
            opts = self._defeat_options(r.label, x, state)
            if opts is not None:
                options[x] = opts
        if self.variant is Variant.SEQ_MS_HEAD_PER_LITERAL:
            heads = tuple(x for x in heads if x in options)
        elif any(x not in options for x in heads):
            return
        if not heads:
            return
        for combo in product(*(options[x] for x in dict.fromkeys(heads))):
            choice = tuple(sorted({pair for part in combo for pair in part}))
            units = self._spenders(r, choice, heads, state)
            if r.label in units:
                others = [u for u in units if u != r.label]
                for w in own:
                    for rest in self._joint(others, state, frozenset(w)):
                        spends = tuple(sorted(((r.label, w),) + rest))
                        yield Move(r.label, w, choice, spends, heads, Tag.PLUS_PARTIAL)
            else:
                w = own[0]
                for rest in self._joint(units, state, frozenset()):
                    yield Move(r.label, w, choice, tuple(sorted(rest)), heads, Tag.PLUS_PARTIAL)

    def _continuations(self, state: DerivationState) -> Iterator[Move]:
        p = state.pending
        r = self.rules[p.rule]
        x = r.head.items[p.index]
        if p.tag is Tag.PLUS_DELTA:
            yield Move(r.label, (), (), (), (x,), Tag.PLUS_DELTA, continuation=True)
            return
        opts = self._defeat_options(r.label, x, state)
        if opts is None:
            return
        for choice in opts:
            choice = tuple(sorted(choice))
            # the firing rule's own premises went with the first head item
            units = [u for u in self._spenders(r, choice, (x,), state) if u != r.label]
            for rest in self._joint(units, state, frozenset()):
                yield Move(r.label, (), choice, tuple(sorted(rest)), (x,), Tag.PLUS_PARTIAL, True)

    def apply(self, state: DerivationState, move: Move, check: bool = True) -> DerivationState:
        if check and move not in self.enabled_moves(state):
            raise MoveError(f"move {move.describe()} is not enabled at column {state.column}")
        rows = [row for _, w in move.spends for row in w]
        nxt = consume(state, rows)
        spent = set(state.spent_unconditional)
        for label, w in move.spends:
            if not self.rules[label].body.items:
                spent.add(label)
        instances = list(nxt.instances)
        for x in move.heads:
            instances.append(Instance(len(instances) + 1, nxt.column, x, move.tag))
        awaiting = nxt.awaiting
        pending = None
        if move.rule is None:
            awaiting = awaiting[1:]
        else:
            r = self.rules[move.rule]
            if r.head.structure is Structure.SEQUENCE:
                index = state.pending.index + 1 if move.continuation else 1
                if index < len(r.head.items):
                    pending = Pending(r.label, index, move.tag)
        nxt = nxt.evolve(
            instances=tuple(instances),
            awaiting=awaiting,
            pending=pending,
            spent_unconditional=frozenset(spent),
        )
        return self.close(nxt)


@lru_cache(maxsize=64)
def engine_for(theory: Theory, consume_per_attacker: bool = False) -> Engine:
    return Engine(theory, consume_per_attacker)


def init_state(t: Theory, stagger_facts: bool = False) -> DerivationState:
    return engine_for(t).init_state(stagger_facts)


def enabled_moves(s: DerivationState, t: Theory, consume_per_attacker: bool = False) -> list[Move]:
    eng = engine_for(t, consume_per_attacker)
    return eng.enabled_moves(eng.close(s))


def apply_move(
    s: DerivationState, m: Move, t: Theory, consume_per_attacker: bool = False
) -> DerivationState:
    eng = engine_for(t, consume_per_attacker)
    return eng.apply(eng.close(s), m)


def refuted(s: DerivationState, x: Literal, strength: Strength, t: Theory) -> bool:
    return engine_for(t).refuted(s, x, strength)


def supported(s: DerivationState, x: Literal, t: Theory) -> bool:
    return engine_for(t).supported(s, x)


def replay(t: Theory, moves: Iterable[Move], stagger_facts: bool = False,
           consume_per_attacker: bool = False) -> ProofMatrix:
    eng = engine_for(t, consume_per_attacker)
    columns = [eng.init_state(stagger_facts)]
    moves = tuple(moves)
    for m in moves:
        columns.append(eng.apply(columns[-1], m))
    return ProofMatrix(tuple(columns), moves, not eng.enabled_moves(columns[-1]))
