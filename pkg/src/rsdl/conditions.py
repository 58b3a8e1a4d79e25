"""Applicability, consumability and discardability of rules in a state.

Multiset bodies count occurrences: a body with ``k`` copies of a literal
needs ``k`` distinct unconsumed instances to be consumable.  Sequence bodies
bind every body position to its own instance and require the bound
instances' (row, column) birth coordinates to increase strictly along the
sequence.

A +Δ instance satisfies a ∂ requirement; σ is satisfied by any positive
record and ignores consumption altogether.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import product
from typing import Iterable, Iterator, Optional

from .core import Instance, Literal, Rule, Strength, Structure
from .state import DerivationState

Witness = tuple[int, ...]


class ConsumptionError(ValueError):
    pass


@dataclass(frozen=True)
class RuleStatus:
    applicable: bool
    consumable: bool
    discarded: bool
    non_consumable: bool
    witness: Optional[Witness] = None


def _eligible(inst: Instance, strength: Strength) -> bool:
    return inst.is_delta or strength is not Strength.DELTA


def _negatives(state: DerivationState, strength: Strength) -> frozenset[Literal]:
    return state.neg_delta if strength is Strength.DELTA else state.neg_partial


def _unconditional_ok(rule: Rule, state: DerivationState) -> bool:
    return rule.label not in state.spent_unconditional


def ms_witnesses(
    rule: Rule,
    state: DerivationState,
    strength: Strength,
    exclude: frozenset[int] = frozenset(),
) -> Iterator[Witness]:
    """Yield injective witnesses over unconsumed instances, one per body position.

    Instances of one literal with the same tag are interchangeable in a
    multiset body, so only the lowest rows of each (literal, tag) group are
    used; every distinct split between +Δ and +∂ instances is produced.
    """
    if not rule.body.items:
        if _unconditional_ok(rule, state):
            yield ()
        return
    per_literal = []
    counts = rule.body.multiplicities
    wanted = {x for x, _ in counts}
    live = [i for i in state.live() if i.literal in wanted and i.row not in exclude]
    for x, k in counts:
        delta = [i.row for i in live if i.literal == x and i.is_delta]
        partial = [] if strength is Strength.DELTA else [
            i.row for i in live if i.literal == x and not i.is_delta
        ]
        options = []
        for j in range(min(k, len(delta)), -1, -1):
            if k - j <= len(partial):
                options.append(tuple(delta[:j]) + tuple(partial[: k - j]))
        if not options:
            return
        per_literal.append((x, options))
    for combo in product(*(opts for _, opts in per_literal)):
        pools = {x: list(rows) for (x, _), rows in zip(per_literal, combo)}
        yield tuple(pools[x].pop(0) for x in rule.body.items)


def seq_witnesses(
    rule: Rule,
    state: DerivationState,
    strength: Strength,
    exclude: frozenset[int] = frozenset(),
    live_only: bool = True,
) -> Iterator[Witness]:
    """Yield order-respecting assignments of body positions to instances."""
    if not rule.body.items:
        if not live_only or _unconditional_ok(rule, state):
            yield ()
        return
    pools = []
    for x in rule.body.items:
        pools.append([
            i for i in state.instances
            if i.literal == x and _eligible(i, strength) and i.row not in exclude
            and (i.consumed_at is None or not live_only)
        ])
    chosen: list[Instance] = []

    def extend(pos: int) -> Iterator[Witness]:
        if pos == len(pools):
            yield tuple(i.row for i in chosen)
            return
        for inst in pools[pos]:
            if chosen and not (inst.row > chosen[-1].row and inst.column > chosen[-1].column):
                continue
            chosen.append(inst)
            yield from extend(pos + 1)
            chosen.pop()

    yield from extend(0)


def witnesses(rule, state, strength, exclude=frozenset()) -> Iterator[Witness]:
    if rule.body.structure is Structure.SEQUENCE:
        return seq_witnesses(rule, state, strength, exclude)
    return ms_witnesses(rule, state, strength, exclude)


def _sigma_status(rule: Rule, state: DerivationState) -> RuleStatus:
    # σ ignores consumption: consumable mirrors applicable and no witness is bound
    supported = state.proven(Strength.SIGMA)
    applicable = all(x in supported for x in rule.body.items)
    discarded = any(x in state.neg_partial for x in rule.body.items)
    return RuleStatus(applicable, applicable, discarded, not applicable or discarded)


def ms_status(rule: Rule, state: DerivationState, strength: Strength) -> RuleStatus:
    if rule.body.structure is not Structure.MULTISET:
        raise ValueError(f"rule {rule.label} does not have a multiset body")
    if strength is Strength.SIGMA:
        return _sigma_status(rule, state)
    proven = state.proven(strength)
    applicable = all(x in proven for x in rule.body.items)
    discarded = any(x in _negatives(state, strength) for x in rule.body.items)
    witness = next(ms_witnesses(rule, state, strength), None) if applicable else None
    consumable = witness is not None
    return RuleStatus(applicable, consumable, discarded, discarded or not consumable, witness)


def seq_status(rule: Rule, state: DerivationState, strength: Strength) -> RuleStatus:
    if rule.body.structure is not Structure.SEQUENCE:
        raise ValueError(f"rule {rule.label} does not have a sequence body")
    if strength is Strength.SIGMA:
        return _sigma_status(rule, state)
    applicable = next(seq_witnesses(rule, state, strength, live_only=False), None) is not None
    refuted = any(x in _negatives(state, strength) for x in rule.body.items)
    proven = state.proven(strength)
    # every body literal has a proof, yet no assignment respects the order
    misordered = (
        not applicable and bool(rule.body.items) and all(x in proven for x in rule.body.items)
    )
    discarded = refuted or misordered
    witness = next(seq_witnesses(rule, state, strength), None) if applicable else None
    consumable = witness is not None
    return RuleStatus(applicable, consumable, discarded, discarded or not consumable, witness)


def status(rule: Rule, state: DerivationState, strength: Strength) -> RuleStatus:
    if rule.body.structure is Structure.SEQUENCE:
        return seq_status(rule, state, strength)
    return ms_status(rule, state, strength)


def consume(state: DerivationState, witness: Iterable[int]) -> DerivationState:
    """Advance one column, marking the witnessed rows as consumed there."""
    if isinstance(witness, dict):
        witness = witness.values()
    rows = list(witness)
    if len(set(rows)) != len(rows):
        raise ConsumptionError("a witness uses the same instance twice")
    column = state.column + 1
    instances = list(state.instances)
    for row in rows:
        if not 1 <= row <= len(instances):
            raise ConsumptionError(f"no instance at row {row}")
        inst = instances[row - 1]
        if inst.consumed_at is not None:
            raise ConsumptionError(
                f"row {row} ({inst.literal}) was already consumed at column {inst.consumed_at}"
            )
        instances[row - 1] = replace(inst, consumed_at=column)
    return state.evolve(column=column, instances=tuple(instances))
