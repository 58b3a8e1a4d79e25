"""Derivation state: one column of a proof matrix."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .core import Instance, Literal, Strength, Tag


@dataclass(frozen=True)
class Pending:
    """A sequence-head firing that still has head items to emit."""

    rule: str
    index: int
    tag: Tag


@dataclass(frozen=True)
class DerivationState:
    column: int = 0
    instances: tuple[Instance, ...] = ()
    neg_delta: frozenset[Literal] = frozenset()
    neg_partial: frozenset[Literal] = frozenset()
    sigma: frozenset[Literal] = frozenset()
    pending: Optional[Pending] = None
    # empty-body rules already used once (they have no resource to spend)
    spent_unconditional: frozenset[str] = frozenset()
    # facts still to be introduced when facts are staggered one per column
    awaiting: tuple[Literal, ...] = ()
    # literals that some continuation could still produce (derived data)
    potential: frozenset[Literal] = field(default=frozenset(), compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "instances", tuple(self.instances))
        object.__setattr__(self, "awaiting", tuple(self.awaiting))

    @property
    def rows(self) -> int:
        return len(self.instances)

    def instance(self, row: int) -> Instance:
        return self.instances[row - 1]

    def live(self) -> Iterable[Instance]:
        return (i for i in self.instances if i.consumed_at is None)

    def has_delta(self, x: Literal) -> bool:
        return any(i.literal == x and i.is_delta for i in self.instances)

    def has_positive(self, x: Literal) -> bool:
        return any(i.literal == x for i in self.instances)

    def proven(self, strength) -> set[Literal]:
        """Literals with at least one instance (consumed or not) at ``strength``."""
        if strength is Strength.DELTA:
            return {i.literal for i in self.instances if i.is_delta}
        if strength is Strength.PARTIAL:
            return {i.literal for i in self.instances}
        return set(self.sigma) | {i.literal for i in self.instances}

    def with_instances(self, instances, **changes) -> "DerivationState":
        return self.evolve(instances=tuple(instances), **changes)

    def evolve(self, **changes) -> "DerivationState":
        """Cheap ``replace`` for the hot path; field values must already be normalised."""
        new = object.__new__(DerivationState)
        new.__dict__.update(self.__dict__)
        new.__dict__.update(changes)
        return new
