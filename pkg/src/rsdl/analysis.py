"""Atom dependency graph, termination bound and extension auditing."""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from .core import Literal, Rule, Theory, complement
from .enumerator import Extension


@dataclass(frozen=True)
class AtomDependencyGraph:
    nodes: frozenset[str]
    edges: frozenset[tuple[str, str]]

    def successors(self, a: str) -> list[str]:
        return sorted(b for x, b in self.edges if x == a)


def atom_dependency_graph(t: Theory) -> AtomDependencyGraph:
    nodes = {x.atom for x in t.facts}
    edges = set()
    for r in t.rules:
        nodes.update(x.atom for x in r.body.items)
        nodes.update(x.atom for x in r.head.items)
        edges.update((b.atom, h.atom) for b in r.body.items for h in r.head.items)
    return AtomDependencyGraph(frozenset(nodes), frozenset(edges))


class CycleCheck(NamedTuple):
    acyclic: bool
    cycle: Optional[tuple[str, ...]] = None

    def __bool__(self):
        return self.acyclic


def _shortest_cycle_through(g: dict[str, list[str]], start: str) -> Optional[list[str]]:
    parent: dict[str, Optional[str]] = {start: None}
    queue = deque([start])
    while queue:
        a = queue.popleft()
        for b in g.get(a, ()):
            if b == start:
                path = [a]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                return path[::-1]
            if b not in parent:
                parent[b] = a
                queue.append(b)
    return None


def is_acyclic(t: Theory | AtomDependencyGraph) -> CycleCheck:
    """Check the dependency graph; when cyclic, return a shortest cycle.

    Among shortest cycles the witness is the lexicographically least one,
    listed from its smallest atom.
    """
    adg = t if isinstance(t, AtomDependencyGraph) else atom_dependency_graph(t)
    g: dict[str, list[str]] = {}
    for a, b in sorted(adg.edges):
        g.setdefault(a, []).append(b)
    best: Optional[list[str]] = None
    for a in sorted(adg.nodes):
        cyc = _shortest_cycle_through(g, a)
        if cyc is None:
            continue
        k = cyc.index(min(cyc))
        cyc = cyc[k:] + cyc[:k]
        if best is None or (len(cyc), cyc) < (len(best), best):
            best = cyc
    if best is None:
        return CycleCheck(True)
    return CycleCheck(False, tuple(best))


def derivation_bound(t: Theory) -> int:
    """Upper bound on the rows of any proof matrix of an acyclic theory.

    n(x), the number of instances of x, is bounded by its fact count plus,
    for every step that can emit x, the head multiplicity of x.  Every step
    consumes the body of the firing rule or of a rule that defends one of
    its head literals, or spends a one-shot empty-body rule, so the steps
    emitting x are bounded by the total capacity of those rules; the
    capacity of a rule is how often its body can be assembled from the
    instances available.

    Raises ValueError when the graph is cyclic or the charging relation is
    itself cyclic (possible with multi-literal heads, where a derivation can
    be unbounded even though the dependency graph is acyclic).
    """
    check = is_acyclic(t)
    if not check.acyclic:
        raise ValueError(f"theory is cyclic: {' -> '.join(check.cycle)}")
    producers = [r for r in t.rules if not r.is_defeater]
    rules_for: dict[Literal, list[Rule]] = {}
    for r in producers:
        for h in set(r.head.items):
            rules_for.setdefault(h, []).append(r)
    facts = Counter(t.facts)

    def charged(x: Literal) -> tuple[list[Rule], int]:
        rules: dict[str, Rule] = {}
        mult = 0
        for r in rules_for.get(x, ()):
            mult = max(mult, r.head.items.count(x))
            rules[r.label] = r
            for h in set(r.head.items):
                for u in rules_for.get(h, ()):
                    rules[u.label] = u
        return list(rules.values()), mult

    n_memo: dict[Literal, int] = {}
    cap_memo: dict[str, int] = {}
    active: set = set()

    def n(x: Literal) -> int:
        if x in n_memo:
            return n_memo[x]
        if x in active:
            raise ValueError(f"no finite bound: unbounded spending through {x}")
        active.add(x)
        rules, mult = charged(x)
        total = facts[x] + mult * sum(cap(u) for u in rules)
        active.discard(x)
        n_memo[x] = total
        return total

    def cap(u: Rule) -> int:
        if u.label not in cap_memo:
            counts = u.body.counts()
            cap_memo[u.label] = min((n(y) // k for y, k in counts.items()), default=1)
        return cap_memo[u.label]

    return sum(n(x) for x in t.literals())


@dataclass(frozen=True)
class AuditReport:
    consistent: bool
    coherent: bool
    strict_conflicts: tuple[Literal, ...] = ()
    violations: tuple[str, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return self.consistent and self.coherent


def audit(e: Extension) -> AuditReport:
    """Check one extension for coherence and consistency.

    Incoherent: a literal both proven and refuted at one strength (a +Δ
    instance also counts as +∂).  Inconsistent: a literal and its complement
    both proven, unless both are definite (a conflict of the strict part,
    listed separately).
    """
    violations = []
    delta = set(e.pos_delta)
    partial = delta | set(e.pos_partial)
    coherent = True
    for x in sorted(delta & set(e.neg_delta)):
        coherent = False
        violations.append(f"incoherent: +Δ{x} and -Δ{x}")
    for x in sorted(partial & set(e.neg_partial)):
        coherent = False
        violations.append(f"incoherent: +∂{x} and -∂{x}")
    consistent = True
    strict = []
    for x in sorted(partial):
        if x.negated or complement(x) not in partial:
            continue
        if x in delta and complement(x) in delta:
            strict.append(x)
            violations.append(f"strict conflict: +Δ{x} and +Δ{complement(x)}")
        else:
            consistent = False
            violations.append(f"inconsistent: +∂{x} and +∂{complement(x)}")
    return AuditReport(consistent, coherent, tuple(strict), tuple(violations))
