"""Seeded random theories for the property and acceptance suites."""

from __future__ import annotations

import random

from rsdl.core import Arrow, Body, Head, Literal, Rule, Structure, Theory, Variant, complement


def _arrow(rng: random.Random, strict: float, defeater: float) -> Arrow:
    roll = rng.random()
    if roll < strict:
        return Arrow.STRICT
    if roll < strict + defeater:
        return Arrow.DEFEATER
    return Arrow.DEFEASIBLE


def random_theory(
    rng: random.Random,
    variant: Variant = Variant.MS_SINGLE,
    max_atoms: int = 6,
    max_rules: int = 8,
    max_facts: int = 2,
    acyclic: bool = True,
    conflict: bool = False,
    strict: float = 0.15,
    defeater: float = 0.1,
) -> Theory:
    """Random theory; with ``acyclic`` every body atom precedes every head atom.

    ``conflict`` forces at least one pair of rules with complementary heads
    and removes strict conflicts (facts and strict heads never clash).
    """
    n = rng.randint(2 if conflict else 1, max_atoms)
    atoms = [f"a{i}" for i in range(n)]
    neg_p = 0.5 if conflict else 0.25
    facts = [
        Literal(rng.choice(atoms[: max(1, n // 2)]), rng.random() < 0.15)
        for _ in range(rng.randint(0, max_facts))
    ]
    facts = [x for x in facts if complement(x) not in facts]
    multi = variant.head_structure is not Structure.SINGLE
    rules = []
    for k in range(rng.randint(1 if conflict else 0, max_rules)):
        top = rng.randint(0, n - 1)
        pool = atoms[:top] if acyclic else atoms
        size = rng.randint(0, 2) if pool else 0
        body = [Literal(rng.choice(pool), rng.random() < neg_p) for _ in range(size)]
        heads_pool = atoms[top:] if acyclic else atoms
        hsize = rng.randint(1, 3) if multi else 1
        head = [Literal(rng.choice(heads_pool), rng.random() < neg_p) for _ in range(hsize)]
        rules.append(Rule(
            f"r{k}", _arrow(rng, strict, defeater),
            Body(variant.body_structure, body), Head(variant.head_structure, head),
        ))
    if conflict:
        r = rules[0]
        x = r.head.items[0]
        body = r.body.items if rng.random() < 0.5 else ()
        rules.append(Rule(
            f"r{len(rules)}", Arrow.DEFEASIBLE, Body(variant.body_structure, body),
            Head(variant.head_structure, (complement(x),)),
        ))
        rules = _drop_strict_conflicts(facts, rules)
    sup = set()
    for r in rules:
        for s in rules:
            if r is s or rng.random() > 0.3:
                continue
            if any(complement(x) in s.head.items for x in r.head.items) and (s.label, r.label) not in sup:
                sup.add((r.label, s.label))
    return Theory(tuple(facts), tuple(rules), frozenset(sup), variant)


def _drop_strict_conflicts(facts, rules):
    definite = set(facts)
    out = []
    for r in rules:
        if r.is_strict:
            clash = any(complement(x) in definite or complement(x) in r.head.items for x in r.head.items)
            if clash:
                r = Rule(r.label, Arrow.DEFEASIBLE, r.body, r.head)
            else:
                definite.update(r.head.items)
        out.append(r)
    return out


def permute_bodies(rng: random.Random, t: Theory) -> Theory:
    rules = []
    for r in t.rules:
        items = list(r.body.items)
        rng.shuffle(items)
        rules.append(Rule(r.label, r.arrow, Body(r.body.structure, items), r.head))
    return Theory(t.facts, tuple(rules), t.superiority, t.variant)
