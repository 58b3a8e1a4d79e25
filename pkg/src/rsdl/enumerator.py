"""Single derivations under a strategy, and exhaustive extension enumeration."""

from __future__ import annotations

import enum
import os
import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

from .core import Literal, Structure, Theory
from .engine import DerivationState, Engine, Move, ProofMatrix, engine_for

DEFAULT_MAX_COLUMNS = 10_000
DEFAULT_MAX_BRANCHES = 1_000_000


class Strategy(enum.Enum):
    FIRST = "first"
    LEXICOGRAPHIC = "lexicographic"
    RANDOM = "random"


@dataclass(frozen=True)
class SearchBounds:
    max_columns: int = DEFAULT_MAX_COLUMNS
    max_branches: int = DEFAULT_MAX_BRANCHES

    def __post_init__(self):
        if self.max_columns < 1 or self.max_branches < 1:
            raise ValueError("search bounds must be positive")

    @classmethod
    def from_env(cls, **overrides) -> "SearchBounds":
        env = os.environ.get("RSDL_MAX_COLUMNS")
        kwargs = {"max_columns": int(env)} if env else {}
        kwargs.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kwargs)


class BoundExhausted(Exception):
    """Raised when a derivation reaches the column bound with moves left."""

    def __init__(self, matrix: ProofMatrix, bound: int):
        super().__init__(f"no terminal state within {bound} columns")
        self.matrix = matrix
        self.bound = bound


def _sorted(items) -> tuple[Literal, ...]:
    return tuple(sorted(items))


@dataclass(frozen=True)
class Extension:
    pos_delta: tuple[Literal, ...] = ()
    pos_partial: tuple[Literal, ...] = ()
    neg_delta: tuple[Literal, ...] = ()
    neg_partial: tuple[Literal, ...] = ()
    sigma: tuple[Literal, ...] = ()
    consumed: tuple[Literal, ...] = ()
    trace: tuple[str, ...] = field(default=(), compare=False)
    partial: bool = field(default=False, compare=False)

    def __post_init__(self):
        for name in ("pos_delta", "pos_partial", "consumed"):
            object.__setattr__(self, name, _sorted(getattr(self, name)))
        for name in ("neg_delta", "neg_partial", "sigma"):
            object.__setattr__(self, name, _sorted(set(getattr(self, name))))

    @property
    def rows(self) -> int:
        return len(self.pos_delta) + len(self.pos_partial)

    def positives(self) -> set[Literal]:
        return set(self.pos_delta) | set(self.pos_partial)


def summarize(state: DerivationState, trace=(), terminal: bool = True) -> Extension:
    pos_delta = [i.literal for i in state.instances if i.is_delta]
    pos_partial = [i.literal for i in state.instances if not i.is_delta]
    consumed = [i.literal for i in state.instances if i.consumed_at is not None]
    if not terminal:
        return Extension(pos_delta, pos_partial, (), (), (), consumed, tuple(trace), True)
    return Extension(
        pos_delta, pos_partial, state.neg_delta, state.neg_partial, state.sigma,
        consumed, tuple(trace),
    )


def extension_of(m: ProofMatrix, t: Theory) -> Extension:
    """Summarize the final column; negatives only when the matrix is terminal."""
    eng = engine_for(t)
    final = eng.close(m.final)
    terminal = not eng.enabled_moves(final)
    return summarize(final, [mv.label for mv in m.moves], terminal)


def _pick(moves: list[Move], strategy: Strategy, rng: Optional[random.Random]) -> Move:
    if strategy is Strategy.FIRST:
        return moves[0]
    if strategy is Strategy.LEXICOGRAPHIC:
        return min(moves, key=lambda m: (m.describe(), m.sort_key()))
    return rng.choice(moves)


def derive(
    t: Theory,
    strategy: Strategy | str = Strategy.FIRST,
    bounds: SearchBounds = SearchBounds(),
    seed: Optional[int] = None,
    stagger_facts: bool = False,
    consume_per_attacker: bool = False,
) -> ProofMatrix:
    strategy = Strategy(strategy)
    rng = random.Random(seed) if strategy is Strategy.RANDOM else None
    eng = engine_for(t, consume_per_attacker)
    columns = [eng.init_state(stagger_facts)]
    moves: list[Move] = []
    while True:
        options = eng.enabled_moves(columns[-1])
        if not options:
            return ProofMatrix(tuple(columns), tuple(moves), True)
        if len(columns) >= bounds.max_columns:
            raise BoundExhausted(ProofMatrix(tuple(columns), tuple(moves), False), bounds.max_columns)
        move = _pick(options, strategy, rng)
        moves.append(move)
        columns.append(eng.apply(columns[-1], move, check=False))


def state_key(state: DerivationState, variant_structure: Structure):
    """Memo key: states with equal keys have the same reachable extensions.

    Multiset bodies only see counts of (literal, tag, consumed) records;
    sequence bodies additionally see which records share a birth column and
    the relative order of columns.
    """
    tail = (state.pending, state.spent_unconditional, state.awaiting)
    if variant_structure is Structure.MULTISET:
        counts = Counter((i.literal, i.tag.value, i.consumed_at is not None) for i in state.instances)
        return (tuple(sorted(counts.items())), tail)
    groups: dict[int, list] = {}
    for i in state.instances:
        groups.setdefault(i.column, []).append((i.literal, i.tag.value, i.consumed_at is not None))
    return (tuple(tuple(sorted(groups[c])) for c in sorted(groups)), tail)


@dataclass
class EnumerationResult:
    extensions: list[Extension]
    complete: bool
    branches: int = 0
    max_rows: int = 0
    found: Optional[Extension] = None

    def __iter__(self):
        yield self.extensions
        yield self.complete


def _explore(
    eng: Engine,
    root: DerivationState,
    bounds: SearchBounds,
    until: Optional[Callable[[Extension], bool]] = None,
) -> EnumerationResult:
    structure = eng.variant.body_structure
    memo: dict = {}
    branches = 0
    max_rows = root.rows
    complete = True

    def terminal_result(state):
        ext = summarize(state)
        return {ext: ext}, True

    def open_frame(state):
        """Return a finished (extensions, complete) pair or push a frame."""
        key = state_key(state, structure)
        if key in memo:
            return memo[key]
        moves = eng.enabled_moves(state)
        if not moves:
            res = terminal_result(state)
            memo[key] = res
            return res
        if state.column + 1 >= bounds.max_columns:
            res = ({}, False)
            memo[key] = res
            return res
        stack.append([state, key, moves, 0, {}, True])
        return None

    stack: list[list] = []
    first = open_frame(root)
    if first is not None:
        exts, ok = first
        found = next((e for e in exts if until and until(e)), None)
        return EnumerationResult(list(exts.values()), ok, 0, max_rows, found)

    result = None
    while stack:
        frame = stack[-1]
        state, key, moves, i, exts, ok = frame
        if i < len(moves):
            if branches >= bounds.max_branches:
                complete = False
                break
            branches += 1
            frame[3] = i + 1
            child = eng.apply(state, moves[i], check=False)
            max_rows = max(max_rows, child.rows)
            res = open_frame(child)
            if res is None:
                continue
            _merge(frame, moves[i], res)
            if until is not None:
                found = next((e for e in res[0].values() if until(e)), None)
                if found is not None:
                    return _early(stack, found, branches, max_rows)
            continue
        stack.pop()
        res = (exts, ok)
        memo[key] = res
        if stack:
            parent = stack[-1]
            _merge(parent, parent[2][parent[3] - 1], res)
        else:
            result = res
    if result is None:
        # branch budget exhausted: fold the open frames into the root
        while len(stack) > 1:
            frame = stack.pop()
            parent = stack[-1]
            _merge(parent, parent[2][parent[3] - 1], (frame[4], False))
        result = (stack[0][4], False) if stack else ({}, False)
    exts, ok = result
    return EnumerationResult(list(exts.values()), ok and complete, branches, max_rows)


def _merge(frame, move: Move, res) -> None:
    exts, ok = res
    target = frame[4]
    for canon, ext in exts.items():
        if canon not in target:
            target[canon] = replace(ext, trace=(move.label,) + ext.trace)
    if not ok:
        frame[5] = False


def _early(stack, found: Extension, branches: int, max_rows: int) -> EnumerationResult:
    trace = [frame[2][frame[3] - 1].label for frame in stack]
    found = replace(found, trace=tuple(trace) + found.trace)
    return EnumerationResult([found], False, branches, max_rows, found)


def _explore_subtree(args):
    t, consume_per_attacker, stagger, bounds, path = args
    eng = engine_for(t, consume_per_attacker)
    state = eng.init_state(stagger)
    for m in path:
        state = eng.apply(state, m, check=False)
    return _explore(eng, state, bounds)


def enumerate_extensions(
    t: Theory,
    bounds: SearchBounds = SearchBounds(),
    stagger_facts: bool = False,
    consume_per_attacker: bool = False,
    until: Optional[Callable[[Extension], bool]] = None,
    jobs: int = 1,
) -> EnumerationResult:
    """Explore every move order depth-first and collect the distinct extensions.

    ``complete`` is False when some branch ran into a bound (or when the
    search stopped early because ``until`` matched an extension).
    """
    eng = engine_for(t, consume_per_attacker)
    root = eng.init_state(stagger_facts)
    if jobs <= 1 or until is not None:
        return _explore(eng, root, bounds, until)
    moves = eng.enabled_moves(root)
    if not moves:
        return _explore(eng, root, bounds)
    tasks = [(t, consume_per_attacker, stagger_facts, bounds, (m,)) for m in moves]
    merged: dict = {}
    complete = True
    branches = len(moves)
    max_rows = root.rows
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for m, res in zip(moves, pool.map(_explore_subtree, tasks)):
            complete = complete and res.complete
            branches += res.branches
            max_rows = max(max_rows, res.max_rows)
            for ext in res.extensions:
                if ext not in merged:
                    merged[ext] = replace(ext, trace=(m.label,) + ext.trace)
    return EnumerationResult(list(merged.values()), complete, branches, max_rows)
