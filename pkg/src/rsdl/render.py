"""Text tables and JSON documents for proof matrices and extensions."""

from __future__ import annotations

import json
from typing import Iterable

from .core import Literal, Theory
from .engine import ProofMatrix
from .enumerator import Extension

_FIELDS = {
    "pos_strict": "pos_delta",
    "pos_defeasible": "pos_partial",
    "neg_strict": "neg_delta",
    "neg_defeasible": "neg_partial",
    "sigma": "sigma",
    "consumed": "consumed",
}


def proof_table(m: ProofMatrix) -> str:
    """Rows are instances, columns are steps; consumed cells carry a check mark."""
    ncols = len(m.columns)
    header = ["P"] + [str(c) for c in range(1, ncols + 1)]
    grid = [header]
    for row in range(1, m.rows + 1):
        grid.append([str(row)] + [m.cell(row, c) or "" for c in range(1, ncols + 1)])
    widths = [max(len(r[k]) for r in grid) for k in range(len(header))]
    lines = []
    for r in grid:
        cells = [r[0].rjust(widths[0])] + [v.ljust(w) for v, w in zip(r[1:], widths[1:])]
        lines.append((cells[0] + " | " + "  ".join(cells[1:])).rstrip())
    lines.insert(1, "-" * max(len(line) for line in lines))
    return "\n".join(lines) + "\n"


def moves_listing(m: ProofMatrix) -> str:
    return "".join(f"step {k}: {mv.describe()}\n" for k, mv in enumerate(m.moves, start=2))


def _lits(xs: Iterable[Literal]) -> str:
    return "{" + ", ".join(map(str, xs)) + "}"


def extension_text(e: Extension, index: int | None = None) -> str:
    title = "extension" if index is None else f"extension {index}"
    lines = [f"{title}:"]
    for key, attr in _FIELDS.items():
        lines.append(f"  {key}: {_lits(getattr(e, attr))}")
    lines.append("  trace: " + " ".join(e.trace))
    return "\n".join(lines) + "\n"


def extension_to_dict(e: Extension) -> dict:
    out = {key: [str(x) for x in getattr(e, attr)] for key, attr in _FIELDS.items()}
    out["trace"] = list(e.trace)
    return out


def extension_from_dict(d: dict) -> Extension:
    kwargs = {attr: [Literal.parse(x) for x in d[key]] for key, attr in _FIELDS.items()}
    return Extension(**kwargs, trace=tuple(d.get("trace", ())))


def extensions_json(t: Theory, extensions: list[Extension], complete: bool) -> str:
    doc = {
        "variant": t.variant.value,
        "complete": complete,
        "extensions": [extension_to_dict(e) for e in sort_extensions(extensions)],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def sort_extensions(extensions: Iterable[Extension]) -> list[Extension]:
    return sorted(extensions, key=lambda e: json.dumps(extension_to_dict(e) | {"trace": []}))


def matrix_to_dict(t: Theory, m: ProofMatrix) -> dict:
    ncols = len(m.columns)
    return {
        "variant": t.variant.value,
        "terminal": m.terminal,
        "columns": ncols,
        "table": [[m.cell(r, c) for c in range(1, ncols + 1)] for r in range(1, m.rows + 1)],
        "moves": [mv.describe() for mv in m.moves],
    }
