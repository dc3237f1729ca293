"""Text diagrams of truth sets: one row per world, one column per agent."""

from __future__ import annotations

from .model import Model
from .semantics import TruthSet

MEMBER, OTHER = "#", "."


def render(m: Model, t: TruthSet) -> str:
    w_width = max((len(w) for w in m.worlds), default=0)
    cols = [max(len(a), 1) for a in m.agents]
    lines = [" " * w_width + "  " + " ".join(a.ljust(c) for a, c in zip(m.agents, cols))]
    n = len(m.agents)
    for i, w in enumerate(m.worlds):
        cells = [(MEMBER if i * n + j in t else OTHER).ljust(c) for j, c in enumerate(cols)]
        lines.append(w.ljust(w_width) + "  " + " ".join(cells))
    return "\n".join(line.rstrip() for line in lines) + "\n"


def parse(m: Model, text: str) -> TruthSet:
    """Inverse of :func:`render` for the same model."""
    rows = [line.split() for line in text.splitlines()[1:] if line.strip()]
    if [r[0] for r in rows] != list(m.worlds):
        raise ValueError("diagram rows do not match the model's worlds")
    bits = 0
    n = len(m.agents)
    for i, row in enumerate(rows):
        cells = row[1:]
        if len(cells) != n or set(cells) - {MEMBER, OTHER}:
            raise ValueError(f"bad diagram row for world {row[0]!r}")
        for j, cell in enumerate(cells):
            if cell == MEMBER:
                bits |= 1 << (i * n + j)
    return TruthSet(bits, len(m.worlds) * n)
