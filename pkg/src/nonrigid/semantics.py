"""Satisfaction, truth sets and per-model equivalence.

Two evaluators live here on purpose. :func:`satisfies` follows the
satisfaction clauses pointwise and recursively; :func:`truth_set` computes
whole truth sets bottom-up through :func:`apply_op`. They share nothing
beyond the model accessors, so each can be used to check the other.

Truth sets are bit masks over W x A in row-major order: the pair
``(worlds[i], agents[j])`` is bit ``i * len(agents) + j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .errors import EvaluationError
from .model import Model
from .syntax import (
    SELF_NAME,
    And,
    At,
    Const,
    DeDicto,
    DeRe,
    Formula,
    Implies,
    Not,
    Or,
    Prop,
    names_of,
    props_of,
    subformulas,
)


class PointedQuery(NamedTuple):
    world: str
    agent: str


@dataclass(frozen=True)
class TruthSet:
    bits: int
    width: int

    def __contains__(self, index: int) -> bool:
        return bool(self.bits >> index & 1)

    def __len__(self) -> int:
        return bin(self.bits).count("1")

    def __or__(self, other: "TruthSet") -> "TruthSet":
        _same_width(self, other)
        return TruthSet(self.bits | other.bits, self.width)

    def __and__(self, other: "TruthSet") -> "TruthSet":
        _same_width(self, other)
        return TruthSet(self.bits & other.bits, self.width)

    def __invert__(self) -> "TruthSet":
        return TruthSet(~self.bits & ((1 << self.width) - 1), self.width)

    def issubset(self, other: "TruthSet") -> bool:
        _same_width(self, other)
        return self.bits & ~other.bits == 0

    def to_string(self) -> str:
        """Row-major ``0``/``1`` string, first character = bit 0."""
        return "".join("1" if self.bits >> i & 1 else "0" for i in range(self.width))

    @classmethod
    def from_string(cls, text: str) -> "TruthSet":
        if set(text) - {"0", "1"}:
            raise ValueError(f"bit string may contain only 0 and 1: {text!r}")
        return cls(sum(1 << i for i, ch in enumerate(text) if ch == "1"), len(text))

    def points(self, m: Model) -> set[tuple[str, str]]:
        return {pt for i, pt in enumerate(m.points) if self.bits >> i & 1}


def _same_width(x: TruthSet, y: TruthSet) -> None:
    if x.width != y.width:
        raise ValueError(f"truth sets of different models ({x.width} vs {y.width} cells)")


def from_points(m: Model, pts) -> TruthSet:
    index = {pt: i for i, pt in enumerate(m.points)}
    return TruthSet(sum(1 << index[tuple(pt)] for pt in set(map(tuple, pts))), len(index))


def empty_set(m: Model) -> TruthSet:
    return TruthSet(0, len(m.worlds) * len(m.agents))


def full_set(m: Model) -> TruthSet:
    width = len(m.worlds) * len(m.agents)
    return TruthSet((1 << width) - 1, width)


def order_labels(m: Model) -> list[str]:
    return [f"{w}:{a}" for w, a in m.points]


# -------------------------------------------------------------- checking


def check_formula(m: Model, phi: Formula) -> None:
    """Raise :class:`EvaluationError` if *phi* uses symbols *m* does not declare."""
    missing_props = props_of(phi) - set(m.props)
    if missing_props:
        raise EvaluationError(f"undeclared prop(s): {', '.join(sorted(missing_props))}")
    used = names_of(phi)
    if SELF_NAME in used and not m.agent_specific:
        raise EvaluationError(f"name {SELF_NAME!r} requires an agent-specific model")
    missing = used - set(m.names)
    if missing:
        raise EvaluationError(f"undeclared name(s): {', '.join(sorted(missing))}")


# ------------------------------------------------------ pointwise evaluator


def satisfies(m: Model, q: tuple[str, str], phi: Formula) -> bool:
    """Whether ``world, agent`` satisfies *phi* in *m*."""
    world, agent = q
    if world not in m.worlds or agent not in m.agents:
        raise EvaluationError(f"point ({world},{agent}) is not in the model")
    check_formula(m, phi)
    return _sat(m, world, agent, phi)


def _sat(m: Model, w: str, a: str, phi: Formula) -> bool:
    if isinstance(phi, Prop):
        return m.holds(phi.name, w, a)
    if isinstance(phi, Const):
        return phi.value
    if isinstance(phi, Not):
        return not _sat(m, w, a, phi.arg)
    if isinstance(phi, Or):
        return _sat(m, w, a, phi.left) or _sat(m, w, a, phi.right)
    if isinstance(phi, And):
        return _sat(m, w, a, phi.left) and _sat(m, w, a, phi.right)
    if isinstance(phi, Implies):
        return not _sat(m, w, a, phi.left) or _sat(m, w, a, phi.right)
    if isinstance(phi, At):
        return _sat(m, w, m.referent(w, a, phi.name), phi.arg)
    if isinstance(phi, DeRe):
        target = m.referent(w, a, phi.name)
        return all(_sat(m, u, target, phi.arg) for u in m.block(a, w))
    if isinstance(phi, DeDicto):
        return all(_sat(m, u, m.referent(u, a, phi.name), phi.arg) for u in m.block(a, w))
    raise TypeError(f"not a formula: {phi!r}")


# --------------------------------------------------------- set evaluator


def _tables(m: Model) -> dict:
    """Per-name requirement masks for the modal operators.

    For every modality instance, each cell ``c`` gets a mask ``need`` such
    that ``c`` belongs to the result iff the argument contains every cell
    of ``need``.
    """
    tables = m.cache.get("semantics")
    if tables is not None:
        return tables
    n_agents = len(m.agents)
    wi = {w: i for i, w in enumerate(m.worlds)}
    ai = {a: i for i, a in enumerate(m.agents)}

    def bit(w: str, a: str) -> int:
        return 1 << (wi[w] * n_agents + ai[a])

    tables = {}
    for n in m.names:
        at, dere, dedicto = [], [], []
        for w in m.worlds:
            for a in m.agents:
                cell = bit(w, a)
                here = m.referent(w, a, n)
                block = m.block(a, w)
                at.append((cell, bit(w, here)))
                dere.append((cell, _or_all(bit(u, here) for u in block)))
                dedicto.append((cell, _or_all(bit(u, m.referent(u, a, n)) for u in block)))
        tables[At, n] = at
        tables[DeRe, n] = dere
        tables[DeDicto, n] = dedicto
    m.cache["semantics"] = tables
    return tables


def _or_all(bits) -> int:
    out = 0
    for b in bits:
        out |= b
    return out


Op = tuple  # (connective type, name or None)


def apply_op(m: Model, op: Op, args: Sequence[TruthSet]) -> TruthSet:
    """Apply one connective instance to truth sets of *m*.

    *op* is ``(Not, None)``, ``(Or, None)``, ``(And, None)`` or
    ``(At | DeRe | DeDicto, name)``.
    """
    kind, name = op
    width = len(m.worlds) * len(m.agents)
    for t in args:
        if t.width != width:
            raise ValueError(f"truth set has {t.width} cells, model has {width}")
    arity = 2 if kind in (Or, And) else 1
    if len(args) != arity:
        raise ValueError(f"{kind.__name__} takes {arity} argument(s), got {len(args)}")
    if kind is Not:
        return ~args[0]
    if kind is Or:
        return args[0] | args[1]
    if kind is And:
        return args[0] & args[1]
    if kind not in (At, DeRe, DeDicto):
        raise ValueError(f"unknown connective {kind!r}")
    table = _tables(m).get((kind, name))
    if table is None:
        raise EvaluationError(f"undeclared name {name!r}")
    bits = args[0].bits
    out = 0
    for cell, need in table:
        if bits & need == need:
            out |= cell
    return TruthSet(out, width)


def truth_set(m: Model, phi: Formula) -> TruthSet:
    """The set of (world, agent) pairs satisfying *phi*, as a :class:`TruthSet`."""
    check_formula(m, phi)
    width = len(m.worlds) * len(m.agents)
    memo: dict[Formula, TruthSet] = {}
    for sub in subformulas(phi):
        if sub in memo:
            continue
        if isinstance(sub, Prop):
            memo[sub] = from_points(m, m.valuation.get(sub.name, ()))
        elif isinstance(sub, Const):
            memo[sub] = TruthSet((1 << width) - 1 if sub.value else 0, width)
        elif isinstance(sub, Not):
            memo[sub] = apply_op(m, (Not, None), [memo[sub.arg]])
        elif isinstance(sub, (Or, And)):
            memo[sub] = apply_op(m, (type(sub), None), [memo[sub.left], memo[sub.right]])
        elif isinstance(sub, Implies):
            memo[sub] = apply_op(m, (Or, None), [~memo[sub.left], memo[sub.right]])
        else:
            memo[sub] = apply_op(m, (type(sub), sub.name), [memo[sub.arg]])
    return memo[phi]


def equivalent_on(m: Model, phi: Formula, psi: Formula) -> bool:
    return truth_set(m, phi) == truth_set(m, psi)


def first_difference(m: Model, phi: Formula, psi: Formula) -> PointedQuery | None:
    """The first point (row-major) where *phi* and *psi* disagree, or None."""
    diff = truth_set(m, phi).bits ^ truth_set(m, psi).bits
    for i, (w, a) in enumerate(m.points):
        if diff >> i & 1:
            return PointedQuery(w, a)
    return None
