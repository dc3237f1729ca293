"""Epistemic models with extensions.

A model has worlds, agents, one partition of the worlds per agent (the
blocks of that agent's indistinguishability relation), an extension
mapping names to agents, and a valuation mapping each prop to a set of
(world, agent) pairs.

Two extension modes exist. In ``rigid`` mode (the name here refers to the
*agent-independence* of the extension, not to names being rigid across
worlds) the referent of a name depends on the world only. In
``agent-specific`` mode it also depends on the agent using the name, and
the reserved name ``se`` may be declared; it always denotes the agent
using it.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Iterable

from .errors import ModelError
from .syntax import KEYWORDS, SELF_NAME

RIGID = "rigid"
AGENT_SPECIFIC = "agent-specific"
MODES = (RIGID, AGENT_SPECIFIC)

_MODEL_KEYS = {"mode", "worlds", "agents", "names", "props", "indist", "extension", "valuation"}


@dataclass(frozen=True)
class Model:
    worlds: tuple[str, ...]
    agents: tuple[str, ...]
    names: tuple[str, ...]
    props: tuple[str, ...]
    indist: dict[str, tuple[tuple[str, ...], ...]]
    # rigid: {world: {name: agent}}; agent-specific: {world: {agent: {name: agent}}}
    extension: dict[str, dict]
    valuation: dict[str, frozenset[tuple[str, str]]]
    mode: str = RIGID
    # per-instance scratch space for derived lookup tables; not part of the value
    cache: dict = field(default_factory=dict, init=False, compare=False, repr=False)

    @property
    def agent_specific(self) -> bool:
        return self.mode == AGENT_SPECIFIC

    def referent(self, world: str, agent: str, name: str) -> str:
        """The agent that ``agent`` refers to by ``name`` in ``world``."""
        if self.agent_specific:
            return self.extension[world][agent][name]
        return self.extension[world][name]

    def block(self, agent: str, world: str) -> tuple[str, ...]:
        """Worlds ``agent`` cannot distinguish from ``world`` (including it)."""
        return self._block_of[agent][world]

    @cached_property
    def _block_of(self) -> dict[str, dict[str, tuple[str, ...]]]:
        return {a: {w: blk for blk in blocks for w in blk} for a, blocks in self.indist.items()}

    def holds(self, prop: str, world: str, agent: str) -> bool:
        return (world, agent) in self.valuation.get(prop, ())

    @property
    def points(self) -> list[tuple[str, str]]:
        """All (world, agent) pairs in canonical row-major order."""
        return [(w, a) for w in self.worlds for a in self.agents]

    # ------------------------------------------------------------ JSON

    def to_dict(self) -> dict[str, Any]:
        order = {pt: i for i, pt in enumerate(self.points)}
        return {
            "mode": self.mode,
            "worlds": list(self.worlds),
            "agents": list(self.agents),
            "names": list(self.names),
            "props": list(self.props),
            "indist": {a: [list(b) for b in self.indist[a]] for a in self.agents if a in self.indist},
            "extension": _plain(self.extension),
            "valuation": {
                p: [list(pt) for pt in sorted(self.valuation.get(p, ()), key=lambda pt: order.get(pt, -1))]
                for p in self.props
            },
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, doc: Any) -> "Model":
        """Build a model from a JSON document, rejecting structural problems.

        Unknown keys, duplicate ids and references to undeclared ids raise
        :class:`ModelError`. Semantic invariants are left to
        :func:`validate_model`.
        """
        if not isinstance(doc, dict):
            raise ModelError("model document must be a JSON object")
        extra = set(doc) - _MODEL_KEYS
        if extra:
            raise ModelError(f"unknown keys: {sorted(extra)}")
        missing = {"worlds", "agents", "indist", "extension"} - set(doc)
        if missing:
            raise ModelError(f"missing keys: {sorted(missing)}")
        mode = doc.get("mode", RIGID)
        if mode not in MODES:
            raise ModelError(f"mode must be one of {MODES}, got {mode!r}")

        ids = {}
        for key in ("worlds", "agents", "names", "props"):
            seq = doc.get(key, [])
            if not isinstance(seq, list) or not all(isinstance(x, str) and x for x in seq):
                raise ModelError(f"{key} must be a list of nonempty strings")
            dups = sorted({x for x in seq if seq.count(x) > 1})
            if dups:
                raise ModelError(f"{key}: duplicate ids {dups}")
            ids[key] = tuple(seq)
        worlds, agents, names = set(ids["worlds"]), set(ids["agents"]), set(ids["names"])

        def need(kind: str, value: Any, where: str) -> str:
            if value not in {"worlds": worlds, "agents": agents, "names": names}[kind]:
                raise ModelError(f"{where}: undeclared {kind[:-1]} {value!r}")
            return value

        indist_doc = doc["indist"]
        if not isinstance(indist_doc, dict):
            raise ModelError("indist must be an object")
        indist = {}
        for a, blocks in indist_doc.items():
            need("agents", a, "indist")
            if not isinstance(blocks, list) or not all(isinstance(b, list) for b in blocks):
                raise ModelError(f"indist[{a}] must be a list of lists of worlds")
            indist[a] = tuple(tuple(need("worlds", w, f"indist[{a}]") for w in b) for b in blocks)

        ext_doc = doc["extension"]
        if not isinstance(ext_doc, dict):
            raise ModelError("extension must be an object")
        extension: dict[str, dict] = {}
        for w, row in ext_doc.items():
            need("worlds", w, "extension")
            if not isinstance(row, dict):
                raise ModelError(f"extension[{w}] must be an object")
            if mode == RIGID:
                extension[w] = {
                    need("names", n, f"extension[{w}]"): need("agents", ag, f"extension[{w}][{n}]")
                    for n, ag in row.items()
                }
            else:
                extension[w] = {}
                for a, sub in row.items():
                    need("agents", a, f"extension[{w}]")
                    if not isinstance(sub, dict):
                        raise ModelError(f"extension[{w}][{a}] must be an object")
                    extension[w][a] = {
                        need("names", n, f"extension[{w}][{a}]"): need("agents", ag, f"extension[{w}][{a}][{n}]")
                        for n, ag in sub.items()
                    }

        val_doc = doc.get("valuation", {})
        if not isinstance(val_doc, dict):
            raise ModelError("valuation must be an object")
        valuation = {}
        for p, pairs in val_doc.items():
            if p not in ids["props"]:
                raise ModelError(f"valuation: undeclared prop {p!r}")
            if not isinstance(pairs, list) or not all(isinstance(x, list) and len(x) == 2 for x in pairs):
                raise ModelError(f"valuation[{p}] must be a list of [world, agent] pairs")
            valuation[p] = frozenset(
                (need("worlds", w, f"valuation[{p}]"), need("agents", a, f"valuation[{p}]")) for w, a in pairs
            )
        for p in ids["props"]:
            valuation.setdefault(p, frozenset())

        return cls(ids["worlds"], ids["agents"], ids["names"], ids["props"], indist, extension, valuation, mode)


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    return obj


def load_model(path: str | Path) -> Model:
    """Read a model file and check it; raises :class:`ModelError` if invalid."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelError(f"{path}: invalid JSON: {exc}") from exc
    model = Model.from_dict(doc)
    problems = validate_model(model)
    if problems:
        raise ModelError(f"{path}: invalid model: " + "; ".join(problems))
    return model


# -------------------------------------------------------------- validation


def validate_model(m: Model) -> list[str]:
    """Every invariant violation of *m*, each with a locating message."""
    out: list[str] = []
    if m.mode not in MODES:
        out.append(f"mode: unknown mode {m.mode!r}")
    for label, seq in (("worlds", m.worlds), ("agents", m.agents), ("names", m.names), ("props", m.props)):
        seen = set()
        for x in seq:
            if x in seen:
                out.append(f"{label}: duplicate id {x}")
            seen.add(x)
    for x in sorted(set(m.names) & set(m.props)):
        out.append(f"names/props: {x!r} declared as both a name and a prop")
    for x in sorted((set(m.names) | set(m.props)) & KEYWORDS):
        out.append(f"names/props: reserved word {x!r}")
    if SELF_NAME in m.props:
        out.append(f"props: {SELF_NAME!r} is reserved for the self name")
    if SELF_NAME in m.names and not m.agent_specific:
        out.append(f"names: {SELF_NAME!r} is only allowed in agent-specific mode")

    worlds = set(m.worlds)
    agents = set(m.agents)
    for a in m.agents:
        blocks = m.indist.get(a)
        if blocks is None:
            out.append(f"indist[{a}]: missing partition")
            continue
        seen = set()
        for i, blk in enumerate(blocks):
            if not blk:
                out.append(f"indist[{a}]: empty block #{i}")
            for w in blk:
                if w not in worlds:
                    out.append(f"indist[{a}]: undeclared world {w}")
                elif w in seen:
                    out.append(f"indist[{a}]: duplicate world {w}")
                seen.add(w)
        for w in m.worlds:
            if w not in seen:
                out.append(f"indist[{a}]: world {w} not covered")
    for a in m.indist:
        if a not in agents:
            out.append(f"indist: undeclared agent {a}")

    if m.names and m.worlds and not m.agents:
        out.append("extension cannot be total: no agents")
    else:
        for w in m.worlds:
            row = m.extension.get(w)
            if row is None:
                out.append(f"extension[{w}]: missing")
                continue
            if m.agent_specific:
                for a in m.agents:
                    sub = row.get(a)
                    if sub is None:
                        out.append(f"extension[{w}][{a}]: missing")
                        continue
                    out.extend(_check_row(sub, m.names, agents, f"extension[{w}][{a}]"))
                    if SELF_NAME in m.names and sub.get(SELF_NAME) != a:
                        out.append(f"extension[{w}][{a}][{SELF_NAME}]: must be {a}")
            else:
                out.extend(_check_row(row, m.names, agents, f"extension[{w}]"))
        for w in m.extension:
            if w not in worlds:
                out.append(f"extension: undeclared world {w}")

    for p, pairs in m.valuation.items():
        if p not in m.props:
            out.append(f"valuation: undeclared prop {p}")
        for w, a in sorted(pairs):
            if w not in worlds or a not in agents:
                out.append(f"valuation[{p}]: ({w},{a}) outside W x A")
    return out


def _check_row(row: dict, names: Iterable[str], agents: set[str], where: str) -> list[str]:
    out = []
    for n in names:
        if n not in row:
            out.append(f"{where}: no referent for name {n}")
        elif row[n] not in agents:
            out.append(f"{where}[{n}]: {row[n]!r} is not an agent")
    for n in row:
        if n not in names:
            out.append(f"{where}: undeclared name {n}")
    return out


# ---------------------------------------------------------------- fixtures


def _m_dr() -> Model:
    # Ann is a in w and v, b in u and t.
    return Model(
        worlds=("w", "u", "v", "t"),
        agents=("a", "b"),
        names=("Ann",),
        props=("p",),
        indist={x: (("w", "u"), ("v", "t")) for x in ("a", "b")},
        extension={"w": {"Ann": "a"}, "u": {"Ann": "b"}, "v": {"Ann": "a"}, "t": {"Ann": "b"}},
        valuation={"p": frozenset({("w", "a"), ("u", "b"), ("v", "b"), ("t", "a")})},
    )


def _m_rd() -> Model:
    return Model(
        worlds=("w", "u"),
        agents=("a", "b"),
        names=("Ann",),
        props=("p",),
        indist={"a": (("w", "u"),), "b": (("w",), ("u",))},
        extension={"w": {"Ann": "a"}, "u": {"Ann": "b"}},
        valuation={"p": frozenset({("w", "a"), ("u", "b")})},
    )


FIXTURES = {"M_DR": _m_dr, "M_RD": _m_rd}


def fixture(name: str) -> Model:
    """``M_DR``: countermodel for defining D through R. ``M_RD``: for R through D and @."""
    try:
        return FIXTURES[name]()
    except KeyError:
        raise ModelError(f"unknown fixture {name!r}; known: {', '.join(FIXTURES)}") from None


# ------------------------------------------------------------ random models

_WORLD_POOL = ("w", "u", "v", "t")
_NAME_POOL = ("Ann", "Bob", "Cat", "Dan", "Eve")
_PROP_POOL = ("p", "q", "r", "s")


def world_ids(n: int) -> list[str]:
    return [_WORLD_POOL[i] if i < len(_WORLD_POOL) else f"w{i}" for i in range(n)]


def agent_ids(n: int) -> list[str]:
    return [chr(ord("a") + i) if i < 26 else f"a{i}" for i in range(n)]


def name_ids(n: int) -> list[str]:
    return [_NAME_POOL[i] if i < len(_NAME_POOL) else f"N{i}" for i in range(n)]


def prop_ids(n: int) -> list[str]:
    return [_PROP_POOL[i] if i < len(_PROP_POOL) else f"p{i}" for i in range(n)]


@dataclass(frozen=True)
class ModelParams:
    n_worlds: int
    n_agents: int
    n_names: int = 1
    n_props: int = 1
    mode: str = RIGID
    with_se: bool = False

    def check(self) -> None:
        if min(self.n_worlds, self.n_agents, self.n_names, self.n_props) < 0:
            raise ModelError("model parameters must be non-negative")
        if self.mode not in MODES:
            raise ModelError(f"mode must be one of {MODES}")
        if self.with_se and self.mode != AGENT_SPECIFIC:
            raise ModelError("with_se requires agent-specific mode")
        if (self.n_names > 0 or self.with_se) and self.n_worlds > 0 and self.n_agents == 0:
            raise ModelError("extension cannot be total: names declared but no agents")


_partition_counts: dict[tuple[int, int], int] = {}


def _completions(remaining: int, blocks: int) -> int:
    """Number of ways to finish a restricted-growth string."""
    if remaining == 0:
        return 1
    key = (remaining, blocks)
    if key not in _partition_counts:
        _partition_counts[key] = blocks * _completions(remaining - 1, blocks) + _completions(remaining - 1, blocks + 1)
    return _partition_counts[key]


def random_partition(items: list[str], rng: random.Random) -> tuple[tuple[str, ...], ...]:
    """A set partition of *items* drawn uniformly (each of the Bell(n) partitions equally likely).

    Draws a restricted-growth string position by position; each choice is
    weighted by the number of strings that extend it.
    """
    labels: list[int] = []
    blocks = 0
    for i in range(len(items)):
        remaining = len(items) - i - 1
        r = rng.randrange(_completions(remaining + 1, blocks))
        per_old = _completions(remaining, blocks)
        if r < blocks * per_old:
            labels.append(r // per_old)
        else:
            labels.append(blocks)
            blocks += 1
    return tuple(tuple(x for x, lab in zip(items, labels) if lab == b) for b in range(blocks))


def random_model(params: ModelParams, seed: int) -> Model:
    """A valid model drawn deterministically from ``(params, seed)``.

    Draw order: one uniform partition per agent (agent order), then one
    uniform referent per extension entry (world, then agent in
    agent-specific mode, then name), then per prop a uniform subset of
    W x A as a row-major bit mask.
    """
    params.check()
    rng = random.Random(seed)
    worlds = world_ids(params.n_worlds)
    agents = agent_ids(params.n_agents)
    names = name_ids(params.n_names)
    props = prop_ids(params.n_props)

    indist = {a: random_partition(worlds, rng) for a in agents}
    extension: dict[str, dict] = {}
    for w in worlds:
        if params.mode == RIGID:
            extension[w] = {n: agents[rng.randrange(len(agents))] for n in names}
        else:
            extension[w] = {}
            for a in agents:
                row = {n: agents[rng.randrange(len(agents))] for n in names}
                if params.with_se:
                    row[SELF_NAME] = a
                extension[w][a] = row
    points = [(w, a) for w in worlds for a in agents]
    valuation = {}
    for p in props:
        mask = rng.getrandbits(len(points)) if points else 0
        valuation[p] = frozenset(pt for i, pt in enumerate(points) if mask >> i & 1)
    all_names = names + [SELF_NAME] if params.with_se else names
    return Model(tuple(worlds), tuple(agents), tuple(all_names), tuple(props), indist, extension, valuation, params.mode)
