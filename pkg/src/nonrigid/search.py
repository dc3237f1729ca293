"""Bounded search for agent-specific countermodels.

With agent-specific names, de dicto knowledge ``D[bf] p`` is not definable
from ``@[bf]`` and ``R[bf]``. A witness model is one where the closure of
``{[[p]]}`` under not, or, ``@[bf]`` and ``R[bf]`` is the eight-member
family::

    false, true, p, !p, @[bf] p, !@[bf] p, !p & !@[bf] p, p | @[bf] p

and ``[[D[bf] p]]`` falls outside it. Those eight sets form a Boolean
algebra exactly when ``[[p]]`` and ``[[@[bf] p]]`` are disjoint and the
three cells ``p``, ``@[bf] p`` and ``neither`` are all nonempty.

The search splits a model into a *skeleton* (partitions plus the ``bf``
extension) and a valuation. For each skeleton every valuation is tried,
using the skeleton's operator tables, which do not depend on the
valuation.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterator

from .algebra import UNDEFINABLE, Certificate, decide_definability, verify_certificate
from .model import AGENT_SPECIFIC, Model, agent_ids, random_partition, world_ids
from .semantics import TruthSet, apply_op
from .syntax import BOTTOM, TOP, And, At, DeDicto, DeRe, Not, Or, Prop, Signature

NAME = "bf"
PROP = "p"
TARGET = DeDicto(NAME, Prop(PROP))
SIGNATURE = Signature(props=frozenset({PROP}), allow_not=True, allow_or=True, at_names=frozenset({NAME}), dere_names=frozenset({NAME}))

# the eight formulas whose truth sets make up the expected family
FAMILY_FORMULAS = (
    At(NAME, Prop(PROP)),
    BOTTOM,
    Prop(PROP),
    TOP,
    Not(At(NAME, Prop(PROP))),
    Not(Prop(PROP)),
    And(Not(Prop(PROP)), Not(At(NAME, Prop(PROP)))),
    Or(Prop(PROP), At(NAME, Prop(PROP))),
)

EXHAUSTIVE_SKELETONS = 10_000
SWEEP_LIMIT = 4096


@dataclass
class SearchResult:
    found: bool
    message: str
    model: Model | None = None
    certificate: Certificate | None = None
    skeletons: int = 0
    exhausted: list[tuple[int, int]] = field(default_factory=list)
    sampled: list[tuple[int, int]] = field(default_factory=list)


def _set_partitions(items: tuple[str, ...]) -> Iterator[tuple[tuple[str, ...], ...]]:
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for p in _set_partitions(rest):
        for i in range(len(p)):
            yield p[:i] + ((first,) + p[i],) + p[i + 1 :]
        yield ((first,),) + p


def _bell(n: int) -> int:
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def _skeleton(worlds, agents, partitions, referents) -> Model:
    it = iter(referents)
    extension = {w: {a: {NAME: next(it)} for a in agents} for w in worlds}
    return Model(tuple(worlds), tuple(agents), (NAME,), (PROP,), dict(zip(agents, partitions)), extension, {PROP: frozenset()}, AGENT_SPECIFIC)


def _fits(skel: Model, p_bits: int, width: int) -> bool:
    """Whether valuation *p_bits* on *skel* yields the eight-member family without ``D[bf] p``."""
    full = (1 << width) - 1
    at_p = apply_op(skel, (At, NAME), [TruthSet(p_bits, width)]).bits
    if p_bits & at_p:
        return False
    neither = full & ~(p_bits | at_p)
    if not (p_bits and at_p and neither):
        return False
    fam = {0, p_bits, at_p, neither, p_bits | at_p, p_bits | neither, at_p | neither, full}
    # @ commutes with the Boolean operations, so its generators suffice
    if apply_op(skel, (At, NAME), [TruthSet(at_p, width)]).bits not in fam:
        return False
    for x in fam:
        if apply_op(skel, (DeRe, NAME), [TruthSet(x, width)]).bits not in fam:
            return False
    return apply_op(skel, (DeDicto, NAME), [TruthSet(p_bits, width)]).bits not in fam


def _valuations(width: int, rng: random.Random) -> Iterator[int]:
    if width <= 12:
        yield from range(1 << width)
    else:
        for _ in range(SWEEP_LIMIT):
            yield rng.getrandbits(width)


def _finish(skel: Model, p_bits: int) -> Certificate | None:
    points = skel.points
    valuation = {PROP: frozenset(pt for i, pt in enumerate(points) if p_bits >> i & 1)}
    m = Model(skel.worlds, skel.agents, skel.names, skel.props, skel.indist, skel.extension, valuation, AGENT_SPECIFIC)
    cert = decide_definability(m, TARGET, SIGNATURE)
    if cert.verdict != UNDEFINABLE or len(cert.family) != len(FAMILY_FORMULAS) or not verify_certificate(cert):
        return None
    return cert


def _try(skel: Model, rng: random.Random) -> Certificate | None:
    width = len(skel.worlds) * len(skel.agents)
    for p_bits in _valuations(width, rng):
        if _fits(skel, p_bits, width):
            cert = _finish(skel, p_bits)
            if cert is not None:
                return cert
    return None


def search_agent_specific_counterexample(
    max_worlds: int,
    max_agents: int,
    seed: int = 0,
    max_samples: int = 2000,
    exact_size: bool = False,
) -> SearchResult:
    """Look for an agent-specific model where ``D[bf] p`` is undefinable from ``@[bf]``, ``R[bf]``.

    Sizes up to the bounds are visited smallest first (by worlds x agents).
    A size whose skeleton count is at most ``EXHAUSTIVE_SKELETONS`` is
    enumerated completely; larger sizes are sampled, drawing uniform
    partitions and referents from ``random.Random(seed)``, round-robin,
    up to *max_samples* skeletons in total. With *exact_size* only the
    bound size itself is searched.

    The returned certificate has been re-checked by ``verify_certificate``.
    """
    if max_worlds < 1 or max_agents < 1:
        return SearchResult(False, "no witness found in bounded space: bounds must be at least 1 x 1")
    if exact_size:
        sizes = [(max_worlds, max_agents)]
    else:
        sizes = sorted(
            itertools.product(range(1, max_worlds + 1), range(1, max_agents + 1)),
            key=lambda s: (s[0] * s[1], s[1], s[0]),
        )
    rng = random.Random(seed)
    result = SearchResult(False, "")
    sampled = []
    for nw, na in sizes:
        worlds, agents = tuple(world_ids(nw)), tuple(agent_ids(na))
        if _bell(nw) ** na * na ** (nw * na) > EXHAUSTIVE_SKELETONS:
            sampled.append((worlds, agents))
            continue
        parts = list(_set_partitions(worlds))
        for partitions in itertools.product(parts, repeat=na):
            for referents in itertools.product(agents, repeat=nw * na):
                result.skeletons += 1
                cert = _try(_skeleton(worlds, agents, partitions, referents), rng)
                if cert is not None:
                    return _found(result, cert)
        result.exhausted.append((nw, na))

    result.sampled = [(len(w), len(a)) for w, a in sampled]
    for i in range(max_samples if sampled else 0):
        worlds, agents = sampled[i % len(sampled)]
        partitions = [random_partition(list(worlds), rng) for _ in agents]
        referents = [agents[rng.randrange(len(agents))] for _ in range(len(worlds) * len(agents))]
        result.skeletons += 1
        cert = _try(_skeleton(worlds, agents, partitions, referents), rng)
        if cert is not None:
            return _found(result, cert)

    how = "exhaustively" if not sampled else f"{max_samples} sampled skeletons"
    result.message = f"no witness found in bounded space ({max_worlds} worlds x {max_agents} agents, {how})"
    return result


def _found(result: SearchResult, cert: Certificate) -> SearchResult:
    m = cert.model
    result.found = True
    result.model = m
    result.certificate = cert
    result.message = f"witness with {len(m.worlds)} worlds and {len(m.agents)} agents after {result.skeletons} skeletons"
    return result
