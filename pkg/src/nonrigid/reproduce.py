"""End-to-end reproduction checks for the definability results.

Each check returns a :class:`Check`; :func:`verify_paper` runs them in a
fixed order. Fixtures can be overridden, which is how tests inject a
broken model and watch the matching check fail.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import Callable, Iterator

from .algebra import UNDEFINABLE, certificate_problems, close, decide_definability
from .model import AGENT_SPECIFIC, RIGID, Model, ModelParams, fixture, random_model
from .search import FAMILY_FORMULAS, search_agent_specific_counterexample
from .semantics import apply_op, from_points, truth_set
from .syntax import (
    BOTTOM,
    SELF_NAME,
    TOP,
    At,
    DeDicto,
    DeRe,
    Formula,
    Not,
    Prop,
    Signature,
    parse_formula,
    random_formula,
)

P = Prop("p")
BOOLEAN_FOUR = (P, BOTTOM, Not(P), TOP)
SIG_THEOREM3 = Signature(props=frozenset({"p"}), allow_not=True, allow_or=True, dere_names=frozenset({"Ann"}))
SIG_THEOREM4 = Signature(
    props=frozenset({"p"}), allow_not=True, allow_or=True, dedicto_names=frozenset({"Ann"}), at_names=frozenset({"Ann"})
)
# expected truth sets on the built-in fixtures
D_ANN_P_ON_M_DR = {("w", "a"), ("w", "b"), ("u", "a"), ("u", "b")}
R_ANN_P_ON_M_RD = {("w", "b"), ("u", "b")}
THEOREM1_FORMULAS = ("p", "!p", "R[Ann] p", "D[Ann] p")


@dataclass
class Check:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


# ----------------------------------------------------------- random suites


def random_rigid_models(count: int, seed: int, max_worlds=5, max_agents=4, max_names=2, max_props=2) -> Iterator[Model]:
    rng = random.Random(seed)
    for _ in range(count):
        params = ModelParams(
            rng.randint(1, max_worlds), rng.randint(1, max_agents), rng.randint(1, max_names), rng.randint(1, max_props), RIGID
        )
        yield random_model(params, rng.getrandbits(64))


def random_self_models(count: int, seed: int, max_worlds=4, max_agents=3, max_names=2, max_props=2) -> Iterator[Model]:
    rng = random.Random(seed)
    for _ in range(count):
        params = ModelParams(
            rng.randint(1, max_worlds),
            rng.randint(1, max_agents),
            rng.randint(1, max_names),
            rng.randint(1, max_props),
            AGENT_SPECIFIC,
            with_se=True,
        )
        yield random_model(params, rng.getrandbits(64))


def formulas_for(m: Model, count: int, rng: random.Random, depth: int = 4) -> list[Formula]:
    return [random_formula(rng, list(m.props), list(m.names), depth) for _ in range(count)]


# ------------------------------------------------------------------ checks


def dedicto_via_dere_violations(m: Model, phi: Formula, self_only: bool = False) -> list[str]:
    """Name pairs for which ``D[n] phi`` and ``R[k] @[n] phi`` differ on *m*.

    With *self_only*, ``k`` ranges over ``se`` only.
    """
    base = truth_set(m, phi)
    out = []
    knowers = (SELF_NAME,) if self_only else m.names
    for n in m.names:
        dd = apply_op(m, (DeDicto, n), [base])
        at = apply_op(m, (At, n), [base])
        for k in knowers:
            if apply_op(m, (DeRe, k), [at]) != dd:
                out.append(f"D[{n}] vs R[{k}] @[{n}]")
    return out


def check_theorem1(models: dict[str, Model], n_models: int, n_formulas: int, seed: int) -> Check:
    bad = []
    for label in ("M_DR", "M_RD"):
        m = models[label]
        for text in THEOREM1_FORMULAS:
            bad += [f"{label}: {text}: {v}" for v in dedicto_via_dere_violations(m, parse_formula(text))]
    rng = random.Random(seed)
    for i, m in enumerate(random_rigid_models(n_models, seed)):
        for phi in formulas_for(m, n_formulas, rng):
            bad += [f"random model #{i}: {v}" for v in dedicto_via_dere_violations(m, phi)]
    total = 2 * len(THEOREM1_FORMULAS) + n_models * n_formulas
    if bad:
        return Check("Theorem 1", False, f"{len(bad)} violations, first: {bad[0]}")
    return Check("Theorem 1", True, f"D[n] phi == R[k] @[n] phi on fixtures and {n_models} random models ({total} formulas)")


def _undefinability(name: str, m: Model, target: str, sig: Signature, expected: set) -> Check:
    target_f = parse_formula(target)
    actual = truth_set(m, target_f)
    if actual != from_points(m, expected):
        return Check(name, False, f"[[{target}]] is {sorted(actual.points(m))}, expected {sorted(expected)}")
    fam = close(m, sig)
    four = {truth_set(m, f) for f in BOOLEAN_FOUR}
    if fam.members != four:
        return Check(name, False, f"closure has {len(fam)} members, expected exactly [[p]], [[false]], [[!p]], [[true]]")
    cert = decide_definability(m, target_f, sig)
    if cert.verdict != UNDEFINABLE:
        return Check(name, False, f"{target} is definable via {cert.witness}")
    problems = certificate_problems(cert)
    if problems:
        return Check(name, False, "certificate rejected: " + problems[0])
    return Check(name, True, f"{target} undefinable over {sig}; family size 4; certificate verified")


def check_theorem3(models: dict[str, Model]) -> Check:
    return _undefinability("Theorem 3", models["M_DR"], "D[Ann] p", SIG_THEOREM3, D_ANN_P_ON_M_DR)


def check_theorem4(models: dict[str, Model]) -> Check:
    return _undefinability("Theorem 4", models["M_RD"], "R[Ann] p", SIG_THEOREM4, R_ANN_P_ON_M_RD)


def check_theorem5(seed: int) -> Check:
    result = search_agent_specific_counterexample(4, 3, seed=seed)
    if not result.found:
        return Check("Theorem 5", False, result.message)
    m = result.model
    problems = certificate_problems(result.certificate)
    if problems:
        return Check("Theorem 5", False, "certificate rejected: " + problems[0])
    expected = {truth_set(m, f) for f in FAMILY_FORMULAS}
    if result.certificate.family.members != expected:
        return Check("Theorem 5", False, "family does not have the expected eight members")
    return Check("Theorem 5", True, f"D[bf] p undefinable from @[bf], R[bf]: {result.message}; certificate verified")


def check_self_name(n_models: int, n_formulas: int, seed: int) -> Check:
    rng = random.Random(seed)
    bad = []
    for i, m in enumerate(random_self_models(n_models, seed)):
        for phi in formulas_for(m, n_formulas, rng):
            bad += [f"random model #{i}: {v}" for v in dedicto_via_dere_violations(m, phi, self_only=True)]
    if bad:
        return Check("Self-name equivalence", False, f"{len(bad)} violations, first: {bad[0]}")
    return Check("Self-name equivalence", True, f"D[n] phi == R[se] @[n] phi on {n_models} agent-specific models")


def verify_paper(
    models: dict[str, Model] | None = None,
    seed: int = 0,
    theorem1_models: int = 1000,
    theorem1_formulas: int = 50,
    self_models: int = 500,
    self_formulas: int = 20,
) -> list[Check]:
    """Run every reproduction check in a fixed order."""
    fixtures = {"M_DR": fixture("M_DR"), "M_RD": fixture("M_RD")}
    fixtures.update(models or {})
    steps: list[tuple[str, Callable[[], Check]]] = [
        ("Theorem 1", lambda: check_theorem1(fixtures, theorem1_models, theorem1_formulas, seed)),
        ("Theorem 3", lambda: check_theorem3(fixtures)),
        ("Theorem 4", lambda: check_theorem4(fixtures)),
        ("Theorem 5", lambda: check_theorem5(seed)),
        ("Self-name equivalence", lambda: check_self_name(self_models, self_formulas, seed)),
    ]
    out = []
    for name, step in steps:
        start = time.perf_counter()
        try:
            check = step()
        except Exception as exc:  # a crash is a failed check, not a crashed report
            check = Check(name, False, f"error: {exc!r}")
        check.seconds = time.perf_counter() - start
        out.append(check)
    return out
