"""Truth-set closure, definability verdicts and certificates.

A formula is definable on a model from a signature exactly when its truth
set lies in the closure of the signature's seed truth sets under the
signature's connectives, read as operations on truth sets. An
undefinability certificate is that closure itself: a family that contains
the seeds, is closed under every enabled connective and misses the
target. One such model is enough to refute definability in general.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import EvaluationError
from .model import Model, validate_model
from .semantics import TruthSet, _sat, apply_op, check_formula, order_labels, truth_set
from .syntax import (
    TOP,
    At,
    Formula,
    Not,
    Or,
    Signature,
    enumerate_formulas,
    parse_formula,
    print_formula,
    size,
)

DEFINABLE = "definable"
UNDEFINABLE = "undefinable"


@dataclass
class ClosureFamily:
    model: Model
    signature: Signature
    # insertion order is discovery order; values are minimal witnesses
    witness: dict[TruthSet, Formula] = field(default_factory=dict)
    saturated: bool = False

    @property
    def members(self) -> set[TruthSet]:
        return set(self.witness)

    def __contains__(self, t: TruthSet) -> bool:
        return t in self.witness

    def __len__(self) -> int:
        return len(self.witness)


def _check_signature(m: Model, sig: Signature) -> None:
    missing = set(sig.props) - set(m.props)
    if missing:
        raise EvaluationError(f"signature uses undeclared prop(s): {', '.join(sorted(missing))}")
    for n in sorted(sig.names()):
        check_formula(m, At(n, TOP))


def _build(kind: type, name: str | None, args: list[Formula]) -> Formula:
    if kind is Not:
        return Not(args[0])
    if kind is Or:
        return Or(args[0], args[1])
    return kind(name, args[0])


def close(m: Model, sig: Signature, max_members: int | None = None) -> ClosureFamily:
    """Close the seed truth sets of *sig* under its connectives on *m*.

    Works level by level in witness size: level ``k`` applies each unary
    connective to the members whose witness has size ``k - 1`` and ``|`` to
    every ordered pair of members whose witness sizes add up to ``k - 1``.
    A candidate is kept only if its truth set is new; among candidates for
    the same new set the one with the smallest printed form wins, so
    witnesses are size-minimal and deterministic. Once ``k - 1`` exceeds
    twice the largest witness size no candidate exists and the family is
    saturated.

    With *max_members* the loop stops early, returning an unsaturated
    family, as soon as the family grows past that many members.
    """
    _check_signature(m, sig)
    seeds = sig.seeds()
    if not seeds:
        raise ValueError("signature has no seed props or constants")
    width = len(m.worlds) * len(m.agents)
    cap = 1 << width
    fam = ClosureFamily(m, sig)
    by_size: dict[int, list[TruthSet]] = {}

    def add_level(k: int, candidates: list[tuple[TruthSet, Formula]]) -> None:
        best: dict[TruthSet, tuple[str, Formula]] = {}
        for t, phi in candidates:
            if t in fam.witness:
                continue
            text = print_formula(phi)
            if t not in best or text < best[t][0]:
                best[t] = (text, phi)
        for t, (_, phi) in sorted(best.items(), key=lambda kv: kv[1][0]):
            fam.witness[t] = phi
            by_size.setdefault(k, []).append(t)
        if len(fam.witness) > cap:
            raise RuntimeError("closure exceeded the number of possible truth sets")

    add_level(1, [(truth_set(m, s), s) for s in seeds])
    unary = sig.unary_ops()
    k = 2
    while k - 1 <= 2 * max(by_size):
        if max_members is not None and len(fam) > max_members:
            return fam
        candidates = []
        for kind, name in unary:
            for t in by_size.get(k - 1, ()):
                candidates.append((apply_op(m, (kind, name), [t]), _build(kind, name, [fam.witness[t]])))
        if sig.allow_or:
            for i in range(1, k - 1):
                for s in by_size.get(i, ()):
                    for t in by_size.get(k - 1 - i, ()):
                        candidates.append((apply_op(m, (Or, None), [s, t]), Or(fam.witness[s], fam.witness[t])))
        add_level(k, candidates)
        k += 1
    fam.saturated = True
    return fam


# ------------------------------------------------------------ certificates


@dataclass
class Certificate:
    model: Model
    signature: Signature
    target: Formula
    target_set: TruthSet
    verdict: str
    witness: Formula | None = None
    family: ClosureFamily | None = None

    @property
    def definable(self) -> bool:
        return self.verdict == DEFINABLE

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "order": order_labels(self.model),
            "model": self.model.to_dict(),
            "signature": self.signature.to_dict(),
            "target": print_formula(self.target),
            "target_bits": self.target_set.to_string(),
            "verdict": self.verdict,
        }
        if self.witness is not None:
            doc["witness"] = print_formula(self.witness)
        if self.family is not None:
            doc["family"] = [{"bits": t.to_string(), "witness": print_formula(phi)} for t, phi in self.family.witness.items()]
        return doc

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "Certificate":
        model = Model.from_dict(doc["model"])
        sig = Signature.from_dict(doc["signature"])
        target = parse_formula(doc["target"])
        width = len(model.worlds) * len(model.agents)
        if "target_bits" in doc:
            target_set = TruthSet.from_string(doc["target_bits"])
        else:
            target_set = truth_set(model, target)
        family = None
        if "family" in doc:
            family = ClosureFamily(model, sig, saturated=True)
            for entry in doc["family"]:
                t = TruthSet.from_string(entry["bits"])
                if t.width != width:
                    raise ValueError(f"family member {entry['bits']!r} does not have {width} cells")
                family.witness[t] = parse_formula(entry["witness"])
        witness = parse_formula(doc["witness"]) if doc.get("witness") else None
        return cls(model, sig, target, target_set, doc["verdict"], witness, family)


def load_certificate(path: str | Path) -> Certificate:
    return Certificate.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def decide_definability(m: Model, target: Formula, sig: Signature) -> Certificate:
    """Definable iff ``truth_set(target)`` is in ``close(m, sig)``.

    Undefinable on one model proves the formula is not equivalent to any
    formula over *sig*. Definable on one model proves nothing general.
    """
    target_set = truth_set(m, target)
    fam = close(m, sig)
    if target_set in fam:
        return Certificate(m, sig, target, target_set, DEFINABLE, witness=fam.witness[target_set])
    return Certificate(m, sig, target, target_set, UNDEFINABLE, family=fam)


def _pointwise(m: Model, phi: Formula) -> TruthSet:
    check_formula(m, phi)
    bits = 0
    for i, (w, a) in enumerate(m.points):
        if _sat(m, w, a, phi):
            bits |= 1 << i
    return TruthSet(bits, len(m.worlds) * len(m.agents))


def certificate_problems(c: Certificate) -> list[str]:
    """Every failed certificate check; empty means the certificate is sound.

    Truth sets are recomputed with the pointwise evaluator only, so a bug
    in the set evaluator used by :func:`close` cannot vouch for itself.
    """
    problems = [f"model: {v}" for v in validate_model(c.model)]
    if problems:
        return problems
    m, sig = c.model, c.signature
    width = len(m.worlds) * len(m.agents)
    try:
        actual = _pointwise(m, c.target)
    except EvaluationError as exc:
        return [f"target: {exc}"]
    if c.target_set.width != width or actual != c.target_set:
        problems.append("target: recorded truth set is wrong")

    if c.verdict == DEFINABLE:
        if c.witness is None:
            return problems + ["definable verdict without a witness"]
        if not sig.admits(c.witness):
            problems.append(f"witness {print_formula(c.witness)!r} uses connectives outside the signature")
        try:
            if _pointwise(m, c.witness) != actual:
                problems.append(f"witness {print_formula(c.witness)!r} does not denote the target set")
        except EvaluationError as exc:
            problems.append(f"witness: {exc}")
        return problems

    if c.verdict != UNDEFINABLE:
        return problems + [f"unknown verdict {c.verdict!r}"]
    fam = c.family
    if fam is None:
        return problems + ["undefinable verdict without a family"]
    if not fam.saturated:
        problems.append("family is not marked saturated")
    members = fam.members
    for t, phi in fam.witness.items():
        label = print_formula(phi)
        if t.width != width:
            problems.append(f"member {label!r}: wrong width")
            continue
        if not sig.admits(phi):
            problems.append(f"member {label!r}: witness uses connectives outside the signature")
        try:
            if _pointwise(m, phi) != t:
                problems.append(f"member {label!r}: witness does not denote its truth set")
        except EvaluationError as exc:
            problems.append(f"member {label!r}: {exc}")
    if problems:
        return problems
    for seed in sig.seeds():
        if _pointwise(m, seed) not in members:
            problems.append(f"seed {print_formula(seed)!r} missing from family")
    witnesses = list(fam.witness.values())
    for kind, name in sig.unary_ops():
        for phi in witnesses:
            image = _build(kind, name, [phi])
            if _pointwise(m, image) not in members:
                problems.append(f"not closed: {print_formula(image)!r} leaves the family")
    if sig.allow_or:
        for phi in witnesses:
            for psi in witnesses:
                if _pointwise(m, Or(phi, psi)) not in members:
                    problems.append(f"not closed: {print_formula(Or(phi, psi))!r} leaves the family")
    if actual in members:
        problems.append("target truth set is in the family")
    return problems


def verify_certificate(c: Certificate) -> bool:
    return not certificate_problems(c)


def oracle_family(m: Model, sig: Signature, max_size: int) -> set[TruthSet]:
    """Truth sets of every formula over *sig* up to *max_size*, by brute enumeration."""
    _check_signature(m, sig)
    return {truth_set(m, phi) for phi in enumerate_formulas(sig, max_size)}


def witness_depth(fam: ClosureFamily) -> int:
    """Largest witness size; enumeration to this size reaches every member."""
    return max((size(phi) for phi in fam.witness.values()), default=0)
