"""Formula language: AST, parser, printer and size-ordered enumeration.

Concrete syntax::

    formula := implies
    implies := or ("->" implies)?
    or      := and ("|" and)*
    and     := unary ("&" unary)*
    unary   := "!" unary | ("R" | "D" | "@") "[" name "]" unary | atom
    atom    := "true" | "false" | prop | "(" formula ")"

``R[n]`` is de re knowledge about ``n``, ``D[n]`` de dicto knowledge, and
``@[n]`` evaluates its argument on the referent of ``n``.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Iterator, Union

from .errors import ParseError

KEYWORDS = frozenset({"true", "false"})
SELF_NAME = "se"

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


# --------------------------------------------------------------------- AST


@dataclass(frozen=True)
class Prop:
    name: str


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class At:
    name: str
    arg: "Formula"


@dataclass(frozen=True)
class DeRe:
    name: str
    arg: "Formula"


@dataclass(frozen=True)
class DeDicto:
    name: str
    arg: "Formula"


Formula = Union[Prop, Const, Not, Or, And, Implies, At, DeRe, DeDicto]
Modal = (At, DeRe, DeDicto)

TOP = Const(True)
BOTTOM = Const(False)

_MODAL_TAG = {At: "@", DeRe: "R", DeDicto: "D"}
_TAG_MODAL = {v: k for k, v in _MODAL_TAG.items()}


def expand(phi: Formula) -> Formula:
    """Rewrite ``And`` and ``Implies`` into ``Not``/``Or``."""
    if isinstance(phi, (Prop, Const)):
        return phi
    if isinstance(phi, Not):
        return Not(expand(phi.arg))
    if isinstance(phi, Or):
        return Or(expand(phi.left), expand(phi.right))
    if isinstance(phi, And):
        return Not(Or(Not(expand(phi.left)), Not(expand(phi.right))))
    if isinstance(phi, Implies):
        return Or(Not(expand(phi.left)), expand(phi.right))
    return type(phi)(phi.name, expand(phi.arg))


def size(phi: Formula) -> int:
    """Node count of ``expand(phi)``."""
    if isinstance(phi, (Prop, Const)):
        return 1
    if isinstance(phi, Not):
        return 1 + size(phi.arg)
    if isinstance(phi, Or):
        return 1 + size(phi.left) + size(phi.right)
    if isinstance(phi, And):
        return 4 + size(phi.left) + size(phi.right)
    if isinstance(phi, Implies):
        return 2 + size(phi.left) + size(phi.right)
    return 1 + size(phi.arg)


def props_of(phi: Formula) -> set[str]:
    if isinstance(phi, Prop):
        return {phi.name}
    if isinstance(phi, Const):
        return set()
    if isinstance(phi, (Or, And, Implies)):
        return props_of(phi.left) | props_of(phi.right)
    return props_of(phi.arg)


def names_of(phi: Formula) -> set[str]:
    if isinstance(phi, (Prop, Const)):
        return set()
    if isinstance(phi, Not):
        return names_of(phi.arg)
    if isinstance(phi, (Or, And, Implies)):
        return names_of(phi.left) | names_of(phi.right)
    return {phi.name} | names_of(phi.arg)


def subformulas(phi: Formula) -> Iterator[Formula]:
    """Post-order traversal (children before parents)."""
    if isinstance(phi, (Or, And, Implies)):
        yield from subformulas(phi.left)
        yield from subformulas(phi.right)
    elif isinstance(phi, (Not, At, DeRe, DeDicto)):
        yield from subformulas(phi.arg)
    yield phi


# ----------------------------------------------------------------- printer

_PREC_IMPLIES, _PREC_OR, _PREC_AND, _PREC_UNARY = range(4)


def print_formula(phi: Formula) -> str:
    return _print(phi, _PREC_IMPLIES)


def _print(phi: Formula, ctx: int) -> str:
    if isinstance(phi, Prop):
        return phi.name
    if isinstance(phi, Const):
        return "true" if phi.value else "false"
    if isinstance(phi, Not):
        return "!" + _print(phi.arg, _PREC_UNARY)
    if isinstance(phi, Modal):
        return f"{_MODAL_TAG[type(phi)]}[{phi.name}] " + _print(phi.arg, _PREC_UNARY)
    if isinstance(phi, Or):
        prec, text = _PREC_OR, _print(phi.left, _PREC_OR) + " | " + _print(phi.right, _PREC_AND)
    elif isinstance(phi, And):
        prec, text = _PREC_AND, _print(phi.left, _PREC_AND) + " & " + _print(phi.right, _PREC_UNARY)
    else:
        prec, text = _PREC_IMPLIES, _print(phi.left, _PREC_OR) + " -> " + _print(phi.right, _PREC_IMPLIES)
    return f"({text})" if prec < ctx else text


# ------------------------------------------------------------------ parser


@dataclass
class _Token:
    kind: str  # ident, op, eof
    text: str
    offset: int  # byte offset into the UTF-8 source


_OPS = ("->", "!", "|", "&", "(", ")", "[", "]", "@")


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    i = 0
    byte = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            byte += len(ch.encode("utf-8"))
            continue
        m = _IDENT.match(text, i)
        if m:
            tokens.append(_Token("ident", m.group(), byte))
            byte += len(m.group())
            i = m.end()
            continue
        for op in _OPS:
            if text.startswith(op, i):
                tokens.append(_Token("op", op, byte))
                i += len(op)
                byte += len(op)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", byte, ())
    tokens.append(_Token("eof", "", byte))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.pos]

    def _peek(self, k: int = 1) -> _Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def _accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.pos += 1
            return True
        return False

    def _expect(self, text: str) -> None:
        if not self._accept(text):
            self._fail((text,))

    def _fail(self, expected: tuple[str, ...]):
        got = self.tok.text or "end of input"
        raise ParseError(f"unexpected {got!r}", self.tok.offset, expected)

    def parse(self) -> Formula:
        phi = self.implies()
        if self.tok.kind != "eof":
            self._fail(("->", "|", "&", "end of input"))
        return phi

    def implies(self) -> Formula:
        left = self.disjunction()
        if self._accept("->"):
            return Implies(left, self.implies())
        return left

    def disjunction(self) -> Formula:
        phi = self.conjunction()
        while self._accept("|"):
            phi = Or(phi, self.conjunction())
        return phi

    def conjunction(self) -> Formula:
        phi = self.unary()
        while self._accept("&"):
            phi = And(phi, self.unary())
        return phi

    def _is_modality(self) -> bool:
        tok = self.tok
        if tok.kind == "op" and tok.text == "@":
            return True
        nxt = self._peek()
        return tok.kind == "ident" and tok.text in ("R", "D") and nxt.kind == "op" and nxt.text == "["

    def unary(self) -> Formula:
        if self._accept("!"):
            return Not(self.unary())
        if self._is_modality():
            tag = self.tok.text
            self.pos += 1
            self._expect("[")
            if self.tok.kind != "ident":
                if self.tok.kind == "op" and self.tok.text == "]":
                    raise ParseError("empty name", self.tok.offset, ("name",))
                self._fail(("name",))
            name = self.tok.text
            if name in KEYWORDS:
                raise ParseError(f"reserved word {name!r} used as a name", self.tok.offset, ("name",))
            self.pos += 1
            self._expect("]")
            return _TAG_MODAL[tag](name, self.unary())
        return self.atom()

    def atom(self) -> Formula:
        tok = self.tok
        if self._accept("("):
            phi = self.implies()
            self._expect(")")
            return phi
        if tok.kind == "ident":
            self.pos += 1
            if tok.text == "true":
                return TOP
            if tok.text == "false":
                return BOTTOM
            return Prop(tok.text)
        self._fail(("!", "R[", "D[", "@[", "(", "true", "false", "prop"))


def parse_formula(text: str) -> Formula:
    """Parse *text*; raises :class:`ParseError` with a byte offset on failure."""
    return _Parser(text).parse()


# --------------------------------------------------------------- signature


@dataclass(frozen=True)
class Signature:
    """The connectives and seeds a closure or enumeration may use.

    Modalities are enabled per name, so ``dere_names={"Ann"}`` allows
    ``R[Ann]`` but not ``R[Zoe]``.
    """

    props: frozenset[str] = frozenset()
    allow_not: bool = False
    allow_or: bool = False
    at_names: frozenset[str] = frozenset()
    dere_names: frozenset[str] = frozenset()
    dedicto_names: frozenset[str] = frozenset()
    allow_true: bool = False
    allow_false: bool = False

    def __post_init__(self):
        for attr in ("props", "at_names", "dere_names", "dedicto_names"):
            object.__setattr__(self, attr, frozenset(getattr(self, attr)))

    def seeds(self) -> list[Formula]:
        out: list[Formula] = [Prop(p) for p in sorted(self.props)]
        if self.allow_true:
            out.append(TOP)
        if self.allow_false:
            out.append(BOTTOM)
        return out

    def unary_ops(self) -> list[tuple[type, str | None]]:
        """Enabled unary connective instances, ``(node type, name)``."""
        ops: list[tuple[type, str | None]] = []
        if self.allow_not:
            ops.append((Not, None))
        for kind, names in ((At, self.at_names), (DeRe, self.dere_names), (DeDicto, self.dedicto_names)):
            ops.extend((kind, n) for n in sorted(names))
        return ops

    def names(self) -> set[str]:
        return set(self.at_names | self.dere_names | self.dedicto_names)

    def admits(self, phi: Formula) -> bool:
        """True iff *phi* is built only from this signature's seeds and connectives."""
        if isinstance(phi, Prop):
            return phi.name in self.props
        if isinstance(phi, Const):
            return self.allow_true if phi.value else self.allow_false
        if isinstance(phi, Not):
            return self.allow_not and self.admits(phi.arg)
        if isinstance(phi, Or):
            return self.allow_or and self.admits(phi.left) and self.admits(phi.right)
        if isinstance(phi, (And, Implies)):
            return self.admits(expand(phi))
        allowed = {At: self.at_names, DeRe: self.dere_names, DeDicto: self.dedicto_names}[type(phi)]
        return phi.name in allowed and self.admits(phi.arg)

    def to_dict(self) -> dict:
        return {
            "props": sorted(self.props),
            "not": self.allow_not,
            "or": self.allow_or,
            "at": sorted(self.at_names),
            "dere": sorted(self.dere_names),
            "dedicto": sorted(self.dedicto_names),
            "true": self.allow_true,
            "false": self.allow_false,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Signature":
        known = {"props", "not", "or", "at", "dere", "dedicto", "true", "false"}
        extra = set(doc) - known
        if extra:
            raise ValueError(f"unknown signature keys: {sorted(extra)}")
        return cls(
            props=frozenset(doc.get("props", ())),
            allow_not=bool(doc.get("not", False)),
            allow_or=bool(doc.get("or", False)),
            at_names=frozenset(doc.get("at", ())),
            dere_names=frozenset(doc.get("dere", ())),
            dedicto_names=frozenset(doc.get("dedicto", ())),
            allow_true=bool(doc.get("true", False)),
            allow_false=bool(doc.get("false", False)),
        )

    def __str__(self) -> str:
        return format_signature(self)


def parse_signature(spec: str) -> Signature:
    """Parse the ``props;booleans;modalities`` mini-syntax.

    Each section is a comma list. Seeds are prop names plus optionally
    ``true``/``false``; booleans are ``not``/``or``; modalities are
    ``R[n]``, ``D[n]``, ``@[n]``. Trailing sections may be omitted:
    ``"p;not,or;R[Ann],@[Ann]"``, ``"p;not"``, ``"p"``.
    """
    parts = spec.split(";")
    if len(parts) > 3:
        raise ValueError(f"signature has {len(parts)} sections, expected at most 3")
    parts += [""] * (3 - len(parts))
    seeds, booleans, modalities = ([x.strip() for x in part.split(",") if x.strip()] for part in parts)

    props, kw = set(), {}
    for s in seeds:
        if s in KEYWORDS:
            kw["allow_" + s] = True
        elif _IDENT.fullmatch(s):
            props.add(s)
        else:
            raise ValueError(f"bad seed {s!r}")
    for b in booleans:
        if b not in ("not", "or"):
            raise ValueError(f"unknown boolean connective {b!r} (expected not, or)")
        kw["allow_" + b] = True
    names: dict[str, set[str]] = {"@": set(), "R": set(), "D": set()}
    for mod in modalities:
        m = re.fullmatch(r"([RD@])\[\s*([A-Za-z_][A-Za-z0-9_]*)\s*\]", mod)
        if not m:
            raise ValueError(f"bad modality {mod!r} (expected R[n], D[n] or @[n])")
        names[m.group(1)].add(m.group(2))
    if not props and not kw.get("allow_true") and not kw.get("allow_false"):
        raise ValueError("signature needs at least one seed prop or constant")
    return Signature(
        props=frozenset(props),
        at_names=frozenset(names["@"]),
        dere_names=frozenset(names["R"]),
        dedicto_names=frozenset(names["D"]),
        **kw,
    )


def format_signature(sig: Signature) -> str:
    seeds = sorted(sig.props) + [k for k, on in (("true", sig.allow_true), ("false", sig.allow_false)) if on]
    booleans = [k for k, on in (("not", sig.allow_not), ("or", sig.allow_or)) if on]
    mods = [f"{tag}[{n}]" for tag, names in (("R", sig.dere_names), ("D", sig.dedicto_names), ("@", sig.at_names)) for n in sorted(names)]
    return ";".join([",".join(seeds), ",".join(booleans), ",".join(mods)])


# ------------------------------------------------------------- enumeration


def enumerate_formulas(sig: Signature, max_size: int) -> Iterator[Formula]:
    """Yield every core formula over *sig* with ``size <= max_size`` once.

    Order: ascending size, ties broken by ``print_formula`` string
    (Python ``str`` ordering, i.e. code points). Only core connectives are
    produced; ``And``/``Implies`` never appear.
    """
    by_size: dict[int, list[Formula]] = {}
    unary = sig.unary_ops()
    for k in range(1, max_size + 1):
        level: list[Formula] = []
        if k == 1:
            level.extend(sig.seeds())
        else:
            for kind, name in unary:
                for arg in by_size[k - 1]:
                    level.append(Not(arg) if kind is Not else kind(name, arg))
            if sig.allow_or:
                for i in range(1, k - 1):
                    for left in by_size[i]:
                        for right in by_size[k - 1 - i]:
                            level.append(Or(left, right))
        level.sort(key=print_formula)
        by_size[k] = level
        yield from level


# ---------------------------------------------------------- random formulas


def random_formula(
    rng: random.Random,
    props: list[str],
    names: list[str],
    depth: int = 4,
    connectives: tuple[str, ...] = ("not", "or", "and", "at", "R", "D"),
    constants: bool = True,
) -> Formula:
    """Draw a random formula of nesting depth at most *depth*."""
    leaves: list[Formula] = [Prop(p) for p in props]
    if constants or not leaves:
        leaves += [TOP, BOTTOM]
    ops = [c for c in connectives if names or c not in ("at", "R", "D")]
    if depth <= 0 or not ops or rng.random() < 0.25:
        return rng.choice(leaves)
    op = rng.choice(ops)
    sub = lambda: random_formula(rng, props, names, depth - 1, connectives, constants)  # noqa: E731
    if op == "not":
        return Not(sub())
    if op == "or":
        return Or(sub(), sub())
    if op == "and":
        return And(sub(), sub())
    if op == "implies":
        return Implies(sub(), sub())
    kind = {"at": At, "R": DeRe, "D": DeDicto}[op]
    return kind(rng.choice(names), sub())
