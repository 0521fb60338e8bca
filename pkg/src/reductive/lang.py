r"""Object language: formulas, sequents, concrete syntax, JSON wire format.

Formulas cover intuitionistic propositional logic (atoms, T, F, /\, \/, ->)
plus a separate resource connective * used by the multiplicative fragment.
A sequent is an ordered context of formulas together with one conclusion;
contexts keep duplicates and order exactly as written, set-style views are
provided as helpers rather than baked into the representation.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterator, Union


@dataclass(frozen=True)
class Atom:
    name: str

    def __repr__(self) -> str:
        return f"Atom({self.name!r})"


@dataclass(frozen=True)
class Top:
    def __repr__(self) -> str:
        return "Top()"


@dataclass(frozen=True)
class Bot:
    def __repr__(self) -> str:
        return "Bot()"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Star:
    left: "Formula"
    right: "Formula"


Formula = Union[Atom, Top, Bot, And, Or, Imp, Star]

BINARY_OPS = (And, Or, Imp, Star)


@dataclass(frozen=True)
class Sequent:
    """An ordered context and a single conclusion, written ctx |- goal."""

    context: tuple[Formula, ...]
    conclusion: Formula

    def __repr__(self) -> str:
        return f"Sequent({render_sequent(self)!r})"


# A goal for the reduction machinery is just a sequent.
Goal = Sequent


def sequent(context, conclusion: Formula) -> Sequent:
    return Sequent(tuple(context), conclusion)


def atoms_of(f: Formula) -> frozenset[str]:
    if isinstance(f, Atom):
        return frozenset((f.name,))
    if isinstance(f, BINARY_OPS):
        return atoms_of(f.left) | atoms_of(f.right)
    return frozenset()


def size_of(f: Formula) -> int:
    """Node count: atoms and units are 1, a binary connective adds 1."""
    if isinstance(f, BINARY_OPS):
        return 1 + size_of(f.left) + size_of(f.right)
    return 1


def sequent_size(s: Sequent) -> int:
    return sum(size_of(f) for f in s.context) + size_of(s.conclusion)


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, BINARY_OPS):
        yield from subformulas(f.left)
        yield from subformulas(f.right)


def context_includes(small, large) -> bool:
    """Set inclusion of contexts, ignoring order and multiplicity."""
    return set(small) <= set(large)


# ---------------------------------------------------------------------------
# Fragments

FRAGMENT_IPL = "IPL"
FRAGMENT_MUL = "multiplicative"


class FragmentError(ValueError):
    """A formula or sequent mixes the IPL and multiplicative fragments."""


def fragment_of_formula(f: Formula) -> str:
    has_star = any(isinstance(g, Star) for g in subformulas(f))
    has_ipl = any(isinstance(g, (And, Or, Imp, Top, Bot)) for g in subformulas(f))
    if has_star and has_ipl:
        raise FragmentError(
            f"formula {render(f)!r} mixes * with IPL connectives"
        )
    return FRAGMENT_MUL if has_star else FRAGMENT_IPL


def fragment_of(s: Sequent) -> str:
    """Classify a sequent: IPL unless * occurs anywhere in it.

    Atom-only sequents belong to both readings; they classify as IPL, which
    is the default fragment everywhere an operator set has to be picked.
    """
    frags = {fragment_of_formula(f) for f in s.context}
    frags.add(fragment_of_formula(s.conclusion))
    if FRAGMENT_MUL in frags and any(
        isinstance(g, (And, Or, Imp, Top, Bot))
        for f in (*s.context, s.conclusion)
        for g in subformulas(f)
    ):
        raise FragmentError(f"sequent {render_sequent(s)!r} mixes fragments")
    return FRAGMENT_MUL if FRAGMENT_MUL in frags else FRAGMENT_IPL


def require_ipl(s: Sequent) -> Sequent:
    if fragment_of(s) != FRAGMENT_IPL:
        raise FragmentError(f"expected an IPL sequent, got {render_sequent(s)!r}")
    return s


def require_multiplicative(s: Sequent) -> Sequent:
    for f in (*s.context, s.conclusion):
        if any(isinstance(g, (And, Or, Imp, Top, Bot)) for g in subformulas(f)):
            raise FragmentError(
                f"expected a multiplicative sequent (atoms and * only), "
                f"got {render_sequent(s)!r}"
            )
    return s


# ---------------------------------------------------------------------------
# Concrete syntax
#
#   imp   := or ('->' imp)?          right associative, lowest precedence
#   or    := and ('\/' and)*
#   and   := unit (('/\' | '*') unit)*
#   unit  := 'T' | 'F' | ident | '(' imp ')'
#
# and a sequent is 'f1, f2 |- g' with an optional empty context '|- g'.

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<arrow>->)
  | (?P<and>/\\)
  | (?P<or>\\/)
  | (?P<star>\*)
  | (?P<lpar>\()
  | (?P<rpar>\))
  | (?P<comma>,)
  | (?P<turnstile>\|-)
  | (?P<ident>[A-Za-z][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    out = []
    i = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if m is None:
            raise ParseError(f"unexpected character {text[i]!r}", i)
        kind = m.lastgroup
        assert kind is not None
        if kind != "ws":
            out.append(_Token(kind, m.group(), i))
        i = m.end()
    out.append(_Token("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def take(self, kind: str) -> _Token:
        tok = self.tokens[self.i]
        if tok.kind != kind:
            raise ParseError(f"expected {kind}, found {tok.text or 'end of input'!r}", tok.pos)
        self.i += 1
        return tok

    def formula(self) -> Formula:
        left = self.or_level()
        if self.peek().kind == "arrow":
            self.take("arrow")
            return Imp(left, self.formula())
        return left

    def or_level(self) -> Formula:
        f = self.and_level()
        while self.peek().kind == "or":
            self.take("or")
            f = Or(f, self.and_level())
        return f

    def and_level(self) -> Formula:
        f = self.unit()
        while self.peek().kind in ("and", "star"):
            tok = self.take(self.peek().kind)
            g = self.unit()
            f = And(f, g) if tok.kind == "and" else Star(f, g)
        return f

    def unit(self) -> Formula:
        tok = self.peek()
        if tok.kind == "lpar":
            self.take("lpar")
            f = self.formula()
            self.take("rpar")
            return f
        if tok.kind == "ident":
            self.take("ident")
            if tok.text == "T":
                return Top()
            if tok.text == "F":
                return Bot()
            return Atom(tok.text)
        raise ParseError(f"expected a formula, found {tok.text or 'end of input'!r}", tok.pos)

    def sequent(self) -> Sequent:
        context: list[Formula] = []
        if self.peek().kind == "turnstile":
            self.take("turnstile")
        else:
            context.append(self.formula())
            while self.peek().kind == "comma":
                self.take("comma")
                context.append(self.formula())
            self.take("turnstile")
        conclusion = self.formula()
        return Sequent(tuple(context), conclusion)


def parse(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    p.take("end")
    fragment_of_formula(f)  # reject fragment mixes early
    return f


def parse_sequent(text: str) -> Sequent:
    p = _Parser(text)
    s = p.sequent()
    p.take("end")
    fragment_of(s)
    return s


# ---------------------------------------------------------------------------
# Rendering. parse(render(f)) == f for every formula; parentheses are kept
# minimal given the precedence T/F < atoms ... (* = /\) > \/ > ->.

_PREC = {Imp: 1, Or: 2, And: 3, Star: 3}


def _render(f: Formula, parent_prec: int) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Top):
        return "T"
    if isinstance(f, Bot):
        return "F"
    prec = _PREC[type(f)]
    symbol = {And: "/\\", Or: "\\/", Imp: "->", Star: "*"}[type(f)]
    if isinstance(f, Imp):
        # right associative: the right child keeps the same level
        body = f"{_render(f.left, prec + 1)} {symbol} {_render(f.right, prec)}"
    else:
        # left associative: the left child keeps the same level
        body = f"{_render(f.left, prec)} {symbol} {_render(f.right, prec + 1)}"
    if prec < parent_prec:
        return f"({body})"
    return body


def render(f: Formula) -> str:
    return _render(f, 0)


def render_sequent(s: Sequent) -> str:
    ctx = ", ".join(render(f) for f in s.context)
    return f"{ctx} |- {render(s.conclusion)}" if ctx else f"|- {render(s.conclusion)}"


# ---------------------------------------------------------------------------
# JSON wire format: {"atom": "p"} for atoms, {"op": ..., "l": ..., "r": ...}
# for the connectives, {"op": "top"} and {"op": "bot"} for the units, and
# {"ctx": [...], "goal": ...} for sequents.

_OP_TAGS = {And: "and", Or: "or", Imp: "imp", Star: "star"}
_TAG_OPS = {v: k for k, v in _OP_TAGS.items()}


def formula_to_json(f: Formula) -> dict:
    if isinstance(f, Atom):
        return {"atom": f.name}
    if isinstance(f, Top):
        return {"op": "top"}
    if isinstance(f, Bot):
        return {"op": "bot"}
    return {
        "op": _OP_TAGS[type(f)],
        "l": formula_to_json(f.left),
        "r": formula_to_json(f.right),
    }


def formula_from_json(data: dict) -> Formula:
    if not isinstance(data, dict):
        raise ValueError(f"not a formula object: {data!r}")
    if "atom" in data:
        name = data["atom"]
        if not isinstance(name, str) or not re.fullmatch(r"[A-Za-z][A-Za-z0-9_']*", name):
            raise ValueError(f"bad atom name: {name!r}")
        if name in ("T", "F"):
            raise ValueError(f"{name!r} is a unit, not an atom")
        return Atom(name)
    op = data.get("op")
    if op == "top":
        return Top()
    if op == "bot":
        return Bot()
    if op in _TAG_OPS:
        return _TAG_OPS[op](formula_from_json(data["l"]), formula_from_json(data["r"]))
    raise ValueError(f"unknown formula tag: {data!r}")


def sequent_to_json(s: Sequent) -> dict:
    return {
        "ctx": [formula_to_json(f) for f in s.context],
        "goal": formula_to_json(s.conclusion),
    }


def sequent_from_json(data: dict) -> Sequent:
    if not isinstance(data, dict) or "goal" not in data:
        raise ValueError(f"not a sequent object: {data!r}")
    ctx = data.get("ctx", [])
    if not isinstance(ctx, list):
        raise ValueError("ctx must be a list")
    s = Sequent(
        tuple(formula_from_json(f) for f in ctx),
        formula_from_json(data["goal"]),
    )
    fragment_of(s)
    return s


def dumps_sequent(s: Sequent) -> str:
    return json.dumps(sequent_to_json(s), sort_keys=True)
