"""A small expression language for events.

Grammar (``!`` binds tighter than ``&``, which binds tighter than ``|``)::

    expr  := term ('|' term)*
    term  := unary ('&' unary)*
    unary := '!' unary | '(' expr ')' | atom
    atom  := 'all' | 'none' | '{' [int (',' int)*] '}'
           | 'l' player op rational          e.g.  l1>=1/2, l2<3/4
           | 'type' player ':' key           e.g.  type1:3, type2:H
           | name                            e.g.  Lambda1 (supplied by the caller)

A numeric type key is a type index; anything else is a type label.
``to_text`` prints a canonical, fully parenthesised form that parses back to
the same tree.
"""

from __future__ import annotations

import operator
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Mapping, Optional, Tuple, Union

import numpy as np

from .belief_space import Event, WorldModel
from .errors import ConfigError
from .rational import as_rational, format_rational

OPS = {">=": operator.ge, ">": operator.gt, "<=": operator.le, "<": operator.lt, "==": operator.eq, "!=": operator.ne}


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Worlds:
    worlds: Tuple[int, ...]


@dataclass(frozen=True)
class Discount:
    player: int  # zero-based
    op: str
    value: Fraction


@dataclass(frozen=True)
class TypeAtom:
    player: int
    key: Union[int, str]


@dataclass(frozen=True)
class Name:
    name: str


@dataclass(frozen=True)
class Not:
    arg: "Node"


@dataclass(frozen=True)
class And:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Or:
    left: "Node"
    right: "Node"


Node = Union[Const, Worlds, Discount, TypeAtom, Name, Not, And, Or]

_TOKEN = re.compile(r"""
    \s*(?:
      (?P<cmp>l(?P<lp>\d+)\s*(?P<op>>=|<=|==|!=|>|<)\s*(?P<val>-?[0-9]+(?:\.[0-9]+)?(?:/[0-9]+)?))
    | (?P<type>type(?P<tp>\d+)\s*:\s*(?P<key>[A-Za-z0-9_.\-]+))
    | (?P<set>\{[^}]*\})
    | (?P<punct>[()&|!])
    | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
    )""", re.VERBOSE)


def _tokenize(text: str):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ConfigError(f"cannot parse event expression at column {pos + 1}: {text[pos:pos + 12]!r}")
        pos = m.end()
        if m.group("cmp"):
            player = int(m.group("lp")) - 1
            if player < 0:
                raise ConfigError("players are numbered from 1")
            out.append(Discount(player, m.group("op"), as_rational(m.group("val"))))
        elif m.group("type"):
            player = int(m.group("tp")) - 1
            if player < 0:
                raise ConfigError("players are numbered from 1")
            key = m.group("key")
            out.append(TypeAtom(player, int(key) if key.isdigit() else key))
        elif m.group("set"):
            body = m.group("set")[1:-1].strip()
            try:
                ws = tuple(sorted({int(x) for x in body.split(",")})) if body else ()
            except ValueError:
                raise ConfigError(f"bad world list {m.group('set')!r}") from None
            out.append(Worlds(ws))
        elif m.group("punct"):
            out.append(m.group("punct"))
        else:
            name = m.group("name")
            out.append(Const(name == "all") if name in ("all", "none") else Name(name))
    return out


class _Parser:
    def __init__(self, tokens):
        self.toks, self.i = tokens, 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self):
        tok = self.peek()
        if tok is None:
            raise ConfigError("unexpected end of event expression")
        self.i += 1
        return tok

    def expr(self):
        node = self.term()
        while self.peek() == "|":
            self.take()
            node = Or(node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek() == "&":
            self.take()
            node = And(node, self.unary())
        return node

    def unary(self):
        tok = self.take()
        if tok == "!":
            return Not(self.unary())
        if tok == "(":
            node = self.expr()
            if self.take() != ")":
                raise ConfigError("missing ')' in event expression")
            return node
        if isinstance(tok, str):
            raise ConfigError(f"unexpected {tok!r} in event expression")
        return tok


def parse(text: str) -> Node:
    parser = _Parser(_tokenize(text))
    node = parser.expr()
    if parser.peek() is not None:
        raise ConfigError(f"trailing input in event expression: {parser.peek()!r}")
    return node


def to_text(node: Node) -> str:
    if isinstance(node, Const):
        return "all" if node.value else "none"
    if isinstance(node, Worlds):
        return "{" + ",".join(str(w) for w in node.worlds) + "}"
    if isinstance(node, Discount):
        return f"l{node.player + 1}{node.op}{format_rational(node.value)}"
    if isinstance(node, TypeAtom):
        return f"type{node.player + 1}:{node.key}"
    if isinstance(node, Name):
        return node.name
    if isinstance(node, Not):
        return "!" + to_text(node.arg)
    sym = "&" if isinstance(node, And) else "|"
    return f"({to_text(node.left)} {sym} {to_text(node.right)})"


def evaluate(node: Union[Node, str], model: WorldModel, names: Optional[Mapping[str, Event]] = None) -> Event:
    """The event an expression denotes in ``model``."""
    if isinstance(node, str):
        node = parse(node)
    names = names or {}
    if isinstance(node, Const):
        return model.full() if node.value else model.empty()
    if isinstance(node, Worlds):
        bad = [w for w in node.worlds if not 0 <= w < model.n]
        if bad:
            raise ConfigError(f"world {bad[0]} is outside 0..{model.n - 1}")
        return Event.of(model.n, node.worlds)
    if isinstance(node, Discount):
        _check_player(model, node.player)
        values = model.discount_values(node.player)
        keep = np.array([OPS[node.op](v, node.value) for v in values], dtype=bool)
        return Event(keep[model.discount_index(node.player)])
    if isinstance(node, TypeAtom):
        _check_player(model, node.player)
        try:
            t = model.type_index(node.player, node.key)
        except (KeyError, IndexError, ValueError) as exc:
            raise ConfigError(f"player {node.player + 1} has no type {node.key!r}") from exc
        return model.type_event(node.player, [t])
    if isinstance(node, Name):
        if node.name not in names:
            raise ConfigError(f"unknown event name {node.name!r}; known: {', '.join(sorted(names)) or 'none'}")
        return names[node.name]
    if isinstance(node, Not):
        return ~evaluate(node.arg, model, names)
    left, right = evaluate(node.left, model, names), evaluate(node.right, model, names)
    return left & right if isinstance(node, And) else left | right


def _check_player(model: WorldModel, player: int):
    if player >= model.players:
        raise ConfigError(f"the model has {model.players} players, not {player + 1}")


def describe(event: Event, model: WorldModel, player: Optional[int] = None) -> str:
    """Short text for an event: its types for a measurable event, else its worlds."""
    if player is not None:
        types = model.types_in(player, event)
        if model.type_event(player, types) == event:
            return _clip([model.type_label(player, t) for t in types], ", ")
    return _clip([str(w) for w in event], ",")


def _clip(items, sep, limit=12):
    if len(items) <= limit:
        return "{" + sep.join(items) + "}"
    return "{" + sep.join(items[:3]) + sep + "..." + sep + items[-1] + "}" + f" ({len(items)} items)"
