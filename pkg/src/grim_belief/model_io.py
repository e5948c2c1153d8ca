"""JSON model documents: game, cooperation profile, belief space, expectations.

See docs/schema.md for the format. Rationals may be integers, "num/den"
strings or finite decimals; decimals are read exactly. Every schema error
names the JSON path where it occurred.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from .belief_space import WorldModel, cell_grid, uniform_grid_model, validate_model, window_grid_model
from .errors import ModelError
from .rational import as_rational, format_rational
from .stage_game import CooperationSetup, MixedAction, StageGame

VERSION = 1


class DocumentError(ValueError):
    """A model document that does not parse; ``path`` locates the problem."""

    def __init__(self, path: str, message: str, witnesses=()):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message
        self.witnesses = list(witnesses)


@dataclass
class ModelDocument:
    game: StageGame
    setup: CooperationSetup
    model: WorldModel
    metadata: Dict[str, Any] = field(default_factory=dict)
    expected: List[Dict[str, Any]] = field(default_factory=list)
    generator: Optional[Dict[str, Any]] = None
    version: int = VERSION


# ---- reading -------------------------------------------------------------

def _rat(value, path):
    if isinstance(value, (bool, float)) or value is None:
        raise DocumentError(path, f"expected a rational, got {value!r}")
    try:
        return as_rational(value)
    except (TypeError, ValueError) as exc:
        raise DocumentError(path, str(exc)) from None


def _get(obj, key, path, kind=None, default=...):
    if not isinstance(obj, dict):
        raise DocumentError(path, "expected an object")
    if key not in obj:
        if default is not ...:
            return default
        raise DocumentError(f"{path}.{key}", "missing")
    value = obj[key]
    if kind is not None and not isinstance(value, kind):
        raise DocumentError(f"{path}.{key}", f"expected {kind.__name__ if isinstance(kind, type) else 'a value'}")
    return value


def _read_game(sec, path) -> StageGame:
    actions = _get(sec, "actions", path, list)
    if len(actions) < 2:
        raise DocumentError(f"{path}.actions", "at least two players required")
    for i, acts in enumerate(actions):
        if not isinstance(acts, list) or not acts or not all(isinstance(a, str) for a in acts):
            raise DocumentError(f"{path}.actions[{i}]", "expected a non-empty list of action labels")
        if len(set(acts)) != len(acts):
            raise DocumentError(f"{path}.actions[{i}]", "duplicate action label")
    payoffs = _get(sec, "payoffs", path, list)
    n = len(actions)

    def walk(node, depth, prefix, p):
        if depth == n:
            if not isinstance(node, list) or len(node) != n:
                raise DocumentError(p, f"expected a payoff vector of length {n}")
            return {tuple(prefix): [_rat(x, f"{p}[{k}]") for k, x in enumerate(node)]}
        if not isinstance(node, list) or len(node) != len(actions[depth]):
            raise DocumentError(p, f"expected {len(actions[depth])} entries for player {depth + 1}'s actions")
        out = {}
        for k, child in enumerate(node):
            out.update(walk(child, depth + 1, prefix + [k], f"{p}[{k}]"))
        return out

    table = walk(payoffs, 0, [], f"{path}.payoffs")
    try:
        return StageGame(actions, table)
    except ValueError as exc:
        raise DocumentError(path, str(exc)) from None


def _read_mixed(game, i, spec, path) -> MixedAction:
    k = game.action_count(i)
    if isinstance(spec, str):
        try:
            return MixedAction.pure(k, game.action_index(i, spec))
        except (KeyError, ValueError) as exc:
            raise DocumentError(path, str(exc)) from None
    if isinstance(spec, dict):
        weights = [Fraction(0)] * k
        for label, p in spec.items():
            try:
                weights[game.action_index(i, label)] = _rat(p, f"{path}.{label}")
            except (KeyError, ValueError) as exc:
                if isinstance(exc, DocumentError):
                    raise
                raise DocumentError(f"{path}.{label}", str(exc)) from None
        try:
            return MixedAction(tuple(weights))
        except ValueError as exc:
            raise DocumentError(path, str(exc)) from None
    raise DocumentError(path, "expected an action label or a {label: probability} object")


def _read_setup(game, sec, path) -> CooperationSetup:
    sigma = _get(sec, "sigma", path, list)
    tau = _get(sec, "tau", path, list)
    n = game.player_count
    if len(sigma) != n or len(tau) != n:
        raise DocumentError(path, f"sigma and tau need one entry per player ({n})")
    mixed = [_read_mixed(game, i, s, f"{path}.sigma[{i}]") for i, s in enumerate(sigma)]
    tau_idx = []
    for i, a in enumerate(tau):
        try:
            tau_idx.append(game.action_index(i, a))
        except (KeyError, ValueError) as exc:
            raise DocumentError(f"{path}.tau[{i}]", str(exc)) from None
    try:
        return CooperationSetup(game, tuple(mixed), tuple(tau_idx))
    except ValueError as exc:
        raise DocumentError(path, str(exc)) from None


GENERATORS = ("uniform-grid", "window-grid")


def _read_generator(gen, path) -> WorldModel:
    kind = _get(gen, "kind", path, str)
    if kind not in GENERATORS:
        raise DocumentError(f"{path}.kind", f"unknown generator {kind!r}; expected one of {GENERATORS}")
    try:
        if kind == "uniform-grid":
            if "cells" in gen:
                values = cell_grid(int(_get(gen, "cells", path, int)))
            else:
                values = [_rat(v, f"{path}.values[{k}]") for k, v in enumerate(_get(gen, "values", path, list))]
            return uniform_grid_model(values)
        cells = _get(gen, "cells", path, int)
        return window_grid_model(cells, _rat(_get(gen, "epsilon", path), f"{path}.epsilon"))
    except ModelError as exc:
        raise DocumentError(path, str(exc)) from None


def _read_space(sec, path, players) -> WorldModel:
    if "generator" in sec:
        return _read_generator(sec["generator"], f"{path}.generator")
    worlds = _get(sec, "worlds", path, list)
    if not worlds:
        raise DocumentError(f"{path}.worlds", "at least one world required")
    discounts, labels = [], []
    for w, spec in enumerate(worlds):
        p = f"{path}.worlds[{w}]"
        d = _get(spec, "discounts", p, list)
        if len(d) != players:
            raise DocumentError(f"{p}.discounts", f"expected {players} discount factors")
        row = [_rat(x, f"{p}.discounts[{k}]") for k, x in enumerate(d)]
        for k, x in enumerate(row):
            if not 0 <= x < 1:
                raise DocumentError(f"{p}.discounts[{k}]", "discount factors lie in [0, 1)")
        discounts.append(row)
        labels.append(_get(spec, "label", p, str, default=str(w)))
    n = len(worlds)
    prior = None
    if "prior" in sec:
        pr = _get(sec, "prior", path, list)
        if len(pr) != n:
            raise DocumentError(f"{path}.prior", f"expected {n} entries")
        prior = [_rat(x, f"{path}.prior[{w}]") for w, x in enumerate(pr)]
    types_sec = _get(sec, "types", path, list)
    if len(types_sec) != players:
        raise DocumentError(f"{path}.types", f"expected one type list per player ({players})")
    partitions, beliefs, type_labels = [], [], []
    for i, tlist in enumerate(types_sec):
        pi = f"{path}.types[{i}]"
        if not isinstance(tlist, list) or not tlist:
            raise DocumentError(pi, "expected a non-empty list of types")
        cells, bels, tl = [], [], []
        seen = {}
        for t, tspec in enumerate(tlist):
            pt = f"{pi}[{t}]"
            members = _get(tspec, "worlds", pt, list)
            for k, w in enumerate(members):
                if not isinstance(w, int) or isinstance(w, bool) or not 0 <= w < n:
                    raise DocumentError(f"{pt}.worlds[{k}]", f"not a world index in 0..{n - 1}")
                if w in seen:
                    raise DocumentError(f"{pt}.worlds[{k}]", f"world {w} already belongs to type {seen[w]}")
                seen[w] = t
            cells.append(members)
            tl.append(str(_get(tspec, "label", pt, default=str(t))))
            if "belief" in tspec:
                bspec = _get(tspec, "belief", pt, dict)
                dist = {}
                for key, p in bspec.items():
                    try:
                        w = int(key)
                    except ValueError:
                        raise DocumentError(f"{pt}.belief.{key}", "belief keys are world indices") from None
                    if not 0 <= w < n:
                        raise DocumentError(f"{pt}.belief.{key}", f"world {w} is outside 0..{n - 1}")
                    dist[w] = _rat(p, f"{pt}.belief.{key}")
                bels.append(dist)
            elif prior is not None:
                mass = sum(prior[w] for w in members)
                if mass > 0:
                    bels.append({w: prior[w] / mass for w in members if prior[w]})
                else:
                    bels.append({w: Fraction(1, len(members)) for w in members})
            else:
                raise DocumentError(f"{pt}.belief", "missing (and no prior to derive it from)")
        missing = [w for w in range(n) if w not in seen]
        if missing:
            raise DocumentError(pi, f"worlds {missing[:5]} belong to no type")
        partitions.append(cells)
        beliefs.append(bels)
        type_labels.append(tl)
    try:
        model = WorldModel(discounts, partitions, beliefs, prior=prior, labels=labels, type_labels=type_labels)
    except ModelError as exc:
        raise DocumentError(path, str(exc)) from None
    report = validate_model(model)
    if not report.valid:
        v = report.violations[0]
        where = path
        if v.player is not None and v.type is not None:
            where = f"{path}.types[{v.player}][{v.type}].belief"
        elif v.code.startswith("prior"):
            where = f"{path}.prior"
        raise DocumentError(where, f"{v.code}: {v.message}", [x.world for x in report.violations])
    return model


def load_document(data: Dict[str, Any]) -> ModelDocument:
    """Build a document from already-decoded JSON (decimals as Decimal)."""
    if not isinstance(data, dict):
        raise DocumentError("$", "expected an object")
    version = data.get("version", VERSION)
    if version != VERSION:
        raise DocumentError("$.version", f"unsupported version {version!r}")
    game = _read_game(_get(data, "stage_game", "$", dict), "$.stage_game")
    setup = _read_setup(game, _get(data, "cooperation", "$", dict), "$.cooperation")
    space = _get(data, "belief_space", "$", dict)
    model = _read_space(space, "$.belief_space", game.player_count)
    if model.players != game.player_count:
        raise DocumentError("$.belief_space", f"model has {model.players} players, game has {game.player_count}")
    expected = _get(data, "expected", "$", list, default=[])
    for k, chk in enumerate(expected):
        if not isinstance(chk, dict) or "check" not in chk:
            raise DocumentError(f"$.expected[{k}]", "each expectation needs a 'check' field")
    return ModelDocument(game, setup, model, dict(_get(data, "metadata", "$", dict, default={})),
                         [_plain(c) for c in expected], space.get("generator"), version)


def _plain(obj):
    """Decimals back to strings so expectations stay JSON-friendly."""
    if isinstance(obj, Decimal):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_plain(v) for v in obj]
    return obj


def parse_model(text: str) -> ModelDocument:
    try:
        data = json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    return load_document(data)


def read_model(path) -> ModelDocument:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())


# ---- writing -------------------------------------------------------------

def _fmt(x):
    return format_rational(x)


def game_to_json(game: StageGame) -> Dict[str, Any]:
    def fmt(node):
        if isinstance(node, (list, tuple)) and node and isinstance(node[0], (list, tuple)):
            return [fmt(c) for c in node]
        return [_fmt(x) for x in node]
    return {"actions": [list(a) for a in game.actions], "payoffs": fmt(game.to_table())}


def setup_to_json(setup: CooperationSetup) -> Dict[str, Any]:
    game = setup.game
    sigma = []
    for i, m in enumerate(setup.sigma):
        if m.is_pure:
            sigma.append(game.actions[i][m.support[0]])
        else:
            sigma.append({game.actions[i][k]: _fmt(p) for k, p in enumerate(m.weights) if p})
    return {"sigma": sigma, "tau": [game.actions[i][a] for i, a in enumerate(setup.tau)]}


def space_to_json(model: WorldModel, generator=None) -> Dict[str, Any]:
    if generator is not None:
        return {"generator": _plain(generator)}
    worlds = []
    for w in range(model.n):
        worlds.append({"discounts": [_fmt(x) for x in model.discount_vector(w)], "label": model.world_label(w)})
    types = []
    for i in range(model.players):
        row = []
        for t in range(model.type_count(i)):
            row.append({
                "label": model.type_label(i, t),
                "worlds": [int(w) for w in model.type_members(i, t)],
                "belief": {str(w): _fmt(p) for w, p in sorted(model.belief(i, t).items())},
            })
        types.append(row)
    out = {"worlds": worlds, "types": types}
    if model.prior is not None:
        out["prior"] = [_fmt(p) for p in model.prior]
    return out


def document_to_json(doc: ModelDocument) -> Dict[str, Any]:
    out = {"version": doc.version}
    if doc.metadata:
        out["metadata"] = doc.metadata
    out["stage_game"] = game_to_json(doc.game)
    out["cooperation"] = setup_to_json(doc.setup)
    out["belief_space"] = space_to_json(doc.model, doc.generator)
    if doc.expected:
        out["expected"] = doc.expected
    return out


def serialize(doc: ModelDocument) -> str:
    return json.dumps(document_to_json(doc), indent=1, ensure_ascii=False) + "\n"
