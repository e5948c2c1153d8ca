"""The bundled example models and their embedded expectations.

Each builder returns a ModelDocument whose ``expected`` list records the
verdicts and values the model should reproduce; ``run_checks`` evaluates
them. ``write_corpus`` regenerates the JSON files shipped in ``corpus/``.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Any, Callable, Dict, List, Optional

from .almost_complete import (coverage_bounds, high_discount_nature, is_almost_complete_prior,
                              is_almost_complete_strong, strong_eps_profile)
from .belief_operators import common_f_belief, iterated_pair, lower_endpoint
from .belief_space import WorldModel, cell_grid, uniform_grid_model, validate_model, window_grid_model
from .equilibrium import exhaustive_search, maximal_cooperation, verify_formula
from .events import describe, evaluate
from .model_io import ModelDocument, parse_model, read_model, serialize
from .oracle import JOINT, verify_oracle
from .rational import as_rational, format_rational
from .reports import CooperationPair
from .stage_game import CooperationSetup, StageGame, grim_trigger_threshold, prisoners_dilemma, punishment_game
from .thresholds import expectation_thresholds, high_discount_events, thresholds

F = Fraction


# ---- models --------------------------------------------------------------

def _grid_model(values_1, values_2, belief_1, belief_2, prior=None) -> WorldModel:
    """Worlds (v1, v2); player i's type is its own value; belief_i(k) maps
    opponent value indices to probabilities."""
    n2 = len(values_2)
    worlds = [(a, b) for a in values_1 for b in values_2]
    types_1 = [[k1 * n2 + k2 for k2 in range(n2)] for k1 in range(len(values_1))]
    types_2 = [[k1 * n2 + k2 for k1 in range(len(values_1))] for k2 in range(n2)]
    beliefs_1 = [{k1 * n2 + k2: p for k2, p in belief_1(k1).items()} for k1 in range(len(values_1))]
    beliefs_2 = [{k1 * n2 + k2: p for k1, p in belief_2(k2).items()} for k2 in range(n2)]
    labels = [f"({format_rational(a)},{format_rational(b)})" for a, b in worlds]
    tl = [[str(format_rational(v)) for v in values_1], [str(format_rational(v)) for v in values_2]]
    return WorldModel(worlds, [types_1, types_2], [beliefs_1, beliefs_2], prior=prior, labels=labels, type_labels=tl)


def _uniform_over(n):
    return lambda k: {j: F(1, n) for j in range(n)}


def _pd():
    game = prisoners_dilemma()
    return game, CooperationSetup.pure(game, ["D", "D"], ["C", "C"])


def _agame(a, **kw):
    game = punishment_game(a, **kw)
    return game, CooperationSetup.pure(game, ["D", "D"], ["C", "C"])


QUARTERS = [F(1, 4), F(1, 2), F(3, 4)]


def pd_grid_uniform() -> ModelDocument:
    game, setup = _pd()
    prior = [F(1, 9)] * 9
    model = _grid_model(QUARTERS, QUARTERS, _uniform_over(3), _uniform_over(3), prior)
    expected = [
        {"check": "valid", "valid": True},
        {"check": "lambda0", "player": 1, "value": "1/3"},
        {"check": "threshold", "player": 1, "type": "1/2", "component": "f", "value": "1/2"},
        {"check": "threshold", "player": 1, "type": "3/4", "component": "f", "value": "1/6"},
        {"check": "posterior", "player": 1, "event": "Lambda2", "world": 0, "value": "2/3"},
        {"check": "verify", "route": "formula", "K1": "Lambda1", "K2": "Lambda2", "verdict": "equilibrium"},
        {"check": "verify", "route": "oracle", "K1": "Lambda1", "K2": "Lambda2", "verdict": "equilibrium"},
        {"check": "verify", "route": "formula", "K1": "l1>=3/4", "K2": "l2>=3/4", "verdict": "equilibrium"},
        {"check": "maximal", "C1": "Lambda1", "C2": "Lambda2", "K1": "Lambda1", "K2": "Lambda2",
         "verdict": "equilibrium"},
        {"check": "search", "pairs": [["Lambda1", "Lambda2"], ["l1>=3/4", "l2>=3/4"], ["none", "none"]]},
    ]
    meta = {"title": "Prisoner's dilemma, uniform beliefs on a 3x3 grid", "example": "pd-grid-uniform"}
    return ModelDocument(game, setup, model, meta, expected)


def _optimistic(k):
    return [{0: F(1, 3), 1: F(1, 3), 2: F(1, 3)}, {1: F(1, 3), 2: F(2, 3)}, {2: F(1)}][k]


def pd_optimistic() -> ModelDocument:
    game, setup = _pd()
    model = _grid_model(QUARTERS, QUARTERS, _optimistic, _optimistic)
    expected = [
        {"check": "valid", "valid": True},
        {"check": "posterior", "player": 1, "event": "l2>=3/4", "world": 3, "value": "2/3"},
        {"check": "maximal", "C1": "Lambda1", "C2": "Lambda2", "K1": "Lambda1", "K2": "Lambda2",
         "verdict": "equilibrium"},
        {"check": "verify", "route": "formula", "K1": "l1>=3/4", "K2": "l2>=3/4", "verdict": "not-equilibrium",
         "failure": {"player": 1, "type": "1/2", "lhs": "2/3", "rhs": "1/2"}},
        {"check": "search", "pairs": [["Lambda1", "Lambda2"], ["none", "none"]]},
    ]
    meta = {"title": "Prisoner's dilemma, each type believes the opponent at least as patient",
            "example": "pd-optimistic"}
    return ModelDocument(game, setup, model, meta, expected)


def pd_empty_fixed_point() -> ModelDocument:
    game, setup = _pd()
    values = [F(1, 4), F(2, 5)]
    # the low type's belief is free; uniform is a corpus choice
    beliefs = lambda k: [{0: F(1, 2), 1: F(1, 2)}, {0: F(4, 5), 1: F(1, 5)}][k]
    model = _grid_model(values, values, beliefs, beliefs)
    expected = [
        {"check": "threshold", "player": 1, "type": "2/5", "component": "f", "value": "3/4"},
        {"check": "common_belief", "C": "Lambda", "event": "none", "K1": "none", "K2": "none"},
        {"check": "maximal", "C1": "Lambda1", "C2": "Lambda2", "K1": "none", "K2": "none",
         "verdict": "equilibrium"},
        {"check": "search", "pairs": [["none", "none"]]},
    ]
    meta = {"title": "Prisoner's dilemma where the patient type doubts the opponent", "example": "pd-empty"}
    return ModelDocument(game, setup, model, meta, expected)


def pd_continuous_grid(cells: int = 1000) -> ModelDocument:
    game, setup = _pd()
    gen = {"kind": "uniform-grid", "cells": cells}
    model = uniform_grid_model(cell_grid(cells))
    step = F(1, cells)
    terms = [F(2 ** k - 1, 2 ** (k + 1) - 1) for k in range(1, 6)]
    expected = [
        {"check": "endpoints", "player": 1, "C1": "Lambda1", "C2": "Lambda2",
         "terms": [format_rational(t) for t in terms], "tolerance": format_rational(step),
         "fixed_point": "1/2", "fixed_tolerance": format_rational(2 * step)},
        {"check": "maximal", "C1": "Lambda1", "C2": "Lambda2", "K1": "l1>=1/2", "K2": "l2>=1/2",
         "verdict": "equilibrium"},
    ]
    meta = {"title": f"Prisoner's dilemma, uniform beliefs, {cells}-cell grid on [0,1)",
            "example": "pd-continuous", "grid_step": format_rational(step)}
    return ModelDocument(game, setup, model, meta, expected, gen)


def agame6_grid() -> ModelDocument:
    game, setup = _agame(6)
    gen = {"kind": "uniform-grid", "cells": 5}
    model = uniform_grid_model(cell_grid(5))
    expected = [
        {"check": "lambda0", "player": 1, "value": "3/5"},
        {"check": "threshold", "player": 1, "type": 3, "component": "g1", "value": "1/3"},
        {"check": "threshold", "player": 1, "type": 3, "component": "g3", "value": "1/3"},
        {"check": "threshold", "player": 1, "type": 3, "component": "f", "value": "1/3"},
        {"check": "maximal", "C1": "Lambda1", "C2": "Lambda2", "K1": "Lambda1", "K2": "Lambda2",
         "verdict": "not-equilibrium", "failure": {"player": 1, "type": 0, "lhs": "2/5", "rhs": "1/3"}},
    ]
    meta = {"title": "Three-action game with a=6 on a 5-cell grid", "example": "agame6-grid",
            "note": "payoffs of N against D are a corpus choice (0)"}
    return ModelDocument(game, setup, model, meta, expected, gen)


def agame5_grid() -> ModelDocument:
    game, setup = _agame(5)
    prior = [F(1, 9)] * 9
    model = _grid_model(QUARTERS, QUARTERS, _uniform_over(3), _uniform_over(3), prior)
    expected = [
        {"check": "lambda0", "player": 1, "value": "1/2"},
        {"check": "threshold", "player": 1, "type": "1/4", "component": "g1", "value": "1/2"},
        {"check": "verify", "route": "formula", "K1": "l1>=3/4", "K2": "l2>=3/4", "verdict": "equilibrium"},
        {"check": "verify", "route": "oracle", "K1": "l1>=3/4", "K2": "l2>=3/4", "verdict": "equilibrium"},
        {"check": "verify", "route": "formula", "K1": "Lambda1", "K2": "Lambda2", "verdict": "not-equilibrium",
         "failure": {"player": 1, "type": "1/4", "lhs": "2/3", "rhs": "1/2"}, "witness": "stage1-deviate"},
        {"check": "search", "pairs": [["l1>=3/4", "l2>=3/4"], ["none", "none"]]},
    ]
    meta = {"title": "Three-action game with a=5, uniform beliefs on a 3x3 grid", "example": "agame5-grid"}
    return ModelDocument(game, setup, model, meta, expected)


def modified_pd() -> ModelDocument:
    game = StageGame.from_table([["D", "C"], ["D", "C"]], [[[1, 1], [4, 1]], [[1, 4], [3, 3]]])
    setup = CooperationSetup.pure(game, ["D", "D"], ["C", "C"])
    values = [F(1, 4), F(3, 4)]
    beliefs = lambda k: [{0: F(1)}, {0: F(1, 2), 1: F(1, 2)}][k]
    model = _grid_model(values, values, beliefs, beliefs)
    expected = [
        {"check": "verify", "route": "oracle", "K1": "all", "K2": "Lambda2", "verdict": "equilibrium"},
        {"check": "verify", "route": "formula", "K1": "all", "K2": "Lambda2", "verdict": "outside-theorem-scope"},
    ]
    meta = {"title": "Prisoner's dilemma variant where cooperating is a best response to defection",
            "example": "modified-pd"}
    return ModelDocument(game, setup, model, meta, expected)


def window_pd(cells: int, epsilon) -> ModelDocument:
    game, setup = _pd()
    epsilon = as_rational(epsilon)
    model = window_grid_model(cells, epsilon)
    gen = {"kind": "window-grid", "cells": cells, "epsilon": format_rational(epsilon)}
    step = F(1, cells)
    expected = [
        {"check": "endpoints", "player": 1, "C1": "Lambda1", "C2": "Lambda2", "fixed_point": "1/2",
         "fixed_tolerance": format_rational(2 * step)},
    ]
    meta = {"title": f"Prisoner's dilemma, each player knows the other's discount within {epsilon}",
            "example": f"window-pd-{epsilon.denominator}"}
    return ModelDocument(game, setup, model, meta, expected, gen)


def signal_model(high, low, noise, nature: Dict[str, Fraction]) -> WorldModel:
    """Worlds (l1, l2, s1, s2): discounts high/low, s_i is player i's signal of l_j.

    Nature draws (l1, l2) from ``nature`` (keys "HH", "HL", ...); the pair of
    correct signals has probability 1 - noise and each other pair noise / 3.
    Player i observes (l_i, s_i).
    """
    worlds, prior, labels, keys = [], [], [], []
    for l1, l2 in itertools.product("HL", repeat=2):
        for s1, s2 in itertools.product("hl", repeat=2):
            correct = s1 == l2.lower() and s2 == l1.lower()
            prior.append(nature[l1 + l2] * ((1 - noise) if correct else noise / 3))
            worlds.append((high if l1 == "H" else low, high if l2 == "H" else low))
            labels.append(f"({l1}1,{l2}2,{s1}1,{s2}2)")
            keys.append((l1 + s1, l2 + s2))
    partitions, type_labels = [], []
    for i in range(2):
        names = sorted({k[i] for k in keys})
        partitions.append([[w for w, k in enumerate(keys) if k[i] == name] for name in names])
        type_labels.append(names)
    return WorldModel.from_prior(worlds, partitions, prior, labels=labels, type_labels=type_labels)


SIGNAL_HIGH, SIGNAL_LOW = F(9, 10), F(1, 5)


def signal_uniform(noise=F(1, 50)) -> ModelDocument:
    game, setup = _agame(5)
    model = signal_model(SIGNAL_HIGH, SIGNAL_LOW, noise, {k: F(1, 4) for k in ("HH", "HL", "LH", "LL")})
    eps = format_rational(noise)
    expected = [
        {"check": "valid", "valid": True},
        {"check": "almost_strong", "epsilon": eps, "holds": True},
        {"check": "common_belief", "C": "Lambda", "threshold": format_rational(1 - noise),
         "event": "type1:Hh & type2:Hh", "K1": "type1:Hh", "K2": "type2:Hh"},
        {"check": "strong_profile", "epsilon": eps, "K1": "type1:Hh", "K2": "type2:Hh", "verdict": "equilibrium"},
        {"check": "coverage", "epsilon": eps, "delta": format_rational(3 * noise), "conditional_gap": eps},
    ]
    meta = {"title": "Noisy signals of the opponent's discount, uniform nature", "example": "signal-uniform"}
    return ModelDocument(game, setup, model, meta, expected)


def signal_skewed(noise=F(1, 50), delta=F(1, 1000), eps_prime=F(1, 100)) -> ModelDocument:
    game, setup = _agame(5)
    nature = {"HH": 1 - delta, "HL": delta / 3, "LH": delta / 3, "LL": delta / 3}
    model = signal_model(SIGNAL_HIGH, SIGNAL_LOW, noise, nature)
    expected = [
        {"check": "valid", "valid": True},
        {"check": "almost_prior", "epsilon": format_rational(noise), "delta": format_rational(noise + delta),
         "holds": True},
        {"check": "almost_strong", "epsilon": format_rational(noise), "holds": False},
        {"check": "search", "epsilon": format_rational(eps_prime), "pairs": [["none", "none"]]},
    ]
    meta = {"title": "Noisy signals, nature almost surely patient", "example": "signal-skewed",
            "parameters": {"H": "9/10", "L": "1/5", "a": 5, "delta": format_rational(delta),
                           "epsilon": format_rational(noise), "epsilon_prime": format_rational(eps_prime)}}
    return ModelDocument(game, setup, model, meta, expected)


def unknown_discount_model(p) -> WorldModel:
    """Common discount 4/5 or 2/5; signals H, L, X; X is unsure of the discount."""
    p = as_rational(p)
    hi, lo = F(4, 5), F(2, 5)
    labels = ["(4/5,H,H)", "(2/5,L,L)", "(2/5,X,L)", "(4/5,X,H)", "(2/5,L,X)", "(4/5,H,X)"]
    lam = [hi, lo, lo, hi, lo, hi]
    types_1 = [[0, 5], [1, 4], [2, 3]]
    types_2 = [[0, 3], [1, 2], [4, 5]]
    beliefs_1 = [{0: F(1)}, {1: F(1)}, {2: p, 3: 1 - p}]
    beliefs_2 = [{0: F(1)}, {1: F(1)}, {4: p, 5: 1 - p}]
    return WorldModel([(x, x) for x in lam], [types_1, types_2], [beliefs_1, beliefs_2], labels=labels,
                      type_labels=[["H", "L", "X"], ["H", "L", "X"]])


def unknown_discount(p) -> ModelDocument:
    p = as_rational(p)
    game, setup = _agame(10, n_vs_defect=-10)
    model = unknown_discount_model(p)
    K = ["type1:H | type1:X", "type2:H | type2:X"]
    boundary = F(6, 23)
    verdict = "equilibrium" if p <= boundary else "not-equilibrium"
    chk = {"check": "verify", "route": "oracle", "payoffs": "expectation", "K1": K[0], "K2": K[1], "verdict": verdict}
    if verdict != "equilibrium":
        chk["witness"] = "stage2-defect"
        chk["witness_action"] = "N"
        chk["witness_type"] = "X"
    expected = [
        {"check": "valid", "valid": True},
        {"check": "valid", "require_own_discount": True, "valid": False},
        {"check": "lambda0", "player": 1, "value": "7/9"},
        {"check": "expectation_lambda", "player": 1, "event": "type1:H"},
        chk,
    ]
    meta = {"title": f"Own discount unknown, p = {p}", "example": f"unknown-discount-{p.numerator}-{p.denominator}",
            "note": "payoffs against N other than those of N against C and D are a corpus choice (0)"}
    return ModelDocument(game, setup, model, meta, expected)


BUILDERS: Dict[str, Callable[[], ModelDocument]] = {
    "pd_grid_uniform": pd_grid_uniform,
    "pd_optimistic": pd_optimistic,
    "pd_empty_fixed_point": pd_empty_fixed_point,
    "pd_continuous_grid": pd_continuous_grid,
    "agame6_grid": agame6_grid,
    "agame5_grid": agame5_grid,
    "modified_pd": modified_pd,
    "window_pd_20": lambda: window_pd(200, F(1, 20)),
    "window_pd_100": lambda: window_pd(200, F(1, 100)),
    "signal_uniform": signal_uniform,
    "signal_skewed": signal_skewed,
    "unknown_discount_1_5": lambda: unknown_discount(F(1, 5)),
    "unknown_discount_7_25": lambda: unknown_discount(F(7, 25)),
}


# ---- files ---------------------------------------------------------------

def corpus_dir():
    return resources.files(__package__) / "corpus"


def corpus_names() -> List[str]:
    return sorted(p.name[:-5] for p in corpus_dir().iterdir() if p.name.endswith(".json"))


def resolve(path_or_name: str) -> str:
    """A file path, or the bundled file with that name (``examples/`` prefix and
    ``.json`` suffix optional)."""
    if os.path.exists(path_or_name):
        return path_or_name
    name = os.path.basename(path_or_name)
    if name.endswith(".json"):
        name = name[:-5]
    candidate = corpus_dir() / f"{name}.json"
    if candidate.is_file():
        return str(candidate)
    raise FileNotFoundError(f"no model file or bundled example named {path_or_name!r}")


def load(name: str) -> ModelDocument:
    return read_model(resolve(name))


def write_corpus(directory=None) -> List[str]:
    directory = str(directory or corpus_dir())
    os.makedirs(directory, exist_ok=True)
    written = []
    for name, build in BUILDERS.items():
        path = os.path.join(directory, f"{name}.json")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(serialize(build()))
        written.append(path)
    return written


# ---- expectations --------------------------------------------------------

@dataclass
class CheckResult:
    index: int
    check: str
    passed: bool
    detail: str


def event_names(doc: ModelDocument, lambda_events=None) -> Dict[str, Any]:
    lam = lambda_events or high_discount_events(doc.game, doc.setup, doc.model)
    names = {f"Lambda{i + 1}": ev for i, ev in enumerate(lam)}
    both = doc.model.full()
    for ev in lam:
        both = both & ev
    names["Lambda"] = both
    return names


def _type_of(model, player, key):
    return model.type_index(player, str(key) if not isinstance(key, int) else key)


def _run_one(doc: ModelDocument, chk: Dict[str, Any], names) -> (bool, str):
    game, setup, model = doc.game, doc.setup, doc.model
    kind = chk["check"]
    ev = lambda text: evaluate(text, model, names)
    eps = as_rational(chk.get("epsilon", 0))
    if kind == "valid":
        rep = validate_model(model, bool(chk.get("require_own_discount", False)))
        return rep.valid == chk["valid"], f"violations {rep.codes()}"
    if kind == "lambda0":
        got = grim_trigger_threshold(game, setup, chk["player"] - 1)
        return got == as_rational(chk["value"]), f"lambda0 = {got}"
    if kind == "threshold":
        i = chk["player"] - 1
        tt = thresholds(game, setup, model, eps).type_values(i, _type_of(model, i, chk["type"]))
        got = getattr(tt, chk["component"])
        return got == as_rational(chk["value"]), f"{chk['component']} = {got}"
    if kind == "posterior":
        got = model.posterior(chk["player"] - 1, ev(chk["event"]), chk["world"])
        return got == as_rational(chk["value"]), f"posterior = {got}"
    if kind == "verify":
        pair = CooperationPair.of(model, ev(chk["K1"]), ev(chk["K2"]))
        if chk.get("route", "formula") == "oracle":
            rep = verify_oracle(game, setup, model, pair, eps, payoffs=chk.get("payoffs", JOINT))
        else:
            rep = verify_formula(game, setup, model, pair, eps, expectation=bool(chk.get("expectation")))
        ok = rep.verdict == chk["verdict"]
        detail = f"verdict {rep.verdict}"
        if ok and "failure" in chk:
            want = chk["failure"]
            i = want["player"] - 1
            members = set(int(w) for w in model.type_members(i, _type_of(model, i, want["type"])))
            hits = [r for r in rep.failures() if r.player == i and r.world in members
                    and r.lhs == as_rational(want["lhs"]) and r.rhs == as_rational(want["rhs"])]
            ok = bool(hits)
            detail += f"; failing record {'found' if hits else 'missing'}"
        if ok and "witness" in chk:
            wits = [w for w in rep.witnesses if w.kind == chk["witness"]]
            if "witness_action" in chk:
                wits = [w for w in wits if w.action is not None
                        and game.actions[w.player][w.action] == chk["witness_action"]]
            if "witness_type" in chk:
                wits = [w for w in wits if model.type_label(w.player, model.type_of(w.player, w.world))
                        == chk["witness_type"]]
            ok = bool(wits)
            detail += f"; witness {'found' if wits else 'missing'}"
        return ok, detail
    if kind == "maximal":
        pair, rep = maximal_cooperation(game, setup, model, ev(chk["C1"]), ev(chk["C2"]), eps)
        ok = pair[0] == ev(chk["K1"]) and pair[1] == ev(chk["K2"]) and rep.verdict == chk["verdict"]
        detail = f"K = ({describe(pair[0], model, 0)}, {describe(pair[1], model, 1)}), verdict {rep.verdict}"
        if ok and "failure" in chk:
            want = chk["failure"]
            i = want["player"] - 1
            members = set(int(w) for w in model.type_members(i, _type_of(model, i, want["type"])))
            ok = any(r.player == i and r.world in members and r.lhs == as_rational(want["lhs"])
                     and r.rhs == as_rational(want["rhs"]) for r in rep.failures())
        return ok, detail
    if kind == "common_belief":
        from .belief_operators import ThresholdFunction
        if "threshold" in chk:
            f = ThresholdFunction.constant(model, as_rational(chk["threshold"]))
        else:
            f = thresholds(game, setup, model, eps).f_function()
        cb = common_f_belief(model, f, ev(chk["C"]))
        ok = cb.event == ev(chk["event"]) and cb.beliefs[0] == ev(chk["K1"]) and cb.beliefs[1] == ev(chk["K2"])
        return ok, f"D = {describe(cb.event, model)}"
    if kind == "search":
        found = exhaustive_search(game, setup, model, eps, payoffs=chk.get("payoffs", JOINT))
        got = {(p[0], p[1]) for p in found}
        want = {(ev(a), ev(b)) for a, b in chk["pairs"]}
        text = ", ".join(f"({describe(p[0], model, 0)}, {describe(p[1], model, 1)})" for p in found)
        return got == want and len(found.pairs) == len(want), f"pairs: {text}"
    if kind == "endpoints":
        i = chk["player"] - 1
        it = iterated_pair(model, thresholds(game, setup, model).f_function(), ev(chk["C1"]), ev(chk["C2"]))
        ends = [lower_endpoint(model, i, step[i]) for step in it.trace]
        ok, notes = True, []
        if "terms" in chk:
            tol = as_rational(chk["tolerance"])
            for k, want in enumerate(chk["terms"]):
                got = ends[k] if k < len(ends) else None
                good = got is not None and abs(got - as_rational(want)) <= tol
                ok &= good
                notes.append(f"{got} vs {want}{'' if good else ' (off)'}")
        final = lower_endpoint(model, i, it.pair[i])
        good = final is not None and abs(final - as_rational(chk["fixed_point"])) <= as_rational(chk["fixed_tolerance"])
        ok &= good
        notes.append(f"fixed point {final}")
        return ok, "; ".join(notes)
    if kind == "almost_strong":
        holds, _ = is_almost_complete_strong(model, eps)
        return holds == chk["holds"], f"strong = {holds}"
    if kind == "almost_prior":
        holds, mass = is_almost_complete_prior(model, eps, as_rational(chk["delta"]))
        return holds == chk["holds"], f"prior mass {mass}"
    if kind == "strong_profile":
        prof = strong_eps_profile(game, setup, model, eps)
        ok = prof.pair[0] == ev(chk["K1"]) and prof.pair[1] == ev(chk["K2"]) and prof.report.verdict == chk["verdict"]
        return ok, f"eps' = {prof.epsilon_prime}, verdict {prof.report.verdict}"
    if kind == "coverage":
        rep = coverage_bounds(model, high_discount_nature(game, setup, model), eps, as_rational(chk["delta"]))
        ok = rep.consistent()
        if "gap" in chk:
            ok &= rep.gap == as_rational(chk["gap"])
        if "conditional_gap" in chk:
            ok &= rep.conditional_gap == as_rational(chk["conditional_gap"])
        return ok, f"gap {rep.gap}, given Lambda {rep.conditional_gap}"
    if kind == "expectation_lambda":
        i = chk["player"] - 1
        got = expectation_thresholds(game, setup, model).lambda_events[i]
        return got == ev(chk["event"]), f"Lambda = {describe(got, model, i)}"
    raise ValueError(f"unknown check {kind!r}")


def run_checks(doc: ModelDocument) -> List[CheckResult]:
    names = event_names(doc)
    out = []
    for k, chk in enumerate(doc.expected):
        try:
            ok, detail = _run_one(doc, chk, names)
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append(CheckResult(k, chk["check"], bool(ok), detail))
    return out
