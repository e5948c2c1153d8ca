"""Acceptance criteria; a summary line per criterion is printed after the run.

Criterion 13 is the property suite in test_properties.py. Run this file
directly to execute both.
"""

import os
import sys
import time
from fractions import Fraction as F

import pytest

from grim_belief import (CooperationPair, corpus, evaluate, exhaustive_search, grim_trigger_threshold,
                         lambda_event, maximal_cooperation, verify_formula, verify_oracle)
from grim_belief.almost_complete import coverage_bounds, high_discount_nature, is_almost_complete_strong, \
    strong_eps_profile
from grim_belief.belief_operators import common_f_belief, iterated_pair, lower_endpoint
from grim_belief.oracle import EXPECTATION
from grim_belief.reports import EQUILIBRIUM, NOT_EQUILIBRIUM, OUTSIDE_SCOPE, STAGE2_DEFECT
from grim_belief.simulate import SimConfig, crosscheck, simulate_payoff
from grim_belief.thresholds import thresholds


def lam(doc):
    game, setup, model = doc.game, doc.setup, doc.model
    return tuple(lambda_event(model, i, grim_trigger_threshold(game, setup, i)) for i in range(2))


def pairs_of(found):
    return {(p[0], p[1]) for p in found}


def test_criterion_01_pd_thresholds(docs):
    doc = docs("pd_grid_uniform")
    assert grim_trigger_threshold(doc.game, doc.setup, 0) == F(1, 3)
    assert grim_trigger_threshold(doc.game, doc.setup, 1) == F(1, 3)
    b = thresholds(doc.game, doc.setup, doc.model)
    t = {doc.model.type_discount(0, k): b.type_values(0, k) for k in range(3)}
    assert t[F(1, 2)].f == F(1, 2)
    assert t[F(3, 4)].f == F(1, 6)


def test_criterion_02_uniform_grid_maximal_and_search(docs):
    doc = docs("pd_grid_uniform")
    model = doc.model
    L1, L2 = lam(doc)
    start = time.perf_counter()
    pair, rep = maximal_cooperation(doc.game, doc.setup, model, L1, L2)
    assert (pair[0], pair[1]) == (L1, L2) and rep.verdict == EQUILIBRIUM
    found = exhaustive_search(doc.game, doc.setup, model)
    assert found.candidates == 64
    high = (evaluate("l1>=3/4", model), evaluate("l2>=3/4", model))
    assert pairs_of(found) == {(L1, L2), high, (model.empty(), model.empty())}
    assert len(found) == 3
    assert time.perf_counter() - start < 1


def test_criterion_03_optimistic_beliefs(docs):
    doc = docs("pd_optimistic")
    model = doc.model
    pair = CooperationPair.of(model, evaluate("l1>=3/4", model), evaluate("l2>=3/4", model))
    rep = verify_formula(doc.game, doc.setup, model, pair)
    assert rep.verdict == NOT_EQUILIBRIUM
    bad = [r for r in rep.failures() if r.player == 0]
    assert bad and all(r.lhs == F(2, 3) and r.rhs == F(1, 2) for r in bad)
    assert {model.discount(0, r.world) for r in bad} == {F(1, 2)}
    L1, L2 = lam(doc)
    assert pairs_of(exhaustive_search(doc.game, doc.setup, model)) == {(L1, L2), (model.empty(), model.empty())}


def test_criterion_04_empty_common_belief(docs):
    doc = docs("pd_empty_fixed_point")
    model = doc.model
    L1, L2 = lam(doc)
    f = thresholds(doc.game, doc.setup, model).f_function()
    cb = common_f_belief(model, f, L1 & L2)
    assert cb.event == model.empty()
    assert cb.beliefs == (model.empty(), model.empty())
    it = iterated_pair(model, f, L1, L2)
    assert it.pair == (model.empty(), model.empty())


def test_criterion_05_continuous_grid_endpoints(docs):
    doc = docs("pd_continuous_grid")
    model = doc.model
    step = F(1, 1000)
    start = time.perf_counter()
    L1, L2 = lam(doc)
    it = iterated_pair(model, thresholds(doc.game, doc.setup, model).f_function(), L1, L2)
    want = [F(2 ** k - 1, 2 ** (k + 1) - 1) for k in range(1, 6)]
    off = []
    for i in range(2):
        ends = [lower_endpoint(model, i, step_pair[i]) for step_pair in it.trace]
        for k, w in enumerate(want):
            if k >= len(ends) or ends[k] is None or abs(ends[k] - w) > step:
                off.append((i + 1, k + 1, ends[k] if k < len(ends) else None, w))
        assert abs(lower_endpoint(model, i, it.pair[i]) - F(1, 2)) <= 2 * step
    assert time.perf_counter() - start < 30
    assert not off, f"terms off by more than one grid step (player, term, got, want): {off}"


def test_criterion_06_agame_values():
    from grim_belief import CooperationSetup, punishment_game
    from grim_belief.thresholds import Moments, type_thresholds
    g6 = punishment_game(6)
    s6 = CooperationSetup.pure(g6, ("D", "D"), ("C", "C"))
    assert grim_trigger_threshold(g6, s6, 0) == F(3, 5)
    tt = type_thresholds(s6.view(0), Moments.point(F(3, 5)))
    assert tt.g1 == F(1, 3) == F(1, 6 - 3)
    assert tt.g3 == F(1, 3)
    g5 = punishment_game(5)
    s5 = CooperationSetup.pure(g5, ("D", "D"), ("C", "C"))
    assert grim_trigger_threshold(g5, s5, 0) == F(1, 2)
    assert type_thresholds(s5.view(0), Moments.point(F(1, 4))).g1 == F(1, 5 - 3)


def test_criterion_07_agame5_grid(docs):
    doc = docs("agame5_grid")
    model = doc.model
    high = CooperationPair.of(model, evaluate("l1>=3/4", model), evaluate("l2>=3/4", model))
    assert verify_formula(doc.game, doc.setup, model, high).verdict == EQUILIBRIUM
    assert verify_oracle(doc.game, doc.setup, model, high).verdict == EQUILIBRIUM
    rep = verify_formula(doc.game, doc.setup, model, CooperationPair.of(model, *lam(doc)))
    assert rep.verdict == NOT_EQUILIBRIUM
    bad = [r for r in rep.failures() if r.player == 0]
    assert bad and all(r.condition == "punish-g" and r.lhs == F(2, 3) and r.rhs == F(1, 2) for r in bad)
    assert {model.discount(0, r.world) for r in bad} == {F(1, 4)}
    b = thresholds(doc.game, doc.setup, model)
    assert b.at(0, bad[0].world).g_component == "g1"


def test_criterion_08_modified_pd(docs):
    doc = docs("modified_pd")
    model = doc.model
    pair = CooperationPair.of(model, model.full(), lam(doc)[1])
    assert verify_oracle(doc.game, doc.setup, model, pair).verdict == EQUILIBRIUM
    assert verify_formula(doc.game, doc.setup, model, pair).verdict == OUTSIDE_SCOPE


def test_criterion_09_skewed_signals(docs):
    doc = docs("signal_skewed")
    model = doc.model
    H, L, eps_prime = F(9, 10), F(1, 5), F(1, 100)
    b = thresholds(doc.game, doc.setup, model, eps_prime)
    for i in range(2):
        for t in range(model.type_count(i)):
            tt = b.type_values(i, t)
            if model.type_discount(i, t) == L:
                assert tt.g < 1
            if model.type_discount(i, t) == H:
                assert tt.f > 0
    assert eps_prime < 1 - 2 * L / (1 - L)
    start = time.perf_counter()
    found = exhaustive_search(doc.game, doc.setup, model, eps_prime)
    assert pairs_of(found) == {(model.empty(), model.empty())}
    assert time.perf_counter() - start < 5


def test_criterion_10_strong_almost_complete(docs):
    doc = docs("signal_uniform")
    model, eps = doc.model, F(1, 50)
    assert is_almost_complete_strong(model, eps)[0]
    prof = strong_eps_profile(doc.game, doc.setup, model, eps)
    assert prof.pair[0] == evaluate("type1:Hh", model)
    assert prof.pair[1] == evaluate("type2:Hh", model)
    assert verify_oracle(doc.game, doc.setup, model, prof.pair, prof.epsilon_prime).verdict == EQUILIBRIUM
    rep = coverage_bounds(model, high_discount_nature(doc.game, doc.setup, model), eps, 3 * eps)
    # the stated value is the loss given Lambda; the unconditional loss scales with P(Lambda) = 1/4
    assert rep.conditional_gap == eps
    assert rep.gap == eps / 4


def unknown_pair(model):
    return CooperationPair.of(model, evaluate("type1:H | type1:X", model), evaluate("type2:H | type2:X", model))


def test_criterion_11_unknown_own_discount():
    for p, verdict in [(F(1, 5), EQUILIBRIUM), (F(7, 25), NOT_EQUILIBRIUM),
                       (F(6, 23), EQUILIBRIUM), (F(6, 23) + F(1, 10 ** 6), NOT_EQUILIBRIUM)]:
        doc = corpus.unknown_discount(p)
        model = doc.model
        rep = verify_oracle(doc.game, doc.setup, model, unknown_pair(model), payoffs=EXPECTATION)
        assert rep.verdict == verdict, p
        if verdict == NOT_EQUILIBRIUM:
            x = [w for w in rep.witnesses if w.kind == STAGE2_DEFECT
                 and doc.game.actions[w.player][w.action] == "N"
                 and model.type_label(w.player, model.type_of(w.player, w.world)) == "X"]
            assert x, rep.witnesses


@pytest.mark.parametrize("eps", [F(1, 20), F(1, 100)])
def test_criterion_12_window_beliefs(eps, docs):
    doc = docs(f"window_pd_{eps.denominator}")
    model = doc.model
    start = time.perf_counter()
    pair, rep = maximal_cooperation(doc.game, doc.setup, model, *lam(doc))
    for i in range(2):
        assert abs(lower_endpoint(model, i, pair[i]) - F(1, 2)) <= F(2, 200)
    assert time.perf_counter() - start < 30


def test_criterion_14_simulation_crosscheck(docs):
    doc = docs("pd_grid_uniform")
    model = doc.model
    pair = CooperationPair.of(model, *lam(doc))
    cfg = SimConfig.for_tolerance(doc.game, model, F(1, 10 ** 6), samples=10_000, seed=0)
    rep = crosscheck(doc.game, doc.setup, model, pair, cfg)
    assert rep.passed, [c.to_json(doc.game) for c in rep.failures()]
    exact_cfg = SimConfig(cfg.horizon, 1, 0, cfg.tail_tolerance, enumerate=True)
    exact = crosscheck(doc.game, doc.setup, model, pair, exact_cfg)
    assert exact.passed
    for c in exact.cells:
        est = simulate_payoff(doc.game, doc.setup, model, pair, c.world, c.player,
                              None if c.kind == "conform" else _descriptor(c), exact_cfg)
        assert 0 <= c.analytic - est.exact <= cfg.tail_tolerance
        assert abs(float(est.exact) + est.tail - float(c.analytic)) < 1e-12


def _descriptor(cell):
    from grim_belief.reports import DeviationDescriptor
    return DeviationDescriptor(cell.kind, cell.action, cell.world, cell.player, F(0), cell.delay)


if __name__ == "__main__":
    here = os.path.dirname(os.path.abspath(__file__))
    sys.exit(pytest.main([os.path.join(here, "test_acceptance.py"), os.path.join(here, "test_properties.py"),
                          "-q", "-p", "no:cacheprovider"]))
