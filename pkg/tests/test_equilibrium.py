from fractions import Fraction as F

import pytest

from grim_belief import (CooperationPair, CooperationSetup, corpus, exhaustive_search, lambda_event,
                         maximal_cooperation, multi_player_sufficient, prisoners_dilemma, punishment_game,
                         verify_formula, verify_oracle)
from grim_belief.equilibrium import constants_epsilon_bound, slack_constants, two_action_shortcut
from grim_belief.errors import PreconditionError
from grim_belief.reports import ADOPT_GRIM, EQUILIBRIUM, NOT_EQUILIBRIUM, OUTSIDE_SCOPE, STAGE1_DEVIATE
from conftest import single_world


def lam_pair(model, cut=F(1, 3)):
    return CooperationPair.of(model, lambda_event(model, 0, cut), lambda_event(model, 1, cut))


@pytest.mark.parametrize("l1, l2, verdict", [
    (F(1, 2), F(1, 2), EQUILIBRIUM),
    (F(9, 10), F(1, 3), EQUILIBRIUM),
])
def test_complete_information_cooperation(pd, l1, l2, verdict):
    game, setup = pd
    model = single_world(l1, l2)
    pair = CooperationPair.of(model, model.full(), model.full())
    assert verify_formula(game, setup, model, pair).verdict == verdict
    assert verify_oracle(game, setup, model, pair).verdict == verdict


def test_impatient_cooperation_fails_on_both_routes(pd):
    game, setup = pd
    model = single_world(F(1, 4), F(1, 2))
    pair = CooperationPair.of(model, model.full(), model.full())
    formula = verify_formula(game, setup, model, pair)
    oracle = verify_oracle(game, setup, model, pair)
    assert formula.verdict == oracle.verdict == NOT_EQUILIBRIUM
    # defecting at stage 1 against a cooperator: 4 + 1/3 vs 3 / (3/4) = 4
    assert max(w.gain for w in oracle.witnesses if w.player == 0) == F(1, 3)
    assert any(w.kind == STAGE1_DEVIATE and w.player == 0 for w in formula.witnesses)


def test_one_sided_cooperation_fails(pd):
    game, setup = pd
    model = single_world(F(1, 2), F(1, 2))
    pair = CooperationPair.of(model, model.full(), model.empty())
    assert verify_formula(game, setup, model, pair).verdict == NOT_EQUILIBRIUM
    assert verify_oracle(game, setup, model, pair).verdict == NOT_EQUILIBRIUM


def test_optimistic_punisher_prefers_grim(docs):
    doc = docs("pd_optimistic")
    model = doc.model
    high = lambda_event(model, 0, F(3, 4)), lambda_event(model, 1, F(3, 4))
    pair = CooperationPair.of(model, *high)
    rep = verify_formula(doc.game, doc.setup, model, pair)
    assert rep.verdict == NOT_EQUILIBRIUM
    # type 1/2 puts 2/3 on the 3/4 opponent.
    # punishing: 2/3 (4 + 1) + 1/3 * 2 = 4; grim trigger: 2/3 * 6 + 1/3 * 1 = 13/3
    wit = [w for w in rep.witnesses if w.player == 0]
    assert len(wit) == 1 and wit[0].kind == ADOPT_GRIM and wit[0].gain == F(1, 3)
    assert model.discount(0, wit[0].world) == F(1, 2)
    oracle = verify_oracle(doc.game, doc.setup, model, pair)
    assert oracle.verdict == NOT_EQUILIBRIUM
    assert max(w.gain for w in oracle.witnesses if w.player == 0) == F(1, 3)


def test_uniform_grid_lambda_pair(docs):
    doc = docs("pd_grid_uniform")
    pair = lam_pair(doc.model)
    assert verify_formula(doc.game, doc.setup, doc.model, pair).is_equilibrium
    assert verify_oracle(doc.game, doc.setup, doc.model, pair).is_equilibrium
    assert two_action_shortcut(doc.game, doc.setup, doc.model, pair) is True


def test_epsilon_outside_lambda_is_out_of_scope(pd):
    game, setup = pd
    model = single_world(F(1, 4), F(1, 2))
    pair = CooperationPair.of(model, model.full(), model.full())
    assert verify_formula(game, setup, model, pair, F(1, 100)).verdict == OUTSIDE_SCOPE
    # the oracle still decides it: the gain 1/3 exceeds 1/100 but not 1/2
    assert verify_oracle(game, setup, model, pair, F(1, 100)).verdict == NOT_EQUILIBRIUM
    assert verify_oracle(game, setup, model, pair, F(1, 2)).verdict == EQUILIBRIUM


def test_tau_best_response_is_out_of_formula_scope():
    # C is a best response to D here, so tau_1 = C is a best response to sigma_2
    from grim_belief import StageGame
    game = StageGame.from_table([["D", "C"], ["D", "C"]],
                                [[[1, 1], [4, 1]], [[1, 4], [3, 3]]])
    setup = CooperationSetup.pure(game, ("D", "D"), ("C", "C"))
    model = single_world(F(1, 2), F(1, 2))
    pair = CooperationPair.of(model, model.full(), model.full())
    assert verify_formula(game, setup, model, pair).verdict == OUTSIDE_SCOPE
    assert verify_oracle(game, setup, model, pair).verdict in (EQUILIBRIUM, NOT_EQUILIBRIUM)


def test_formula_requires_known_discount():
    doc = corpus.unknown_discount(F(1, 5))
    pair = CooperationPair.of(doc.model, doc.model.empty(), doc.model.empty())
    with pytest.raises(PreconditionError):
        verify_formula(doc.game, doc.setup, doc.model, pair)
    assert verify_formula(doc.game, doc.setup, doc.model, pair, expectation=True).verdict in (
        EQUILIBRIUM, NOT_EQUILIBRIUM, OUTSIDE_SCOPE)


def test_maximal_cooperation_unravels(docs):
    doc = docs("pd_empty_fixed_point")
    model = doc.model
    C = lam_pair(model)
    pair, rep = maximal_cooperation(doc.game, doc.setup, model, C[0], C[1])
    assert pair[0] == model.empty() and pair[1] == model.empty()
    assert rep.is_equilibrium
    assert rep.flags["common_belief_agrees"]
    assert rep.details["iteration"].steps == 1


def test_maximal_cooperation_rejects_start_outside_lambda(pd):
    game, setup = pd
    model = single_world(F(1, 4), F(1, 2))
    with pytest.raises(PreconditionError):
        maximal_cooperation(game, setup, model, model.full(), model.full())


def test_search_cap_and_result(docs):
    doc = docs("pd_optimistic")
    found = exhaustive_search(doc.game, doc.setup, doc.model)
    assert found.candidates == 64
    assert [p.size() for p in found] == [12, 0]
    with pytest.raises(PreconditionError):
        exhaustive_search(doc.game, doc.setup, doc.model, cap=2)


def test_slack_constants_by_hand():
    pd = prisoners_dilemma()
    setup = CooperationSetup.pure(pd, ("D", "D"), ("C", "C"))
    # c = u(D,D) - u(C,D) = 1; the only deviation against C is D, the sigma action itself
    assert slack_constants(setup, 0) == (2, 2)
    game = punishment_game(6)
    setup6 = CooperationSetup.pure(game, ("D", "D"), ("C", "C"))
    # N against C pays 6, two more than D against C
    assert slack_constants(setup6, 0) == (2, 4)
    model = single_world(F(3, 4), F(3, 4))
    assert 0 < constants_epsilon_bound(game, setup6, model, 0) <= 2


def test_payoff_bound_conditions(docs):
    pd_game = prisoners_dilemma()
    setup = CooperationSetup.pure(pd_game, ("D", "D"), ("C", "C"))
    model = single_world(F(9, 10), F(9, 10))
    rep = multi_player_sufficient(pd_game, setup, model, [model.full(), model.full()])
    assert rep.sufficient and rep.constants[0] == 4
    # with M = 4 the cooperating bound at 9/10 is 8 / (17 + 8)
    assert {r.rhs for r in rep.records} == {F(8, 25)}
    doc = docs("pd_grid_uniform")
    lam = lam_pair(doc.model)
    weak = multi_player_sufficient(doc.game, doc.setup, doc.model, [lam[0], lam[1]])
    # the pair is an equilibrium but 2/3 < 8/9 at the 1/2 type: the bound is only sufficient
    assert not weak.sufficient
    assert any(r.lhs == F(2, 3) and r.rhs == F(8, 9) for r in weak.records if not r.passed)
