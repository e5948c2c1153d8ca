import math
from fractions import Fraction as F

import pytest

from grim_belief import CooperationSetup, expectation_thresholds, prisoners_dilemma, punishment_game, thresholds
from grim_belief.errors import PreconditionError
from grim_belief.thresholds import Moments, type_moments, type_thresholds
from conftest import single_world


def pd_f_by_hand(lam, eps=0):
    # one deviation D: b = u(D,D) - u(C,D) = 1, X = 3/(1-l) - 4 - 1 * l/(1-l)
    X = F(3) / (1 - lam) - 4 - lam / (1 - lam)
    return (1 - F(eps)) / (X + 1)


def agame_by_hand(a, lam):
    # sigma = (D, D), tau = (C, C); N pays a against C and 0 against D
    c = 1
    g1 = F(1, a - 3)
    E_N = 3 - 4 + (a - 1) * lam
    E_D = 3 - 4 + 3 * lam
    g3 = min(F(c) / (c + E) for E in (E_N, E_D) if E > 0) if max(E_N, E_D) > 0 else F(1)
    X_D = F(3) / (1 - lam) - 4 - lam / (1 - lam)
    f = F(1) / (X_D + 1)
    return f, g1, g3


def pd_setup():
    game = prisoners_dilemma()
    return game, CooperationSetup.pure(game, ("D", "D"), ("C", "C"))


def agame(a):
    game = punishment_game(a)
    return game, CooperationSetup.pure(game, ("D", "D"), ("C", "C"))


@pytest.mark.parametrize("lam", [F(1, 3), F(1, 2), F(2, 3), F(3, 4), F(9, 10)])
def test_pd_f_matches_hand_formula(lam):
    game, setup = pd_setup()
    tt = type_thresholds(setup.view(0), Moments.point(lam))
    assert tt.f == pd_f_by_hand(lam)
    assert type_thresholds(setup.view(0), Moments.point(lam), F(1, 10)).f == pd_f_by_hand(lam, F(1, 10))


def test_pd_paper_values():
    game, setup = pd_setup()
    assert type_thresholds(setup.view(0), Moments.point(F(1, 2))).f == F(1, 2)
    assert type_thresholds(setup.view(0), Moments.point(F(3, 4))).f == F(1, 6)
    assert type_thresholds(setup.view(0), Moments.point(F(2, 5))).f == F(3, 4)


def test_pd_two_actions_have_no_g1():
    game, setup = pd_setup()
    tt = type_thresholds(setup.view(0), Moments.point(F(1, 2)))
    assert tt.g1 == 1 and tt.g1_action is None
    assert tt.g2 == tt.f == F(1, 2)
    assert tt.g == F(1, 2) and tt.g_component == "g2"


@pytest.mark.parametrize("a, lam", [(6, F(3, 5)), (6, F(4, 5)), (5, F(1, 2)), (5, F(3, 4)), (10, F(4, 5))])
def test_agame_components_match_hand_formulas(a, lam):
    game, setup = agame(a)
    f, g1, g3 = agame_by_hand(a, lam)
    tt = type_thresholds(setup.view(0), Moments.point(lam))
    assert (tt.f, tt.g1, tt.g3) == (f, g1, g3)


def test_agame6_paper_values():
    game, setup = agame(6)
    tt = type_thresholds(setup.view(0), Moments.point(F(3, 5)))
    assert tt.g1 == F(1, 3) == F(1, 6 - 3)
    assert tt.g3 == F(1, 3)
    assert tt.f == F(1, 3)
    assert game.actions[0][tt.g1_action] == "N"


def test_f_is_infinite_when_unreachable():
    game, setup = pd_setup()
    tt = type_thresholds(setup.view(0), Moments.point(F(1, 4)))
    # below the grim-trigger discount the cooperation margin is negative
    assert tt.f > 1
    assert type_thresholds(setup.view(0), Moments.point(0)).f == math.inf or type_thresholds(
        setup.view(0), Moments.point(0)).f > 1


def test_bundle_requires_known_discount():
    from grim_belief.corpus import unknown_discount_model
    game, setup = agame(10)
    model = unknown_discount_model(F(1, 5))
    with pytest.raises(PreconditionError):
        thresholds(game, setup, model)


def test_expectation_moments():
    from grim_belief.corpus import unknown_discount_model
    model = unknown_discount_model(F(1, 5))
    m = type_moments(model, 0, 2)   # X type: 2/5 with 1/5, 4/5 with 4/5
    assert m.lam == F(1, 5) * F(2, 5) + F(4, 5) * F(4, 5)
    assert m.inv == F(1, 5) / F(3, 5) + F(4, 5) / F(1, 5)
    assert m.ratio == m.inv - 1


def test_expectation_lambda_event():
    from grim_belief.corpus import unknown_discount_model
    game = punishment_game(10, n_vs_defect=-10)
    setup = CooperationSetup.pure(game, ("D", "D"), ("C", "C"))
    model = unknown_discount_model(F(1, 5))
    lam = expectation_thresholds(game, setup, model).lambda_events
    assert model.types_in(0, lam[0]) == (0,)


def test_bundle_lookup_by_world():
    game, setup = pd_setup()
    model = single_world(F(1, 2), F(3, 4))
    b = thresholds(game, setup, model)
    assert b.at(0, 0).f == F(1, 2)
    assert b.at(1, 0).f == F(1, 6)
    assert b.f_function().value(1, 0) == F(1, 6)
    assert b.complement_g_function().value(0, 0) == F(1, 2)
