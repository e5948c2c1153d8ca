"""Randomised checks of the structural results (exact rationals, small models)."""

import itertools
from fractions import Fraction

import numpy as np
from hypothesis import HealthCheck, assume, example, given, settings
from hypothesis import strategies as st

from grim_belief import (CooperationPair, CooperationSetup, Event, ThresholdFunction, WorldModel, common_f_belief,
                         constants_epsilon_bound, coverage_bounds, evaluate, f_belief, grim_trigger_threshold,
                         high_discount_nature, is_almost_complete_prior, iterated_pair, slack_constants,
                         multi_player_sufficient, parse, parse_model, prisoners_dilemma, serialize, thresholds,
                         to_text, two_action_shortcut, verify_formula, verify_oracle)
from grim_belief.belief_space import lambda_event
from grim_belief.model_io import ModelDocument
from grim_belief.thresholds import Moments, type_thresholds
from strategies import DISCOUNTS, games, measurable_pairs, models, threshold_functions

PROPERTY = settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def lam_pair(game, setup, model):
    return [lambda_event(model, i, grim_trigger_threshold(game, setup, i)) for i in range(2)]


# (a) ---------------------------------------------------------------------

@PROPERTY
@given(st.data())
def test_formula_and_oracle_agree(data):
    game, setup = data.draw(games())
    model = data.draw(models())
    eps = data.draw(st.sampled_from([Fraction(0), Fraction(1, 20), Fraction(1, 5)]))
    pair = CooperationPair.of(model, *data.draw(measurable_pairs(model)))
    formula = verify_formula(game, setup, model, pair, eps)
    oracle = verify_oracle(game, setup, model, pair, eps)
    if formula.verdict == "outside-theorem-scope":
        assert eps > 0
        return
    assert formula.verdict == oracle.verdict


@PROPERTY
@given(st.data())
def test_formula_and_oracle_agree_inside_lambda(data):
    game, setup = data.draw(games())
    model = data.draw(models())
    eps = data.draw(st.fractions(min_value=0, max_value=Fraction(1, 2), max_denominator=40))
    lam = lam_pair(game, setup, model)
    K = data.draw(measurable_pairs(model))
    pair = CooperationPair.of(model, K[0] & lam[0], K[1] & lam[1])
    assert verify_formula(game, setup, model, pair, eps).verdict == verify_oracle(game, setup, model, pair, eps).verdict


# (b) ---------------------------------------------------------------------

def random_event(data, model):
    return Event(np.array(data.draw(st.lists(st.booleans(), min_size=model.n, max_size=model.n)), dtype=bool))


@PROPERTY
@given(st.data())
def test_belief_operator_laws(data):
    model = data.draw(models())
    f = data.draw(threshold_functions(model))
    E, F = random_event(data, model), random_event(data, model)
    for i in range(2):
        BE, BF = f_belief(model, i, f, E), f_belief(model, i, f, F)
        # monotone
        assert f_belief(model, i, f, E & F).issubset(BE & BF)
        assert (BE | BF).issubset(f_belief(model, i, f, E | F))
        # idempotent when every threshold is positive
        positive = ThresholdFunction(model, [[max(v, Fraction(1, 7)) for v in f.type_values(k)] for k in range(2)])
        BP = f_belief(model, i, positive, E)
        assert f_belief(model, i, positive, BP) == BP
        # conjunction with an i-measurable event
        own = model.type_event(i, [t for t in range(model.type_count(i)) if data.draw(st.booleans())])
        assert f_belief(model, i, positive, own & F) == own & f_belief(model, i, positive, F)
        # certainty distributes over intersections
        one = ThresholdFunction.constant(model, 1)
        assert f_belief(model, i, one, E & F) == f_belief(model, i, one, E) & f_belief(model, i, one, F)


@PROPERTY
@given(st.data())
def test_common_belief_is_evident(data):
    model = data.draw(models())
    f = data.draw(threshold_functions(model))
    C = random_event(data, model)
    D = common_f_belief(model, f, C).event
    everyone = f_belief(model, 0, f, D) & f_belief(model, 1, f, D)
    if f.all_positive():
        assert D.issubset(everyone)


# (c) ---------------------------------------------------------------------

@PROPERTY
@given(st.data())
def test_iterated_pair_is_the_largest_admissible_pair(data):
    model = data.draw(models())
    f = data.draw(threshold_functions(model))
    C = data.draw(measurable_pairs(model))
    it = iterated_pair(model, f, *C)
    D = it.pair
    for i in range(2):
        assert D[i].issubset(C[i])
        assert D[i].issubset(f_belief(model, i, f, D[1 - i]))
    counts = [model.type_count(i) for i in range(2)]
    subsets = [[model.type_event(i, [t for t in range(counts[i]) if bits >> t & 1])
                for bits in range(1 << counts[i])] for i in range(2)]
    subsets = [[e for e in s if e.issubset(C[i])] for i, s in enumerate(subsets)]
    for E1, E2 in itertools.product(*subsets):
        if E1.issubset(f_belief(model, 0, f, E2)) and E2.issubset(f_belief(model, 1, f, E1)):
            assert E1.issubset(D[0]) and E2.issubset(D[1])


# (d) ---------------------------------------------------------------------

@PROPERTY
@given(st.data())
def test_two_action_reduction(data):
    game, setup = data.draw(games(max_actions=2))
    for i in range(2):
        v = setup.view(i)
        lam0 = grim_trigger_threshold(game, setup, i)
        for lam in DISCOUNTS:
            tt = type_thresholds(v, Moments.point(lam))
            assert tt.g1 == 1
            if lam >= lam0:
                assert tt.g2 == tt.f
                assert tt.f <= tt.g3


@PROPERTY
@given(st.data())
def test_two_action_shortcut_matches_oracle(data):
    game, setup = data.draw(games(max_actions=2))
    model = data.draw(models())
    pair = CooperationPair.of(model, *data.draw(measurable_pairs(model)))
    short = two_action_shortcut(game, setup, model, pair)
    assert short is not None
    assert short == verify_oracle(game, setup, model, pair).is_equilibrium


# (e) ---------------------------------------------------------------------

@PROPERTY
@given(st.data())
def test_slack_constants(data):
    game, setup = data.draw(games())
    model = data.draw(models())
    i = data.draw(st.integers(0, 1))
    M, N = slack_constants(setup, i)
    bound = constants_epsilon_bound(game, setup, model, i)
    assert bound > 0
    eps = bound * data.draw(st.fractions(min_value=Fraction(1, 100), max_value=Fraction(99, 100), max_denominator=100))
    lam0 = grim_trigger_threshold(game, setup, i)
    bundle = thresholds(game, setup, model, eps)
    for t in range(model.type_count(i)):
        tt = bundle.type_values(i, t)
        if model.type_discount(i, t) >= lam0:
            assert tt.f < 1 - eps / M
        assert tt.g > eps / N


# (f) ---------------------------------------------------------------------

@st.composite
def coverage_instances(draw):
    game, setup = draw(games())
    model = draw(models(common_prior=True))
    eps = draw(st.fractions(min_value=0, max_value=Fraction(1, 2), max_denominator=20))
    _, mass = is_almost_complete_prior(model, eps, 1)
    slack = draw(st.one_of(st.just(Fraction(0)), st.fractions(min_value=0, max_value=Fraction(1, 4),
                                                              max_denominator=20)))
    delta = 1 - mass + slack
    assume(0 < delta < 1)
    return game, setup, model, eps, delta


def boundary_instance():
    """Player 2 cannot tell a patient world (prior 1/4) from an impatient one."""
    game = prisoners_dilemma()
    setup = CooperationSetup.pure(game, ("D", "D"), ("C", "C"))
    model = WorldModel.from_prior([(Fraction(2, 5), Fraction(3, 5)), (Fraction(1, 10), Fraction(3, 5))],
                                  [[[0], [1]], [[0, 1]]], [Fraction(1, 4), Fraction(3, 4)])
    return game, setup, model, Fraction(7, 15), Fraction(1, 4)


def _coverage(instance):
    game, setup, model, eps, delta = instance
    holds, _ = is_almost_complete_prior(model, eps, delta)
    assert holds
    return coverage_bounds(model, high_discount_nature(game, setup, model), eps, delta), delta


@PROPERTY
@given(coverage_instances())
@example(boundary_instance())
def test_prior_coverage_strict(instance):
    cov, delta = _coverage(instance)
    assert cov.gap < delta


@PROPERTY
@given(coverage_instances())
@example(boundary_instance())
def test_prior_coverage_weak(instance):
    cov, delta = _coverage(instance)
    assert cov.gap <= delta


# (g) ---------------------------------------------------------------------

@PROPERTY
@given(st.data())
def test_sufficient_conditions_imply_equilibrium(data):
    game, setup = data.draw(games())
    model = data.draw(models())
    lam = lam_pair(game, setup, model)
    K = data.draw(measurable_pairs(model))
    K = [K[0] & lam[0], K[1] & lam[1]]
    rep = multi_player_sufficient(game, setup, model, K)
    if rep.sufficient:
        assert verify_oracle(game, setup, model, CooperationPair.of(model, *K)).is_equilibrium


# other invariants --------------------------------------------------------

@PROPERTY
@given(st.data())
def test_equilibria_survive_larger_epsilon(data):
    game, setup = data.draw(games())
    model = data.draw(models())
    pair = CooperationPair.of(model, *data.draw(measurable_pairs(model)))
    e1 = data.draw(st.fractions(min_value=0, max_value=1, max_denominator=10))
    e2 = e1 + data.draw(st.fractions(min_value=0, max_value=1, max_denominator=10))
    if verify_oracle(game, setup, model, pair, e1).is_equilibrium:
        assert verify_oracle(game, setup, model, pair, e2).is_equilibrium


@PROPERTY
@given(st.data())
def test_thresholds_move_monotonically_in_epsilon(data):
    game, setup = data.draw(games())
    lam = data.draw(st.sampled_from(DISCOUNTS))
    e1 = data.draw(st.fractions(min_value=0, max_value=1, max_denominator=10))
    e2 = e1 + data.draw(st.fractions(min_value=0, max_value=1, max_denominator=10))
    for i in range(2):
        a = type_thresholds(setup.view(i), Moments.point(lam), e1)
        b = type_thresholds(setup.view(i), Moments.point(lam), e2)
        assert b.f <= a.f
        assert b.g >= a.g


@PROPERTY
@given(st.data())
def test_one_sided_cooperation_never_survives(data):
    game, setup = data.draw(games())
    model = data.draw(models())
    K = data.draw(measurable_pairs(model))
    i = data.draw(st.integers(0, 1))
    K[i] = model.empty()
    pair = CooperationPair.of(model, *K)
    if verify_oracle(game, setup, model, pair).is_equilibrium:
        assert not len(K[1 - i])


def event_trees(max_leaves=6):
    atoms = st.one_of(
        st.sampled_from(["all", "none", "Lambda1", "Lambda2", "Lambda"]),
        st.builds(lambda p, op, v: f"l{p}{op}{v}", st.integers(1, 2), st.sampled_from(["<", "<=", ">", ">=", "==", "!="]),
                  st.sampled_from(["0", "1/4", "1/2", "2/3", "9/10"])),
        st.builds(lambda ws: "{" + ",".join(map(str, ws)) + "}", st.lists(st.integers(0, 5), max_size=4)),
        st.builds(lambda p, t: f"type{p}:{t}", st.integers(1, 2), st.integers(0, 2)),
    )
    return st.recursive(atoms, lambda sub: st.one_of(
        st.builds(lambda a: f"!{a}", sub),
        st.builds(lambda a, b: f"({a} & {b})", sub, sub),
        st.builds(lambda a, b: f"({a} | {b})", sub, sub),
    ), max_leaves=max_leaves)


@PROPERTY
@given(event_trees())
def test_event_text_round_trip(text):
    tree = parse(text)
    assert parse(to_text(tree)) == tree
    assert to_text(parse(to_text(tree))) == to_text(tree)


@PROPERTY
@given(st.data())
def test_event_algebra_matches_sets(data):
    model = data.draw(models())
    a = data.draw(st.sets(st.integers(0, model.n - 1)))
    b = data.draw(st.sets(st.integers(0, model.n - 1)))
    ta, tb = "{" + ",".join(map(str, sorted(a))) + "}", "{" + ",".join(map(str, sorted(b))) + "}"
    full = set(range(model.n))
    assert set(evaluate(f"{ta} & !{tb}", model)) == a - b
    assert set(evaluate(f"!({ta} | {tb})", model)) == full - (a | b)


@PROPERTY
@given(st.data())
def test_model_document_round_trip(data):
    game, setup = data.draw(games())
    model = data.draw(models())
    doc = ModelDocument(game, setup, model, {"title": "random"}, [{"check": "valid", "valid": True}])
    text = serialize(doc)
    again = parse_model(text)
    assert serialize(again) == text
    assert again.game == game
    assert again.setup.tau == setup.tau
    assert [again.model.belief(i, t) for i in range(2) for t in range(again.model.type_count(i))] == \
           [model.belief(i, t) for i in range(2) for t in range(model.type_count(i))]
