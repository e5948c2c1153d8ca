"""
Cooperation on a small grid of discount factors
===============================================

Each player's discount factor is 1/4, 1/2 or 3/4 and each believes the
opponent's value is uniform on the grid. Which conditional grim-trigger
profiles are equilibria?
"""

from grim_belief import (CooperationPair, corpus, describe, evaluate, exhaustive_search, grim_trigger_threshold,
                         lambda_event, maximal_cooperation, thresholds, verify_oracle)

doc = corpus.load("pd_grid_uniform")
game, setup, model = doc.game, doc.setup, doc.model

# grim trigger beats a one-shot defection once the discount reaches lambda0
lam0 = grim_trigger_threshold(game, setup, 0)
print("lambda0 =", lam0)

# a cooperating type needs to believe the opponent cooperates with probability at least f
bundle = thresholds(game, setup, model)
for t in range(model.type_count(0)):
    tt = bundle.type_values(0, t)
    print(f"type {model.type_label(0, t)}: f = {tt.f}, g = {tt.g} ({tt.g_component})")

# start from the high-discount events and shrink until every cooperating type is confident enough
L1 = lambda_event(model, 0, lam0)
L2 = lambda_event(model, 1, lam0)
pair, report = maximal_cooperation(game, setup, model, L1, L2)
print("largest pair:", describe(pair[0], model, 0), describe(pair[1], model, 1), report.verdict)

# the oracle route agrees without using the thresholds at all
print("oracle:", verify_oracle(game, setup, model, pair).verdict)

# every measurable pair, checked by brute force
for p in exhaustive_search(game, setup, model):
    print("  ", describe(p[0], model, 0), describe(p[1], model, 1))

# cooperating only at 3/4 also works: a punishing 1/2 type gives cooperation only 1/3, below g = 1/2
high = CooperationPair.of(model, evaluate("l1>=3/4", model), evaluate("l2>=3/4", model))
print("K = {3/4}:", verify_oracle(game, setup, model, high).verdict)
print("P(K2 | type 1/2) =", model.posterior(0, high[1], 3))
