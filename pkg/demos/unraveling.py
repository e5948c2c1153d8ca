"""
How cooperation unravels on a fine grid
=======================================

With uniform beliefs on [0, 1) the types just above the grim-trigger
threshold are not confident enough that the opponent is patient too. Each
round of the iteration removes them, and the lower endpoint climbs toward
1/2.
"""

from grim_belief import corpus, grim_trigger_threshold, iterated_pair, lambda_event, lower_endpoint, thresholds

doc = corpus.load("pd_continuous_grid")
game, setup, model = doc.game, doc.setup, doc.model
print(model)

lam0 = grim_trigger_threshold(game, setup, 0)
f = thresholds(game, setup, model).f_function()
it = iterated_pair(model, f, lambda_event(model, 0, lam0), lambda_event(model, 1, lam0))

# the continuum recursion gives (2^k - 1) / (2^(k+1) - 1); the grid tracks it to within a few cells
for k, step in enumerate(it.trace[:8]):
    end = lower_endpoint(model, 0, step[0])
    guide = (2 ** (k + 1) - 1) / (2 ** (k + 2) - 1)
    print(f"step {k}: endpoint {float(end):.4f}   continuum {guide:.4f}")

print("fixed point after", it.steps, "steps:", lower_endpoint(model, 0, it.D1))
