"""
Almost complete information from noisy signals
==============================================

Each player sees its own discount (H or L) and a signal of the opponent's
that is wrong with probability 1/50. Information is then almost complete,
and cooperating exactly when both one's discount and one's signal are high
is an approximate equilibrium.
"""

from fractions import Fraction

from grim_belief import (corpus, coverage_bounds, describe, high_discount_nature, is_almost_complete_strong,
                         strong_eps_profile)

eps = Fraction(1, 50)
doc = corpus.load("signal_uniform")
game, setup, model = doc.game, doc.setup, doc.model

holds, failing = is_almost_complete_strong(model, eps)
print("almost complete (strong):", holds)

profile = strong_eps_profile(game, setup, model, eps)
print("cooperate on:", describe(profile.pair[0], model, 0), describe(profile.pair[1], model, 1))
print(f"M = {profile.M}, eps' = {profile.epsilon_prime}:", profile.report.verdict)

# how much cooperation the construction gives up
cov = coverage_bounds(model, high_discount_nature(game, setup, model), eps, 3 * eps)
print("lost mass:", cov.gap, " given both patient:", cov.conditional_gap)

# with nature almost surely patient but noisier beliefs nothing survives
skewed = corpus.load("signal_skewed")
print("skewed, strong condition:", is_almost_complete_strong(skewed.model, eps)[0])
