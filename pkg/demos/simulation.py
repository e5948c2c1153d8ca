"""
Checking closed forms by simulation
===================================

Sample the opponent's world from each type's belief, play the repeated game
for a horizon long enough that the discounted tail is below 1e-6, and
compare with the exact expected payoffs.
"""

from fractions import Fraction

from grim_belief import CooperationPair, SimConfig, corpus, crosscheck, lambda_event, simulate_payoff

doc = corpus.load("pd_grid_uniform")
game, setup, model = doc.game, doc.setup, doc.model
pair = CooperationPair.of(model, lambda_event(model, 0, Fraction(1, 3)), lambda_event(model, 1, Fraction(1, 3)))

cfg = SimConfig.for_tolerance(game, model, Fraction(1, 10 ** 6), samples=10_000, seed=0)
print("horizon:", cfg.horizon)

# the 1/2 type meets a punishing 1/4 opponent with probability 1/3: expected payoff 13/3
est = simulate_payoff(game, setup, model, pair, 4, 0, config=cfg)
print(f"estimate {est.mean:.4f} +- {est.stderr:.4f}, exact {13 / 3:.4f}")

report = crosscheck(game, setup, model, pair, cfg)
print(len(report.cells), "cells, all within tolerance:", report.passed, " worst z:", round(report.worst_z, 2))

# enumerating the belief support instead of sampling removes the noise
exact = SimConfig(cfg.horizon, 1, 0, cfg.tail_tolerance, enumerate=True)
print("enumerated:", crosscheck(game, setup, model, pair, exact).passed)
