"""Almost complete information about the discount factors.

Two notions are provided:

* prior-based: the worlds where the true pair of discounts is common
  (1-eps)-belief carry prior probability at least 1 - delta;
* strong: at every world each player (1-eps)-believes that some pair of
  discounts is common (1-eps)-belief.

Under the strong notion a simple conditional grim-trigger profile is an
eps'-equilibrium with eps' proportional to eps; ``strong_eps_profile`` builds
it and checks it with the deviation oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

from .belief_operators import ThresholdFunction, common_f_belief, f_belief
from .belief_space import Event, WorldModel
from .equilibrium import constants_epsilon_bound, slack_constants
from .errors import PreconditionError
from .oracle import verify_oracle
from .rational import as_rational
from .reports import CooperationPair, VerificationReport
from .stage_game import CooperationSetup, StageGame
from .thresholds import high_discount_events

__all__ = [
    "nature_fibers", "common_nature_event", "nature_common_belief_event", "is_almost_complete_prior",
    "is_almost_complete_strong", "high_discount_nature", "strong_eps_profile", "coverage_bounds",
    "StrongProfile", "CoverageReport",
]


def _confidence(model: WorldModel, epsilon) -> ThresholdFunction:
    eps = as_rational(epsilon)
    if not 0 <= eps <= 1:
        raise ValueError("epsilon must lie in [0, 1]")
    return ThresholdFunction.constant(model, 1 - eps)


def nature_fibers(model: WorldModel) -> Dict[Tuple[Fraction, ...], Event]:
    """Worlds grouped by their discount vector; the groups partition the worlds."""
    keys = np.stack([model.discount_index(i) for i in range(model.players)], axis=1)
    fibers: Dict[Tuple[Fraction, ...], Event] = {}
    for row in np.unique(keys, axis=0):
        mask = np.all(keys == row, axis=1)
        vec = tuple(model.discount_values(i)[int(k)] for i, k in enumerate(row))
        fibers[vec] = Event(mask)
    return fibers


def _fiber_beliefs(model: WorldModel, epsilon) -> List[Tuple[Event, Event]]:
    f = _confidence(model, epsilon)
    return [(G, common_f_belief(model, f, G).event) for G in nature_fibers(model).values()]


def common_nature_event(model: WorldModel, epsilon) -> Event:
    """Worlds whose true discount pair is common (1-eps)-belief there."""
    out = model.empty()
    for G, D in _fiber_beliefs(model, epsilon):
        out = out | (G & D)
    return out


def nature_common_belief_event(model: WorldModel, epsilon) -> Event:
    """Worlds where some discount pair, true or not, is common (1-eps)-belief."""
    out = model.empty()
    for _, D in _fiber_beliefs(model, epsilon):
        out = out | D
    return out


def _prior_mass(model: WorldModel, event: Event) -> Fraction:
    if model.prior is None:
        raise PreconditionError("the model has no common prior")
    return sum((model.prior[w] for w in event), Fraction(0))


def is_almost_complete_prior(model: WorldModel, epsilon, delta) -> Tuple[bool, Fraction]:
    """(holds, prior probability of the common-nature event)."""
    mass = _prior_mass(model, common_nature_event(model, epsilon))
    return mass >= 1 - as_rational(delta), mass


def is_almost_complete_strong(model: WorldModel, epsilon) -> Tuple[bool, List[Tuple[int, int]]]:
    """(holds, failing (world, player) pairs).

    Each player must give probability at least 1-eps, at every world, to the
    event that some discount pair is common (1-eps)-belief.
    """
    eps = as_rational(epsilon)
    K = nature_common_belief_event(model, eps)
    failing = []
    for i in range(model.players):
        believed = f_belief(model, i, _confidence(model, eps), K)
        failing.extend((int(w), i) for w in (~believed))
    failing.sort()
    return not failing, failing


def high_discount_nature(game: StageGame, setup: CooperationSetup, model: WorldModel) -> Event:
    """Worlds where every player's discount reaches its grim-trigger threshold."""
    out = model.full()
    for ev in high_discount_events(game, setup, model):
        out = out & ev
    return out


@dataclass
class StrongProfile:
    pair: CooperationPair
    M: Fraction
    epsilon: Fraction
    epsilon_prime: Fraction
    report: VerificationReport
    notes: List[str] = field(default_factory=list)


def strong_eps_profile(game: StageGame, setup: CooperationSetup, model: WorldModel, epsilon) -> StrongProfile:
    """Cooperate on B_i^{1-eps}(D^{1-eps}(Lambda)) and check it at eps' = M eps.

    M is the largest of the constants (M_i, N_i) bounding how far the
    eps'-thresholds move: with eps' >= M eps, cooperating types that
    (1-eps)-believe cooperation clear f^{eps'} and punishing types that
    assign cooperation at most eps stay below g^{eps'}. That argument needs
    eps' below ``constants_epsilon_bound``; the report notes when it is not.
    """
    eps = as_rational(epsilon)
    holds, failing = is_almost_complete_strong(model, eps)
    if not holds:
        raise PreconditionError("information is not almost complete in the strong sense", failing)
    lam = high_discount_nature(game, setup, model)
    cb = common_f_belief(model, _confidence(model, eps), lam)
    pair = CooperationPair.of(model, *cb.beliefs)
    M = max(max(slack_constants(setup, i)) for i in range(2))
    eps_prime = M * eps
    report = verify_oracle(game, setup, model, pair, eps_prime)
    notes = []
    for i in range(2):
        bound = constants_epsilon_bound(game, setup, model, i)
        if eps_prime >= bound:
            notes.append(f"player {i + 1}: eps' = {eps_prime} is not below the threshold-slack bound {bound}")
    return StrongProfile(pair, M, eps, eps_prime, report, notes)


@dataclass
class CoverageReport:
    gap: Fraction                    # P(Lambda minus D^{1-eps}(Lambda))
    conditional_gap: Optional[Fraction]  # the same given Lambda (None if P(Lambda) = 0)
    common_nature: Fraction          # P(worlds whose true pair is common (1-eps)-belief)
    prior_holds: bool
    strong_holds: bool
    gap_bound: Optional[bool]      # gap < delta, checked when prior_holds
    strong_prior_bound: Optional[bool]  # common_nature >= 1 - 3 eps, checked when strong_holds
    strong_gap_bound: Optional[bool]    # gap < 3 eps, checked when strong_holds

    def consistent(self) -> bool:
        return all(v is not False for v in (self.gap_bound, self.strong_prior_bound, self.strong_gap_bound))


def coverage_bounds(model: WorldModel, lam: Event, epsilon, delta) -> CoverageReport:
    """Prior mass of the cooperation the common-belief construction loses.

    ``lam`` is the event where cooperation is individually rational for both
    players (see ``high_discount_nature``).
    """
    eps, delta = as_rational(epsilon), as_rational(delta)
    D = common_f_belief(model, _confidence(model, eps), lam).event
    gap = _prior_mass(model, lam - D)
    lam_mass = _prior_mass(model, lam)
    conditional = gap / lam_mass if lam_mass else None
    prior_holds, mass = is_almost_complete_prior(model, eps, delta)
    strong_holds, _ = is_almost_complete_strong(model, eps)
    return CoverageReport(
        gap, conditional, mass, prior_holds, strong_holds,
        (gap < delta) if prior_holds else None,
        (mass >= 1 - 3 * eps) if strong_holds else None,
        (gap < 3 * eps) if strong_holds else None,
    )
