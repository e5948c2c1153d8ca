"""Brute-force equilibrium check by enumerating deviations.

For each type the expected discounted payoff of the prescribed course of
action is compared with every deviation class over all pure deviating
actions. Nothing here uses the threshold formulas.

Two ways of taking the expectation are supported:

``joint``
    Sum over the worlds the type considers possible, each with its own
    discount factor and its own opponent behaviour. This is the exact payoff.
``expectation``
    Treat the opponent's cooperation and one's own discount as independent
    under the type's belief, i.e. P(K_j) * E[payoff | cooperate] +
    (1 - P(K_j)) * E[payoff | punish]. Coincides with ``joint`` whenever the
    type knows its own discount.
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .belief_space import Event, WorldModel
from .rational import as_rational
from .reports import (ADOPT_GRIM, COOPERATE_ONCE, EQUILIBRIUM, NOT_EQUILIBRIUM, ORACLE, OUTSIDE_SCOPE,
                      STAGE1_DEVIATE, STAGE2_DEFECT, CooperationPair, DeviationDescriptor,
                      VerificationReport, expand_type_records)
from .stage_game import DELAYED, GRIM, PUNISH, STAGE1, CooperationSetup, PlayerView, StageGame, course_value

JOINT = "joint"
EXPECTATION = "expectation"
PAYOFF_MODES = (JOINT, EXPECTATION)


class TypeValuer:
    """Expected course values for one type against a given opponent event."""

    def __init__(self, view: PlayerView, model: WorldModel, player: int, t: int, K_other: Event, mode: str = JOINT):
        if mode not in PAYOFF_MODES:
            raise ValueError(f"unknown payoff mode {mode!r}")
        idx, wts = model.belief_arrays(player, t)
        coop = K_other.mask[idx]
        mass: Dict[Tuple[Fraction, bool], Fraction] = defaultdict(Fraction)
        if mode == JOINT:
            for w, p, c in zip(idx, wts, coop):
                mass[(model.discount(player, int(w)), bool(c))] += p
        else:
            pc = sum((p for p, c in zip(wts, coop) if c), Fraction(0))
            for w, p in zip(idx, wts):
                lam = model.discount(player, int(w))
                if pc:
                    mass[(lam, True)] += p * pc
                if pc != 1:
                    mass[(lam, False)] += p * (1 - pc)
        self.view = view
        self.cells = [(lam, c, p) for (lam, c), p in mass.items() if p]
        self.p_coop = sum((p for _, c, p in self.cells if c), Fraction(0))

    def value(self, course: str, action: Optional[int] = None, delay: int = 1) -> Fraction:
        return sum((p * course_value(self.view, lam, course, c, action, delay) for lam, c, p in self.cells),
                   Fraction(0))


def candidate_deviations(view: PlayerView, cooperating: bool, max_delay: int = 1):
    """(class, course, action, delay) for every deviation the oracle tries."""
    out = []
    devs = view.deviations()
    for a in devs:
        out.append((STAGE1_DEVIATE, STAGE1, a, 1))
    if not cooperating:
        out.append((ADOPT_GRIM, GRIM, None, 1))
    kind = STAGE2_DEFECT if cooperating else COOPERATE_ONCE
    for k in range(1, max_delay + 1):
        for a in devs:
            out.append((kind, DELAYED, a, k))
    return out


def best_deviation(view: PlayerView, valuer: TypeValuer, cooperating: bool, max_delay: int = 1):
    """Largest gain over conformity and the deviation achieving it."""
    base = valuer.value(GRIM if cooperating else PUNISH)
    best = None
    for kind, course, a, k in candidate_deviations(view, cooperating, max_delay):
        gain = valuer.value(course, a, k) - base
        if best is None or gain > best[0]:
            best = (gain, kind, a, k)
    return best


class Oracle:
    """Per-type deviation gains, reusable across many candidate pairs."""

    def __init__(self, game: StageGame, setup: CooperationSetup, model: WorldModel,
                 epsilon=0, max_delay: int = 1, payoffs: str = JOINT):
        if model.players != 2:
            raise ValueError("the deviation oracle handles two players")
        self.game, self.setup, self.model = game, setup, model
        self.epsilon = as_rational(epsilon)
        self.max_delay = int(max_delay)
        self.payoffs = payoffs
        self._cache: Dict[Tuple[int, int, bool, bytes], tuple] = {}

    def type_gain(self, player: int, t: int, cooperating: bool, K_other: Event):
        key = (player, t, cooperating, K_other.mask.tobytes())
        hit = self._cache.get(key)
        if hit is None:
            view = self.setup.view(player)
            valuer = TypeValuer(view, self.model, player, t, K_other, self.payoffs)
            hit = self._cache[key] = best_deviation(view, valuer, cooperating, self.max_delay)
        return hit

    def verify(self, pair: CooperationPair) -> VerificationReport:
        model = self.model
        report = VerificationReport(EQUILIBRIUM, ORACLE, self.epsilon)
        report.flags.update(self.setup.standing_assumptions())
        report.flags["payoffs"] = self.payoffs
        report.flags["max_delay"] = self.max_delay
        for i in range(2):
            if self.setup.tau_in_support(i):
                report.verdict = OUTSIDE_SCOPE
                report.notes.append(f"player {i + 1}: tau_i is in the support of sigma_i, so deviations from "
                                    "tau are not always detected and the closed-form payoffs do not apply")
        if report.verdict == OUTSIDE_SCOPE:
            return report
        for i in range(2):
            j = 1 - i
            Ki = pair[i]
            for t in range(model.type_count(i)):
                cooperating = bool(Ki.mask[model.type_members(i, t)[0]])
                gain, kind, a, k = self.type_gain(i, t, cooperating, pair[j])
                ok = gain <= self.epsilon
                report.records.extend(expand_type_records(model, i, t, "max-deviation-gain", gain, self.epsilon, ok))
                if not ok:
                    w = int(model.type_members(i, t)[0])
                    report.witnesses.append(DeviationDescriptor(kind, a, w, i, gain, k))
        if report.witnesses:
            report.verdict = NOT_EQUILIBRIUM
        return report


def verify_oracle(game: StageGame, setup: CooperationSetup, model: WorldModel, pair: CooperationPair,
                  epsilon=0, max_delay: int = 1, payoffs: str = JOINT) -> VerificationReport:
    """Decide the (epsilon-)equilibrium property by enumerating deviations.

    Valid whether or not tau_i is a best response to sigma_j and whether or not
    K_i lies inside the high-discount event. Gains equal to epsilon count as
    no gain.
    """
    return Oracle(game, setup, model, epsilon, max_delay, payoffs).verify(pair)
