"""Closed-form belief thresholds for conditional grim-trigger equilibria.

A cooperating type needs P_i(K_j) >= f_i and a punishing type needs
P_i(K_j) <= g_i = min(g1_i, g2_i, g3_i). Each component is the binding value
of one family of deviations; with ``epsilon > 0`` the deviations may gain up
to epsilon.

All discount dependence enters through three moments of the own discount:
E[1/(1-l)], E[l/(1-l)] and E[l]. For a type that knows its discount these
are point values; for a type that does not they are belief expectations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .belief_operators import ThresholdFunction
from .belief_space import Event, WorldModel, lambda_event
from .errors import PreconditionError
from .rational import INFEASIBLE, as_rational
from .stage_game import CooperationSetup, PlayerView, StageGame, check_discount, grim_trigger_threshold


@dataclass(frozen=True)
class Moments:
    inv: Fraction    # E[1 / (1 - l)]
    ratio: Fraction  # E[l / (1 - l)]
    lam: Fraction    # E[l]

    @classmethod
    def point(cls, lam) -> "Moments":
        lam = check_discount(lam)
        return cls(1 / (1 - lam), lam / (1 - lam), lam)

    @classmethod
    def of(cls, weights: Sequence[Tuple[Fraction, Fraction]]) -> "Moments":
        """Moments of a distribution given as (probability, discount) pairs."""
        inv = ratio = lam = Fraction(0)
        for p, l in weights:
            inv += p / (1 - l)
            ratio += p * l / (1 - l)
            lam += p * l
        return cls(inv, ratio, lam)


def cooperation_margin(v: PlayerView, m: Moments, a: int) -> Fraction:
    """Cooperating forever minus deviating to ``a`` once against a cooperator."""
    return v.u_tau * m.inv - v.vs_tau[a] - v.u_sigma * m.ratio


def f_component(v: PlayerView, m: Moments, eps=Fraction(0)):
    """(value, binding action) of the lower threshold on cooperating types.

    Deviations that gain nothing against a punisher impose no constraint; an
    empty family gives 0. A deviation whose constraint cannot be met by any
    probability yields ``inf`` (this only happens below the grim-trigger
    discount, where the value is never used).
    """
    best, arg = Fraction(0), None
    for a in v.deviations():
        b = v.vs_sigma[a] - v.tau_vs_sigma
        if b <= 0:
            continue
        den = cooperation_margin(v, m, a) + b
        if den > 0:
            val = (b - eps) / den
        elif den == 0 and b <= eps:
            continue
        else:
            val = INFEASIBLE
        if arg is None or val > best:
            best, arg = val, a
    return best, arg


def g1_component(v: PlayerView, eps=Fraction(0)):
    """Upper threshold from a one-shot deviation by a punishing type."""
    best, arg = Fraction(1), None
    pure_sigma = v.sigma_support[0] if len(v.sigma_support) == 1 else None
    for a in v.deviations():
        if a == pure_sigma:
            continue
        e = v.vs_tau[a] - v.sigma_vs_tau
        if e <= 0:
            continue
        d = v.u_sigma - v.vs_sigma[a]
        val = (d + eps) / (d + e)
        if arg is None or val < best:
            best, arg = val, a
    return best, arg


def g2_component(v: PlayerView, m: Moments, eps=Fraction(0)) -> Fraction:
    """Upper threshold from a punishing type switching to grim trigger."""
    c = v.u_sigma - v.tau_vs_sigma
    gap = v.u_tau * m.inv - v.sigma_vs_tau - v.u_sigma * m.ratio
    if gap > 0:
        return (c + eps) / (c + gap)
    return Fraction(1)


def g3_component(v: PlayerView, m: Moments, eps=Fraction(0)):
    """Upper threshold from cooperating once and defecting at stage two."""
    c = v.u_sigma - v.tau_vs_sigma
    best, arg = Fraction(1), None
    for a in v.deviations():
        e = v.u_tau - v.sigma_vs_tau + (v.vs_tau[a] - v.u_sigma) * m.lam
        if e <= 0:
            continue
        val = (c + eps) / (c + e)
        if arg is None or val < best:
            best, arg = val, a
    return best, arg


@dataclass(frozen=True)
class TypeThresholds:
    f: object
    g1: Fraction
    g2: Fraction
    g3: Fraction
    f_action: Optional[int]
    g1_action: Optional[int]
    g3_action: Optional[int]

    @property
    def g(self) -> Fraction:
        return min(self.g1, self.g2, self.g3)

    @property
    def g_component(self) -> str:
        g = self.g
        return "g1" if self.g1 == g else ("g2" if self.g2 == g else "g3")


def type_thresholds(v: PlayerView, m: Moments, eps=Fraction(0)) -> TypeThresholds:
    f, fa = f_component(v, m, eps)
    g1, g1a = g1_component(v, eps)
    g3, g3a = g3_component(v, m, eps)
    return TypeThresholds(f, g1, g2_component(v, m, eps), g3, fa, g1a, g3a)


@dataclass(frozen=True)
class ThresholdBundle:
    """Per-player, per-type threshold components for one epsilon."""

    model: WorldModel
    epsilon: Fraction
    per_type: Tuple[Tuple[TypeThresholds, ...], ...]

    def type_values(self, player: int, t: int) -> TypeThresholds:
        return self.per_type[player][t]

    def at(self, player: int, world: int) -> TypeThresholds:
        return self.per_type[player][self.model.type_of(player, world)]

    def f_function(self) -> ThresholdFunction:
        return ThresholdFunction(self.model, [[tt.f for tt in pt] for pt in self.per_type])

    def g_function(self) -> ThresholdFunction:
        return ThresholdFunction(self.model, [[tt.g for tt in pt] for pt in self.per_type])

    def complement_g_function(self) -> ThresholdFunction:
        """1 - g, the threshold for believing the opponent punishes."""
        return ThresholdFunction(self.model, [[1 - tt.g for tt in pt] for pt in self.per_type])


def thresholds(game: StageGame, setup: CooperationSetup, model: WorldModel, epsilon=0) -> ThresholdBundle:
    """Threshold components per type for players who know their own discount."""
    eps = as_rational(epsilon)
    if eps < 0:
        raise ValueError("epsilon must be non-negative")
    per = []
    for i in range(model.players):
        v = setup.view(i)
        cache: Dict[Fraction, TypeThresholds] = {}
        row = []
        for t in range(model.type_count(i)):
            lam = model.type_discount(i, t)
            if lam is None:
                raise PreconditionError(
                    f"player {i + 1}, type {t} does not know its own discount; use expectation_thresholds")
            if lam not in cache:
                cache[lam] = type_thresholds(v, Moments.point(lam), eps)
            row.append(cache[lam])
        per.append(tuple(row))
    return ThresholdBundle(model, eps, tuple(per))


def type_moments(model: WorldModel, player: int, t: int) -> Moments:
    idx, wts = model.belief_arrays(player, t)
    return Moments.of([(p, model.discount(player, int(w))) for w, p in zip(idx, wts)])


@dataclass(frozen=True)
class ExpectationThresholds:
    bundle: ThresholdBundle
    lambda_events: Tuple[Event, ...]


def expectation_thresholds(game: StageGame, setup: CooperationSetup, model: WorldModel, epsilon=0) -> ExpectationThresholds:
    """Thresholds with the own discount replaced by its belief expectation.

    The high-discount event becomes the set of types whose expected margin
    from cooperating over every one-shot deviation is non-negative.
    """
    eps = as_rational(epsilon)
    per, lam_events = [], []
    for i in range(model.players):
        v = setup.view(i)
        row = []
        high = []
        for t in range(model.type_count(i)):
            m = type_moments(model, i, t)
            row.append(type_thresholds(v, m, eps))
            high.append(all(cooperation_margin(v, m, a) >= 0 for a in v.deviations()))
        per.append(tuple(row))
        lam_events.append(model.event_from_type_mask(i, high))
    return ExpectationThresholds(ThresholdBundle(model, eps, tuple(per)), tuple(lam_events))


def high_discount_events(game: StageGame, setup: CooperationSetup, model: WorldModel) -> Tuple[Event, ...]:
    """Per player, the worlds where the own discount reaches the grim-trigger threshold."""
    return tuple(lambda_event(model, i, grim_trigger_threshold(game, setup, i)) for i in range(model.players))

