"""Threshold belief operators and their fixed points.

``B_i^f(A)`` collects the worlds where player i assigns ``A`` probability at
least ``f_i``. Iterating it yields the largest pair of events on which each
player f-believes the other's event (``iterated_pair``) and the common
f-belief of an event (``common_f_belief``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Sequence, Tuple, Union

import numpy as np

from .belief_space import Event, WorldModel, is_measurable
from .errors import ModelError, PreconditionError
from .rational import as_rational

Threshold = Union[Fraction, float]


def _coerce(v) -> Threshold:
    if isinstance(v, float):
        if math.isinf(v):
            return v
        raise TypeError("finite thresholds must be exact rationals")
    return as_rational(v)


class ThresholdFunction:
    """Per-player thresholds, one value per type (i-measurable by construction).

    Values may exceed 1 (never met) or be at most 0 (always met); ``math.inf``
    marks a threshold no probability can reach.
    """

    def __init__(self, model: WorldModel, type_values: Sequence[Sequence[Threshold]]):
        if len(type_values) != model.players:
            raise ModelError("one threshold list per player required")
        vals = []
        for i, tv in enumerate(type_values):
            tv = tuple(_coerce(v) for v in tv)
            if len(tv) != model.type_count(i):
                raise ModelError(f"player {i + 1}: {len(tv)} thresholds for {model.type_count(i)} types")
            vals.append(tv)
        self.model = model
        self._values: Tuple[Tuple[Threshold, ...], ...] = tuple(vals)

    @classmethod
    def constant(cls, model: WorldModel, p) -> "ThresholdFunction":
        p = _coerce(p)
        return cls(model, [[p] * model.type_count(i) for i in range(model.players)])

    @classmethod
    def from_worlds(cls, model: WorldModel, world_values: Sequence[Sequence[Threshold]]) -> "ThresholdFunction":
        """Build from per-world values, rejecting any that vary within a type."""
        per = []
        for i, wv in enumerate(world_values):
            if len(wv) != model.n:
                raise ModelError(f"player {i + 1}: one threshold per world required")
            tv = []
            for t in range(model.type_count(i)):
                members = model.type_members(i, t)
                seen = {_coerce(wv[int(w)]) for w in members}
                if len(seen) != 1:
                    raise ModelError(f"player {i + 1}: threshold not constant on type {t}")
                tv.append(seen.pop())
            per.append(tv)
        return cls(model, per)

    @classmethod
    def from_discount(cls, model: WorldModel, fn: Callable[[int, Fraction], Threshold]) -> "ThresholdFunction":
        """Threshold as a function of (player, own discount); needs known own discounts."""
        per = []
        for i in range(model.players):
            cache = {}
            tv = []
            for t in range(model.type_count(i)):
                lam = model.type_discount(i, t)
                if lam is None:
                    raise PreconditionError(f"player {i + 1}, type {t}: own discount is not known")
                if lam not in cache:
                    cache[lam] = fn(i, lam)
                tv.append(cache[lam])
            per.append(tv)
        return cls(model, per)

    def type_values(self, player: int) -> Tuple[Threshold, ...]:
        return self._values[player]

    def value(self, player: int, world: int) -> Threshold:
        return self._values[player][self.model.type_of(player, world)]

    def map(self, fn: Callable[[Threshold], Threshold]) -> "ThresholdFunction":
        return ThresholdFunction(self.model, [[fn(v) for v in tv] for tv in self._values])

    def all_positive(self) -> bool:
        return all(v > 0 for tv in self._values for v in tv)


def f_belief(model: WorldModel, player: int, f: ThresholdFunction, event: Event) -> Event:
    """B_i^f(event): worlds whose type gives the event probability >= f_i."""
    post = model.posteriors(player, event)
    ok = np.array([p >= thr for p, thr in zip(post, f.type_values(player))], dtype=bool)
    return model.event_from_type_mask(player, ok)


def p_belief(model: WorldModel, player: int, p, event: Event) -> Event:
    return f_belief(model, player, ThresholdFunction.constant(model, p), event)


@dataclass(frozen=True)
class PairIteration:
    """Fixed point of the two-player iteration and its decreasing trace."""

    D1: Event
    D2: Event
    trace: Tuple[Tuple[Event, Event], ...]

    @property
    def pair(self) -> Tuple[Event, Event]:
        return self.D1, self.D2

    @property
    def steps(self) -> int:
        """Index of the first iterate equal to the fixed point."""
        for n, (a, b) in enumerate(self.trace):
            if a == self.D1 and b == self.D2:
                return n
        return len(self.trace) - 1


def iterated_pair(model: WorldModel, f: ThresholdFunction, C1: Event, C2: Event) -> PairIteration:
    """Largest events D_i within C_i with P_i(D_j) >= f_i on D_i.

    Iterates D_i^{n} = B_i^f(D_j^{n-1}) intersected with D_i^{n-1}, starting from
    (C_1, C_2). The trace starts with that pair and ends with the first
    repeated iterate.
    """
    if model.players != 2:
        raise ModelError("the paired iteration is defined for two players")
    for i, C in enumerate((C1, C2)):
        if not is_measurable(model, i, C):
            raise PreconditionError(f"C_{i + 1} is not measurable for player {i + 1}")
    trace: List[Tuple[Event, Event]] = [(C1, C2)]
    d1, d2 = C1, C2
    while True:
        n1 = f_belief(model, 0, f, d2) & d1
        n2 = f_belief(model, 1, f, d1) & d2
        trace.append((n1, n2))
        if n1 == d1 and n2 == d2:
            break
        d1, d2 = n1, n2
    return PairIteration(d1, d2, tuple(trace))


def everyone_f_believes(model: WorldModel, f: ThresholdFunction, event: Event) -> Event:
    out = model.full()
    for i in range(model.players):
        out = out & f_belief(model, i, f, event)
    return out


@dataclass(frozen=True)
class CommonBelief:
    event: Event
    beliefs: Tuple[Event, ...]
    trace: Tuple[Event, ...]


def common_f_belief(model: WorldModel, f: ThresholdFunction, C: Event) -> CommonBelief:
    """D^f(C): the intersection of all iterates of "everyone f-believes" from C.

    The iterates need not decrease for arbitrary C, so the sequence is run
    until a state repeats and every state seen from step 1 on is intersected.
    """
    seen = {}
    trace: List[Event] = [C]
    current = C
    while True:
        current = everyone_f_believes(model, f, current)
        if current in seen:
            break
        seen[current] = len(trace)
        trace.append(current)
    result = model.full()
    for ev in trace[1:]:
        result = result & ev
    beliefs = tuple(f_belief(model, i, f, result) for i in range(model.players))
    return CommonBelief(result, beliefs, tuple(trace))


def lower_endpoint(model: WorldModel, player: int, event: Event):
    """Smallest own discount among the event's worlds (None if empty)."""
    if not len(event):
        return None
    values = model.discount_values(player)
    idx = model.discount_index(player)[event.mask]
    return values[int(idx.min())]
