"""Cooperation pairs, deviation witnesses and verification reports."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .belief_space import Event, WorldModel, is_measurable
from .errors import PreconditionError
from .rational import format_rational

EQUILIBRIUM = "equilibrium"
NOT_EQUILIBRIUM = "not-equilibrium"
OUTSIDE_SCOPE = "outside-theorem-scope"

FORMULA = "formula"
ORACLE = "oracle"

# Deviation classes. The first two are deviations of a cooperating type, the
# last two of a punishing type; stage1-deviate applies to both.
STAGE1_DEVIATE = "stage1-deviate"
STAGE2_DEFECT = "stage2-defect"
ADOPT_GRIM = "adopt-grim-trigger"
COOPERATE_ONCE = "cooperate-once-then-defect"
DEVIATION_CLASSES = (STAGE1_DEVIATE, STAGE2_DEFECT, ADOPT_GRIM, COOPERATE_ONCE)


@dataclass(frozen=True)
class CooperationPair:
    """Cooperation events, one per player, each measurable for its owner."""

    K: Tuple[Event, ...]

    @classmethod
    def of(cls, model: WorldModel, *events: Event) -> "CooperationPair":
        if len(events) != model.players:
            raise PreconditionError(f"need one cooperation event per player ({model.players})")
        for i, ev in enumerate(events):
            if ev.universe != model.n:
                raise PreconditionError(f"K_{i + 1} lives on {ev.universe} worlds, model has {model.n}")
            if not is_measurable(model, i, ev):
                raise PreconditionError(f"K_{i + 1} is not a union of player {i + 1}'s types")
        return cls(tuple(events))

    @classmethod
    def from_types(cls, model: WorldModel, *type_lists) -> "CooperationPair":
        return cls.of(model, *(model.type_event(i, ts) for i, ts in enumerate(type_lists)))

    def __getitem__(self, i) -> Event:
        return self.K[i]

    def type_lists(self, model: WorldModel) -> List[List[int]]:
        return [list(model.types_in(i, k)) for i, k in enumerate(self.K)]

    def size(self) -> int:
        return sum(len(k) for k in self.K)


@dataclass(frozen=True)
class DeviationDescriptor:
    """A profitable departure from the prescribed course of action."""

    kind: str
    action: Optional[int]
    world: int
    player: int
    gain: Fraction
    delay: int = 1

    def describe(self, game=None) -> str:
        label = "" if self.action is None else (
            game.actions[self.player][self.action] if game is not None else str(self.action))
        name = self.kind if not label else f"{self.kind}({label})"
        if self.delay != 1:
            name += f"[delay={self.delay}]"
        return name

    def to_json(self, game=None) -> dict:
        return {
            "class": self.kind,
            "action": None if self.action is None else (
                game.actions[self.player][self.action] if game is not None else self.action),
            "world": self.world,
            "player": self.player + 1,
            "gain": format_rational(self.gain),
            "delay": self.delay,
        }


@dataclass(frozen=True)
class Record:
    world: int
    player: int
    condition: str
    lhs: object
    rhs: object
    passed: bool

    def to_json(self) -> dict:
        return {
            "world": self.world,
            "player": self.player + 1,
            "condition": self.condition,
            "lhs": format_rational(self.lhs),
            "rhs": format_rational(self.rhs),
            "pass": self.passed,
        }


@dataclass
class VerificationReport:
    verdict: str
    route: str
    epsilon: Fraction
    records: List[Record] = field(default_factory=list)
    witnesses: List[DeviationDescriptor] = field(default_factory=list)
    flags: Dict[str, object] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)
    details: Dict[str, object] = field(default_factory=dict, repr=False)

    @property
    def is_equilibrium(self) -> bool:
        return self.verdict == EQUILIBRIUM

    def failures(self) -> List[Record]:
        return [r for r in self.records if not r.passed]

    def to_json(self, game=None) -> dict:
        return {
            "verdict": self.verdict,
            "route": self.route,
            "epsilon": format_rational(self.epsilon),
            "flags": self.flags,
            "notes": self.notes,
            "failures": [r.to_json() for r in self.failures()],
            "witnesses": [w.to_json(game) for w in self.witnesses],
            "records": len(self.records),
        }


def expand_type_records(model: WorldModel, player: int, t: int, condition: str, lhs, rhs, passed) -> List[Record]:
    return [Record(int(w), player, condition, lhs, rhs, passed) for w in model.type_members(player, t)]
