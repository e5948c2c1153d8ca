"""One-shot games, mixed actions and the cooperation setup (sigma, tau)."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .errors import DomainError, ModelError
from .rational import as_rational

Profile = Tuple[int, ...]


class StageGame:
    """A finite normal-form game with exact rational payoffs.

    ``payoffs`` maps every pure profile (a tuple of action indices, one per
    player) to a tuple of payoffs, one per player.
    """

    def __init__(self, actions: Sequence[Sequence[str]], payoffs: Dict[Profile, Sequence]):
        if len(actions) < 2:
            raise ModelError("a stage game needs at least two players")
        self.actions: Tuple[Tuple[str, ...], ...] = tuple(tuple(str(a) for a in acts) for acts in actions)
        for i, acts in enumerate(self.actions):
            if not acts:
                raise ModelError(f"player {i + 1} has no actions")
            if len(set(acts)) != len(acts):
                raise ModelError(f"player {i + 1} has duplicate action labels")
        n = len(self.actions)
        table: Dict[Profile, Tuple[Fraction, ...]] = {}
        for profile in itertools.product(*(range(len(a)) for a in self.actions)):
            if profile not in payoffs:
                raise ModelError(f"missing payoff for profile {self.profile_label(profile)}")
            vec = tuple(as_rational(v) for v in payoffs[profile])
            if len(vec) != n:
                raise ModelError(f"payoff vector at {self.profile_label(profile)} has {len(vec)} entries, expected {n}")
            table[profile] = vec
        extra = set(payoffs) - set(table)
        if extra:
            raise ModelError(f"payoffs given for unknown profiles {sorted(extra)}")
        self.payoffs: Dict[Profile, Tuple[Fraction, ...]] = table

    @classmethod
    def from_table(cls, actions: Sequence[Sequence[str]], table) -> "StageGame":
        """Build from a nested array indexed ``[a_1][a_2]...`` of payoff vectors."""
        payoffs = {}
        for profile in itertools.product(*(range(len(a)) for a in actions)):
            cell = table
            try:
                for k in profile:
                    cell = cell[k]
            except (IndexError, TypeError, KeyError) as exc:
                raise ModelError(f"payoff table has no entry at {list(profile)}") from exc
            payoffs[profile] = cell
        return cls(actions, payoffs)

    @property
    def player_count(self) -> int:
        return len(self.actions)

    def action_count(self, player: int) -> int:
        return len(self.actions[player])

    def action_index(self, player: int, action: Union[int, str]) -> int:
        if isinstance(action, int):
            if not 0 <= action < self.action_count(player):
                raise ModelError(f"player {player + 1} has no action {action}")
            return action
        try:
            return self.actions[player].index(action)
        except ValueError:
            raise ModelError(f"player {player + 1} has no action {action!r}") from None

    def profile_label(self, profile: Profile) -> str:
        try:
            return "(" + ",".join(self.actions[i][a] for i, a in enumerate(profile)) + ")"
        except (IndexError, TypeError):
            return str(profile)

    def to_table(self):
        """Nested list form, the inverse of from_table."""
        def build(prefix):
            depth = len(prefix)
            if depth == self.player_count:
                return list(self.payoffs[tuple(prefix)])
            return [build(prefix + [k]) for k in range(self.action_count(depth))]
        return build([])

    def max_abs_payoff(self, player: Optional[int] = None) -> Fraction:
        players = range(self.player_count) if player is None else [player]
        return max(abs(vec[i]) for vec in self.payoffs.values() for i in players)

    def __eq__(self, other):
        return isinstance(other, StageGame) and self.actions == other.actions and self.payoffs == other.payoffs

    def __repr__(self):
        return f"StageGame(actions={self.actions})"


@dataclass(frozen=True)
class MixedAction:
    """Exact probability weights over one player's actions."""

    weights: Tuple[Fraction, ...]

    def __post_init__(self):
        w = tuple(as_rational(x) for x in self.weights)
        if not w:
            raise ModelError("empty mixed action")
        if any(x < 0 for x in w):
            raise ModelError(f"negative weight in mixed action {w}")
        if sum(w) != 1:
            raise ModelError(f"mixed action weights sum to {sum(w)}, not 1")
        object.__setattr__(self, "weights", w)

    @classmethod
    def pure(cls, n_actions: int, index: int) -> "MixedAction":
        return cls(tuple(Fraction(int(k == index)) for k in range(n_actions)))

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(k for k, x in enumerate(self.weights) if x > 0)

    @property
    def is_pure(self) -> bool:
        return len(self.support) == 1

    def __len__(self):
        return len(self.weights)

    def __getitem__(self, k):
        return self.weights[k]


def _check_profile(game: StageGame, profile: Sequence[MixedAction]):
    if len(profile) != game.player_count:
        raise ModelError(f"profile has {len(profile)} entries, game has {game.player_count} players")
    for i, m in enumerate(profile):
        if len(m) != game.action_count(i):
            raise ModelError(f"player {i + 1}: mixed action over {len(m)} actions, game has {game.action_count(i)}")


def expected_payoff(game: StageGame, profile: Sequence[MixedAction]) -> Tuple[Fraction, ...]:
    """Multilinear extension of the payoff function to mixed profiles."""
    _check_profile(game, profile)
    total = [Fraction(0)] * game.player_count
    for pure in itertools.product(*(m.support for m in profile)):
        weight = Fraction(1)
        for i, a in enumerate(pure):
            weight *= profile[i][a]
        vec = game.payoffs[pure]
        for i in range(game.player_count):
            total[i] += weight * vec[i]
    return tuple(total)


def _replace(profile: Sequence[MixedAction], player: int, action: MixedAction) -> List[MixedAction]:
    out = list(profile)
    out[player] = action
    return out


def is_nash_equilibrium(game: StageGame, profile: Sequence[MixedAction]) -> Tuple[bool, Fraction]:
    """Check by pure deviations; returns (verdict, largest deviation gain)."""
    _check_profile(game, profile)
    base = expected_payoff(game, profile)
    gain = None
    for i in range(game.player_count):
        for a in range(game.action_count(i)):
            dev = expected_payoff(game, _replace(profile, i, MixedAction.pure(game.action_count(i), a)))[i]
            g = dev - base[i]
            gain = g if gain is None else max(gain, g)
    return gain <= 0, gain


@dataclass(frozen=True)
class PlayerView:
    """Every stage payoff of one player that the repeated analysis needs."""

    player: int
    tau_action: int
    sigma_support: Tuple[int, ...]
    u_sigma: Fraction
    u_tau: Fraction
    vs_tau: Tuple[Fraction, ...]      # u_i(a, tau_-i) per pure a
    vs_sigma: Tuple[Fraction, ...]    # u_i(a, sigma_-i) per pure a
    sigma_vs_tau: Fraction            # u_i(sigma_i, tau_-i)
    max_abs: Fraction

    @property
    def tau_vs_sigma(self) -> Fraction:
        return self.vs_sigma[self.tau_action]

    @property
    def n_actions(self) -> int:
        return len(self.vs_tau)

    def deviations(self) -> Tuple[int, ...]:
        return tuple(a for a in range(self.n_actions) if a != self.tau_action)


@dataclass(frozen=True)
class CooperationSetup:
    """A stage Nash equilibrium sigma and a Pareto-better pure profile tau."""

    game: StageGame
    sigma: Tuple[MixedAction, ...]
    tau: Tuple[int, ...]
    issues: Tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        game = self.game
        sigma = tuple(m if isinstance(m, MixedAction) else MixedAction(tuple(m)) for m in self.sigma)
        tau = tuple(game.action_index(i, a) for i, a in enumerate(self.tau))
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "tau", tau)
        _check_profile(game, sigma)
        if len(tau) != game.player_count:
            raise ModelError("tau must name one action per player")
        ok, gain = is_nash_equilibrium(game, sigma)
        if not ok:
            raise ModelError(f"sigma is not a Nash equilibrium (a pure deviation gains {gain})")
        u_sigma = expected_payoff(game, sigma)
        u_tau = game.payoffs[tau]
        for i in range(game.player_count):
            if not u_tau[i] > u_sigma[i]:
                raise ModelError(f"player {i + 1}: u(tau)={u_tau[i]} does not exceed u(sigma)={u_sigma[i]}")
        issues = []
        for i in range(game.player_count):
            if self.tau_in_support(i):
                issues.append(f"player {i + 1}: tau_i lies in the support of sigma_i")
        object.__setattr__(self, "issues", tuple(issues))
        views = tuple(self._build_view(i, u_sigma[i], u_tau[i]) for i in range(game.player_count))
        object.__setattr__(self, "_views", views)

    @classmethod
    def pure(cls, game: StageGame, sigma: Sequence[Union[int, str]], tau: Sequence[Union[int, str]]) -> "CooperationSetup":
        mixed = tuple(MixedAction.pure(game.action_count(i), game.action_index(i, a)) for i, a in enumerate(sigma))
        return cls(game, mixed, tuple(tau))

    def _build_view(self, i: int, u_sigma: Fraction, u_tau: Fraction) -> PlayerView:
        game = self.game
        n = game.action_count(i)
        tau_mixed = [MixedAction.pure(game.action_count(k), t) for k, t in enumerate(self.tau)]
        vs_tau, vs_sigma = [], []
        for a in range(n):
            pure_a = MixedAction.pure(n, a)
            vs_tau.append(expected_payoff(game, _replace(tau_mixed, i, pure_a))[i])
            vs_sigma.append(expected_payoff(game, _replace(self.sigma, i, pure_a))[i])
        sigma_vs_tau = expected_payoff(game, _replace(tau_mixed, i, self.sigma[i]))[i]
        return PlayerView(
            player=i,
            tau_action=self.tau[i],
            sigma_support=self.sigma[i].support,
            u_sigma=u_sigma,
            u_tau=u_tau,
            vs_tau=tuple(vs_tau),
            vs_sigma=tuple(vs_sigma),
            sigma_vs_tau=sigma_vs_tau,
            max_abs=game.max_abs_payoff(i),
        )

    def view(self, player: int) -> PlayerView:
        return self._views[player]

    def tau_in_support(self, player: int) -> bool:
        return self.sigma[player][self.tau[player]] > 0

    def tau_best_response(self, player: int) -> bool:
        """Is tau_i a best response to sigma_-i?"""
        v = self.view(player)
        return v.tau_vs_sigma >= max(v.vs_sigma)

    def standing_assumptions(self) -> Dict[str, bool]:
        flags = {}
        for i in range(self.game.player_count):
            flags[f"tau{i + 1}_in_support_of_sigma{i + 1}"] = self.tau_in_support(i)
            flags[f"tau{i + 1}_best_response_to_sigma"] = self.tau_best_response(i)
        return flags


def grim_trigger_threshold(game: StageGame, setup: CooperationSetup, player: int) -> Fraction:
    """Smallest discount at which grim-trigger cooperation beats every one-shot deviation."""
    v = setup.view(player)
    best = Fraction(0)
    for a in v.deviations():
        if v.vs_tau[a] > v.u_tau:
            best = max(best, (v.vs_tau[a] - v.u_tau) / (v.vs_tau[a] - v.u_sigma))
    return best


def check_discount(lam) -> Fraction:
    lam = as_rational(lam)
    if not 0 <= lam < 1:
        raise DomainError(f"discount factor {lam} outside [0, 1)")
    return lam


# Courses of action of one player against a grim opponent (who cooperates
# until tau_i is broken) or a punishing opponent (sigma_j forever).
GRIM = "grim"
PUNISH = "punish"
STAGE1 = "stage1-deviate"
DELAYED = "delayed-defect"


def course_value(view: PlayerView, lam: Fraction, course: str, opponent_cooperates: bool,
                 action: Optional[int] = None, delay: int = 1) -> Fraction:
    """Discounted payoff of one course of action, in closed form.

    ``delayed-defect`` plays tau_i for ``delay`` stages while the opponent
    cooperates, then ``action`` once, then sigma_i forever.
    """
    w = lam / (1 - lam)
    tail = view.u_sigma * w
    if course == GRIM:
        return view.u_tau / (1 - lam) if opponent_cooperates else view.tau_vs_sigma + tail
    if course == PUNISH:
        return view.sigma_vs_tau + tail if opponent_cooperates else view.u_sigma / (1 - lam)
    if course == STAGE1:
        return (view.vs_tau[action] if opponent_cooperates else view.vs_sigma[action]) + tail
    if course == DELAYED:
        if delay < 1:
            raise DomainError("delay must be at least 1")
        if not opponent_cooperates:
            return view.tau_vs_sigma + tail
        lk = lam ** delay
        return view.u_tau * (1 - lk) / (1 - lam) + view.vs_tau[action] * lk + view.u_sigma * lk * w
    raise ValueError(f"unknown course {course!r}")


SCENARIOS = (
    "both-cooperate", "cooperate-vs-punish", "punish-vs-cooperate", "both-punish",
    "stage2-defect", "stage1-deviate", "cooperate-once-then-defect",
)

_SCENARIO_RE = re.compile(r"^\s*([a-z0-9-]+)\s*(?:\(\s*([^)]*)\s*\))?\s*$")


def repeated_payoffs(game: StageGame, setup: CooperationSetup, lam, scenario: str,
                     player: int = 0, action: Union[int, str, None] = None,
                     opponent_cooperates: bool = True) -> Fraction:
    """Player's discounted payoff in a named repeated-play scenario.

    Deviation scenarios may carry the action inline, e.g. ``"stage2-defect(D)"``.
    ``opponent_cooperates`` selects whether the opponent follows grim trigger
    or punishes from the start; it only matters for deviation scenarios.
    """
    lam = check_discount(lam)
    m = _SCENARIO_RE.match(scenario)
    if not m or m.group(1) not in SCENARIOS:
        raise ValueError(f"unknown scenario {scenario!r}; expected one of {SCENARIOS}")
    name, inline = m.group(1), m.group(2)
    if inline:
        action = inline
    view = setup.view(player)
    if name == "both-cooperate":
        return course_value(view, lam, GRIM, True)
    if name == "cooperate-vs-punish":
        return course_value(view, lam, GRIM, False)
    if name == "punish-vs-cooperate":
        return course_value(view, lam, PUNISH, True)
    if name == "both-punish":
        return course_value(view, lam, PUNISH, False)
    if action is None:
        raise ValueError(f"scenario {name} needs a deviating action")
    a = game.action_index(player, action)
    if a == view.tau_action:
        raise ValueError("the deviating action must differ from tau_i")
    if name == "stage1-deviate":
        return course_value(view, lam, STAGE1, opponent_cooperates, a)
    return course_value(view, lam, DELAYED, opponent_cooperates, a, 1)


def prisoners_dilemma(cc=3, cd=0, dc=4, dd=1) -> StageGame:
    """Symmetric two-action game with actions (D, C); defaults to the textbook PD."""
    table = [[[dd, dd], [dc, cd]], [[cd, dc], [cc, cc]]]
    return StageGame.from_table([["D", "C"], ["D", "C"]], table)


def punishment_game(a, n_vs_defect=0, n_vs_n=0, other_vs_n=0) -> StageGame:
    """PD extended by a third action N that pays ``a`` against a cooperator.

    Only N's payoffs against C and D enter any threshold; the entries where the
    opponent plays N are free and default to ``other_vs_n`` / ``n_vs_n``.
    """
    a = as_rational(a)
    u = {  # row player's payoff: (own, other) -> value
        ("D", "D"): 1, ("D", "C"): 4, ("C", "D"): 0, ("C", "C"): 3,
        ("N", "D"): as_rational(n_vs_defect), ("N", "C"): a,
        ("D", "N"): as_rational(other_vs_n), ("C", "N"): as_rational(other_vs_n),
        ("N", "N"): as_rational(n_vs_n),
    }
    acts = ["D", "C", "N"]
    payoffs = {(i, j): (u[(x, y)], u[(y, x)]) for i, x in enumerate(acts) for j, y in enumerate(acts)}
    return StageGame([acts, acts], payoffs)
