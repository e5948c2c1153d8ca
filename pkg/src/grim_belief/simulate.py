"""Monte Carlo cross-validation of the closed-form repeated-game payoffs.

A type's payoff is estimated by drawing the true world from its belief,
letting both players run their course of action stage by stage and summing
discounted stage payoffs up to a finite horizon. Mixed stage equilibria are
sampled afresh at every stage, and triggers react to the sampled actions.

Randomness comes from numpy's PCG64 generator. Samples are split into fixed
chunks of ``CHUNK`` draws; chunk ``c`` of a cell is seeded from
``SeedSequence([seed, world, player, cell, c])``, so results do not depend
on how many threads run the chunks.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from .belief_space import WorldModel
from .errors import ConfigError
from .oracle import JOINT, TypeValuer, candidate_deviations
from .rational import as_rational
from .reports import ADOPT_GRIM, COOPERATE_ONCE, STAGE1_DEVIATE, STAGE2_DEFECT, CooperationPair, DeviationDescriptor
from .stage_game import DELAYED, GRIM, PUNISH, STAGE1, CooperationSetup, StageGame

__all__ = ["SimConfig", "Estimate", "simulate_payoff", "crosscheck", "CrosscheckReport", "Cell", "CHUNK",
           "course_of", "thread_count"]

CHUNK = 4096
_SEED_MASK = (1 << 64) - 1

_COURSE_OF_KIND = {STAGE1_DEVIATE: STAGE1, STAGE2_DEFECT: DELAYED, COOPERATE_ONCE: DELAYED, ADOPT_GRIM: GRIM}


def thread_count() -> int:
    """Worker threads, capped by GRIM_BELIEF_THREADS when set."""
    raw = os.environ.get("GRIM_BELIEF_THREADS")
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"GRIM_BELIEF_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"GRIM_BELIEF_THREADS must be a positive integer, got {raw!r}")
    return n


def _tail_bound(M: Fraction, lam: Fraction, horizon: int) -> Fraction:
    return M * lam ** horizon / (1 - lam)


def _scale(game: StageGame, model: WorldModel) -> Tuple[Fraction, Fraction]:
    lam = max(max(model.discount_values(i)) for i in range(model.players))
    return game.max_abs_payoff(), lam


@dataclass(frozen=True)
class SimConfig:
    horizon: int
    samples: int
    seed: int
    tail_tolerance: Fraction
    enumerate: bool = False

    def __post_init__(self):
        if int(self.horizon) < 1:
            raise ConfigError("horizon must be at least 1")
        if int(self.samples) < 1:
            raise ConfigError("samples must be at least 1")
        tol = as_rational(self.tail_tolerance)
        if tol <= 0:
            raise ConfigError("tail_tolerance must be positive")
        object.__setattr__(self, "horizon", int(self.horizon))
        object.__setattr__(self, "samples", int(self.samples))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "tail_tolerance", tol)

    @classmethod
    def for_tolerance(cls, game: StageGame, model: WorldModel, tail_tolerance, samples: int = 10_000,
                      seed: int = 0, enumerate: bool = False) -> "SimConfig":
        """The shortest horizon whose truncation bound meets ``tail_tolerance``."""
        tol = as_rational(tail_tolerance)
        if tol <= 0:
            raise ConfigError("tail_tolerance must be positive")
        M, lam = _scale(game, model)
        if lam == 0 or M == 0:
            T = 1
        else:
            T = max(1, math.ceil(math.log(float(tol * (1 - lam) / M)) / math.log(float(lam))))
            while T > 1 and _tail_bound(M, lam, T - 1) <= tol:
                T -= 1
            while _tail_bound(M, lam, T) > tol:
                T += 1
        return cls(T, samples, seed, tol, enumerate)

    def check(self, game: StageGame, model: WorldModel) -> Fraction:
        """Raise unless M_max lam_max^T / (1 - lam_max) <= tail_tolerance; return the bound."""
        M, lam = _scale(game, model)
        bound = _tail_bound(M, lam, self.horizon)
        if bound > self.tail_tolerance:
            raise ConfigError(f"horizon {self.horizon} leaves a truncation bound of {float(bound):.3g} "
                              f"above tail_tolerance {float(self.tail_tolerance):.3g}")
        return bound


@dataclass
class Estimate:
    mean: float
    stderr: float
    samples: int
    horizon: int
    exact: Optional[Fraction] = None   # truncated sum in enumerate mode
    tail: Optional[float] = None       # geometric remainder beyond the horizon in enumerate mode


def course_of(deviation: Optional[DeviationDescriptor], cooperating: bool) -> Tuple[str, Optional[int], int]:
    """(course, action, delay) for conformity (``None``) or a deviation."""
    if deviation is None:
        return (GRIM if cooperating else PUNISH), None, 1
    try:
        course = _COURSE_OF_KIND[deviation.kind]
    except KeyError:
        raise ConfigError(f"unknown deviation class {deviation.kind!r}") from None
    if course != GRIM and deviation.action is None:
        raise ConfigError(f"{deviation.kind} needs a deviating action")
    return course, deviation.action, int(deviation.delay)


class _Sampler:
    """Float payoff tables and cumulative mixed-action weights."""

    def __init__(self, game: StageGame, setup: CooperationSetup, player: int):
        i, j = player, 1 - player
        n_i, n_j = game.action_count(i), game.action_count(j)
        U = np.zeros((n_i, n_j))
        for a in range(n_i):
            for b in range(n_j):
                profile = (a, b) if i == 0 else (b, a)
                U[a, b] = float(game.payoffs[profile][i])
        self.U = U
        self.tau_i, self.tau_j = setup.tau[i], setup.tau[j]
        self.cum_i = np.cumsum([float(x) for x in setup.sigma[i].weights])
        self.cum_j = np.cumsum([float(x) for x in setup.sigma[j].weights])

    @staticmethod
    def draw(rng, cum, size):
        out = np.searchsorted(cum, rng.random(size) * cum[-1], side="right")
        return np.minimum(out, len(cum) - 1)

    def run(self, rng, lam, opp_coop, course, action, delay, horizon):
        size = lam.shape[0]
        total = np.zeros(size)
        weight = np.ones(size)
        opp_trig = ~opp_coop
        me_trig = np.zeros(size, dtype=bool)
        for t in range(horizon):
            sig_i = self.draw(rng, self.cum_i, size)
            sig_j = self.draw(rng, self.cum_j, size)
            if course == PUNISH:
                mine = sig_i
            elif course == GRIM:
                mine = np.where(me_trig, sig_i, self.tau_i)
            elif course == STAGE1:
                mine = np.full(size, action) if t == 0 else sig_i
            else:
                planned = self.tau_i if t < delay else (action if t == delay else -1)
                mine = sig_i if planned < 0 else np.where(me_trig, sig_i, planned)
            theirs = np.where(opp_trig, sig_j, self.tau_j)
            total += weight * self.U[mine, theirs]
            weight = weight * lam
            opp_trig = opp_trig | (mine != self.tau_i)
            me_trig = me_trig | (theirs != self.tau_j)
        return total


def _stage_mixtures(setup: CooperationSetup, player: int, course, action, delay, opp_coop, horizon):
    """Per-stage (own, opponent) mixed actions when triggers are deterministic."""
    i, j = player, 1 - player
    sig_i, sig_j = setup.sigma[i].weights, setup.sigma[j].weights
    n_i, n_j = len(sig_i), len(sig_j)

    def pure(n, a):
        return tuple(Fraction(int(k == a)) for k in range(n))

    tau_i, tau_j = pure(n_i, setup.tau[i]), pure(n_j, setup.tau[j])
    opp_trig, me_trig = not opp_coop, False
    for t in range(horizon):
        if course == PUNISH:
            mine = sig_i
        elif course == GRIM:
            mine = sig_i if me_trig else tau_i
        elif course == STAGE1:
            mine = pure(n_i, action) if t == 0 else sig_i
        else:
            if me_trig or t > delay:
                mine = sig_i
            else:
                mine = tau_i if t < delay else pure(n_i, action)
        theirs = sig_j if opp_trig else tau_j
        yield mine, theirs
        opp_trig = opp_trig or mine != tau_i
        me_trig = me_trig or theirs != tau_j


def _stage_value(game: StageGame, player: int, mine, theirs) -> Fraction:
    total = Fraction(0)
    for a, p in enumerate(mine):
        if not p:
            continue
        for b, q in enumerate(theirs):
            if q:
                profile = (a, b) if player == 0 else (b, a)
                total += p * q * game.payoffs[profile][player]
    return total


def _enumerate(game, setup, model, pair, player, t, course, action, delay, config) -> Estimate:
    if setup.tau_in_support(0) or setup.tau_in_support(1):
        raise ConfigError("enumerate mode needs tau_i outside the support of sigma_i")
    idx, wts = model.belief_arrays(player, t)
    K_other = pair[1 - player]
    exact, tail = Fraction(0), 0.0
    for w, p in zip(idx, wts):
        lam = model.discount(player, int(w))
        coop = bool(K_other.mask[int(w)])
        value, weight, last = Fraction(0), Fraction(1), Fraction(0)
        for mine, theirs in _stage_mixtures(setup, player, course, action, delay, coop, config.horizon):
            last = _stage_value(game, player, mine, theirs)
            value += weight * last
            weight *= lam
        # Play is stationary once both sides use sigma, which holds by stage delay + 2.
        stationary = config.horizon > delay + 1
        rest = float(lam) ** config.horizon * float(last) / (1 - float(lam)) if stationary else math.nan
        exact += p * value
        tail += float(p) * rest
    return Estimate(float(exact), 0.0, len(idx), config.horizon, exact, tail)


def simulate_payoff(game: StageGame, setup: CooperationSetup, model: WorldModel, pair: CooperationPair,
                    world: int, player: int, deviation: Optional[DeviationDescriptor] = None,
                    config: Optional[SimConfig] = None, cell: int = 0) -> Estimate:
    """Estimated payoff of ``player``'s type at ``world`` under conformity or a deviation.

    The opponent cooperates (grim trigger) at worlds in its K and punishes
    elsewhere. ``cell`` only enters the seed.
    """
    if config is None:
        raise ConfigError("a SimConfig is required")
    if model.players != 2:
        raise ConfigError("simulation handles two players")
    if not 0 <= world < model.n:
        raise ConfigError(f"world {world} is outside 0..{model.n - 1}")
    if player not in (0, 1):
        raise ConfigError("player must be 0 or 1")
    config.check(game, model)
    t = int(model.type_of(player, world))
    cooperating = bool(pair[player].mask[world])
    course, action, delay = course_of(deviation, cooperating)
    if config.enumerate:
        return _enumerate(game, setup, model, pair, player, t, course, action, delay, config)

    idx, wts = model.belief_arrays(player, t)
    probs = np.array([float(p) for p in wts])
    cum = np.cumsum(probs)
    lam_of = np.array([float(model.discount(player, int(w))) for w in idx])
    coop_of = pair[1 - player].mask[idx]
    sampler = _Sampler(game, setup, player)
    sizes = [min(CHUNK, config.samples - s) for s in range(0, config.samples, CHUNK)]
    base = [config.seed & _SEED_MASK, world, player, cell]

    def chunk(c):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(base + [c])))
        pick = np.minimum(np.searchsorted(cum, rng.random(sizes[c]) * cum[-1], side="right"), len(idx) - 1)
        return sampler.run(rng, lam_of[pick], coop_of[pick], course, action, delay, config.horizon)

    threads = min(thread_count(), len(sizes))
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(chunk, range(len(sizes))))
    else:
        parts = [chunk(c) for c in range(len(sizes))]
    values = np.concatenate(parts)
    stderr = float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0
    return Estimate(float(values.mean()), stderr, int(values.size), config.horizon)


@dataclass(frozen=True)
class Cell:
    world: int
    player: int
    kind: str              # "conform" or a deviation class
    action: Optional[int]
    delay: int
    analytic: Fraction
    estimate: float
    stderr: float
    z: float
    passed: bool

    def to_json(self, game: Optional[StageGame] = None) -> dict:
        label = self.action
        if game is not None and self.action is not None:
            label = game.actions[self.player][self.action]
        return {"world": self.world, "player": self.player + 1, "class": self.kind, "action": label,
                "delay": self.delay, "analytic": float(self.analytic), "estimate": self.estimate,
                "stderr": self.stderr, "z": self.z, "pass": self.passed}


@dataclass
class CrosscheckReport:
    cells: List[Cell] = field(default_factory=list)
    tail_tolerance: Fraction = Fraction(0)
    samples: int = 0
    horizon: int = 0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cells)

    @property
    def worst_z(self) -> float:
        return max((c.z for c in self.cells), default=0.0)

    def failures(self) -> List[Cell]:
        return [c for c in self.cells if not c.passed]

    def to_json(self, game: Optional[StageGame] = None) -> dict:
        return {"pass": self.passed, "worst_z": self.worst_z, "cells": len(self.cells),
                "samples": self.samples, "horizon": self.horizon,
                "tail_tolerance": float(self.tail_tolerance),
                "failures": [c.to_json(game) for c in self.failures()]}


def crosscheck(game: StageGame, setup: CooperationSetup, model: WorldModel, pair: CooperationPair,
               config: SimConfig, max_delay: int = 1) -> CrosscheckReport:
    """Compare simulated and closed-form payoffs for every world, player and course.

    A cell passes when |estimate - analytic| <= tail_tolerance + 3 s.e.; in
    enumerate mode the truncated sum must be within the tail tolerance.
    """
    config.check(game, model)
    tol = float(config.tail_tolerance)
    report = CrosscheckReport(tail_tolerance=config.tail_tolerance, samples=config.samples, horizon=config.horizon)
    for w in range(model.n):
        for i in range(2):
            view = setup.view(i)
            t = int(model.type_of(i, w))
            cooperating = bool(pair[i].mask[w])
            valuer = TypeValuer(view, model, i, t, pair[1 - i], JOINT)
            courses = [("conform", None, 1, None)]
            for kind, _, a, k in candidate_deviations(view, cooperating, max_delay):
                courses.append((kind, a, k, DeviationDescriptor(kind, a, w, i, Fraction(0), k)))
            for c, (kind, a, k, dev) in enumerate(courses):
                course, action, delay = course_of(dev, cooperating)
                analytic = valuer.value(course, action, delay)
                est = simulate_payoff(game, setup, model, pair, w, i, dev, config, cell=c)
                diff = abs(est.mean - float(analytic))
                if est.stderr > 0:
                    z = diff / est.stderr
                else:
                    z = 0.0 if diff <= tol else math.inf
                report.cells.append(Cell(w, i, kind, a, k, analytic, est.mean, est.stderr, z,
                                         diff <= tol + 3 * est.stderr))
    return report
