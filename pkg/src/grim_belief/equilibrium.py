"""Verification and search for conditional grim-trigger equilibria.

Two independent routes decide whether a pair of cooperation events supports
an (epsilon-)equilibrium:

* ``verify_formula`` compares posteriors with the closed-form thresholds;
* ``verify_oracle`` (re-exported from :mod:`grim_belief.oracle`) enumerates
  deviations and compares expected payoffs directly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .belief_operators import ThresholdFunction, common_f_belief, f_belief, iterated_pair
from .belief_space import Event, WorldModel, is_measurable, lambda_event
from .errors import PreconditionError
from .oracle import EXPECTATION, JOINT, Oracle, TypeValuer, verify_oracle
from .rational import as_rational
from .reports import (ADOPT_GRIM, COOPERATE_ONCE, EQUILIBRIUM, FORMULA, NOT_EQUILIBRIUM, OUTSIDE_SCOPE,
                      STAGE1_DEVIATE, STAGE2_DEFECT, CooperationPair, DeviationDescriptor, Record,
                      VerificationReport, expand_type_records)
from .stage_game import (DELAYED, GRIM, PUNISH, STAGE1, CooperationSetup, StageGame, grim_trigger_threshold)
from .thresholds import (Moments, ThresholdBundle, cooperation_margin, expectation_thresholds,
                         high_discount_events, thresholds)

__all__ = [
    "verify_formula", "verify_oracle", "maximal_cooperation", "exhaustive_search",
    "multi_player_sufficient", "slack_constants", "constants_epsilon_bound", "two_action_shortcut",
]


def _witness(setup, model, player, t, K_other, mode, kind, course, action, cooperating):
    """Expected gain of one named deviation, for reporting only."""
    view = setup.view(player)
    valuer = TypeValuer(view, model, player, t, K_other, mode)
    base = valuer.value(GRIM if cooperating else PUNISH)
    gain = valuer.value(course, action, 1) - base
    w = int(model.type_members(player, t)[0])
    return DeviationDescriptor(kind, action, w, player, gain, 1)


def verify_formula(game: StageGame, setup: CooperationSetup, model: WorldModel, pair: CooperationPair,
                   epsilon=0, expectation: bool = False) -> VerificationReport:
    """Check the threshold characterisation for a cooperation pair.

    ``expectation=True`` uses belief-expected discounts (for models where a
    type does not pin its own discount); then, as for ``epsilon > 0``, the
    characterisation is only claimed when each K_i lies inside the
    high-discount event, and other pairs are reported as outside its scope.
    """
    eps = as_rational(epsilon)
    report = VerificationReport(EQUILIBRIUM, FORMULA, eps)
    report.flags.update(setup.standing_assumptions())
    for i in range(2):
        if setup.tau_best_response(i):
            report.notes.append(f"player {i + 1}: tau_i is a best response to sigma_j; the threshold "
                                "characterisation does not apply (use the oracle)")
        if setup.tau_in_support(i):
            report.notes.append(f"player {i + 1}: tau_i lies in the support of sigma_i")
    if report.notes:
        report.verdict = OUTSIDE_SCOPE
        return report
    mode = EXPECTATION if expectation else JOINT
    if expectation:
        exp = expectation_thresholds(game, setup, model, eps)
        bundle, lam = exp.bundle, exp.lambda_events
    else:
        if not model.knows_own_discount():
            raise PreconditionError("a type does not know its own discount; pass expectation=True")
        bundle = thresholds(game, setup, model, eps)
        lam = high_discount_events(game, setup, model)
    report.details = {"bundle": bundle, "lambda": lam}
    for i in range(2):
        outside = pair[i] - lam[i]
        report.flags[f"K{i + 1}_subset_Lambda{i + 1}"] = not len(outside)
        if len(outside) and (eps > 0 or expectation):
            report.verdict = OUTSIDE_SCOPE
            report.notes.append(f"K_{i + 1} is not contained in the high-discount event; the characterisation "
                                "is only stated for such pairs")
    if report.verdict == OUTSIDE_SCOPE:
        return report

    for i in range(2):
        j = 1 - i
        post = model.posteriors(i, pair[j])
        for t in range(model.type_count(i)):
            members = model.type_members(i, t)
            in_K = bool(pair[i].mask[members[0]])
            tt = bundle.type_values(i, t)
            P = post[t]
            if in_K and not lam[i].mask[members[0]]:
                report.records.extend(expand_type_records(model, i, t, "K-within-Lambda", 0, 0, False))
                cands = []
                for a in setup.view(i).deviations():
                    cands.append(_witness(setup, model, i, t, pair[j], mode, STAGE2_DEFECT, DELAYED, a, True))
                    cands.append(_witness(setup, model, i, t, pair[j], mode, STAGE1_DEVIATE, STAGE1, a, True))
                best = max(cands, key=lambda d: d.gain)
                if best.gain > 0:
                    report.witnesses.append(best)
                else:
                    report.verdict = OUTSIDE_SCOPE
                    report.notes.append(f"player {i + 1}, type {t}: below the grim-trigger discount yet no "
                                        "deviation gains (zero discount); necessity argument does not apply")
                continue
            if in_K:
                ok = P >= tt.f
                report.records.extend(expand_type_records(model, i, t, "cooperate-f", P, tt.f, ok))
                if not ok:
                    report.witnesses.append(_witness(setup, model, i, t, pair[j], mode, STAGE1_DEVIATE, STAGE1,
                                                     tt.f_action, True))
            else:
                g = tt.g
                ok = P <= g
                report.records.extend(expand_type_records(model, i, t, "punish-g", P, g, ok))
                if not ok:
                    comp = tt.g_component
                    if comp == "g1":
                        wit = _witness(setup, model, i, t, pair[j], mode, STAGE1_DEVIATE, STAGE1, tt.g1_action, False)
                    elif comp == "g2":
                        wit = _witness(setup, model, i, t, pair[j], mode, ADOPT_GRIM, GRIM, None, False)
                    else:
                        wit = _witness(setup, model, i, t, pair[j], mode, COOPERATE_ONCE, DELAYED, tt.g3_action, False)
                    report.witnesses.append(wit)
    if report.verdict != OUTSIDE_SCOPE and (report.witnesses or report.failures()):
        report.verdict = NOT_EQUILIBRIUM
    return report


def maximal_cooperation(game: StageGame, setup: CooperationSetup, model: WorldModel, C1: Event, C2: Event,
                        epsilon=0) -> Tuple[CooperationPair, VerificationReport]:
    """Largest cooperation events inside (C1, C2) passing the cooperating-type test.

    The pair is then verified in full; the report's details hold the
    iteration trace and the common-belief cross-check.
    """
    eps = as_rational(epsilon)
    lam = high_discount_events(game, setup, model)
    for i, C in enumerate((C1, C2)):
        if not is_measurable(model, i, C):
            raise PreconditionError(f"C_{i + 1} is not measurable for player {i + 1}")
        if not C.issubset(lam[i]):
            raise PreconditionError(f"C_{i + 1} leaves the high-discount event", (C - lam[i]).indices())
    bundle = thresholds(game, setup, model, eps)
    f = bundle.f_function()
    it = iterated_pair(model, f, C1, C2)
    pair = CooperationPair.of(model, it.D1, it.D2)
    report = verify_formula(game, setup, model, pair, eps)
    cb = common_f_belief(model, f, C1 & C2)
    report.flags["common_belief_agrees"] = all(cb.beliefs[i] == pair[i] for i in range(2))
    one_minus_g = bundle.complement_g_function()
    report.flags["punishers_believe_punishment"] = all(
        (~pair[i]).issubset(f_belief(model, i, one_minus_g, ~pair[1 - i])) for i in range(2))
    report.details = dict(getattr(report, "details", {}) or {}, iteration=it, common=cb, bundle=bundle)
    return pair, report


@dataclass
class SearchResult:
    pairs: List[CooperationPair]
    candidates: int

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)


def exhaustive_search(game: StageGame, setup: CooperationSetup, model: WorldModel, epsilon=0, cap: int = 20,
                      max_delay: int = 1, payoffs: str = JOINT) -> SearchResult:
    """Every measurable pair that the deviation oracle accepts.

    A player's conditions split over its types, so for each opponent event the
    admissible own events are enumerated directly; each surviving pair is
    then re-verified in full.
    """
    if model.players != 2:
        raise PreconditionError("search handles two players")
    counts = [model.type_count(i) for i in range(2)]
    for i, c in enumerate(counts):
        if c > cap:
            raise PreconditionError(f"player {i + 1} has {c} types, more than the cap {cap}")
    oracle = Oracle(game, setup, model, epsilon, max_delay, payoffs)
    if any(setup.tau_in_support(i) for i in range(2)):
        raise PreconditionError("tau_i lies in the support of sigma_i; deviations are not detectable")
    eps = oracle.epsilon

    def event(i, bits):
        sel = np.array([(bits >> t) & 1 for t in range(counts[i])], dtype=bool)
        return model.event_from_type_mask(i, sel)

    admissible_cache: Dict[Tuple[int, int], Optional[Tuple[int, List[int]]]] = {}

    def admissible(i, other_bits):
        """(forced bits, free types) for player i against opponent event, or None."""
        key = (i, other_bits)
        if key not in admissible_cache:
            K_other = event(1 - i, other_bits)
            forced, free = 0, []
            result = None
            for t in range(counts[i]):
                ok_in = oracle.type_gain(i, t, True, K_other)[0] <= eps
                ok_out = oracle.type_gain(i, t, False, K_other)[0] <= eps
                if ok_in and ok_out:
                    free.append(t)
                elif ok_in:
                    forced |= 1 << t
                elif not ok_out:
                    break
            else:
                result = (forced, free)
            admissible_cache[key] = result
        return admissible_cache[key]

    def members(spec):
        forced, free = spec
        for r in range(len(free) + 1):
            for combo in itertools.combinations(free, r):
                yield forced | sum(1 << t for t in combo)

    found = []
    for b2 in range(1 << counts[1]):
        spec1 = admissible(0, b2)
        if spec1 is None:
            continue
        for b1 in members(spec1):
            spec2 = admissible(1, b1)
            if spec2 is None:
                continue
            forced2, free2 = spec2
            if b2 & ~sum(1 << t for t in free2) == forced2:
                found.append((b1, b2))
    pairs = []
    for b1, b2 in found:
        pair = CooperationPair.of(model, event(0, b1), event(1, b2))
        if oracle.verify(pair).is_equilibrium:
            pairs.append((pair, b1, b2))
    pairs.sort(key=lambda x: (-x[0].size(), x[1], x[2]))
    return SearchResult([p for p, _, _ in pairs], (1 << counts[0]) * (1 << counts[1]))


@dataclass
class SufficiencyReport:
    status: str
    records: List[Record] = field(default_factory=list)
    constants: Dict[int, Fraction] = field(default_factory=dict)

    SUFFICIENT = "sufficient-conditions-met"
    INCONCLUSIVE = "inconclusive"

    @property
    def sufficient(self) -> bool:
        return self.status == self.SUFFICIENT


def multi_player_sufficient(game: StageGame, setup: CooperationSetup, model: WorldModel,
                            K: Sequence[Event]) -> SufficiencyReport:
    """Payoff-bound sufficient conditions for any number of players.

    With M_i the largest absolute stage payoff, each cooperating type must
    believe all others cooperate with probability at least f_i and each
    punishing type must believe anyone cooperates with probability at most g_i.
    Failure is inconclusive: the conditions are not necessary.
    """
    n = game.player_count
    if len(K) != n or model.players != n:
        raise PreconditionError("one cooperation event and one model coordinate per player required")
    report = SufficiencyReport(SufficiencyReport.SUFFICIENT)
    full = model.full()
    for i in range(n):
        if not is_measurable(model, i, K[i]):
            raise PreconditionError(f"K_{i + 1} is not measurable for player {i + 1}")
        lam0 = grim_trigger_threshold(game, setup, i)
        if not K[i].issubset(lambda_event(model, i, lam0)):
            raise PreconditionError(f"K_{i + 1} leaves the high-discount event")
    for i in range(n):
        v = setup.view(i)
        two_m = 2 * v.max_abs
        report.constants[i] = v.max_abs
        others = [j for j in range(n) if j != i]
        all_coop, any_coop = full, model.empty()
        for j in others:
            all_coop = all_coop & K[j]
            any_coop = any_coop | K[j]
        p_all = model.posteriors(i, all_coop)
        p_any = model.posteriors(i, any_coop)
        pure_sigma = v.sigma_support[0] if len(v.sigma_support) == 1 else None
        c = v.u_sigma - v.tau_vs_sigma
        g1 = Fraction(1)
        for a in v.deviations():
            if a == pure_sigma:
                continue
            d = v.u_sigma - v.vs_sigma[a]
            g1 = min(g1, d / (d + two_m))
        for t in range(model.type_count(i)):
            lam = model.type_discount(i, t)
            if lam is None:
                raise PreconditionError(f"player {i + 1}, type {t} does not know its own discount")
            m = Moments.point(lam)
            in_K = bool(K[i].mask[model.type_members(i, t)[0]])
            if in_K:
                f = max((two_m / (cooperation_margin(v, m, a) + two_m) for a in v.deviations()), default=Fraction(0))
                ok = p_all[t] >= f
                report.records.extend(expand_type_records(model, i, t, "all-cooperate-f", p_all[t], f, ok))
            else:
                g2 = (1 - lam) * c / ((1 - lam) * c + two_m)
                g = min(g1, g2)
                ok = p_any[t] <= g
                report.records.extend(expand_type_records(model, i, t, "any-cooperate-g", p_any[t], g, ok))
            if not ok:
                report.status = SufficiencyReport.INCONCLUSIVE
    return report


def slack_constants(setup: CooperationSetup, player: int) -> Tuple[Fraction, Fraction]:
    """(M_i, N_i) bounding the epsilon-slack of the thresholds.

    M_i = 2 (u_i(sigma) - u_i(tau_i, sigma_j)); N_i = 2 max(that gap, largest
    gain of a one-shot deviation against a cooperator relative to sigma_i).
    """
    v = setup.view(player)
    c = v.u_sigma - v.tau_vs_sigma
    e_max = max((v.vs_tau[a] - v.sigma_vs_tau for a in v.deviations()), default=Fraction(0))
    return 2 * c, 2 * max(c, e_max)


def constants_epsilon_bound(game: StageGame, setup: CooperationSetup, model: WorldModel, player: int) -> Fraction:
    """An epsilon below which f^eps < 1 - eps/M_i on high-discount types and
    g^eps > eps/N_i on every type (the explicit form of "small enough")."""
    v = setup.view(player)
    M, N = slack_constants(setup, player)
    c = v.u_sigma - v.tau_vs_sigma
    bounds = [M, N]
    lam0 = grim_trigger_threshold(game, setup, player)
    pure_sigma = v.sigma_support[0] if len(v.sigma_support) == 1 else None
    for lam in model.discount_values(player):
        m = Moments.point(lam)
        if lam >= lam0:
            for a in v.deviations():
                b = v.vs_sigma[a] - v.tau_vs_sigma
                if b <= 0:
                    continue
                X = cooperation_margin(v, m, a)
                if X + b > M:
                    bounds.append(X * M / (X + b - M))
        for a in v.deviations():
            if a == pure_sigma:
                continue
            e = v.vs_tau[a] - v.sigma_vs_tau
            if e <= 0:
                continue
            d = v.u_sigma - v.vs_sigma[a]
            if d + e - N > 0:
                bounds.append(N * d / (d + e - N))
        gap = v.u_tau * m.inv - v.sigma_vs_tau - v.u_sigma * m.ratio
        gaps = [gap] + [v.u_tau - v.sigma_vs_tau + (v.vs_tau[a] - v.u_sigma) * m.lam for a in v.deviations()]
        for h in gaps:
            if h > 0 and c + h - N > 0:
                bounds.append(N * c / (c + h - N))
    return min(bounds)


def two_action_shortcut(game: StageGame, setup: CooperationSetup, model: WorldModel, pair: CooperationPair) -> Optional[bool]:
    """Cheap check for games where each player has two actions.

    There g1 = 1 and, on the high-discount event, g2 = f <= g3, so the pair is
    an equilibrium iff K_i lies in that event and P_i(K_j) >= f_i on K_i while
    P_i(K_j) <= f_i on the high-discount part of the complement. Returns None
    when the shortcut does not apply.
    """
    if any(game.action_count(i) != 2 for i in range(2)):
        return None
    if any(setup.tau_best_response(i) or setup.tau_in_support(i) for i in range(2)):
        return None
    bundle = thresholds(game, setup, model)
    lam = high_discount_events(game, setup, model)
    for i in range(2):
        if not pair[i].issubset(lam[i]):
            return False
        post = model.posteriors(i, pair[1 - i])
        for t in range(model.type_count(i)):
            w = model.type_members(i, t)[0]
            f = bundle.type_values(i, t).f
            if pair[i].mask[w] and post[t] < f:
                return False
            if not pair[i].mask[w] and lam[i].mask[w] and post[t] > f:
                return False
    return True
