"""Finite belief spaces: worlds, discount factors, types and type beliefs.

Worlds are indexed ``0..n-1``. Each player's information is a partition of
the worlds into types; every type carries one probability distribution over
worlds. Probabilities are stored per type as integer numerators over a common
denominator so that posteriors of whole events are exact and vectorised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import ModelError, PreconditionError
from .rational import as_rational

_INT64_SAFE = 2 ** 62


class Event:
    """An immutable set of world indices backed by a boolean mask."""

    __slots__ = ("_mask",)

    def __init__(self, mask):
        m = np.array(mask, dtype=bool)
        if m.ndim != 1:
            raise ValueError("event mask must be one-dimensional")
        m.flags.writeable = False
        self._mask = m

    @classmethod
    def of(cls, n: int, worlds: Iterable[int]) -> "Event":
        m = np.zeros(n, dtype=bool)
        idx = np.fromiter((int(w) for w in worlds), dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= n):
            raise ModelError(f"world index out of range 0..{n - 1}")
        m[idx] = True
        return cls(m)

    @classmethod
    def empty(cls, n: int) -> "Event":
        return cls(np.zeros(n, dtype=bool))

    @classmethod
    def full(cls, n: int) -> "Event":
        return cls(np.ones(n, dtype=bool))

    @property
    def mask(self) -> np.ndarray:
        return self._mask

    @property
    def universe(self) -> int:
        return self._mask.size

    def indices(self) -> Tuple[int, ...]:
        return tuple(int(k) for k in np.flatnonzero(self._mask))

    def _other(self, other) -> np.ndarray:
        if not isinstance(other, Event):
            raise TypeError(f"expected an Event, got {type(other).__name__}")
        if other.universe != self.universe:
            raise ValueError("events live in different world sets")
        return other._mask

    def __and__(self, other):
        return Event(self._mask & self._other(other))

    def __or__(self, other):
        return Event(self._mask | self._other(other))

    def __sub__(self, other):
        return Event(self._mask & ~self._other(other))

    def __xor__(self, other):
        return Event(self._mask ^ self._other(other))

    def __invert__(self):
        return Event(~self._mask)

    def issubset(self, other: "Event") -> bool:
        return not np.any(self._mask & ~self._other(other))

    __le__ = issubset

    def __len__(self):
        return int(self._mask.sum())

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices())

    def __contains__(self, world) -> bool:
        return 0 <= world < self.universe and bool(self._mask[world])

    def __eq__(self, other):
        return isinstance(other, Event) and other.universe == self.universe and bool(np.array_equal(self._mask, other._mask))

    def __hash__(self):
        return hash((self.universe, np.packbits(self._mask).tobytes()))

    def __repr__(self):
        if len(self) <= 12:
            return f"Event({set(self.indices()) or '{}'})"
        return f"Event(<{len(self)} of {self.universe} worlds>)"


@dataclass
class _TypeBeliefs:
    """CSR layout of one player's type beliefs."""

    indptr: np.ndarray
    indices: np.ndarray
    numerators: np.ndarray
    denominators: Tuple[int, ...]

    def weights(self, t: int) -> Tuple[np.ndarray, List[Fraction]]:
        lo, hi = self.indptr[t], self.indptr[t + 1]
        den = self.denominators[t]
        return self.indices[lo:hi], [Fraction(int(x), den) for x in self.numerators[lo:hi]]

    def event_sums(self, mask: np.ndarray) -> np.ndarray:
        vals = self.numerators * mask[self.indices]
        cs = np.concatenate([np.zeros(1, dtype=vals.dtype), np.cumsum(vals)])
        return cs[self.indptr[1:]] - cs[self.indptr[:-1]]


def _pack_beliefs(per_type: Sequence[Tuple[np.ndarray, Sequence[int], int]]) -> _TypeBeliefs:
    """Pack ``(indices, integer numerators, denominator)`` triples into CSR."""
    indptr = [0]
    idx_parts, num_parts, dens = [], [], []
    big = False
    for idx, num, den in per_type:
        idx = np.asarray(idx, dtype=np.int64)
        num = list(num) if not isinstance(num, np.ndarray) else num
        if len(num) != idx.size:
            raise ModelError("belief indices and weights differ in length")
        idx_parts.append(idx)
        num_parts.append(num)
        dens.append(int(den))
        indptr.append(indptr[-1] + idx.size)
        if isinstance(num, np.ndarray) and num.dtype != object:
            peak = int(np.abs(num).max()) if num.size else 0
        else:
            peak = max((abs(int(x)) for x in num), default=0)
        if peak * max(idx.size, 1) >= _INT64_SAFE:
            big = True
    dtype = object if big else np.int64
    indices = np.concatenate(idx_parts) if idx_parts else np.zeros(0, dtype=np.int64)
    if num_parts:
        numerators = np.concatenate([np.asarray(p, dtype=dtype) if not big else np.array([int(x) for x in p], dtype=object)
                                     for p in num_parts])
    else:
        numerators = np.zeros(0, dtype=np.int64)
    return _TypeBeliefs(np.asarray(indptr, dtype=np.int64), indices, numerators, tuple(dens))


def _dist_to_triple(dist) -> Tuple[np.ndarray, List[int], int]:
    """Normalise a belief given as a mapping or (indices, weights) pair."""
    if isinstance(dist, Mapping):
        items = [(int(w), as_rational(p)) for w, p in dist.items()]
    else:
        idx, wts = dist
        items = [(int(w), as_rational(p)) for w, p in zip(idx, wts)]
    merged: Dict[int, Fraction] = {}
    for w, p in items:
        merged[w] = merged.get(w, Fraction(0)) + p
    items = sorted((w, p) for w, p in merged.items() if p != 0)
    den = 1
    for _, p in items:
        den = math.lcm(den, p.denominator)
    return (np.array([w for w, _ in items], dtype=np.int64),
            [p.numerator * (den // p.denominator) for _, p in items], den)


class WorldModel:
    """Finite belief space with per-world discount factors.

    Parameters
    ----------
    discounts:
        One sequence per world with a discount factor per player.
    types:
        Per player, either a list of world-index lists (the partition) or an
        integer array giving each world's type.
    beliefs:
        Per player, one distribution per type: a ``{world: probability}``
        mapping or an ``(indices, probabilities)`` pair.
    prior:
        Optional common prior, one probability per world.
    """

    def __init__(self, discounts, types, beliefs, prior=None, labels=None, type_labels=None):
        rows = [tuple(as_rational(x) for x in row) for row in discounts]
        if not rows:
            raise ModelError("a model needs at least one world")
        players = len(rows[0])
        if any(len(r) != players for r in rows):
            raise ModelError("every world needs one discount factor per player")
        lam_values, lam_index = [], []
        for i in range(players):
            col = [r[i] for r in rows]
            values = tuple(sorted(set(col)))
            lookup = {v: k for k, v in enumerate(values)}
            lam_values.append(values)
            lam_index.append(np.array([lookup[v] for v in col], dtype=np.int64))
        packed = [_pack_beliefs([_dist_to_triple(d) for d in beliefs[i]]) for i in range(players)]
        self._init(len(rows), players, lam_values, lam_index, types, packed, prior, labels, type_labels)

    @classmethod
    def from_arrays(cls, n: int, lam_values, lam_index, type_of, belief_triples, prior=None,
                    labels=None, type_labels=None) -> "WorldModel":
        """Construct without per-world Python objects (large grids).

        ``belief_triples[i][t]`` is ``(indices, integer numerators, denominator)``.
        """
        obj = cls.__new__(cls)
        packed = [_pack_beliefs(bt) for bt in belief_triples]
        obj._init(n, len(lam_values), [tuple(as_rational(v) for v in vals) for vals in lam_values],
                  [np.asarray(ix, dtype=np.int64) for ix in lam_index], type_of, packed, prior, labels, type_labels)
        return obj

    @classmethod
    def from_prior(cls, discounts, types, prior, labels=None, type_labels=None) -> "WorldModel":
        """Derive type beliefs by conditioning a common prior on each type.

        Types of prior mass zero get the uniform distribution over their worlds.
        """
        prior = [as_rational(p) for p in prior]
        beliefs = []
        for partition in types:
            if not isinstance(partition[0], (list, tuple, np.ndarray)):
                partition = _partition_from_labels(partition)
            per = []
            for cell in partition:
                mass = sum(prior[w] for w in cell)
                if mass > 0:
                    per.append({w: prior[w] / mass for w in cell if prior[w] > 0})
                else:
                    per.append({w: Fraction(1, len(cell)) for w in cell})
            beliefs.append(per)
        return cls(discounts, types, beliefs, prior=prior, labels=labels, type_labels=type_labels)

    def _init(self, n, players, lam_values, lam_index, types, packed, prior, labels, type_labels):
        self.n = int(n)
        self.players = int(players)
        if len(types) != self.players or len(packed) != self.players:
            raise ModelError(f"expected types and beliefs for {self.players} players")
        for i in range(self.players):
            if any(not (0 <= v < 1) for v in lam_values[i]):
                raise ModelError(f"player {i + 1}: discount factors must lie in [0, 1)")
            if lam_index[i].shape != (self.n,):
                raise ModelError("discount index has the wrong length")
        self._lam_values = [tuple(v) for v in lam_values]
        self._lam_index = lam_index
        self._type_of: List[np.ndarray] = []
        self._members: List[List[np.ndarray]] = []
        for i in range(self.players):
            type_of = self._read_partition(types[i], i)
            self._type_of.append(type_of)
            order = np.argsort(type_of, kind="stable")
            counts = np.bincount(type_of)
            self._members.append(np.split(order, np.cumsum(counts)[:-1]))
        for i, bel in enumerate(packed):
            if len(bel.denominators) != len(self._members[i]):
                raise ModelError(f"player {i + 1}: {len(bel.denominators)} beliefs for {len(self._members[i])} types")
            if bel.indices.size and (bel.indices.min() < 0 or bel.indices.max() >= self.n):
                raise ModelError(f"player {i + 1}: belief mentions a world outside 0..{self.n - 1}")
        self._beliefs = packed
        self.prior: Optional[Tuple[Fraction, ...]] = None
        if prior is not None:
            pr = tuple(as_rational(p) for p in prior)
            if len(pr) != self.n:
                raise ModelError(f"prior has {len(pr)} entries for {self.n} worlds")
            self.prior = pr
        self.labels: Optional[Tuple[str, ...]] = tuple(labels) if labels is not None else None
        if self.labels is not None and len(self.labels) != self.n:
            raise ModelError("one label per world required")
        self.type_labels: Optional[List[Tuple[str, ...]]] = None
        if type_labels is not None:
            self.type_labels = [tuple(tl) for tl in type_labels]
            for i, tl in enumerate(self.type_labels):
                if len(tl) != len(self._members[i]):
                    raise ModelError(f"player {i + 1}: one label per type required")
        self._lambda_cache: Dict[Tuple[int, Fraction], Event] = {}

    def _read_partition(self, spec, player) -> np.ndarray:
        if not isinstance(spec, np.ndarray) and len(spec) and isinstance(spec[0], (int, np.integer)):
            spec = np.asarray(spec, dtype=np.int64)
        if isinstance(spec, np.ndarray) and spec.ndim == 1 and spec.dtype != object:
            type_of = spec.astype(np.int64)
            if type_of.shape != (self.n,):
                raise ModelError(f"player {player + 1}: type array has the wrong length")
        else:
            type_of = np.full(self.n, -1, dtype=np.int64)
            for t, cell in enumerate(spec):
                for w in cell:
                    w = int(w)
                    if not 0 <= w < self.n:
                        raise ModelError(f"player {player + 1}, type {t}: world {w} out of range")
                    if type_of[w] != -1:
                        raise ModelError(f"player {player + 1}: world {w} lies in two types")
                    type_of[w] = t
        if np.any(type_of < 0):
            missing = np.flatnonzero(type_of < 0)[:5].tolist()
            raise ModelError(f"player {player + 1}: worlds {missing} belong to no type")
        counts = np.bincount(type_of)
        if np.any(counts == 0):
            raise ModelError(f"player {player + 1}: empty type {int(np.flatnonzero(counts == 0)[0])}")
        return type_of

    # ---- discounts -------------------------------------------------------
    def discount(self, player: int, world: int) -> Fraction:
        return self._lam_values[player][self._lam_index[player][world]]

    def discount_vector(self, world: int) -> Tuple[Fraction, ...]:
        return tuple(self.discount(i, world) for i in range(self.players))

    def discount_values(self, player: int) -> Tuple[Fraction, ...]:
        return self._lam_values[player]

    def discount_index(self, player: int) -> np.ndarray:
        return self._lam_index[player]

    def type_discount(self, player: int, t: int) -> Optional[Fraction]:
        """The player's own discount on type ``t``, or None if it varies."""
        ix = np.unique(self._lam_index[player][self._members[player][t]])
        return self._lam_values[player][int(ix[0])] if ix.size == 1 else None

    def knows_own_discount(self, player: Optional[int] = None) -> bool:
        players = range(self.players) if player is None else [player]
        return all(self.type_discount(i, t) is not None for i in players for t in range(self.type_count(i)))

    # ---- types -----------------------------------------------------------
    def type_count(self, player: int) -> int:
        return len(self._members[player])

    def type_of(self, player: int, world: Optional[int] = None):
        if world is None:
            return self._type_of[player]
        return int(self._type_of[player][world])

    def type_members(self, player: int, t: int) -> np.ndarray:
        return self._members[player][t]

    def type_label(self, player: int, t: int) -> str:
        if self.type_labels is not None:
            return self.type_labels[player][t]
        return str(t)

    def type_index(self, player: int, key: Union[int, str]) -> int:
        if isinstance(key, str) and self.type_labels is not None and key in self.type_labels[player]:
            return self.type_labels[player].index(key)
        try:
            t = int(key)
        except (TypeError, ValueError):
            raise ModelError(f"player {player + 1} has no type {key!r}") from None
        if not 0 <= t < self.type_count(player):
            raise ModelError(f"player {player + 1} has no type {t}")
        return t

    def type_event(self, player: int, types: Iterable[int]) -> Event:
        sel = np.zeros(self.type_count(player), dtype=bool)
        sel[list(types)] = True
        return Event(sel[self._type_of[player]])

    def event_from_type_mask(self, player: int, selected: np.ndarray) -> Event:
        return Event(np.asarray(selected, dtype=bool)[self._type_of[player]])

    def types_in(self, player: int, event: Event) -> Tuple[int, ...]:
        """Types wholly contained in the event."""
        return tuple(int(t) for t in np.flatnonzero(self._type_fill(player, event) == 1))

    def _type_fill(self, player: int, event: Event) -> np.ndarray:
        inside = np.bincount(self._type_of[player], weights=event.mask, minlength=self.type_count(player))
        sizes = np.bincount(self._type_of[player], minlength=self.type_count(player))
        return inside / sizes

    # ---- beliefs ---------------------------------------------------------
    def belief(self, player: int, t: int) -> Dict[int, Fraction]:
        idx, wts = self._beliefs[player].weights(t)
        return {int(w): p for w, p in zip(idx, wts)}

    def belief_arrays(self, player: int, t: int) -> Tuple[np.ndarray, List[Fraction]]:
        return self._beliefs[player].weights(t)

    def posteriors(self, player: int, event: Event) -> List[Fraction]:
        """P_i(event | type) for every type of the player."""
        bel = self._beliefs[player]
        sums = bel.event_sums(event.mask)
        return [Fraction(int(s), d) for s, d in zip(sums, bel.denominators)]

    def posterior(self, player: int, event: Event, world: int) -> Fraction:
        if not 0 <= world < self.n:
            raise ModelError(f"world {world} out of range 0..{self.n - 1}")
        t = int(self._type_of[player][world])
        idx, wts = self._beliefs[player].weights(t)
        return sum((p for w, p in zip(idx, wts) if event.mask[w]), Fraction(0))

    def full(self) -> Event:
        return Event.full(self.n)

    def empty(self) -> Event:
        return Event.empty(self.n)

    def world_label(self, world: int) -> str:
        if self.labels is not None:
            return self.labels[world]
        return "(" + ",".join(str(self.discount(i, world)) for i in range(self.players)) + ")"

    def __repr__(self):
        return f"WorldModel(n={self.n}, players={self.players}, types={[self.type_count(i) for i in range(self.players)]})"


def _partition_from_labels(type_of):
    cells: Dict[int, List[int]] = {}
    for w, t in enumerate(type_of):
        cells.setdefault(int(t), []).append(w)
    return [cells[t] for t in sorted(cells)]


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    player: Optional[int] = None
    type: Optional[int] = None
    world: Optional[int] = None


@dataclass
class ValidationReport:
    violations: List[Violation] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def codes(self) -> List[str]:
        return [v.code for v in self.violations]

    def __bool__(self):
        return self.valid


def validate_model(model: WorldModel, require_own_discount: bool = False) -> ValidationReport:
    """List every violated consistency condition with its location."""
    out: List[Violation] = []
    for i in range(model.players):
        bel = model._beliefs[i]
        for t in range(model.type_count(i)):
            idx, wts = bel.weights(t)
            total = sum(wts, Fraction(0))
            if any(p < 0 for p in wts):
                out.append(Violation("belief-negative", f"player {i + 1}, type {t}: negative probability", i, t))
            if total != 1:
                out.append(Violation("belief-sum", f"player {i + 1}, type {t}: probabilities sum to {total}", i, t))
            outside = [int(w) for w in idx if model.type_of(i, int(w)) != t]
            if outside:
                out.append(Violation("knows-own-belief",
                                     f"player {i + 1}, type {t}: belief charges worlds {outside[:5]} of other types",
                                     i, t, outside[0]))
            if require_own_discount and model.type_discount(i, t) is None:
                w = int(model.type_members(i, t)[0])
                out.append(Violation("own-discount", f"player {i + 1}, type {t}: own discount varies within the type",
                                     i, t, w))
    if model.prior is not None:
        pr = model.prior
        if any(p < 0 for p in pr):
            out.append(Violation("prior-negative", "prior has negative entries"))
        if sum(pr) != 1:
            out.append(Violation("prior-sum", f"prior sums to {sum(pr)}"))
        for i in range(model.players):
            for t in range(model.type_count(i)):
                cell = [int(w) for w in model.type_members(i, t)]
                mass = sum((pr[w] for w in cell), Fraction(0))
                if mass <= 0:
                    continue
                want = {w: pr[w] / mass for w in cell if pr[w] != 0}
                if model.belief(i, t) != want:
                    out.append(Violation("prior-consistency",
                                         f"player {i + 1}, type {t}: belief differs from the conditioned prior", i, t))
    return ValidationReport(out)


def require_valid(model: WorldModel, require_own_discount: bool = False) -> WorldModel:
    report = validate_model(model, require_own_discount)
    if not report.valid:
        raise PreconditionError("; ".join(v.message for v in report.violations[:5]), report.violations)
    return model


def posterior(model: WorldModel, player: int, event: Event, world: int) -> Fraction:
    return model.posterior(player, event, world)


def is_measurable(model: WorldModel, player: int, event: Event) -> bool:
    """True iff the event is a union of the player's types."""
    fill = model._type_fill(player, event)
    return bool(np.all((fill == 0) | (fill == 1)))


def lambda_event(model: WorldModel, player: int, threshold) -> Event:
    """Worlds where the player's discount factor is at least ``threshold``."""
    threshold = as_rational(threshold)
    key = (player, threshold)
    cached = model._lambda_cache.get(key)
    if cached is None:
        ok = np.array([v >= threshold for v in model.discount_values(player)], dtype=bool)
        cached = model._lambda_cache[key] = Event(ok[model.discount_index(player)])
    return cached


def measurable_events(model: WorldModel, player: int, cap: int = 20) -> Iterator[Event]:
    """Every union of the player's types, in binary-counter order."""
    count = model.type_count(player)
    if count > cap:
        raise PreconditionError(f"player {player + 1} has {count} types, more than the cap {cap}")
    type_of = model.type_of(player)
    for bits in range(1 << count):
        sel = np.array([(bits >> t) & 1 for t in range(count)], dtype=bool)
        yield Event(sel[type_of])


# ---- grid builders -------------------------------------------------------

def cell_grid(n: int) -> Tuple[Fraction, ...]:
    """Left endpoints k/n of n equal cells covering [0, 1).

    Each grid value stands for the cell [k/n, (k+1)/n), so the mass of
    ``{values >= k/n}`` under a uniform cell measure is exactly 1 - k/n.
    """
    return tuple(Fraction(k, n) for k in range(n))


BeliefRule = Callable[[int], Tuple[Sequence[int], Sequence[int], int]]


def product_model(values_1: Sequence, values_2: Sequence, rule_1: BeliefRule, rule_2: BeliefRule) -> WorldModel:
    """Two-player model on the grid values_1 x values_2, types = own coordinate.

    ``rule_i(k)`` returns the belief of player i's type k about the opponent's
    coordinate as ``(opponent indices, integer numerators, denominator)``.
    World ``k1 * len(values_2) + k2`` carries discounts (values_1[k1], values_2[k2]).
    """
    n1, n2 = len(values_1), len(values_2)
    n = n1 * n2
    k1 = np.repeat(np.arange(n1), n2)
    k2 = np.tile(np.arange(n2), n1)
    triples_1, triples_2 = [], []
    for a in range(n1):
        opp, num, den = rule_1(a)
        triples_1.append((a * n2 + np.asarray(opp, dtype=np.int64), np.asarray(num), den))
    for b in range(n2):
        opp, num, den = rule_2(b)
        triples_2.append((np.asarray(opp, dtype=np.int64) * n2 + b, np.asarray(num), den))
    return WorldModel.from_arrays(n, [values_1, values_2], [k1, k2], [k1, k2], [triples_1, triples_2])


def uniform_rule(n_opponent: int) -> BeliefRule:
    opp = np.arange(n_opponent)
    ones = np.ones(n_opponent, dtype=np.int64)
    return lambda k: (opp, ones, n_opponent)


def uniform_grid_model(values: Sequence) -> WorldModel:
    """Independent uniform beliefs over a square grid of discount factors."""
    rule = uniform_rule(len(values))
    return product_model(values, values, rule, rule)


def window_rule(n: int, half_width_cells: int) -> BeliefRule:
    """Uniform belief over the cells within ``half_width_cells`` of one's own.

    Type k believes the opponent's value lies uniformly in [k/n - e, k/n + e)
    with e = half_width_cells / n, truncated to [0, 1) and renormalised.
    """
    m = int(half_width_cells)
    if m < 1:
        raise ModelError("window must cover at least one cell on each side")

    def rule(k):
        lo, hi = max(0, k - m), min(n - 1, k + m - 1)
        opp = np.arange(lo, hi + 1)
        return opp, np.ones(opp.size, dtype=np.int64), opp.size
    return rule


def window_grid_model(n: int, epsilon) -> WorldModel:
    """Grid model where each player believes the opponent is within epsilon of its own value."""
    epsilon = as_rational(epsilon)
    m = epsilon * n
    if m.denominator != 1:
        raise ModelError(f"epsilon {epsilon} is not a whole number of grid cells of width 1/{n}")
    rule = window_rule(n, int(m))
    values = cell_grid(n)
    return product_model(values, values, rule, rule)
