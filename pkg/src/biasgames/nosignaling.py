"""No-signalling boxes, PR and Svetlichny boxes, and the bipartite NS maximum."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np

from .classical import DeterministicStrategy, all_strategies
from .games import BiasVector, GameSpec, check_arity, setting_tuples
from .simplex import LPError, simplex_max

CHECK_ATOL = 1e-12
USE_ATOL = 1e-9


@dataclass(frozen=True)
class BehaviorBox:
    """P(outcomes | settings) stored with shape (2,)*parties + (2,)*parties.

    Axes are the settings (s, t[, u]) followed by the outcomes (a, b[, c]).
    """

    parties: int
    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        if t.shape != (2,) * (2 * self.parties):
            raise ValueError(f"box table has shape {t.shape}, expected {(2,) * (2 * self.parties)}")
        t = t.copy()
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    def prob(self, settings, outcomes) -> float:
        return float(self.table[tuple(settings) + tuple(outcomes)])

    def violations(self, atol: float = CHECK_ATOL) -> list[str]:
        """Human-readable list of failed positivity/normalisation/NS checks."""
        n = self.parties
        out = []
        if self.table.min() < -atol:
            out.append(f"negative entry {self.table.min():.3e}")
        norm = self.table.reshape((2,) * n + (-1,)).sum(axis=-1)
        if np.abs(norm - 1.0).max() > atol:
            out.append(f"normalisation off by {np.abs(norm - 1.0).max():.3e}")
        # every subset's marginal must not depend on the complement's settings
        for size in range(1, n):
            for subset in itertools.combinations(range(n), size):
                rest = [k for k in range(n) if k not in subset]
                marg = self.table.sum(axis=tuple(n + k for k in rest))
                spread = np.ptp(marg, axis=tuple(rest)).max()
                if spread > atol:
                    out.append(f"parties {subset} signal: spread {spread:.3e}")
        return out

    @property
    def is_valid(self) -> bool:
        return not self.violations()

    def correlator(self, subset, settings) -> float:
        """<prod_{k in subset} (-1)^{outcome_k}> at the given full setting tuple."""
        total = 0.0
        for out in setting_tuples(self.parties):
            sign = (-1) ** (sum(out[k] for k in subset) & 1)
            total += sign * self.table[tuple(settings) + out]
        return float(total)

    def to_list(self) -> list[float]:
        return [float(x) for x in self.table.ravel()]

    def to_json(self) -> str:
        return json.dumps({"parties": self.parties, "table": self.to_list()})

    @classmethod
    def from_json(cls, text: str) -> "BehaviorBox":
        d = json.loads(text)
        n = d["parties"]
        return cls(n, np.array(d["table"], dtype=float).reshape((2,) * (2 * n)))


def uniform_box(parties: int) -> BehaviorBox:
    return BehaviorBox(parties, np.full((2,) * (2 * parties), 1.0 / 2 ** parties))


def pr_box(alpha: int, beta: int, gamma: int) -> BehaviorBox:
    """P(a,b|s,t) = 1/2 iff a xor b = st xor alpha s xor beta t xor gamma."""
    t = np.zeros((2,) * 4)
    for s, tt, a, b in itertools.product((0, 1), repeat=4):
        if a ^ b == (s & tt) ^ (alpha & s) ^ (beta & tt) ^ gamma:
            t[s, tt, a, b] = 0.5
    return BehaviorBox(2, t)


def svetlichny_box() -> BehaviorBox:
    t = np.zeros((2,) * 6)
    for s, tt, u, a, b, c in itertools.product((0, 1), repeat=6):
        if a ^ b ^ c == (s & tt) ^ (tt & u) ^ (u & s):
            t[s, tt, u, a, b, c] = 0.25
    return BehaviorBox(3, t)


def local_box(strategy: DeterministicStrategy) -> BehaviorBox:
    n = strategy.parties
    t = np.zeros((2,) * (2 * n))
    for st in setting_tuples(n):
        t[st + strategy.outcomes(st)] = 1.0
    return BehaviorBox(n, t)


def game_objective(game: GameSpec, bias: BiasVector) -> np.ndarray:
    """c with game_value(box) = sum(c * box.table)."""
    check_arity(game, bias)
    c = np.zeros((2,) * (2 * game.parties))
    for st in setting_tuples(game.parties):
        for out in setting_tuples(game.parties):
            if game.rule(st, out):
                c[st + out] = bias.setting_prob(st)
    return c


def game_value(box: BehaviorBox, game: GameSpec, bias: BiasVector) -> float:
    if box.parties != game.parties:
        raise ValueError("box and game have different party counts")
    bad = box.violations(USE_ATOL)
    if bad:
        raise ValueError("invalid behaviour box: " + "; ".join(bad))
    return float(np.sum(game_objective(game, bias) * box.table))


def ns_constraints() -> tuple[np.ndarray, np.ndarray]:
    """Equality rows over the 16 entries of a bipartite box (index order s,t,a,b).

    4 normalisation rows, then 4 rows for Alice's marginals and 4 for Bob's.
    The system has rank 8; the solver discards the redundant rows.
    """
    def idx(s, t, a, b):
        return ((s * 2 + t) * 2 + a) * 2 + b

    rows, rhs = [], []
    for s, t in itertools.product((0, 1), repeat=2):
        row = np.zeros(16)
        for a, b in itertools.product((0, 1), repeat=2):
            row[idx(s, t, a, b)] = 1.0
        rows.append(row)
        rhs.append(1.0)
    for s, a in itertools.product((0, 1), repeat=2):
        row = np.zeros(16)
        for b in (0, 1):
            row[idx(s, 0, a, b)] += 1.0
            row[idx(s, 1, a, b)] -= 1.0
        rows.append(row)
        rhs.append(0.0)
    for t, b in itertools.product((0, 1), repeat=2):
        row = np.zeros(16)
        for a in (0, 1):
            row[idx(0, t, a, b)] += 1.0
            row[idx(1, t, a, b)] -= 1.0
        rows.append(row)
        rhs.append(0.0)
    return np.array(rows), np.array(rhs)


def ns_maximize_objective(objective) -> tuple[float, BehaviorBox]:
    """Maximise sum(objective * P) over the bipartite no-signalling polytope."""
    c = np.asarray(objective, dtype=float).reshape(16)
    a_eq, b_eq = ns_constraints()
    try:
        res = simplex_max(c, a_eq, b_eq)
    except LPError as exc:
        raise RuntimeError(f"no-signalling LP failed: {exc}") from exc
    x = np.clip(res.x, 0.0, None)
    return res.value, BehaviorBox(2, x.reshape((2,) * 4))


def ns_maximize(game: GameSpec, bias: BiasVector) -> tuple[float, BehaviorBox]:
    if game.parties != 2:
        raise ValueError("LP maximisation is only implemented for two parties; use svetlichny_box")
    return ns_maximize_objective(game_objective(game, bias))


def ns_vertices(local_only: bool = False) -> list[BehaviorBox]:
    """The 24 extremal bipartite boxes: 16 deterministic, then 8 PR variants."""
    boxes = [local_box(s) for s in all_strategies(2)]
    if not local_only:
        boxes += [pr_box(al, be, ga) for al, be, ga in itertools.product((0, 1), repeat=3)]
    return boxes


def ns_vertex_objective(objective, local_only: bool = False) -> float:
    c = np.asarray(objective, dtype=float).reshape((2,) * 4)
    return max(float(np.sum(c * v.table)) for v in ns_vertices(local_only))


def ns_vertex_oracle(game: GameSpec, bias: BiasVector, local_only: bool = False) -> float:
    if game.parties != 2:
        raise ValueError("vertex oracle is only available for two parties")
    return ns_vertex_objective(game_objective(game, bias), local_only)
