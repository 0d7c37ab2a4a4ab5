"""Exact classical (local deterministic) values by exhaustive enumeration."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .games import BiasVector, GameSpec, check_arity, coefficient_table, setting_tuples

TIE_ATOL = 1e-15


@dataclass(frozen=True, order=True)
class DeterministicStrategy:
    """Each party outputs a fixed bit per setting.

    ``code`` packs 2 bits per party, Alice most significant; within a party
    the bit for setting 0 comes first. ``bits`` renders e.g. ``"0001"``.
    """

    code: int
    parties: int = field(default=2, compare=False)

    def __post_init__(self):
        if not 0 <= self.code < 4 ** self.parties:
            raise ValueError(f"strategy code {self.code} out of range for {self.parties} parties")

    @property
    def bits(self) -> str:
        return format(self.code, f"0{2 * self.parties}b")

    def outcome(self, party: int, setting: int) -> int:
        return int(self.bits[2 * party + setting])

    def outcomes(self, settings) -> tuple[int, ...]:
        return tuple(self.outcome(k, s) for k, s in enumerate(settings))

    @classmethod
    def from_bits(cls, bits: str) -> "DeterministicStrategy":
        if len(bits) % 2 or set(bits) - {"0", "1"}:
            raise ValueError(f"bad strategy bits {bits!r}")
        return cls(int(bits, 2), len(bits) // 2)


def all_strategies(parties: int) -> list[DeterministicStrategy]:
    return [DeterministicStrategy(c, parties) for c in range(4 ** parties)]


@lru_cache(maxsize=None)
def _sign_matrix(parties: int) -> np.ndarray:
    """rows: strategies, cols: setting tuples; entry (-1)^XOR(outcomes)."""
    rows = []
    for strat in all_strategies(parties):
        rows.append([(-1) ** (sum(strat.outcomes(st)) & 1) for st in setting_tuples(parties)])
    m = np.array(rows, dtype=float)
    m.setflags(write=False)
    return m


def evaluate_strategy(game: GameSpec, bias: BiasVector, strat: DeterministicStrategy) -> float:
    check_arity(game, bias)
    if strat.parties != game.parties:
        raise ValueError("strategy arity does not match the game")
    total = 0.0
    for st in setting_tuples(game.parties):
        if game.rule(st, strat.outcomes(st)):
            total += bias.setting_prob(st)
    return total


def strategy_values(game: GameSpec, bias: BiasVector) -> np.ndarray:
    """Winning probability of every deterministic strategy, indexed by code."""
    table = coefficient_table(game, bias)
    bell = _sign_matrix(game.parties) @ np.array(table.as_tuple())
    return (1.0 + bell) / 2.0


@dataclass(frozen=True)
class ClassicalReport:
    max_probability: float
    argmax_strategies: tuple[DeterministicStrategy, ...]
    bias: BiasVector

    def to_dict(self) -> dict:
        return {
            "max": self.max_probability,
            "strategies": [s.bits for s in self.argmax_strategies],
            **self.bias.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def classical_max(game: GameSpec, bias: BiasVector) -> ClassicalReport:
    """Maximum over all 4**parties deterministic strategies, ties included."""
    check_arity(game, bias)
    strategies = all_strategies(game.parties)
    # exact per-strategy sums; the vectorised path is only used to shortlist
    fast = strategy_values(game, bias)
    shortlist = np.flatnonzero(fast >= fast.max() - 1e-9)
    exact = {int(c): evaluate_strategy(game, bias, strategies[c]) for c in shortlist}
    best = max(exact.values())
    winners = tuple(strategies[c] for c in sorted(exact) if best - exact[c] <= TIE_ATOL)
    return ClassicalReport(best, winners, bias)


def classical_max_value(game: GameSpec, bias: BiasVector) -> float:
    """Fast maximum winning probability (no argmax bookkeeping)."""
    check_arity(game, bias)
    return float(strategy_values(game, bias).max())


def in_canonical_quadrant(bias: BiasVector) -> bool:
    return all(0.5 <= x <= 1.0 for x in bias.components)


def classical_max_analytic(game: GameSpec, bias: BiasVector) -> float:
    """Closed form 1 - (1-p)(1-q), claimed for both games with all biases >= 1/2.

    For the CHSH game this matches enumeration. For the Svetlichny game it is
    only correct at r = 1 or p = q = 1/2; see ``classical_max``.
    """
    check_arity(game, bias)
    if not in_canonical_quadrant(bias):
        raise ValueError(f"bias {bias.components} is outside the canonical quadrant [1/2, 1]")
    return 1.0 - (1.0 - bias.p) * (1.0 - bias.q)
