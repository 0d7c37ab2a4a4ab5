"""Biased XOR games: winning rule, product input distribution, Bell coefficients.

Setting and outcome tuples are always ordered lexicographically, party by
party (Alice, Bob[, Charlie]).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Callable, Iterator, Optional

import numpy as np

PARTY_NAMES = ("alice", "bob", "charlie")


def setting_tuples(parties: int) -> list[tuple[int, ...]]:
    return list(itertools.product((0, 1), repeat=parties))


@dataclass(frozen=True)
class GameSpec:
    """An XOR game: the parties win iff XOR(outcomes) == target(settings)."""

    name: str
    parties: int
    target: Callable[[tuple[int, ...]], int]

    def __post_init__(self):
        if self.parties not in (2, 3):
            raise ValueError("only 2- and 3-party games are supported")

    def rule(self, settings, outcomes) -> bool:
        _check_bits(settings, self.parties)
        _check_bits(outcomes, self.parties)
        parity = 0
        for o in outcomes:
            parity ^= o
        return parity == (self.target(tuple(settings)) & 1)

    def target_bits(self) -> np.ndarray:
        """Winning parity for every setting tuple, as a (2,)*parties array."""
        out = np.zeros((2,) * self.parties, dtype=int)
        for st in setting_tuples(self.parties):
            out[st] = self.target(st) & 1
        return out


def _check_bits(values, parties):
    if len(values) != parties or any(v not in (0, 1) for v in values):
        raise ValueError(f"expected {parties} binary values, got {values!r}")


def chsh_game() -> GameSpec:
    return GameSpec("chsh", 2, lambda st: st[0] & st[1])


def svetlichny_game() -> GameSpec:
    return GameSpec("svetlichny", 3, lambda st: (st[0] & st[1]) ^ (st[1] & st[2]) ^ (st[2] & st[0]))


def xor_game(parties: int, target, name: str = "xor") -> GameSpec:
    """Arbitrary XOR game from a callable or a {settings: bit} mapping."""
    if not callable(target):
        table = {tuple(k): int(v) for k, v in dict(target).items()}
        fn = table.__getitem__
    else:
        fn = target
    return GameSpec(name, parties, fn)


GAMES = {"chsh": chsh_game, "svetlichny": svetlichny_game}


def game_by_name(name: str) -> GameSpec:
    try:
        return GAMES[name]()
    except KeyError:
        raise ValueError(f"unknown game {name!r}; choose from {sorted(GAMES)}") from None


def filter_v(game: GameSpec, settings, outcomes) -> int:
    return int(game.rule(settings, outcomes))


@dataclass(frozen=True)
class BiasVector:
    """Probabilities of choosing setting 0 for each party."""

    p: float
    q: float
    r: Optional[float] = None

    def __post_init__(self):
        for name in ("p", "q", "r"):
            v = getattr(self, name)
            if v is None:
                continue
            v = float(v)
            if not (0.0 <= v <= 1.0) or np.isnan(v):
                raise ValueError(f"bias component {name}={v} is outside [0, 1]")
            object.__setattr__(self, name, v)

    @property
    def parties(self) -> int:
        return 2 if self.r is None else 3

    @property
    def components(self) -> tuple[float, ...]:
        return (self.p, self.q) if self.r is None else (self.p, self.q, self.r)

    def setting_prob(self, settings) -> float:
        prob = 1.0
        for x, s in zip(self.components, settings):
            prob *= x if s == 0 else 1.0 - x
        return prob

    def joint(self) -> np.ndarray:
        """p(settings) as a (2,)*parties array; always a product distribution."""
        out = np.ones((2,) * self.parties)
        for st in setting_tuples(self.parties):
            out[st] = self.setting_prob(st)
        return out

    def replace(self, **kw) -> "BiasVector":
        d = {"p": self.p, "q": self.q, "r": self.r}
        d.update(kw)
        return BiasVector(**d)

    def to_dict(self) -> dict:
        d = {"p": self.p, "q": self.q}
        if self.r is not None:
            d["r"] = self.r
        return d


def check_arity(game: GameSpec, bias: BiasVector) -> None:
    if game.parties != bias.parties:
        raise ValueError(
            f"game {game.name!r} has {game.parties} parties but bias has {bias.parties} components"
        )


def game_to_json(game: GameSpec, bias: BiasVector) -> str:
    return json.dumps({"game": game.name, **bias.to_dict()}, sort_keys=True)


def game_from_json(text: str) -> tuple[GameSpec, BiasVector]:
    d = json.loads(text)
    game = game_by_name(d["game"])
    bias = BiasVector(d["p"], d["q"], d.get("r"))
    check_arity(game, bias)
    return game, bias


@dataclass(frozen=True)
class CoefficientTable:
    """Signed Bell-function weights, one per setting tuple.

    ``weights[s, t(, u)] = p(settings) * (-1)**target(settings)``.
    """

    weights: np.ndarray

    @property
    def parties(self) -> int:
        return self.weights.ndim

    def items(self) -> Iterator[tuple[tuple[int, ...], float]]:
        for st in setting_tuples(self.parties):
            yield st, float(self.weights[st])

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(w for _, w in self.items())

    def __getitem__(self, settings) -> float:
        return float(self.weights[tuple(settings)])


def coefficient_table(game: GameSpec, bias: BiasVector) -> CoefficientTable:
    check_arity(game, bias)
    signs = 1 - 2 * game.target_bits()
    w = bias.joint() * signs
    w.setflags(write=False)
    return CoefficientTable(w)


def winning_probability_identity(game: GameSpec, bias: BiasVector, bell_value: float) -> float:
    """P(win) = (1 + <Bell>)/2 for XOR games."""
    if abs(bell_value) > 1.0 + 1e-12:
        raise ValueError(f"Bell value {bell_value} outside [-1, 1]")
    return (1.0 + bell_value) / 2.0


def bell_from_probability(prob: float) -> float:
    return 2.0 * prob - 1.0


def direct_winning_probability(game: GameSpec, bias: BiasVector, behaviour) -> float:
    """Sum_settings p(settings) * Sum_outcomes V * P(outcomes|settings).

    ``behaviour(settings, outcomes)`` returns the conditional probability.
    """
    check_arity(game, bias)
    total = 0.0
    for st in setting_tuples(game.parties):
        inner = 0.0
        for out in setting_tuples(game.parties):
            if game.rule(st, out):
                inner += behaviour(st, out)
        total += bias.setting_prob(st) * inner
    return total


def correlator_behaviour(correlators) -> Callable:
    """Behaviour with uniform marginals and full correlator E(settings).

    P(outcomes|settings) = (1 + (-1)^XOR(outcomes) * E(settings)) / 2^n.
    ``correlators`` is a callable or an array indexed by setting tuple.
    """
    corr = correlators if callable(correlators) else (lambda st: float(np.asarray(correlators)[st]))

    def behaviour(st, out):
        parity = sum(out) & 1
        return (1.0 + (-1) ** parity * corr(tuple(st))) / 2 ** len(st)

    return behaviour
