"""Quantum values of biased XOR games on qubits.

Contains the Bell-operator construction, a see-saw optimiser used as a
numerical oracle, the closed-form bipartite bounds, and the GHZ strategy
with Charlie measuring sigma_x / -sigma_y.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from . import linalg
from .games import BiasVector, CoefficientTable, chsh_game, coefficient_table, setting_tuples, svetlichny_game

SQRT2 = math.sqrt(2.0)
MONOTONE_SLACK = 1e-10
TIE_NORM = 1e-14


@dataclass(frozen=True)
class Observable:
    """A +/-1 valued qubit observable n . sigma with unit Bloch vector n."""

    bloch: tuple[float, float, float]

    def __post_init__(self):
        v = np.asarray(self.bloch, dtype=float)
        n = np.linalg.norm(v)
        if abs(n - 1.0) > 1e-9:
            raise ValueError(f"Bloch vector must be a unit vector, has norm {n}")
        object.__setattr__(self, "bloch", tuple(float(x) for x in v / n))

    @classmethod
    def from_vector(cls, v) -> "Observable":
        v = np.asarray(v, dtype=float)
        return cls(tuple(v / np.linalg.norm(v)))

    @property
    def matrix(self) -> np.ndarray:
        x, y, z = self.bloch
        return x * linalg.SX + y * linalg.SY + z * linalg.SZ

    @property
    def angles(self) -> tuple[float, float]:
        x, y, z = self.bloch
        theta = math.acos(max(-1.0, min(1.0, z)))
        phi = math.atan2(y, x) % (2 * math.pi) if math.hypot(x, y) > 1e-15 else 0.0
        return theta, phi

    def __neg__(self) -> "Observable":
        return Observable(tuple(-c for c in self.bloch))


def bloch_observable(theta: float, phi: float = 0.0) -> Observable:
    return Observable(
        (math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta))
    )


def xy_observable(angle: float) -> Observable:
    """cos(angle) sigma_x + sin(angle) sigma_y."""
    return bloch_observable(math.pi / 2, angle % (2 * math.pi))


@dataclass(frozen=True)
class QuantumStrategy:
    state: np.ndarray
    observables: tuple[tuple[Observable, Observable], ...]

    def __post_init__(self):
        psi = linalg.check_state(self.state)
        if psi.size != 2 ** len(self.observables):
            raise ValueError("state dimension does not match the number of parties")
        if any(len(pair) != 2 for pair in self.observables):
            raise ValueError("each party needs exactly two observables")
        object.__setattr__(self, "state", psi)
        object.__setattr__(self, "observables", tuple(tuple(p) for p in self.observables))

    @property
    def parties(self) -> int:
        return len(self.observables)

    def to_dict(self) -> dict:
        from .games import PARTY_NAMES

        return {
            "state": [[float(a.real), float(a.imag)] for a in self.state],
            "observables": {
                PARTY_NAMES[k]: [list(o.angles) for o in pair] for k, pair in enumerate(self.observables)
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "QuantumStrategy":
        from .games import PARTY_NAMES

        state = np.array([complex(re, im) for re, im in d["state"]])
        n = int(round(math.log2(state.size)))
        obs = tuple(
            tuple(bloch_observable(th, ph) for th, ph in d["observables"][PARTY_NAMES[k]]) for k in range(n)
        )
        return cls(state, obs)


@dataclass(frozen=True)
class BellOperator:
    matrix: np.ndarray
    table: CoefficientTable


def _bell_matrix(weights: np.ndarray, mats) -> np.ndarray:
    n = weights.ndim
    out = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for st in setting_tuples(n):
        w = weights[st]
        if w != 0.0:
            out += w * linalg.kron(*(mats[k][s] for k, s in enumerate(st)))
    return out


def bell_operator(table: CoefficientTable, strat: QuantumStrategy) -> BellOperator:
    if table.parties != strat.parties:
        raise ValueError("coefficient table and strategy have different party counts")
    mats = [[o.matrix for o in pair] for pair in strat.observables]
    m = _bell_matrix(table.weights, mats)
    return BellOperator(m, table)


def quantum_value(table: CoefficientTable, strat: QuantumStrategy) -> float:
    """Bell value <psi| sum_w w * A (x) B (x) ... |psi>, in [-1, 1]."""
    return linalg.expectation(strat.state, bell_operator(table, strat).matrix)


# --- see-saw -----------------------------------------------------------------


_LETTERS = "abc"


def _batched_kron_sum(weights, mats):
    """sum_settings w * kron(mats[0][:, s], mats[1][:, t], ...) for a batch.

    ``mats`` has shape (R, parties, 2, 2, 2): restart, party, setting, 2x2.
    """
    n = weights.ndim
    r = mats.shape[0]
    dim = 2 ** n
    rows = "".join(_LETTERS[k] for k in range(n))
    cols = rows.upper()
    subs = ",".join(f"z{_LETTERS[k]}{_LETTERS[k].upper()}" for k in range(n)) + f"->z{rows}{cols}"
    out = np.zeros((r, dim, dim), dtype=complex)
    for st in setting_tuples(n):
        w = weights[st]
        if w != 0.0:
            out += w * np.einsum(subs, *(mats[:, k, s] for k, s in enumerate(st))).reshape(r, dim, dim)
    return out


def _effective_operators(weights, mats, psi, party):
    """Batched 2x2 operators G_x with <Bell> = sum_x Tr(O_party(x) G_x).

    G_x = sum_{other settings} w * Tr_others[(I (x) others) |psi><psi|].
    """
    n = weights.ndim
    r = psi.shape[0]
    psi_t = psi.reshape((r,) + (2,) * n)
    others = [k for k in range(n) if k != party]
    psi_m = np.moveaxis(psi_t, party + 1, 1).reshape(r, 2, -1)
    g = np.zeros((2, r, 2, 2), dtype=complex)
    for other_settings in itertools.product((0, 1), repeat=n - 1):
        phi = psi_t
        for k, s in zip(others, other_settings):
            phi = np.moveaxis(np.einsum("zij,zj...->zi...", mats[:, k, s], np.moveaxis(phi, k + 1, 1)), 1, k + 1)
        phi_m = np.moveaxis(phi, party + 1, 1).reshape(r, 2, -1)
        outer = phi_m @ psi_m.conj().transpose(0, 2, 1)
        for x in (0, 1):
            st = list(other_settings)
            st.insert(party, x)
            w = weights[tuple(st)]
            if w != 0.0:
                g[x] += w * outer
    return g


def _pauli_coords(g):
    """Real Pauli coordinates (gx, gy, gz) of a batch of 2x2 operators."""
    return np.stack([
        (g[..., 0, 1] + g[..., 1, 0]).real / 2.0,
        (1j * (g[..., 0, 1] - g[..., 1, 0])).real / 2.0,
        (g[..., 0, 0] - g[..., 1, 1]).real / 2.0,
    ], axis=-1)


def _bloch_matrices(b):
    """(..., 3) Bloch vectors -> (..., 2, 2) observables."""
    x, y, z = b[..., 0], b[..., 1], b[..., 2]
    m = np.empty(b.shape[:-1] + (2, 2), dtype=complex)
    m[..., 0, 0] = z
    m[..., 0, 1] = x - 1j * y
    m[..., 1, 0] = x + 1j * y
    m[..., 1, 1] = -z
    return m


class SeesawResult(NamedTuple):
    value: float
    strategy: QuantumStrategy
    converged: bool
    iterations: int


class SeesawOptimizer:
    """Alternating best-response maximiser of a Bell value over qubit strategies.

    Each round updates every party's observables in closed form (Bloch
    vector aligned with the effective operator) and then replaces the state
    by the top eigenvector of the Bell operator, so the objective never
    decreases. ``fit`` keeps the best of ``restarts`` random starts.
    """

    def __init__(self, restarts=20, tol=1e-12, max_iter=500, seed=0):
        self.restarts = restarts
        self.tol = tol
        self.max_iter = max_iter
        self.seed = seed

    def get_params(self, deep=True):
        return {"restarts": self.restarts, "tol": self.tol, "max_iter": self.max_iter, "seed": self.seed}

    def set_params(self, **params):
        for k, v in params.items():
            if k not in self.get_params():
                raise ValueError(f"invalid parameter {k!r}")
            setattr(self, k, v)
        return self

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"SeesawOptimizer({args})"

    def fit(self, table: CoefficientTable, init: Optional[QuantumStrategy] = None):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        rng = np.random.default_rng(self.seed)
        n = table.parties
        starts = []
        if init is not None:
            starts.append([[o.bloch for o in pair] for pair in init.observables])
        for _ in range(self.restarts):
            v = rng.normal(size=(n, 2, 3))
            starts.append(v / np.linalg.norm(v, axis=-1, keepdims=True))
        value, blochs, psi, converged, iters, history = self._run(table.weights, np.asarray(starts, dtype=float))
        # first start wins ties so that results do not depend on float noise ordering
        best = int(np.flatnonzero(value >= value.max() - 1e-15)[0])
        obs = tuple(tuple(Observable.from_vector(b) for b in pair) for pair in blochs[best])
        self.values_ = value
        self.value_ = float(value[best])
        self.strategy_ = QuantumStrategy(psi[best], obs)
        self.converged_ = bool(converged[best])
        self.n_iter_ = int(iters[best])
        self.history_ = history[:, best]
        return self

    def result(self) -> SeesawResult:
        return SeesawResult(self.value_, self.strategy_, self.converged_, self.n_iter_)

    def _run(self, weights, blochs):
        """Iterate all starts together; returns per-start arrays."""
        r, n = blochs.shape[0], weights.ndim
        blochs = blochs.copy()
        mats = _bloch_matrices(blochs)
        w, basis = linalg.hermitian_eig_batch(_batched_kron_sum(weights, mats))
        value = w[:, 0]
        psi = basis[:, :, 0]
        history = [value.copy()]
        converged = np.zeros(r, dtype=bool)
        iters = np.full(r, self.max_iter)
        for it in range(1, self.max_iter + 1):
            start = value
            for party in range(n):
                g = _effective_operators(weights, mats, psi, party)
                gv = _pauli_coords(g).transpose(1, 0, 2)  # (R, setting, 3)
                norm = np.linalg.norm(gv, axis=-1, keepdims=True)
                keep = norm <= TIE_NORM
                blochs[:, party] = np.where(keep, blochs[:, party], gv / np.where(keep, 1.0, norm))
                current = 2.0 * np.einsum("zsk,zsk->z", blochs[:, party], gv)
                mats[:, party] = _bloch_matrices(blochs[:, party])
                _check_monotone(value, current)
                value = current
            w, basis = linalg.hermitian_eig_batch(_batched_kron_sum(weights, mats), guess=basis)
            _check_monotone(value, w[:, 0])
            value = w[:, 0]
            psi = basis[:, :, 0]
            history.append(value.copy())
            newly = ~converged & (value - start < self.tol)
            iters[newly] = it
            converged |= newly
            if converged.all():
                break
        return value, blochs, psi, converged, iters, np.array(history)


def _check_monotone(before, after) -> None:
    drop = np.max(np.asarray(before) - np.asarray(after))
    if drop > MONOTONE_SLACK:
        raise RuntimeError(f"see-saw objective decreased by {drop:.3e}")


def seesaw_optimize(table: CoefficientTable, parties: Optional[int] = None, restarts: int = 20,
                    tol: float = 1e-12, seed: int = 0, max_iter: int = 500) -> SeesawResult:
    if parties is not None and parties != table.parties:
        raise ValueError("parties does not match the coefficient table")
    opt = SeesawOptimizer(restarts=restarts, tol=tol, max_iter=max_iter, seed=seed).fit(table)
    return opt.result()


# --- closed forms ------------------------------------------------------------


def _require_quadrant(bias: BiasVector) -> None:
    if not all(0.5 <= x <= 1.0 for x in bias.components):
        raise ValueError(f"bias {bias.components} is outside the canonical quadrant [1/2, 1]")


def region_of(p: float, q: float) -> int:
    """1 when p >= 1/(2q) (closed on the boundary), else 2."""
    return 1 if 2.0 * p * q >= 1.0 else 2


def region1_value(p: float, q: float) -> float:
    return 1.0 - 2.0 * (1.0 - p) * (1.0 - q)


def region2_value(p: float, q: float) -> float:
    return SQRT2 * math.sqrt(q * q + (1 - q) ** 2) * math.sqrt(p * p + (1 - p) ** 2)


def analytic_quantum_max_bipartite(bias: BiasVector) -> tuple[float, int]:
    """Maximum quantum Bell value of the biased CHSH game, with its region."""
    if bias.parties != 2:
        raise ValueError("bipartite bound needs a 2-component bias")
    _require_quadrant(bias)
    region = region_of(bias.p, bias.q)
    value = region1_value(bias.p, bias.q) if region == 1 else region2_value(bias.p, bias.q)
    return value, region


def analytic_quantum_max_tripartite_bipartition(bias: BiasVector) -> tuple[float, int]:
    """Bipartition-model bound for the biased Svetlichny game.

    Same piecewise form as the CHSH bound in (p, q); r does not enter.
    """
    if bias.parties != 3:
        raise ValueError("tripartite bound needs a 3-component bias")
    _require_quadrant(bias)
    region = region_of(bias.p, bias.q)
    value = region1_value(bias.p, bias.q) if region == 1 else region2_value(bias.p, bias.q)
    return value, region


def chsh_optimal_angles(p: float, q: float) -> tuple[tuple[float, float], tuple[float, float]]:
    """In-plane angles (a0, a1), (b0, b1) maximising sum w_st cos(a_s - b_t).

    Alice's vectors sit at relative angle arccos(c) with
    c = A(2q-1) / (B Q), A = p^2+(1-p)^2, B = 2p(1-p), Q = q^2+(1-q)^2,
    clipped to 1 (region 1, where both coincide). Bob aligns with
    sum_s w_st a_s.
    """
    a_ = p * p + (1 - p) ** 2
    b_ = 2 * p * (1 - p)
    q_ = q * q + (1 - q) ** 2
    c = 1.0 if b_ == 0 else max(-1.0, min(1.0, a_ * (2 * q - 1) / (b_ * q_)))
    alice = (0.0, math.acos(c))
    return alice, _bob_angles(p, q, alice)


def _bob_angles(p: float, q: float, alice) -> tuple[float, float]:
    w = coefficient_table(chsh_game(), BiasVector(p, q)).weights
    bob = []
    for t in (0, 1):
        z = sum(w[s, t] * np.exp(1j * alice[s]) for s in (0, 1))
        bob.append(float(np.angle(z)) if abs(z) > 0 else 0.0)
    return bob[0], bob[1]


def chsh_analytic_strategy(bias: BiasVector) -> QuantumStrategy:
    """|phi+> with x-z plane observables reaching the closed-form CHSH maximum."""
    _require_quadrant(bias)
    alice, bob = chsh_optimal_angles(bias.p, bias.q)
    # on |phi+>, x-z plane observables correlate as cos(theta_a - theta_b)
    obs = (tuple(_xz_observable(a) for a in alice), tuple(_xz_observable(b) for b in bob))
    return QuantumStrategy(linalg.bell_state(+1), obs)


def _xz_observable(angle: float) -> Observable:
    return Observable((math.sin(angle), 0.0, math.cos(angle)))


CHARLIE_ANGLES = (0.0, 3 * math.pi / 2)  # sigma_x, -sigma_y


def _ghz_value(weights, alpha, beta, gamma) -> float:
    return float(sum(weights[s, t, u] * math.cos(alpha[s] + beta[t] + gamma[u])
                     for s, t, u in setting_tuples(3)))


def _ghz_ascent(weights, alpha, beta, gamma, tol=1e-14, max_iter=2000):
    alpha, beta = list(alpha), list(beta)
    value = _ghz_value(weights, alpha, beta, gamma)
    for _ in range(max_iter):
        for s in (0, 1):
            z = sum(weights[s, t, u] * np.exp(1j * (beta[t] + gamma[u])) for t in (0, 1) for u in (0, 1))
            if abs(z) > TIE_NORM:
                alpha[s] = -float(np.angle(z))
        for t in (0, 1):
            z = sum(weights[s, t, u] * np.exp(1j * (alpha[s] + gamma[u])) for s in (0, 1) for u in (0, 1))
            if abs(z) > TIE_NORM:
                beta[t] = -float(np.angle(z))
        new = _ghz_value(weights, alpha, beta, gamma)
        _check_monotone(value, new)
        done = new - value < tol
        value = new
        if done:
            break
    return value, alpha, beta


def ghz_bipartition_strategy(bias: BiasVector) -> QuantumStrategy:
    """GHZ state, C0 = sigma_x, C1 = -sigma_y, x-y plane observables for Alice and Bob.

    For x-y plane observables the GHZ correlator is cos(alpha_s + beta_t +
    gamma_u). Alice and Bob start from the optimal biased-CHSH angles for
    the game played when Charlie measures sigma_x, then ascend the full
    Svetlichny value with Charlie's settings held fixed.
    """
    if bias.parties != 3:
        raise ValueError("GHZ strategy needs a 3-component bias")
    _require_quadrant(bias)
    weights = coefficient_table(svetlichny_game(), bias).weights
    (a0, a1), (b0, b1) = chsh_optimal_angles(bias.p, bias.q)
    best = None
    for sign in (1.0, -1.0):
        # correlator cos(alpha + beta) = cos(a - b) with beta = -b
        start_a = (a0, sign * a1)
        bb0, bb1 = _bob_angles(bias.p, bias.q, start_a)
        run = _ghz_ascent(weights, start_a, (-bb0, -bb1), CHARLIE_ANGLES)
        if best is None or run[0] > best[0] + 1e-15:
            best = run
    _, alpha, beta = best
    obs = (
        (xy_observable(alpha[0]), xy_observable(alpha[1])),
        (xy_observable(beta[0]), xy_observable(beta[1])),
        tuple(xy_observable(g) for g in CHARLIE_ANGLES),
    )
    return QuantumStrategy(linalg.ghz_state(3), obs)


# --- CHSH / CHSH' equivalence under Bob's rotation -----------------------------

U_B = np.diag([1.0, -1.0j])


def chsh_weights(p: float, q: float) -> np.ndarray:
    return np.array([[p * q, p * (1 - q)], [(1 - p) * q, -(1 - p) * (1 - q)]])


def chsh_prime_weights(p: float, q: float) -> np.ndarray:
    return np.array([[p * q, -p * (1 - q)], [-(1 - p) * q, -(1 - p) * (1 - q)]])


@dataclass
class EquivalenceReport:
    samples: int
    max_discrepancy: float
    chsh_values: list = field(default_factory=list)
    chsh_prime_values: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.max_discrepancy <= 1e-10


def _random_observable(rng) -> Observable:
    v = rng.normal(size=3)
    return Observable.from_vector(v)


def chsh_prime_pair(p: float, q: float, a: Sequence[np.ndarray], b: Sequence[np.ndarray], sign: int = +1):
    """(<CHSH(p,q)> on phi_sign, mapped <CHSH'> on tilde-phi_sign).

    The CHSH' side uses bias (p, 1-q), Bob's observables B0 -> B1,
    B1 -> -B0, each conjugated by U_B (the rotation that takes tilde-phi
    to phi).
    """
    phi = linalg.bell_state(sign)
    phi_t = linalg.bell_state(sign, 1j)
    lhs_op = _bell_matrix(chsh_weights(p, q), [list(a), list(b)])
    rot = [U_B.conj().T @ b[1] @ U_B, -(U_B.conj().T @ b[0] @ U_B)]
    rhs_op = _bell_matrix(chsh_prime_weights(p, 1 - q), [list(a), rot])
    return linalg.expectation(phi, lhs_op), linalg.expectation(phi_t, rhs_op)


def verify_chsh_prime_equivalence(bias: BiasVector, samples: int = 100, seed: int = 0) -> EquivalenceReport:
    rng = np.random.default_rng(seed)
    report = EquivalenceReport(samples, 0.0)
    for _ in range(samples):
        a = [_random_observable(rng).matrix for _ in range(2)]
        b = [_random_observable(rng).matrix for _ in range(2)]
        for sign in (+1, -1):
            lhs, rhs = chsh_prime_pair(bias.p, bias.q, a, b, sign)
            report.chsh_values.append(lhs)
            report.chsh_prime_values.append(rhs)
            report.max_discrepancy = max(report.max_discrepancy, abs(lhs - rhs))
    return report
