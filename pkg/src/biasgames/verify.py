"""Property suites run by ``biasgames verify``.

Each suite returns a ``SuiteResult``; the report is deterministic for a
given seed and restart count, so it can be diffed byte for byte.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from . import analysis, classical, games, linalg, nosignaling, quantum
from .games import BiasVector, chsh_game, svetlichny_game

SCHEMA = 1


@dataclass
class SuiteResult:
    name: str
    module: str
    passed: bool
    detail: str

    def __post_init__(self):
        self.passed = bool(self.passed)


@dataclass
class VerifyConfig:
    seed: int = 0
    restarts: int = 20
    grid: int = 20


def _e(x: float) -> str:
    return format(float(x), ".3e")


def canonical_grid(n: int) -> list[float]:
    return [float(x) for x in np.linspace(0.5, 1.0, n)]


# --- linalg ------------------------------------------------------------------

def suite_kron(cfg: VerifyConfig) -> SuiteResult:
    rng = np.random.default_rng(cfg.seed)
    err = 0.0
    for _ in range(20):
        a, b, c = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(3))
        err = max(err, np.abs(linalg.kron(linalg.kron(a, b), c) - linalg.kron(a, linalg.kron(b, c))).max())
        x, y = rng.normal(size=2)
        err = max(err, np.abs(linalg.kron(x * a + y * b, c) - x * linalg.kron(a, c) - y * linalg.kron(b, c)).max())
    return SuiteResult("kron associative and bilinear", "linalg", err <= 1e-12, f"max error {_e(err)}")


def suite_expectation_identity(cfg: VerifyConfig) -> SuiteResult:
    rng = np.random.default_rng(cfg.seed)
    err = 0.0
    for dim in (2, 4, 8):
        for _ in range(10):
            v = linalg.normalize(rng.normal(size=dim) + 1j * rng.normal(size=dim))
            err = max(err, abs(linalg.expectation(v, np.eye(dim)) - 1.0))
    return SuiteResult("expectation of identity is 1", "linalg", err <= 1e-12, f"max error {_e(err)}")


def suite_eig_reconstruction(cfg: VerifyConfig) -> SuiteResult:
    rng = np.random.default_rng(cfg.seed)
    err = 0.0
    for dim in (2, 4, 8):
        for _ in range(10):
            x = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            h = x + x.conj().T
            w, v = linalg.hermitian_eig(h)
            err = max(err, np.abs((v * w) @ v.conj().T - h).max())
    return SuiteResult("eigendecomposition reconstructs input", "linalg", err <= 1e-9, f"max error {_e(err)}")


# --- game model ----------------------------------------------------------------

def suite_xor_half(cfg: VerifyConfig) -> SuiteResult:
    ok = True
    for game in (chsh_game(), svetlichny_game()):
        for st in games.setting_tuples(game.parties):
            wins = sum(games.filter_v(game, st, out) for out in games.setting_tuples(game.parties))
            ok &= wins == 2 ** (game.parties - 1)
    return SuiteResult("half of the outcomes win per setting", "game_model", ok, "chsh, svetlichny")


def _random_bias(rng, parties):
    return BiasVector(*rng.uniform(0, 1, size=parties))


def suite_weights(cfg: VerifyConfig) -> SuiteResult:
    rng = np.random.default_rng(cfg.seed)
    err = 0.0
    for game in (chsh_game(), svetlichny_game()):
        for _ in range(50):
            t = games.coefficient_table(game, _random_bias(rng, game.parties))
            err = max(err, abs(np.abs(t.weights).sum() - 1.0))
    return SuiteResult("absolute weights sum to 1", "game_model", err <= 1e-12, f"max error {_e(err)}")


def suite_probability_identity(cfg: VerifyConfig) -> SuiteResult:
    """Direct outcome-by-outcome winning probability against (1 + <Bell>)/2."""
    rng = np.random.default_rng(cfg.seed)
    err = 0.0
    for game in (chsh_game(), svetlichny_game()):
        for k in range(40):
            bias = _random_bias(rng, game.parties)
            if k % 2:
                corr = rng.uniform(-1, 1, size=(2,) * game.parties)
            else:
                corr = np.full((2,) * game.parties, rng.uniform(-1, 1))
            direct = games.direct_winning_probability(game, bias, games.correlator_behaviour(corr))
            table = games.coefficient_table(game, bias)
            bell = float(np.sum(table.weights * corr))
            err = max(err, abs(direct - games.winning_probability_identity(game, bias, bell)))
    return SuiteResult("direct winning probability equals (1+<Bell>)/2", "game_model", err <= 1e-12,
                       f"max error {_e(err)}")


# --- classical -------------------------------------------------------------------

def suite_classical_bipartite(cfg: VerifyConfig) -> SuiteResult:
    g = chsh_game()
    err = 0.0
    for p in canonical_grid(50):
        for q in canonical_grid(50):
            b = BiasVector(p, q)
            err = max(err, abs(classical.classical_max(g, b).max_probability - classical.classical_max_analytic(g, b)))
    return SuiteResult("CHSH enumeration equals 1-(1-p)(1-q) (50x50)", "classical", err <= 1e-12,
                       f"max error {_e(err)}")


def suite_classical_tripartite(cfg: VerifyConfig) -> SuiteResult:
    g = svetlichny_game()
    err = 0.0
    spread = 0.0
    worst = None
    for p in canonical_grid(10):
        for q in canonical_grid(10):
            vals = []
            for r in canonical_grid(10):
                b = BiasVector(p, q, r)
                v = classical.classical_max(g, b).max_probability
                vals.append(v)
                d = abs(v - classical.classical_max_analytic(g, b))
                if d > err:
                    err, worst = d, b.components
            spread = max(spread, max(vals) - min(vals))
    ok = err <= 1e-12 and spread <= 1e-12
    detail = f"max error {_e(err)} at {tuple(round(x, 4) for x in worst) if worst else None}; r-spread {_e(spread)}"
    return SuiteResult("Svetlichny enumeration equals 1-(1-p)(1-q), r-independent (10x10x10)", "classical", ok, detail)


def suite_classical_symmetry(cfg: VerifyConfig) -> SuiteResult:
    g = chsh_game()
    err = 0.0
    for p in np.linspace(0, 1, 21):
        for q in np.linspace(0, 1, 21):
            base = classical.classical_max_value(g, BiasVector(p, q))
            for b in (BiasVector(1 - p, q), BiasVector(p, 1 - q)):
                err = max(err, abs(base - classical.classical_max_value(g, b)))
    return SuiteResult("classical value invariant under setting relabelling", "classical", err <= 1e-12,
                       f"max error {_e(err)}")


def suite_classical_lightest(cfg: VerifyConfig) -> SuiteResult:
    rng = np.random.default_rng(cfg.seed)
    game = chsh_game()
    worst = np.inf
    for _ in range(100):
        b = _random_bias(rng, 2)
        lightest = float(b.joint().min())
        worst = min(worst, classical.classical_max(game, b).max_probability - (1.0 - lightest))
    # three of the four CHSH constraints are always jointly satisfiable
    return SuiteResult("CHSH classical value >= 1 - lightest setting weight", "classical", worst >= -1e-15,
                       f"100 random biases, min margin {_e(worst)}")


# --- quantum ---------------------------------------------------------------------

def _seesaw(table, cfg, restarts=None):
    return quantum.SeesawOptimizer(restarts=restarts or cfg.restarts, seed=cfg.seed).fit(table)


def suite_seesaw_oracle(cfg: VerifyConfig) -> SuiteResult:
    """Grid agreement, monotone traces, dominance, and region-1 collapse in one pass."""
    g = chsh_game()
    err = collapse = 0.0
    monotone = dominance = True
    for p in canonical_grid(cfg.grid):
        for q in canonical_grid(cfg.grid):
            b = BiasVector(p, q)
            opt = _seesaw(games.coefficient_table(g, b), cfg)
            monotone &= bool(np.all(np.diff(opt.history_) >= -1e-12))
            analytic, region = quantum.analytic_quantum_max_bipartite(b)
            err = max(err, abs(opt.value_ - analytic))
            cl = classical.classical_max_value(g, b)
            qp = (1 + opt.value_) / 2
            ns, _ = nosignaling.ns_maximize(g, b)
            dominance &= qp - cl >= -1e-9 and ns - qp >= -1e-9
            if region == 1:
                collapse = max(collapse, abs(opt.value_ - games.bell_from_probability(cl)))
    return [
        SuiteResult(f"see-saw matches analytic bound ({cfg.grid}x{cfg.grid})", "quantum", err <= 1e-5,
                    f"max error {_e(err)}"),
        SuiteResult("see-saw objective is monotone", "quantum", monotone, "all grid runs"),
        SuiteResult("classical <= quantum <= no-signalling", "quantum", dominance, "grid"),
        SuiteResult("region 1: quantum equals classical", "quantum", collapse <= 1e-5, f"max gap {_e(collapse)}"),
    ]


def suite_boundary(cfg: VerifyConfig) -> SuiteResult:
    err = 0.0
    for p, q in analysis.boundary_samples(100):
        err = max(err, abs(quantum.region1_value(p, q) - quantum.region2_value(p, q)))
    return SuiteResult("analytic branches agree on p = 1/(2q)", "quantum", err <= 1e-12, f"max error {_e(err)}")


def suite_ghz_consistency(cfg: VerifyConfig) -> SuiteResult:
    g = svetlichny_game()
    err = 0.0
    worst = None
    for p, q, r in itertools.product(canonical_grid(5), repeat=3):
        b = BiasVector(p, q, r)
        v = quantum.quantum_value(games.coefficient_table(g, b), quantum.ghz_bipartition_strategy(b))
        d = abs(v - quantum.analytic_quantum_max_tripartite_bipartition(b)[0])
        if d > err:
            err, worst = d, (p, q, r)
    return SuiteResult("GHZ strategy reaches the bipartition bound (5x5x5)", "quantum", err <= 1e-9,
                       f"max error {_e(err)} at {worst}")


def suite_full_vs_ghz(cfg: VerifyConfig) -> SuiteResult:
    g = svetlichny_game()
    worst = math.inf
    for p, q, r in itertools.product(canonical_grid(3), repeat=3):
        b = BiasVector(p, q, r)
        table = games.coefficient_table(g, b)
        ghz = quantum.quantum_value(table, quantum.ghz_bipartition_strategy(b))
        worst = min(worst, _seesaw(table, cfg, restarts=min(cfg.restarts, 8)).value_ - ghz)
    return SuiteResult("full see-saw >= GHZ strategy value (3x3x3)", "quantum", worst >= -1e-9,
                       f"min margin {_e(worst)}")


def suite_chsh_prime(cfg: VerifyConfig) -> SuiteResult:
    rng = np.random.default_rng(cfg.seed)
    err = 0.0
    for _ in range(5):
        b = BiasVector(*rng.uniform(0, 1, size=2))
        err = max(err, quantum.verify_chsh_prime_equivalence(b, 100, int(rng.integers(2 ** 31))).max_discrepancy)
    return SuiteResult("CHSH equals mapped CHSH' under U_B", "quantum", err <= 1e-10, f"max discrepancy {_e(err)}")


# --- no-signalling ---------------------------------------------------------------

def suite_boxes_valid(cfg: VerifyConfig) -> SuiteResult:
    boxes = nosignaling.ns_vertices() + [nosignaling.svetlichny_box(), nosignaling.uniform_box(2),
                                         nosignaling.uniform_box(3)]
    bad = [i for i, b in enumerate(boxes) if b.violations(1e-12)]
    return SuiteResult("constructed boxes are normalised and no-signalling", "nosignaling", not bad,
                       f"{len(boxes)} boxes, {len(bad)} invalid")


def suite_lp_vs_vertices(cfg: VerifyConfig) -> SuiteResult:
    rng = np.random.default_rng(cfg.seed)
    gap = 0.0
    for _ in range(100):
        w = rng.normal(size=(2, 2))
        c = np.zeros((2,) * 4)
        for s, t, a, b in itertools.product((0, 1), repeat=4):
            c[s, t, a, b] = w[s, t] * (-1) ** (a ^ b)
        gap = max(gap, abs(nosignaling.ns_maximize_objective(c)[0] - nosignaling.ns_vertex_objective(c)))
    return SuiteResult("LP optimum equals vertex optimum (100 XOR objectives)", "nosignaling", gap <= 1e-9,
                       f"max gap {_e(gap)}")


def suite_svetlichny_marginals(cfg: VerifyConfig) -> SuiteResult:
    box = nosignaling.svetlichny_box()
    worst = 0.0
    for st in games.setting_tuples(3):
        for size in (1, 2):
            for subset in itertools.combinations(range(3), size):
                worst = max(worst, abs(box.correlator(subset, st)))
    return SuiteResult("Svetlichny box 1- and 2-party correlators vanish", "nosignaling", worst <= 1e-15,
                       f"max |correlator| {_e(worst)}")


# --- analysis --------------------------------------------------------------------

def suite_classification_invariance(cfg: VerifyConfig) -> SuiteResult:
    g = chsh_game()
    ok = True
    for p in np.linspace(0, 1, 11):
        for q in np.linspace(0, 1, 11):
            b = BiasVector(p, q)
            canon, _ = analysis.canonicalize_bias(b)
            ok &= analysis.classify_point(g, b, 0).classification == analysis.classify_point(g, canon, 0).classification
    return SuiteResult("classification invariant under canonicalisation", "analysis", ok, "11x11 grid")


def suite_downward_closed(cfg: VerifyConfig) -> SuiteResult:
    g = chsh_game()
    grid = canonical_grid(21)
    ok = True
    for q in grid:
        labels = [analysis.classify_point(g, BiasVector(p, q), 0).classification for p in grid]
        seen_none = False
        for lab in labels:
            if lab == analysis.NO_ADVANTAGE:
                seen_none = True
            elif seen_none:
                ok = False
    return SuiteResult("advantage region is downward closed in p", "analysis", ok, "21x21 canonical grid")


def suite_r_independence(cfg: VerifyConfig) -> SuiteResult:
    g = svetlichny_game()
    spread = 0.0
    same = True
    for p in canonical_grid(6):
        for q in canonical_grid(6):
            pts = [analysis.classify_point(g, BiasVector(p, q, r), 0) for r in canonical_grid(6)]
            for attr in ("classical_model", "quantum_analytic", "nosignaling"):
                vals = [getattr(pt, attr) for pt in pts]
                spread = max(spread, max(vals) - min(vals))
            same &= len({(pt.classification, pt.region_id) for pt in pts}) == 1
    return SuiteResult("bipartition-model point values independent of r", "analysis", spread <= 1e-12 and same,
                       f"max spread {_e(spread)}")


SUITES: list[Callable] = [
    suite_kron, suite_expectation_identity, suite_eig_reconstruction,
    suite_xor_half, suite_weights, suite_probability_identity,
    suite_classical_bipartite, suite_classical_tripartite, suite_classical_symmetry, suite_classical_lightest,
    suite_seesaw_oracle, suite_boundary, suite_ghz_consistency, suite_full_vs_ghz, suite_chsh_prime,
    suite_boxes_valid, suite_lp_vs_vertices, suite_svetlichny_marginals,
    suite_classification_invariance, suite_downward_closed, suite_r_independence,
]


def run_suites(cfg: VerifyConfig, suites=None) -> list[SuiteResult]:
    out = []
    for suite in suites or SUITES:
        res = suite(cfg)
        out.extend(res if isinstance(res, list) else [res])
    return out


def report_json(cfg: VerifyConfig, results: list[SuiteResult]) -> str:
    doc = {
        "schema": SCHEMA,
        "seed": cfg.seed,
        "restarts": cfg.restarts,
        "grid": cfg.grid,
        "passed": all(r.passed for r in results),
        "suites": [asdict(r) for r in results],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def report_table(results: list[SuiteResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'PASS' if r.passed else 'FAIL'}  {r.module:<12} {r.name:<{width}}  {r.detail}" for r in results]
    failed = sum(not r.passed for r in results)
    lines.append(f"{len(results) - failed}/{len(results)} suites passed")
    return "\n".join(lines) + "\n"
