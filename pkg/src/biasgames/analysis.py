"""Bias-space classification, grid scans, boundary location and export."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import quantum
from .classical import classical_max_analytic, classical_max_value
from .games import BiasVector, GameSpec, bell_from_probability, coefficient_table, game_by_name
from .nosignaling import game_value, ns_maximize, svetlichny_box

ADVANTAGE_EPS = 1e-9
NO_ADVANTAGE = "no-quantum-advantage"
ADVANTAGE = "quantum-advantage"
CSV_HEADER = ["p", "q", "r", "classical", "quantum_analytic", "quantum_seesaw", "nosignaling",
              "region_id", "classification"]


@dataclass(frozen=True)
class Relabeling:
    """Which parties had their two settings swapped to reach the canonical quadrant."""

    flipped: tuple[bool, ...]

    @property
    def is_identity(self) -> bool:
        return not any(self.flipped)

    def restore(self, strat: quantum.QuantumStrategy) -> quantum.QuantumStrategy:
        """Map a strategy for the canonical bias to one with the same value at the original bias.

        Swapping party k's settings changes the XOR target by the settings of
        every other party (for both games), which the others absorb by
        negating their setting-1 observable.
        """
        obs = [list(pair) for pair in strat.observables]
        for k, flip in enumerate(self.flipped):
            if not flip:
                continue
            obs[k] = [obs[k][1], obs[k][0]]
            for j in range(len(obs)):
                if j != k:
                    obs[j][1] = -obs[j][1]
        return quantum.QuantumStrategy(strat.state, tuple(tuple(p) for p in obs))


def canonicalize_bias(bias: BiasVector) -> tuple[BiasVector, Relabeling]:
    flipped = tuple(x < 0.5 for x in bias.components)
    comps = [1.0 - x if f else x for x, f in zip(bias.components, flipped)]
    return BiasVector(*comps), Relabeling(flipped)


@dataclass(frozen=True)
class RegionPoint:
    """All bounds at one bias point, as winning probabilities.

    ``classical`` is the exact enumerated maximum. ``classical_model`` is the
    closed-form classical bound belonging to the same analytic model as
    ``quantum_analytic``; the classification compares those two.
    """

    bias: BiasVector
    classical: float
    classical_model: float
    quantum_analytic: float
    quantum_seesaw: float
    nosignaling: float
    region_id: int
    classification: str

    def row(self, bell: bool = False) -> list[str]:
        conv = bell_from_probability if bell else (lambda x: x)
        p, q, r = self.bias.p, self.bias.q, self.bias.r
        vals = [self.classical, self.quantum_analytic, self.quantum_seesaw, self.nosignaling]
        return [fmt(p), fmt(q), "" if r is None else fmt(r)] + [fmt(conv(v)) for v in vals] + [
            str(self.region_id), self.classification]

    def to_dict(self, bell: bool = False) -> dict:
        conv = bell_from_probability if bell else (lambda x: x)
        return {
            **self.bias.to_dict(),
            "classical": conv(self.classical),
            "classical_model": conv(self.classical_model),
            "quantum_analytic": conv(self.quantum_analytic),
            "quantum_seesaw": None if math.isnan(self.quantum_seesaw) else conv(self.quantum_seesaw),
            "nosignaling": conv(self.nosignaling),
            "region_id": self.region_id,
            "classification": self.classification,
            "units": "bell" if bell else "probability",
        }


def fmt(x: float) -> str:
    """Fixed float format for exports: 9 significant digits."""
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "nan"
    return format(float(x), ".9g")


def _prob(bell: float) -> float:
    return (1.0 + bell) / 2.0


def analytic_quantum(game: GameSpec, canonical: BiasVector) -> tuple[float, int]:
    if game.parties == 2:
        return quantum.analytic_quantum_max_bipartite(canonical)
    return quantum.analytic_quantum_max_tripartite_bipartition(canonical)


def classify_point(game: GameSpec, bias: BiasVector, restarts: int = 20, seed: int = 0) -> RegionPoint:
    """Classical, quantum and no-signalling maxima at one bias point.

    ``restarts=0`` skips the see-saw (its field is then NaN).
    """
    canonical, _ = canonicalize_bias(bias)
    classical = classical_max_value(game, bias)
    model = classical_max_analytic(game, canonical)
    q_bell, region = analytic_quantum(game, canonical)
    q_analytic = _prob(q_bell)
    if restarts > 0:
        res = quantum.seesaw_optimize(coefficient_table(game, canonical), restarts=restarts, seed=seed)
        q_seesaw = _prob(res.value)
    else:
        q_seesaw = math.nan
    if game.parties == 2:
        ns, _ = ns_maximize(game, bias)
    else:
        ns = game_value(svetlichny_box(), game, bias)
    label = ADVANTAGE if q_analytic - model > ADVANTAGE_EPS else NO_ADVANTAGE
    return RegionPoint(bias, classical, model, q_analytic, q_seesaw, ns, region, label)


@dataclass
class PhaseDiagram:
    game: str
    resolution: int
    points: list[RegionPoint]
    boundary: list[tuple[float, ...]] = field(default_factory=list)
    fixed_r: Optional[float] = None

    def to_csv(self, bell: bool = False) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for pt in self.points:
            w.writerow(pt.row(bell))
        return buf.getvalue()

    def to_svg(self, size: int = 480) -> str:
        return render_svg(self, size)


def boundary_samples(count: int = 101, r: Optional[float] = None) -> list[tuple[float, ...]]:
    """Points on p*q = 1/2 in the canonical quadrant, q from 1/2 to 1."""
    out = []
    for q in np.linspace(0.5, 1.0, count):
        q = float(q)
        p = 0.5 / q
        out.append((p, q) if r is None else (p, q, r))
    return out


def _classify_task(args):
    name, comps, restarts, seed = args
    return classify_point(game_by_name(name), BiasVector(*comps), restarts, seed)


def grid_biases(parties: int, resolution: int, r: Optional[float] = None) -> list[tuple[float, ...]]:
    axis = [float(x) for x in np.linspace(0.0, 1.0, resolution)]
    if parties == 2:
        return [(p, q) for p in axis for q in axis]
    if r is not None:
        return [(p, q, float(r)) for p in axis for q in axis]
    return [(p, q, rr) for p in axis for q in axis for rr in axis]


def scan_grid(game: GameSpec, resolution: int, r: Optional[float] = None, restarts: int = 0,
              seed: int = 0, jobs: int = 1) -> PhaseDiagram:
    """Classify every node of the [0,1]^d grid (or the r-slice when ``r`` is given).

    Rows are ordered by grid index (p outermost) regardless of ``jobs``.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    if r is not None and game.parties != 3:
        raise ValueError("r can only be fixed for the three-party game")
    tasks = [(game.name, comps, restarts, seed) for comps in grid_biases(game.parties, resolution, r)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            points = list(pool.map(_classify_task, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        points = [_classify_task(t) for t in tasks]
    return PhaseDiagram(game.name, resolution, points, boundary_samples(101, r if game.parties == 3 else None),
                        fixed_r=r)


def scan_diagonal(game: GameSpec, resolution: int) -> list[RegionPoint]:
    """Equal-bias points p = q (= r) over [0, 1]."""
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    return [classify_point(game, BiasVector(*([float(x)] * game.parties)), restarts=0)
            for x in np.linspace(0.0, 1.0, resolution)]


def _analytic_gap(game: GameSpec, x: float) -> float:
    bias = BiasVector(*([x] * game.parties))
    q_bell, _ = analytic_quantum(game, bias)
    return _prob(q_bell) - classical_max_analytic(game, bias)


def threshold_on_diagonal(game: GameSpec, tolerance: float = 1e-9) -> float:
    """Equal bias above which the analytic quantum bound equals the classical one.

    Bisects the sign of (quantum - classical) on [1/2, 1]. The gap closes
    quadratically at the boundary, so the sign (not the classification
    epsilon) is used to keep the estimate within ``tolerance``.
    """
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    lo, hi = 0.5, 1.0
    if not (_analytic_gap(game, lo) > 0 and not _analytic_gap(game, hi) > 0):
        raise RuntimeError("no sign change of the quantum-classical gap on the diagonal")
    while hi - lo > tolerance:
        mid = 0.5 * (lo + hi)
        if _analytic_gap(game, mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def seesaw_threshold_on_diagonal(game: GameSpec, tolerance: float = 1e-4, restarts: int = 10,
                                 seed: int = 0, eps: float = ADVANTAGE_EPS) -> float:
    """Same bisection, using the full see-saw value against the enumerated classical value.

    For the three-party game this measures where unrestricted qubit
    strategies stop beating local ones, independently of the bipartition model.
    """
    def gap(x):
        bias = BiasVector(*([x] * game.parties))
        res = quantum.seesaw_optimize(coefficient_table(game, bias), restarts=restarts, seed=seed)
        return _prob(res.value) - classical_max_value(game, bias)

    lo, hi = 0.5, 1.0
    if not (gap(lo) > eps and not gap(hi) > eps):
        raise RuntimeError("no sign change of the see-saw gap on the diagonal")
    while hi - lo > tolerance:
        mid = 0.5 * (lo + hi)
        if gap(mid) > eps:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# --- SVG ---------------------------------------------------------------------

_COLORS = {ADVANTAGE: "#d95f02", NO_ADVANTAGE: "#1b9e77"}


def reflected_boundaries(samples) -> list[list[tuple[float, float]]]:
    """The canonical p*q = 1/2 curve and its three mirror images in [0, 1]^2."""
    curves = []
    for fp in (False, True):
        for fq in (False, True):
            curves.append([(1 - s[0] if fp else s[0], 1 - s[1] if fq else s[1]) for s in samples])
    return curves


def render_svg(diagram: PhaseDiagram, size: int = 480) -> str:
    """Self-contained SVG heat map: p on x, q on y (upwards), boundary overlaid."""
    if diagram.points and diagram.points[0].bias.parties == 3 and diagram.fixed_r is None:
        raise ValueError("SVG export needs a 2-D slice; fix r for the three-party game")
    margin = 40
    n = diagram.resolution
    cell = size / n
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size + 2 * margin}" height="{size + 2 * margin}" '
        f'viewBox="0 0 {size + 2 * margin} {size + 2 * margin}">',
        f'<title>{diagram.game} bias phase diagram</title>',
        f'<rect x="0" y="0" width="{size + 2 * margin}" height="{size + 2 * margin}" style="fill:#ffffff"/>',
    ]

    def xy(p, q):
        return margin + p * size, margin + (1 - q) * size

    for pt in diagram.points:
        x, y = xy(pt.bias.p, pt.bias.q)
        lines.append(
            f'<rect x="{x - cell / 2:.3f}" y="{y - cell / 2:.3f}" width="{cell:.3f}" height="{cell:.3f}" '
            f'style="fill:{_COLORS[pt.classification]};stroke:none"/>'
        )
    for curve in reflected_boundaries(diagram.boundary):
        pts = " ".join("{:.3f},{:.3f}".format(*xy(p, q)) for p, q in curve)
        lines.append(f'<polyline class="boundary" points="{pts}" style="fill:none;stroke:#000000;stroke-width:1.5"/>')
    lines.append(f'<rect x="{margin}" y="{margin}" width="{size}" height="{size}" '
                 'style="fill:none;stroke:#333333;stroke-width:1"/>')
    lines.append(f'<text x="{margin + size / 2}" y="{size + margin + 28}" style="font:14px sans-serif;'
                 'text-anchor:middle">p</text>')
    lines.append(f'<text x="{margin - 24}" y="{margin + size / 2}" style="font:14px sans-serif;'
                 'text-anchor:middle">q</text>')
    legend_y = 16
    for i, (label, color) in enumerate(_COLORS.items()):
        lx = margin + i * size / 2
        lines.append(f'<rect x="{lx}" y="{legend_y - 10}" width="12" height="12" style="fill:{color}"/>')
        lines.append(f'<text x="{lx + 16}" y="{legend_y}" style="font:12px sans-serif">{label}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def svg_to_unit(x: float, y: float, size: int = 480, margin: int = 40) -> tuple[float, float]:
    """Inverse of the SVG coordinate map, for reading figures back in tests."""
    return (x - margin) / size, 1 - (y - margin) / size

