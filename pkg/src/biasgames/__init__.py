"""Classical, quantum and no-signalling bounds for biased CHSH and Svetlichny games."""

from .classical import ClassicalReport, DeterministicStrategy, classical_max, classical_max_analytic
from .games import BiasVector, CoefficientTable, GameSpec, chsh_game, coefficient_table, svetlichny_game
from .linalg import ConvergenceError, hermitian_eig
from .nosignaling import BehaviorBox, ns_maximize, pr_box, svetlichny_box
from .quantum import (
    QuantumStrategy,
    SeesawOptimizer,
    analytic_quantum_max_bipartite,
    analytic_quantum_max_tripartite_bipartition,
    quantum_value,
    seesaw_optimize,
)

__version__ = "0.1.0"

__all__ = [
    "BehaviorBox", "BiasVector", "ClassicalReport", "CoefficientTable", "ConvergenceError",
    "DeterministicStrategy", "GameSpec", "QuantumStrategy", "SeesawOptimizer",
    "analytic_quantum_max_bipartite", "analytic_quantum_max_tripartite_bipartition",
    "chsh_game", "classical_max", "classical_max_analytic", "coefficient_table",
    "hermitian_eig", "ns_maximize", "pr_box", "quantum_value", "seesaw_optimize",
    "svetlichny_box", "svetlichny_game",
]
