"""Dense two-phase primal simplex with Bland's rule.

Solves  max c.x  s.t.  A x = b,  x >= 0  for the small fixed-size programs
that arise from two-party no-signalling boxes (16 variables, 12 rows).
Redundant equality rows are detected and dropped after phase one.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

PIVOT_TOL = 1e-10


class LPError(RuntimeError):
    pass


class InfeasibleError(LPError):
    pass


class UnboundedError(LPError):
    pass


class LPResult(NamedTuple):
    x: np.ndarray
    value: float
    iterations: int


def _pivot(t: np.ndarray, row: int, col: int) -> None:
    t[row] /= t[row, col]
    for i in range(t.shape[0]):
        if i != row and t[i, col] != 0.0:
            t[i] -= t[i, col] * t[row]


def _iterate(t: np.ndarray, basis: list[int], ncols: int, tol: float, max_iter: int) -> int:
    """Run simplex pivots on tableau ``t`` (last row = reduced costs, maximising)."""
    for it in range(max_iter):
        cost = t[-1, :ncols]
        entering = next((j for j in range(ncols) if cost[j] > tol), None)
        if entering is None:
            return it
        col = t[:-1, entering]
        rows = [i for i in range(len(basis)) if col[i] > tol]
        if not rows:
            raise UnboundedError(f"column {entering} is unbounded")
        ratios = [t[i, -1] / col[i] for i in rows]
        best = min(ratios)
        # Bland: among tied rows, the smallest basic variable leaves
        leaving = min((i for i, r in zip(rows, ratios) if r <= best + tol), key=lambda i: basis[i])
        _pivot(t, leaving, entering)
        basis[leaving] = entering
    raise LPError(f"simplex did not terminate in {max_iter} pivots")


def simplex_max(c, a_eq, b_eq, tol: float = PIVOT_TOL, max_iter: int = 10_000) -> LPResult:
    c = np.asarray(c, dtype=float)
    a = np.array(a_eq, dtype=float)
    b = np.array(b_eq, dtype=float)
    m, n = a.shape
    if c.shape != (n,) or b.shape != (m,):
        raise ValueError("inconsistent LP dimensions")
    neg = b < 0
    a[neg] *= -1
    b[neg] *= -1

    # phase one: artificials n..n+m-1, maximise -sum(artificials)
    t = np.zeros((m + 1, n + m + 1))
    t[:m, :n] = a
    t[:m, n:n + m] = np.eye(m)
    t[:m, -1] = b
    t[-1, :n] = a.sum(axis=0)
    t[-1, -1] = b.sum()
    basis = list(range(n, n + m))
    iters = _iterate(t, basis, n + m, tol, max_iter)
    if t[-1, -1] > 1e-8:
        raise InfeasibleError(f"phase one residual {t[-1, -1]:.3e}")

    # drive artificials out of the basis; rows with no usable pivot are redundant
    keep = []
    for i in range(m):
        if basis[i] >= n:
            j = next((j for j in range(n) if abs(t[i, j]) > tol), None)
            if j is None:
                continue
            _pivot(t, i, j)
            basis[i] = j
        keep.append(i)
    t = np.vstack([t[keep][:, list(range(n)) + [n + m]], np.zeros((1, n + 1))])
    basis = [basis[i] for i in keep]

    # phase two: reduced costs c_j - c_B B^-1 A_j, objective value in the corner
    t[-1, :n] = c
    for i, j in enumerate(basis):
        t[-1] -= c[j] * t[i]
    iters += _iterate(t, basis, n, tol, max_iter)
    x = np.zeros(n)
    for i, j in enumerate(basis):
        x[j] = t[i, -1]
    return LPResult(x, float(c @ x), iters)
