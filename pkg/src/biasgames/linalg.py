"""Small dense complex linear algebra for qubit operators (dimension <= 8).

Matrices are plain ``numpy`` complex arrays and states are 1-D complex
vectors. The eigensolver is a cyclic Jacobi sweep so results are
deterministic and independent of the LAPACK build.
"""

from __future__ import annotations

from functools import reduce

import numpy as np

HERMITIAN_ATOL = 1e-12
NORM_ATOL = 1e-12

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SX, SY, SZ)


class ConvergenceError(RuntimeError):
    """Jacobi sweeps did not reduce the off-diagonal mass below tolerance."""


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    return m


def is_hermitian(m: np.ndarray, atol: float = HERMITIAN_ATOL) -> bool:
    m = as_matrix(m)
    return m.shape[0] == m.shape[1] and bool(np.all(np.abs(m - m.conj().T) <= atol))


def kron(*ops) -> np.ndarray:
    """Kronecker product of one or more matrices (or vectors), left to right."""
    if not ops:
        raise ValueError("kron needs at least one operand")
    return reduce(np.kron, (np.asarray(o, dtype=complex) for o in ops))


def ket(bits: str) -> np.ndarray:
    """Computational basis state, e.g. ``ket("010")``."""
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2)] = 1.0
    return v


def normalize(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex).ravel()
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("cannot normalize the zero vector")
    return v / n


def check_state(v, atol: float = NORM_ATOL) -> np.ndarray:
    v = np.asarray(v, dtype=complex).ravel()
    dim = v.size
    if dim < 2 or dim & (dim - 1):
        raise ValueError(f"state dimension {dim} is not a power of two")
    if abs(np.vdot(v, v).real - 1.0) > atol:
        raise ValueError("state is not normalized")
    return v


def bell_state(sign: int = +1, phase: complex = 1.0) -> np.ndarray:
    """(|00> + sign * phase |11>)/sqrt(2); ``phase=1j`` gives the tilde states."""
    return (ket("00") + sign * phase * ket("11")) / np.sqrt(2)


def ghz_state(n: int = 3) -> np.ndarray:
    return (ket("0" * n) + ket("1" * n)) / np.sqrt(2)


def expectation(state, op) -> float:
    """<psi|op|psi> for Hermitian ``op``; the imaginary part must vanish."""
    psi = np.asarray(state, dtype=complex).ravel()
    m = as_matrix(op)
    if m.shape != (psi.size, psi.size):
        raise ValueError(f"operator shape {m.shape} does not match state dimension {psi.size}")
    if not is_hermitian(m):
        raise ValueError("operator is not Hermitian")
    val = np.vdot(psi, m @ psi)
    if abs(val.imag) > 1e-10:
        raise ValueError(f"expectation has imaginary part {val.imag:.3e}")
    return float(val.real)


def _jacobi_sweeps(a: np.ndarray, v: np.ndarray, tol: float, max_sweeps: int) -> int:
    """Cyclic Jacobi on a stack of Hermitian matrices ``a`` (shape (R, n, n)), in place.

    Every matrix is rotated on the same (p, q) pair at once, each with its
    own angle; ``v`` accumulates the rotations.
    """
    n = a.shape[-1]
    scale = np.maximum(1.0, np.linalg.norm(a, axis=(1, 2)))
    offdiag = ~np.eye(n, dtype=bool)
    for sweep in range(max_sweeps + 1):
        off = np.linalg.norm(a[:, offdiag], axis=1)
        if np.all(off <= tol * scale):
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[:, p, q]
                mag = np.abs(apq)
                live = mag > 1e-300
                if not live.any():
                    continue
                safe = np.where(live, mag, 1.0)
                phase = np.where(live, apq / safe, 1.0)
                tau = (a[:, q, q].real - a[:, p, p].real) / (2.0 * safe)
                t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau))
                t = np.where(live, t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # U acts on the (p, q) plane: removes the phase of a[p, q], then rotates
                u = np.empty((a.shape[0], 2, 2), dtype=complex)
                u[:, 0, 0] = c
                u[:, 0, 1] = s
                u[:, 1, 0] = -s * phase.conj()
                u[:, 1, 1] = c * phase.conj()
                idx = [p, q]
                a[:, :, idx] = a[:, :, idx] @ u
                a[:, idx, :] = u.conj().transpose(0, 2, 1) @ a[:, idx, :]
                a[:, p, q] = 0.0
                a[:, q, p] = 0.0
                v[:, :, idx] = v[:, :, idx] @ u
    raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")


def hermitian_eig_batch(ops, tol: float = 1e-12, max_sweeps: int = 100, guess=None):
    """Jacobi eigendecomposition of a stack (R, n, n) of Hermitian matrices.

    Eigenvalues come back in descending order, eigenvectors as columns.
    ``guess`` is an optional stack of unitaries approximating the
    eigenbases; starting from it usually needs one or two sweeps.
    """
    m = np.asarray(ops, dtype=complex)
    if m.ndim != 3 or m.shape[1] != m.shape[2]:
        raise ValueError(f"expected a stack of square matrices, got shape {m.shape}")
    if m.shape[1] > 8:
        raise ValueError("hermitian_eig supports dimensions up to 8")
    if np.any(np.abs(m - m.conj().transpose(0, 2, 1)) > HERMITIAN_ATOL):
        raise ValueError("hermitian_eig requires Hermitian matrices")
    if guess is None:
        v = np.broadcast_to(np.eye(m.shape[1], dtype=complex), m.shape).copy()
        a = m.copy()
    else:
        v = np.array(guess, dtype=complex)
        a = v.conj().transpose(0, 2, 1) @ m @ v
    _jacobi_sweeps(a, v, tol, max_sweeps)
    w = np.real(np.diagonal(a, axis1=1, axis2=2)).copy()
    order = np.argsort(-w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    v = np.take_along_axis(v, order[:, None, :], axis=2)
    # global phase: first component of (near-)maximal magnitude made real positive
    mags = np.abs(v)
    j = np.argmax(mags > mags.max(axis=1, keepdims=True) - 1e-12, axis=1)
    pivot = np.take_along_axis(v, j[:, None, :], axis=1)
    v = v * (np.abs(pivot) / pivot)
    return w, v


def hermitian_eig(op, tol: float = 1e-12, max_sweeps: int = 100, guess=None):
    """Eigendecomposition of one Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(eigenvalues, eigenvectors)``: eigenvalues descending,
    eigenvectors as columns. Raises ``ConvergenceError`` after
    ``max_sweeps`` sweeps.
    """
    m = as_matrix(op)
    if not is_hermitian(m):
        raise ValueError("hermitian_eig requires a Hermitian matrix")
    g = None if guess is None else np.asarray(guess)[None]
    w, v = hermitian_eig_batch(m[None], tol, max_sweeps, g)
    return w[0], v[0]


def top_eigvec(op, guess=None):
    """Largest eigenvalue and a unit eigenvector for it, plus the full basis."""
    w, v = hermitian_eig(op, guess=guess)
    return w[0], v[:, 0], v


def bloch_vector(m2) -> np.ndarray:
    """Coefficients (gx, gy, gz) of a 2x2 operator in the Pauli basis (real parts)."""
    m2 = as_matrix(m2)
    return np.array([np.trace(s @ m2).real / 2.0 for s in PAULIS])
