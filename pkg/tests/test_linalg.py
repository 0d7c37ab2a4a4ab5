import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from biasgames import linalg
from biasgames.linalg import I2, SX, SY, SZ, ConvergenceError, expectation, hermitian_eig, ket, kron


def random_hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2


def random_state(rng, n):
    return linalg.normalize(rng.normal(size=n) + 1j * rng.normal(size=n))


# --- kron ---

def test_kron_identity():
    assert np.array_equal(kron(I2, I2), np.eye(4))


def test_kron_bit_flip():
    assert np.allclose(kron(SX, SX) @ ket("00"), ket("11"))


def test_kron_matches_hand_formula():
    # block structure of a (x) b written out entry by entry
    rng = np.random.default_rng(1)
    a, b = rng.normal(size=(2, 2)), rng.normal(size=(2, 2))
    hand = np.block([[a[i, j] * b for j in range(2)] for i in range(2)])
    assert np.allclose(kron(a, b), hand, atol=1e-15)


def test_kron_associative_bilinear():
    rng = np.random.default_rng(2)
    a, b, c = (random_hermitian(rng, 2) for _ in range(3))
    assert np.allclose(kron(kron(a, b), c), kron(a, kron(b, c)), atol=1e-12)
    assert np.allclose(kron(a + 2 * b, c), kron(a, c) + 2 * kron(b, c), atol=1e-12)


def test_kron_needs_operand():
    with pytest.raises(ValueError):
        kron()


# --- expectation ---

def test_expectation_eigenstate():
    assert expectation(ket("0"), SZ) == 1.0


def test_expectation_bell_zz_and_xx():
    phi = linalg.bell_state()
    assert expectation(phi, kron(SZ, SZ)) == pytest.approx(1.0, abs=1e-15)
    assert expectation(phi, kron(SX, SX)) == pytest.approx(1.0, abs=1e-15)


def test_expectation_ghz_xxx():
    assert expectation(linalg.ghz_state(), kron(SX, SX, SX)) == pytest.approx(1.0, abs=1e-15)


def test_expectation_errors():
    with pytest.raises(ValueError):
        expectation(ket("00"), SZ)
    with pytest.raises(ValueError):
        expectation(ket("0"), np.array([[0, 1], [0, 0]]))


@given(st.integers(1, 3), st.integers(0, 2**31 - 1))
@settings(max_examples=30, deadline=None)
def test_expectation_identity_is_one(nq, seed):
    psi = random_state(np.random.default_rng(seed), 2**nq)
    assert expectation(psi, np.eye(2**nq)) == pytest.approx(1.0, abs=1e-12)


def test_check_state():
    with pytest.raises(ValueError):
        linalg.check_state(np.ones(3) / math.sqrt(3))
    with pytest.raises(ValueError):
        linalg.check_state(np.ones(4))


# --- hermitian_eig ---

def test_eig_sigma_z():
    w, v = hermitian_eig(SZ)
    assert np.allclose(w, [1, -1])
    assert np.allclose(v[:, 0], ket("0")) and np.allclose(v[:, 1], ket("1"))


def test_eig_sigma_x():
    w, v = hermitian_eig(SX)
    assert np.allclose(w, [1, -1])
    assert np.allclose(v[:, 0], np.array([1, 1]) / math.sqrt(2))
    assert np.allclose(v[:, 1], np.array([1, -1]) / math.sqrt(2))


def test_eig_tsirelson_operator():
    b0, b1 = (SZ + SX) / math.sqrt(2), (SZ - SX) / math.sqrt(2)
    op = (kron(SZ, b0) + kron(SZ, b1) + kron(SX, b0) - kron(SX, b1)) / 4
    w, _ = hermitian_eig(op)
    assert w[0] == pytest.approx(1 / math.sqrt(2), abs=1e-12)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 8])
def test_eig_against_numpy(n):
    rng = np.random.default_rng(n)
    for _ in range(20):
        m = random_hermitian(rng, n)
        w, v = hermitian_eig(m)
        assert np.allclose(w, np.linalg.eigvalsh(m)[::-1], atol=1e-10)
        assert np.all(np.diff(w) <= 1e-14)
        assert np.linalg.norm(m @ v - v * w, axis=0).max() <= 1e-9
        assert np.allclose((v * w) @ v.conj().T, m, atol=1e-9)


def test_eig_degenerate_and_diagonal():
    w, v = hermitian_eig(np.diag([1.0, 1.0, -2.0, 0.5]))
    assert np.allclose(w, [1, 1, 0.5, -2])
    assert np.allclose(v.conj().T @ v, np.eye(4), atol=1e-12)


def test_eig_tiny_offdiagonal():
    m = np.diag([1.0, 2.0]).astype(complex)
    m[0, 1], m[1, 0] = 1e-200, 1e-200
    w, _ = hermitian_eig(m)
    assert np.allclose(w, [2, 1])


def test_eig_rejects_bad_input():
    with pytest.raises(ValueError):
        hermitian_eig(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError):
        hermitian_eig(np.eye(16))


def test_eig_sweep_cap_raises():
    m = random_hermitian(np.random.default_rng(0), 6)
    with pytest.raises(ConvergenceError):
        hermitian_eig(m, max_sweeps=1)


def test_bloch_vector_roundtrip():
    g = np.array([0.3, -0.4, 0.5])
    m = g[0] * SX + g[1] * SY + g[2] * SZ
    assert np.allclose(linalg.bloch_vector(m), g)
