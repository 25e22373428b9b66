"""Functional calculus, operator bicharacter, sums, spectral diagnostics."""

import numpy as np
import pytest

from qazb.corpus import load_pinned
from qazb.errors import DimensionError, DomainError, KernelConditionError, SpectrumError
from qazb.gamma import grid, make_point
from qazb.opalg import (
    NormalMatrix,
    apply_fn,
    chi_op,
    closure_sum,
    eig_normal,
    gamma_distance,
    operator_norm,
    snap_spectrum,
)
from qazb.qexp import QExpParams, fq_complex


def random_normal_matrix(dim, seed):
    """Unitary conjugate of a random lattice-free diagonal (exactly normal)."""
    rng = np.random.default_rng(seed)
    d = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    A = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    Qu, _ = np.linalg.qr(A)
    return Qu @ np.diag(d) @ Qu.conj().T, d


def test_eig_normal_diagonal_input():
    d = np.array([1.0 + 0j, -2.0, 3j])
    V, lam, defect = eig_normal(np.diag(d))
    assert defect < 1e-14
    assert np.allclose(V.conj().T @ V, np.eye(3), atol=1e-13)
    assert np.allclose(np.sort_complex(lam), np.sort_complex(d), atol=1e-14)


def test_eig_normal_similarity_invariance():
    g = grid(0.5, 4)
    rng = np.random.default_rng(0)
    d = rng.standard_normal(16) + 1j * rng.standard_normal(16)
    A = g.fourier.conj().T @ np.diag(d) @ g.fourier
    _, lam, _ = eig_normal(A)
    assert np.abs(np.sort_complex(lam) - np.sort_complex(d)).max() < 1e-11


def test_eig_normal_sum_truncation_signature():
    # the absolute defect of X+Y at M=8 is the model's recorded signature
    pinned = load_pinned()
    g = grid(0.5, 8)
    X = np.diag(g.values)
    Y = g.fourier.conj().T @ X @ g.fourier
    _, _, defect = eig_normal(X + Y)
    assert defect == pytest.approx(pinned["sum_defect_absolute_m8"], rel=1e-10)


def test_eig_normal_rejects_non_finite():
    with pytest.raises(DomainError):
        eig_normal(np.array([[np.nan, 0], [0, 1]], dtype=complex))


def test_normal_matrix_reconstruction():
    T, _ = random_normal_matrix(12, 3)
    nm = NormalMatrix(T)
    V, lam = nm.eig()
    assert operator_norm((V * lam) @ V.conj().T - T) < 100 * np.finfo(float).eps * nm.norm2
    assert operator_norm(V.conj().T @ V - np.eye(12)) < 1e-11


def test_apply_fn_identity_and_constant():
    T, _ = random_normal_matrix(8, 4)
    assert operator_norm(apply_fn(T, lambda z: z) - T) < 1e-11 * operator_norm(T)
    assert np.allclose(apply_fn(T, lambda z: np.ones_like(z)), np.eye(8), atol=1e-12)


def test_apply_fn_quantum_exponential_special_values():
    p = QExpParams(0.5)
    out = apply_fn(np.diag([0.0 + 0j, -1.0]), lambda z: fq_complex(z, p))
    assert np.allclose(out, np.diag([1.0, -1.0]), atol=1e-12)


def test_apply_fn_homomorphism():
    T, _ = random_normal_matrix(10, 6)
    f = lambda z: z**2
    g = lambda z: np.exp(1j * np.angle(z))
    lhs = apply_fn(T, lambda z: f(z) * g(z))
    rhs = apply_fn(T, f) @ apply_fn(T, g)
    assert operator_norm(lhs - rhs) < 1e-10 * max(1.0, operator_norm(T) ** 2)


def test_apply_fn_snap_strictness():
    with pytest.raises(SpectrumError):
        apply_fn(np.diag([1.1 + 0j, 0.5]), lambda z: z, q=0.5, snap_rtol=1e-9)


def test_chi_op_at_identity():
    g = grid(0.5, 4)
    X = np.diag(g.values)
    out = chi_op(X, make_point(0, 0.0), 0.5)
    assert np.allclose(out, np.eye(16), atol=1e-13)


def test_chi_op_at_q_is_phase():
    g = grid(0.5, 4)
    X = np.diag(g.values)
    out = chi_op(X, make_point(1, 0.0), 0.5)
    assert np.allclose(out, np.diag(g.values / np.abs(g.values)), atol=1e-13)


def test_chi_op_multiplicative():
    g = grid(0.5, 4)
    X = NormalMatrix(np.diag(g.values))
    g1 = make_point(2, 1.3)
    g2 = make_point(-1, 0.4)
    lhs = chi_op(X, g1, 0.5) @ chi_op(X, g2, 0.5)
    rhs = chi_op(X, g1 * g2, 0.5)
    assert operator_norm(lhs - rhs) < 1e-11


def test_chi_op_commutes_with_diagonal_exactly():
    g = grid(0.5, 4)
    X = np.diag(g.values)
    rng = np.random.default_rng(8)
    D = np.diag(rng.standard_normal(16) + 1j * rng.standard_normal(16))
    C = chi_op(X, make_point(1, 0.7), 0.5)
    Cd = np.diag(np.diag(C))  # C is diagonal since X is; drop roundoff zeros
    assert np.array_equal(Cd @ D, D @ Cd)


def test_chi_op_kernel_condition():
    with pytest.raises(KernelConditionError):
        chi_op(np.diag([0.0 + 0j, 1.0]), make_point(1, 0.0), 0.5)


def test_chi_op_rejects_zero_point():
    from qazb.gamma import zero_point

    with pytest.raises(DomainError):
        chi_op(np.diag([1.0 + 0j]), zero_point(), 0.5)


def test_closure_sum_zero_and_mismatch():
    g = grid(0.5, 4)
    X = NormalMatrix(np.diag(g.values))
    S = closure_sum(X, np.zeros((16, 16)))
    assert np.array_equal(S.entries, X.entries)
    assert S.normality_defect == X.normality_defect
    with pytest.raises(DimensionError):
        closure_sum(X, np.zeros((4, 4)))


def test_gamma_distance_examples():
    g = grid(0.5, 4)
    assert gamma_distance(np.diag(g.values), 0.5) < 1e-12
    assert gamma_distance(np.diag([1.1 + 0j]), 0.5) == pytest.approx(0.1, abs=1e-12)
    assert gamma_distance(np.diag([0.0 + 0j, 1.0]), 0.5) < 1e-12  # 0 lies in the closure


def test_degraded_flag_and_completion():
    J = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)   # maximally non-normal
    nm = NormalMatrix(J)
    assert nm.degraded
    out = apply_fn(nm, lambda z: np.ones_like(z))            # still completes
    assert out.shape == (2, 2)


def test_snap_spectrum_zero_detection():
    n, theta, zero, rel = snap_spectrum(np.array([0.0 + 0j, 2.0]), 0.5)
    assert zero[0] and not zero[1]
    assert n[1] == -1 and rel[1] < 1e-15


def test_normal_matrix_rejects_non_square():
    with pytest.raises(DimensionError):
        NormalMatrix(np.zeros((2, 3)))
