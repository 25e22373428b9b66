"""Quantum exponential: corpus replay, exact special values, inversion."""

import math

import numpy as np
import pytest

from qazb.corpus import load_fq_table
from qazb.errors import AmbiguityError, DomainError
from qazb.gamma import grid, make_point, zero_point
from qazb.opalg import NormalMatrix
from qazb.qexp import (
    ConditioningWarning,
    QExpParams,
    candidate_separation,
    fq,
    fq_complex,
    fq_family,
    fq_on_operator,
    invert_fq_family,
)

P = QExpParams(0.5)


def _eval_row(row):
    if row.kind == "zero":
        return fq(zero_point(), P)
    return fq(make_point(row.k, row.theta_num_pi * math.pi), P)


def test_corpus_replay():
    rows = load_fq_table()
    assert len(rows) > 250
    worst = max(abs(_eval_row(r) - complex(r.re, r.im)) for r in rows)
    assert worst < 1e-10


def test_exact_special_values():
    assert fq(zero_point(), P) == 1
    for m in (0, 1, 2):
        assert fq(make_point(-2 * m, math.pi), P) == -1
    for k in (-4, 0, 3):
        assert fq(make_point(k, 0.0), P) == 1      # real positive lattice
    assert fq(make_point(-1, math.pi), P) == 1     # -q^-1 is not singular


def test_unit_modulus_on_large_grid():
    g = grid(0.5, 32)
    worst = max(abs(abs(fq(pt, P)) - 1.0) for pt in g.points)
    assert worst < 1e-10


def test_conjugation_symmetry():
    rng = np.random.default_rng(9)
    for _ in range(50):
        pt = make_point(int(rng.integers(-8, 9)), float(rng.uniform(0, 2 * math.pi)))
        assert abs(fq(pt.conjugate(), P) - fq(pt, P).conjugate()) < 1e-12


def test_two_tolerance_agreement():
    tol = 1e-13
    for pt in (make_point(2, 1.0), make_point(-5, 4.4), make_point(0, 2.2)):
        a = fq(pt, QExpParams(0.5, tol=tol))
        b = fq(pt, QExpParams(0.5, tol=tol * tol))
        assert abs(a - b) < 10 * tol


def test_continuity_toward_singular_point():
    rows = [r for r in load_fq_table() if r.kind == "continuity"]
    assert len(rows) == 4
    gaps = []
    for r in rows:
        val = fq(make_point(-2, r.theta_num_pi * math.pi), P)
        assert abs(val - complex(r.re, r.im)) < 1e-10
        gaps.append(abs(val + 1.0))
    assert all(gaps[i + 1] < gaps[i] for i in range(len(gaps) - 1))


def test_pinned_imaginary_unit_value():
    row = next(r for r in load_fq_table() if r.kind == "pin")
    val = fq(make_point(0, math.pi / 2), P)
    assert abs(val - complex(row.re, row.im)) < 1e-12


def test_near_singular_conditioning_warning():
    with pytest.warns(ConditioningWarning):
        fq(make_point(-2, math.pi - 1e-8), P)


def test_fq_on_zero_operator():
    out = fq_on_operator(NormalMatrix(np.zeros((3, 3))), P)
    assert np.allclose(out, np.eye(3), atol=1e-14)


def test_fq_on_diagonal_special_values():
    out = fq_on_operator(NormalMatrix(np.diag([-1.0, 0.5])), P)
    assert np.allclose(out, np.diag([-1.0, 1.0]), atol=1e-12)


def test_fq_on_schrodinger_multiplication_operator():
    g = grid(0.5, 4)
    out = fq_on_operator(NormalMatrix(np.diag(g.values)), P)
    assert np.linalg.norm(out.conj().T @ out - np.eye(16), 2) < 1e-12


def test_fq_complex_snaps_moduli():
    assert abs(fq_complex(0j, P) - 1) < 1e-15
    pt = make_point(-2, 1.3)
    assert abs(fq_complex(pt.value(0.5), P) - fq(pt, P)) < 1e-12


def test_invert_constant_family_gives_zero():
    g = grid(0.5, 8)
    res = invert_fq_family(np.ones(64, dtype=complex), g, P)
    assert res.beta.zero
    assert res.residual < 1e-20


def test_invert_recovers_generator():
    g = grid(0.5, 8)
    beta = make_point(1, math.pi / 2)
    data = fq_family(beta, g, P)
    res = invert_fq_family(data, g, P)
    assert res.beta == beta
    assert res.residual < 1e-20


def test_invert_exhaustive_small_grid():
    g = grid(0.5, 4)
    from qazb.qexp import default_candidates

    for beta in default_candidates(g):
        res = invert_fq_family(fq_family(beta, g, P), g, P)
        assert res.beta == beta


def test_invert_rejects_non_unit_modulus():
    g = grid(0.5, 4)
    with pytest.raises(DomainError):
        invert_fq_family(2.0 * np.ones(16, dtype=complex), g, P)


def test_invert_ambiguity_detected():
    g = grid(0.5, 4)
    beta = g.point(0, 1)
    data = fq_family(beta, g, P)
    with pytest.raises(AmbiguityError):
        invert_fq_family(data, g, P, candidates=[beta, beta])


def test_separation_positive():
    assert candidate_separation(grid(0.5, 4), P) > 0.0


def test_dict_data_accepted():
    g = grid(0.5, 4)
    beta = g.point(1, 1)
    flat = fq_family(beta, g, P)
    data = {(k, j): flat[g.flat_index(k, j)] for k, j in g.index_pairs()}
    assert invert_fq_family(data, g, P).beta == beta
