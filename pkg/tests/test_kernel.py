"""Translation-matrix element tests: small-frequency expansions, static
closed forms, rotated-representation consistency, and the mpmath
continuation oracle."""

import cmath
import math

import numpy as np
import pytest

from casphere.kernel import (Geometry, FieldSpec, m_scalar, m_em_block,
                             m_rotated, m_static, scalar_matrix, em_matrix)

import oracles

G12 = Geometry(1.0, 1.0)   # R = 1, L = 2
DD = FieldSpec("scalar", "dirichlet", "dirichlet")
ND = FieldSpec("scalar", "neumann", "dirichlet")


def leading_tol(xi, leading):
    return max(1e-3, 10 * xi) * abs(leading)


@pytest.mark.parametrize("xi", [1e-2, 1e-3])
def test_small_xi_dirichlet(xi):
    # M_00^D = R/2L - (1 - R/2L) R xi + ...
    want = 0.25 - 0.75 * xi
    got = m_scalar(0, 0, 0, xi, G12, DD)
    assert got == pytest.approx(want, abs=leading_tol(xi, 0.25))


@pytest.mark.parametrize("xi", [1e-2, 1e-3])
def test_small_xi_neumann(xi):
    # M_00^N = -(R^3/6L) xi^2 + (1/3) R^3 xi^3 + ...
    want = -(1.0 / 12.0) * xi ** 2 + (1.0 / 3.0) * xi ** 3
    got = m_scalar(0, 0, 0, xi, G12, ND)
    assert got == pytest.approx(want, abs=leading_tol(xi, xi ** 2 / 12.0))


@pytest.mark.parametrize("xi", [1e-2, 1e-3])
def test_small_xi_em_block_lines(xi):
    # the four polarization lines at l = l' = 1 (R = 1, L = 2)
    R, L = 1.0, 2.0
    te0 = R ** 3 / (8 * L ** 3) - (R ** 3 / (4 * L)) * (1 - 3 * R ** 2 / (10 * L ** 2)) * xi ** 2 \
        + (R ** 3 / 3) * (1 - R ** 3 / (8 * L ** 3)) * xi ** 3
    te1 = R ** 3 / (16 * L ** 3) + (R ** 3 / (8 * L)) * (1 + 3 * R ** 2 / (10 * L ** 2)) * xi ** 2 \
        - (R ** 3 / 3) * (1 + R ** 3 / (16 * L ** 3)) * xi ** 3
    tm0 = R ** 3 / (4 * L ** 3) - (R ** 3 / (2 * L)) * (1 + 3 * R ** 2 / (20 * L ** 2)) * xi ** 2 \
        + (2 * R ** 3 / 3) * (1 + R ** 3 / (4 * L ** 3)) * xi ** 3
    tm1 = R ** 3 / (8 * L ** 3) + (R ** 3 / (4 * L)) * (1 - 3 * R ** 2 / (20 * L ** 2)) * xi ** 2 \
        - (2 * R ** 3 / 3) * (1 - R ** 3 / (8 * L ** 3)) * xi ** 3
    b0 = m_em_block(1, 1, 0, xi, G12)
    b1 = m_em_block(1, 1, 1, xi, G12)
    # the printed TM lines are the block entries with the -d_TM factor
    # already applied (positive leading term)
    assert b0[0, 0] == pytest.approx(te0, abs=leading_tol(xi, te0))
    assert b1[0, 0] == pytest.approx(te1, abs=leading_tol(xi, te1))
    assert b0[1, 1] == pytest.approx(tm0, abs=leading_tol(xi, tm0))
    assert b1[1, 1] == pytest.approx(tm1, abs=leading_tol(xi, tm1))


def test_em_block_m0_offdiagonal_zero():
    b = m_em_block(2, 3, 0, 0.7, G12)
    assert b[0, 1] == 0.0 and b[1, 0] == 0.0
    M = em_matrix(0, 0.7, G12, 5)
    n = M.shape[0] // 2
    assert np.all(M[:n, n:] == 0.0) and np.all(M[n:, :n] == 0.0)


def test_static_values():
    assert m_static(0, 0, 0, G12, "dirichlet") == pytest.approx(0.25, rel=1e-13)
    # m-summed l = 1 diagonals: N -> -2 (R/2L)^3, TE -> 2 (R/2L)^3, TM -> 4 (R/2L)^3
    for pol, want in [("neumann", -2.0), ("te", 2.0), ("tm", 4.0)]:
        s = sum(m_static(1, 1, m, G12, pol) for m in (-1, 0, 1))
        assert s == pytest.approx(want * 0.25 ** 3, rel=1e-12)


def test_static_tm_l0_raises():
    with pytest.raises(ValueError):
        m_static(0, 0, 0, G12, "tm")


def test_static_limit_scalar_entrywise():
    # xi -> 0 limit of the frequency kernel reproduces the closed form;
    # Dirichlet entries approach it linearly in xi, Neumann quadratically
    xi = 1e-6
    Md = scalar_matrix(0, xi, G12, DD, 5)
    Md2 = scalar_matrix(0, xi / 10, G12, DD, 5)
    Mn = scalar_matrix(0, xi, G12, ND, 5)
    for l in range(6):
        for lp in range(6):
            want = m_static(l, lp, 0, G12, "dirichlet")
            assert Md[l, lp] == pytest.approx(want, abs=2e-6)
            # the residual is the O(xi) term: shrinks tenfold with xi
            # (the additive guard covers entries already at rounding noise)
            assert abs(Md2[l, lp] - want) < 0.2 * abs(Md[l, lp] - want) + 1e-10
            assert Mn[l, lp] == pytest.approx(
                m_static(l, lp, 0, G12, "neumann"), abs=1e-8)


def test_static_limit_em_entrywise():
    xi = 1e-6
    for l in range(1, 6):
        for lp in range(1, 6):
            b = m_em_block(l, lp, 1, xi, G12)
            assert b[0, 0] == pytest.approx(m_static(l, lp, 1, G12, "te"), abs=1e-8)
            assert b[1, 1] == pytest.approx(m_static(l, lp, 1, G12, "tm"), abs=1e-8)
            # polarization mixing vanishes linearly in xi
            assert abs(b[0, 1]) < 2e-7 and abs(b[1, 0]) < 2e-7
            b2 = m_em_block(l, lp, 1, xi / 10, G12)
            assert abs(b2[0, 1]) < 0.2 * abs(b[0, 1]) + 1e-15


def test_exponential_suppression():
    # decay like exp(-2 xi d): |M_00(50)| < e^-90 at d = 1
    val = m_scalar(0, 0, 0, 50.0, G12, DD)
    assert 0 < abs(val) < math.exp(-90)


def test_large_index_monotone_decay():
    xi = 2.0
    M = scalar_matrix(0, xi, G12, DD, 40)
    diag = np.abs(np.diag(M))
    start = int(math.e * xi * G12.L) + 1
    assert np.all(np.diff(diag[start:]) < 0)


def test_scalar_against_mpmath_oracle():
    for (l, lp, m, xi, bc) in [(0, 0, 0, 0.5, "dirichlet"), (2, 4, 1, 1.3, "dirichlet"),
                               (3, 1, 1, 2.0, "neumann"), (5, 5, 2, 0.25, "neumann")]:
        spec = FieldSpec("scalar", bc, "dirichlet")
        got = m_scalar(l, lp, m, xi, Geometry(1.0, 1.5), spec)
        want = oracles.m_scalar_direct(l, lp, m, xi, 1.0, 2.5, bc)
        assert got == pytest.approx(want, rel=1e-11)


def test_rotated_against_direct_continuation():
    for (l, lp, m, xi, R, L) in [(0, 0, 0, 0.7, 1.0, 2.0), (1, 2, 1, 1.3, 1.0, 3.0),
                                 (2, 2, 0, 2.1, 0.5, 0.505), (4, 5, 2, 1.7, 2.0, 2.2)]:
        geom = Geometry(R, L - R)
        got = m_rotated(l, lp, m, xi, geom, DD)
        want = oracles.m_rotated_direct(l, lp, m, xi, R, L)
        assert got == pytest.approx(want, rel=1e-12)


def test_rotated_conjugation():
    geom = Geometry(1.0, 2.0)  # L = 3
    a = m_rotated(2, 2, 1, 1.3, geom, DD, branch=1)
    b = m_rotated(2, 2, 1, 1.3, geom, DD, branch=-1)
    assert b == pytest.approx(a.conjugate(), rel=1e-12)


def test_rotated_small_xi_limit():
    # M(i xi) -> R/2L with an O(xi) imaginary part
    v = m_rotated(0, 0, 0, 1e-4, G12, DD)
    assert v.real == pytest.approx(0.25, abs=1e-3)
    assert abs(v.imag) < 5e-4
    v2 = m_rotated(0, 0, 0, 5e-5, G12, DD)
    assert abs(v2.imag) == pytest.approx(abs(v.imag) / 2, rel=0.05)


def test_rotated_jump():
    # i [ln(1-M(i xi)) - ln(1-M(-i xi))] -> -2 R xi at small xi
    xi = 1e-3
    a = cmath.log(1 - m_rotated(0, 0, 0, xi, G12, DD, branch=1))
    b = cmath.log(1 - m_rotated(0, 0, 0, xi, G12, DD, branch=-1))
    jump = (1j * (a - b)).real
    assert jump == pytest.approx(-2.0 * xi, rel=0.05)


def test_scale_invariance():
    # M is invariant under (R, d, xi) -> (lam R, lam d, xi/lam)
    lam = 2.0
    a = scalar_matrix(1, 0.8, Geometry(1.0, 0.5), DD, 6)
    b = scalar_matrix(1, 0.8 / lam, Geometry(lam, lam * 0.5), DD, 6)
    assert np.allclose(a, b, rtol=1e-13, atol=0)


def test_em_matrix_mirrors_two_index_spectrum_at_m0():
    # at m = 0 the determinant-ready assembly and the entrywise convention
    # agree block by block up to a similarity, so the eigenvalues match
    M = em_matrix(0, 0.6, G12, 4)
    n = M.shape[0] // 2
    te_lit = np.array([[m_em_block(l, lp, 0, 0.6, G12)[0, 0]
                        for lp in range(1, 5)] for l in range(1, 5)])
    ev_a = np.sort_complex(np.linalg.eigvals(M[:n, :n]))
    ev_b = np.sort_complex(np.linalg.eigvals(te_lit))
    assert np.allclose(ev_a, ev_b, rtol=1e-10)


def test_geometry_validation():
    with pytest.raises(ValueError):
        Geometry(-1.0, 0.5)
    with pytest.raises(ValueError):
        Geometry(1.0, -0.1)
    g0 = Geometry(1.0, 0.0)  # contact allowed, but not for modified kernels
    with pytest.raises(ValueError):
        scalar_matrix(0, 1.0, g0, DD, 3)
    with pytest.raises(ValueError):
        FieldSpec("vector")
    assert FieldSpec.em().l_min == 1
    assert FieldSpec("scalar", "dirichlet", "neumann").plane_sign == -1
