r"""Translation-matrix elements of the sphere-plane round trip.

One round trip of a fluctuation between the sphere and its image in the
plane is described, per azimuthal index m, by a matrix over orbital momenta

.. math::
    M_{l,l'}(\xi) = \frac{I_{\nu'}(\xi R)}{K_{\nu}(\xi R)}
        \sqrt{\frac{\pi}{4\xi L}}
        \sum_{l''=|l-l'|}^{l+l'} K_{\nu''}(2\xi L)\, H_{ll'}^{l''},

with :math:`\nu = l+1/2`, :math:`\nu' = l'+1/2` (the sphere factor carries
the column index in the numerator and the row index in the denominator; the
trace of any power, and hence the determinant, equals that of the symmetric
one-index form).  This module provides

* ``m_scalar`` / ``scalar_matrix``   -- imaginary frequency axis, scalar field
  with Dirichlet or Neumann conditions on the sphere,
* ``m_em_block`` / ``em_matrix``     -- electromagnetic 2x2 polarization blocks,
* ``m_rotated`` / ``rotated_matrix`` -- analytic continuation to real
  frequencies via J, Y and the Hankel function H2 = J - iY,
* ``m_static`` / ``static_matrix``   -- closed-form zero-frequency limit
  (the generic formula is 0/0 at xi = 0, so the Matsubara zero mode always
  uses the closed form).

All assembly happens in log space with one exponent factored out of the
l'' sum (the largest K term, which sits at l'' = l + l'); contributions
below ~1e-300 of that maximum underflow to zero, a bounded truncation.
Everything is pure and reentrant; the only shared state is the idempotent
H-tensor cache.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from . import specfun, wigner
from .specfun import _NEG_INF

SCALAR = "scalar"
ELECTROMAGNETIC = "electromagnetic"
DIRICHLET = "dirichlet"
NEUMANN = "neumann"


@dataclass(frozen=True)
class Geometry:
    """Sphere of radius R at surface-to-surface separation d from the plane.

    The center-to-plane distance is L = R + d and eps = d/R is the
    dimensionless separation.  d = 0 (sphere touching the plane) is allowed
    only for the rotated/thermal evaluation path; the modified-axis kernels
    require d > 0.
    """

    R: float
    d: float

    def __post_init__(self):
        if not self.R > 0.0:
            raise ValueError(f"sphere radius must be positive, got R={self.R}")
        if self.d < 0.0:
            raise ValueError(f"separation must be non-negative, got d={self.d}")

    @property
    def L(self):
        return self.R + self.d

    @property
    def eps(self):
        return self.d / self.R

    def require_gap(self):
        if self.d == 0.0:
            raise ValueError("this evaluation requires d > 0")


@dataclass(frozen=True)
class FieldSpec:
    """Field kind plus boundary conditions.

    For the scalar field the sphere and the plane each carry Dirichlet or
    Neumann conditions; the electromagnetic field is perfect-conductor on
    both surfaces and the bc fields are ignored.  Orbital momenta start at
    l_min = 1 for the electromagnetic field and 0 otherwise.
    """

    kind: str = SCALAR
    sphere_bc: str = DIRICHLET
    plane_bc: str = DIRICHLET

    def __post_init__(self):
        if self.kind not in (SCALAR, ELECTROMAGNETIC):
            raise ValueError(f"unknown field kind {self.kind!r}")
        for bc in (self.sphere_bc, self.plane_bc):
            if bc not in (DIRICHLET, NEUMANN):
                raise ValueError(f"unknown boundary condition {bc!r}")

    @property
    def l_min(self):
        return 1 if self.kind == ELECTROMAGNETIC else 0

    @property
    def plane_sign(self):
        """Sign inside the logarithm: -1 for a Neumann plane (scalar only)."""
        if self.kind == SCALAR and self.plane_bc == NEUMANN:
            return -1
        return 1

    @classmethod
    def em(cls):
        return cls(kind=ELECTROMAGNETIC)


def _logaddexp(a, b):
    return np.logaddexp(a, b)


def _signed_diff(coef_log_a, log_a, log_b):
    """sign/log of  exp(coef_log_a + log_a) - exp(log_b)  (both terms > 0)."""
    a = coef_log_a + log_a
    scale = np.maximum(a, log_b)
    val = np.exp(a - scale) - np.exp(log_b - scale)
    sign = np.sign(val)
    with np.errstate(divide="ignore"):
        logmag = np.where(val != 0.0, np.log(np.abs(np.where(val != 0.0, val, 1.0))) + scale,
                          _NEG_INF)
    return sign, logmag


@lru_cache(maxsize=4096)
def _sphere_factors_imag(bc, x, l_max):
    """Numerator/denominator of the sphere scattering factor on the
    imaginary axis, as signed logs over l = 0..l_max.

    bc is 'dirichlet' (also the TE mode), 'neumann', or 'tm'.  The sqrt(x)
    factors of the Neumann and TM derivative combinations cancel between
    numerator and denominator and are dropped.  Cached per frequency; the
    returned arrays are shared and must not be mutated.
    """
    logi, logk = specfun.log_ik_arrays(l_max, x)  # orders 0 .. l_max+1
    ls = np.arange(l_max + 1, dtype=float)
    if bc == DIRICHLET:
        return (np.ones(l_max + 1), logi[: l_max + 1].copy(),
                np.ones(l_max + 1), logk[: l_max + 1].copy())
    if bc == NEUMANN:
        coef = ls
    elif bc == "tm":
        coef = ls + 1.0
    else:
        raise ValueError(f"unknown sphere factor {bc!r}")
    with np.errstate(divide="ignore"):
        logcoef = np.where(coef > 0.0,
                           np.log(np.where(coef > 0, coef, 1.0)) - math.log(x),
                           _NEG_INF)
    # numerator (c/x) I_nu + I_{nu+1}: both positive
    log_num = _logaddexp(logcoef + logi[: l_max + 1], logi[1: l_max + 2])
    sign_num = np.ones(l_max + 1)
    # denominator (c/x) K_nu - K_{nu+1}: negative for every l on these branches
    sign_den, log_den = _signed_diff(logcoef, logk[: l_max + 1], logk[1: l_max + 2])
    return sign_num, log_num, sign_den, log_den


@lru_cache(maxsize=4096)
def _sphere_factors_rotated(bc, x, l_max, branch=1):
    """Rotated sphere factors: signed-log J-combination (numerator) and
    complex-log H-combination (denominator), over l = 0..l_max.

    branch +1 uses H2 = J - iY (frequency +i xi), branch -1 uses H1.
    Cached per frequency; do not mutate the returned arrays.
    """
    sj, lj, sy, ly = specfun.log_jy_arrays(l_max, x)  # orders 0 .. l_max+1
    h2m, h2p = specfun.log_hankel2_arrays(l_max, x, conjugate=(branch < 0))
    if bc == DIRICHLET:
        return (sj[: l_max + 1].copy(), lj[: l_max + 1].copy(),
                h2m[: l_max + 1].copy(), h2p[: l_max + 1].copy())
    if bc != NEUMANN:
        raise ValueError("rotated kernels support Dirichlet and Neumann spheres only")
    sign_num = np.empty(l_max + 1)
    log_num = np.empty(l_max + 1)
    den_mag = np.empty(l_max + 1)
    den_ph = np.empty(l_max + 1)
    for l in range(l_max + 1):
        c = l / x
        # numerator (l/x) J_nu - J_{nu+1}
        scale = max(lj[l] + (math.log(c) if c > 0 else _NEG_INF), lj[l + 1])
        if scale == _NEG_INF:
            sign_num[l], log_num[l] = 0.0, _NEG_INF
        else:
            val = (c * sj[l] * math.exp(lj[l] - scale)
                   - sj[l + 1] * math.exp(lj[l + 1] - scale))
            sign_num[l] = math.copysign(1.0, val) if val != 0.0 else 0.0
            log_num[l] = math.log(abs(val)) + scale if val != 0.0 else _NEG_INF
        # denominator (l/x) H_nu - H_{nu+1}, complex
        scale = max((h2m[l] + math.log(c)) if c > 0 else _NEG_INF, h2m[l + 1])
        z = (c * math.exp(h2m[l] - scale) * complex(math.cos(h2p[l]), math.sin(h2p[l]))
             - math.exp(h2m[l + 1] - scale) * complex(math.cos(h2p[l + 1]), math.sin(h2p[l + 1])))
        den_mag[l] = math.log(abs(z)) + scale
        den_ph[l] = math.atan2(z.imag, z.real)
    return sign_num, log_num, den_mag, den_ph


def _grid(m, l_min, l_max):
    l_start = max(l_min, abs(m))
    return l_start, np.arange(l_start, l_max + 1)


@lru_cache(maxsize=1024)
def _k_shift_table(y, l_max):
    """Exponent table U[s, k] = exp(logK[k] - logK[s]) for the l'' sums.

    K grows with order, so the l'' = l+l' term dominates each sum and the
    valid shifts sit at or below zero; entries beyond the triangle bound
    (where the coupling vanishes) are clamped to keep exp finite.  Shared
    across all azimuthal blocks at one frequency.
    """
    _, logk_y = specfun.log_ik_arrays(2 * l_max, y)
    lk = logk_y[: 2 * l_max + 1]
    U = np.exp(np.minimum(lk[None, :] - lk[:, None], 50.0))
    U.flags.writeable = False
    return U, lk


@lru_cache(maxsize=1024)
def _h2_shift_table(y, l_max, branch):
    """Complex analog of :func:`_k_shift_table` built on H2 magnitudes.

    |H2| grows towards high order up to O(1) oscillatory wiggles, so the
    l'' = l+l' reference keeps valid shifts near or below zero.
    """
    hy_mag, hy_ph = specfun.log_hankel2_arrays(2 * l_max, y,
                                               conjugate=(branch < 0))
    mag = hy_mag[: 2 * l_max + 1]
    ph = hy_ph[: 2 * l_max + 1]
    U = np.exp(np.minimum(mag[None, :] - mag[:, None], 50.0)
               + 1j * ph[None, :])
    U.flags.writeable = False
    return U, mag


def scalar_matrix(m, xi, geom, spec, l_max):
    """Dense M_{l,l'}(xi) for one azimuthal index m (imaginary axis, scalar).

    Parameters
    ----------
    m : int
        azimuthal index (non-negative; negative m is related by symmetry)
    xi : float
        positive imaginary frequency
    geom : Geometry
    spec : FieldSpec
        must be scalar
    l_max : int
        highest orbital momentum retained

    Returns
    -------
    ndarray
        (n, n) real matrix with n = l_max - max(0, |m|) + 1; empty when the
        l range is empty.
    """
    if spec.kind != SCALAR:
        raise ValueError("scalar_matrix needs a scalar FieldSpec")
    geom.require_gap()
    if not xi > 0.0:
        raise ValueError("xi must be positive; use static_matrix for xi = 0")
    l_start, ls = _grid(m, 0, l_max)
    n = len(ls)
    if n == 0:
        return np.zeros((0, 0))
    x = xi * geom.R
    y = 2.0 * xi * geom.L
    s_num, log_num, s_den, log_den = _sphere_factors_imag(spec.sphere_bc, x, l_max)
    H = wigner.h_tensor(abs(m), l_start, l_max)
    ktop = ls[:, None] + ls[None, :]
    U, logk_y = _k_shift_table(y, l_max)
    logk_top = logk_y[ktop]
    S = np.einsum("abk,abk->ab", U[ktop], H)
    log_pref = 0.5 * math.log(math.pi / (4.0 * xi * geom.L))
    with np.errstate(divide="ignore"):
        logS = np.where(S != 0.0, np.log(np.abs(np.where(S != 0.0, S, 1.0))), _NEG_INF)
    logM = (log_num[ls][None, :] - log_den[ls][:, None]
            + log_pref + logS + logk_top)
    signM = np.sign(S) * s_num[ls][None, :] * s_den[ls][:, None]
    return signM * np.exp(logM)


def rotated_matrix(m, xi, geom, spec, l_max, branch=1):
    """Dense complex M_{l,l'}(i xi) for one m (rotated to real frequency).

    branch +1 evaluates M(+i xi), branch -1 evaluates M(-i xi) through an
    independent assembly from H1 = J + iY; the two must be complex
    conjugates.  Scalar fields only (the electromagnetic continuation is
    not validated).
    """
    if spec.kind != SCALAR:
        raise NotImplementedError(
            "the rotated (real-frequency) kernel is implemented for scalar fields only")
    if not xi > 0.0:
        raise ValueError("xi must be positive")
    l_start, ls = _grid(m, 0, l_max)
    n = len(ls)
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    x = xi * geom.R
    y = 2.0 * xi * geom.L
    s_num, log_num, den_mag, den_ph = _sphere_factors_rotated(
        spec.sphere_bc, x, l_max, branch)
    H = wigner.h_tensor(abs(m), l_start, l_max, alternating=True)
    ktop = ls[:, None] + ls[None, :]
    U, hy_mag = _h2_shift_table(y, l_max, 1 if branch >= 0 else -1)
    top = hy_mag[ktop]
    S = np.einsum("abk,abk->ab", U[ktop], H.astype(complex))
    log_pref = 0.5 * math.log(math.pi / (4.0 * xi * geom.L))
    mag = np.exp(log_num[ls][None, :] - den_mag[ls][:, None] + log_pref + top)
    phase = np.exp(-1j * den_ph[ls][:, None])
    return (s_num[ls][None, :] * mag) * phase * S


def em_matrix(m, xi, geom, l_max):
    """Dense electromagnetic round-trip matrix for one m (imaginary axis).

    Polarization-major layout: the first n rows/columns are the TE channel,
    the last n the TM channel, with n orbital momenta from max(1, |m|).
    The sphere factor is attached per column as the local T-matrix ratio
    (numerator and denominator at the column momentum), which leaves the
    determinant invariant; the entrywise two-index convention of
    :func:`m_em_block` differs off the diagonal but shares every spectral
    quantity at m = 0 and in the static limit.
    """
    geom.require_gap()
    if not xi > 0.0:
        raise ValueError("xi must be positive; use static_matrix for xi = 0")
    l_start, ls = _grid(m, 1, l_max)
    n = len(ls)
    if n == 0:
        return np.zeros((0, 0))
    x = xi * geom.R
    y = 2.0 * xi * geom.L
    _, log_num_te, _, log_den_te = _sphere_factors_imag(DIRICHLET, x, l_max)
    _, log_num_tm, s_den_tm, log_den_tm = _sphere_factors_imag("tm", x, l_max)
    log_t_te = log_num_te[ls] - log_den_te[ls]
    log_t_tm = log_num_tm[ls] - log_den_tm[ls]
    s_t_tm = s_den_tm[ls]  # numerator is positive
    H = wigner.h_tensor(abs(m), l_start, l_max)
    LAM = wigner.lambda_tensor(abs(m), l_start, l_max)
    ktop = ls[:, None] + ls[None, :]
    U, logk_y = _k_shift_table(y, l_max)
    logk_top = logk_y[ktop]
    W = U[ktop]
    S = np.einsum("abk,abk->ab", W, H)
    S_lam = np.einsum("abk,abk,abk->ab", W, H, LAM)
    log_pref = 0.5 * math.log(math.pi / (4.0 * xi * geom.L))

    lf = ls.astype(float)
    lam_norm = np.sqrt(lf * (lf + 1.0))
    tilde = 2.0 * abs(m) * xi * geom.L / (lam_norm[:, None] * lam_norm[None, :])

    def assemble(Sm, extra, log_t, sign_t):
        with np.errstate(divide="ignore"):
            logSm = np.where(Sm != 0.0, np.log(np.abs(np.where(Sm != 0.0, Sm, 1.0))), _NEG_INF)
        mag = np.exp(logSm + log_pref + logk_top + log_t[None, :])
        return np.sign(Sm) * mag * extra * sign_t[None, :]

    ones = np.ones(n)
    B11 = assemble(S_lam, 1.0, log_t_te, ones)
    B21 = assemble(S, tilde, log_t_te, ones)
    B12 = -assemble(S, tilde, log_t_tm, s_t_tm)
    B22 = -assemble(S_lam, 1.0, log_t_tm, s_t_tm)
    return np.block([[B11, B12], [B21, B22]])


def _h_top_value(l, lp, m):
    """H_{l l'}^{l+l'}; positive for |m| <= min(l, l')."""
    log3j0 = wigner._log_three_j_top(l, lp, 0)
    log3jm = wigner._log_three_j_top(l, lp, abs(m))
    return math.sqrt((2.0 * l + 1.0) * (2.0 * lp + 1.0)) \
        * (2.0 * (l + lp) + 1.0) * math.exp(log3j0 + log3jm)


def m_static(l, lp, m, geom, pol):
    """Zero-frequency matrix element, closed form.

    Parameters
    ----------
    l, lp : int
        row and column orbital momenta
    m : int
        azimuthal index, |m| <= min(l, l')
    geom : Geometry
    pol : str or FieldSpec
        'dirichlet', 'neumann', 'te', 'tm', or a scalar FieldSpec whose
        sphere_bc is used

    Notes
    -----
    Dirichlet: ``(R/2L)^(l+l'+1) sqrt(pi) Gamma(l+l'+1/2) /
    (2 Gamma(l+1/2) Gamma(l'+3/2)) H_top``; Neumann multiplies by
    ``-l'/(l+1)``, TE by ``Lambda_top``, TM by ``(l'+1)/l * Lambda_top``
    (TM requires l >= 1).
    """
    if isinstance(pol, FieldSpec):
        if pol.kind != SCALAR:
            raise ValueError("pass 'te' or 'tm' explicitly for the electromagnetic field")
        pol = pol.sphere_bc
    geom.require_gap()
    if abs(m) > min(l, lp):
        return 0.0
    if pol == "tm" and l == 0:
        raise ValueError("the TM static element is undefined at l = 0")
    logd = ((l + lp + 1) * math.log(geom.R / (2.0 * geom.L))
            + 0.5 * math.log(math.pi) - math.log(2.0)
            + math.lgamma(l + lp + 0.5) - math.lgamma(l + 0.5) - math.lgamma(lp + 1.5))
    base = math.exp(logd) * _h_top_value(l, lp, m)
    if pol == DIRICHLET:
        return base
    if pol == NEUMANN:
        return -lp / (l + 1.0) * base
    lam_top = math.sqrt(l * lp / ((l + 1.0) * (lp + 1.0)))
    if pol == "te":
        return base * lam_top
    if pol == "tm":
        return (lp + 1.0) / l * base * lam_top
    raise ValueError(f"unknown polarization {pol!r}")


def static_matrix(m, geom, spec_or_pol, l_max):
    """Dense zero-frequency matrix for one m.

    For a scalar FieldSpec (or 'dirichlet'/'neumann'/'te'/'tm') a single
    block is returned; for an electromagnetic FieldSpec the TE and TM
    blocks are stacked block-diagonally (the polarization mixing vanishes
    at zero frequency).
    """
    geom.require_gap()
    if isinstance(spec_or_pol, FieldSpec) and spec_or_pol.kind == ELECTROMAGNETIC:
        te = static_matrix(m, geom, "te", l_max)
        tm = static_matrix(m, geom, "tm", l_max)
        out = np.zeros((2 * te.shape[0], 2 * te.shape[0]))
        nb = te.shape[0]
        out[:nb, :nb] = te
        out[nb:, nb:] = tm
        return out
    pol = spec_or_pol.sphere_bc if isinstance(spec_or_pol, FieldSpec) else spec_or_pol
    l_min = 1 if pol in ("te", "tm") else 0
    l_start, ls = _grid(m, l_min, l_max)
    n = len(ls)
    if n == 0:
        return np.zeros((0, 0))
    logH = wigner.log_h_top_matrix(l_start, l_max, abs(m))
    l = ls[:, None].astype(float)
    lp = ls[None, :].astype(float)
    logM = ((l + lp + 1.0) * math.log(geom.R / (2.0 * geom.L))
            + 0.5 * math.log(math.pi) - math.log(2.0)
            + gammaln(l + lp + 0.5) - gammaln(l + 0.5) - gammaln(lp + 1.5) + logH)
    M = np.exp(logM)
    if pol == DIRICHLET:
        return M
    if pol == NEUMANN:
        return M * (-lp / (l + 1.0))
    lam_top = np.sqrt(l * lp / ((l + 1.0) * (lp + 1.0)))
    if pol == "te":
        return M * lam_top
    if pol == "tm":
        return M * lam_top * (lp + 1.0) / l
    raise ValueError(f"unknown polarization {pol!r}")


def m_scalar(l, lp, m, xi, geom, spec):
    """Single scalar matrix element M_{l,l'}(xi) on the imaginary axis."""
    if l < abs(m) or lp < abs(m):
        raise ValueError("l, l' must be >= |m|")
    l_start = abs(m)
    M = scalar_matrix(m, xi, geom, spec, max(l, lp))
    return float(M[l - l_start, lp - l_start])


def m_rotated(l, lp, m, xi, geom, spec, branch=1):
    """Single rotated matrix element M_{l,l'}(i xi) (scalar field)."""
    if l < abs(m) or lp < abs(m):
        raise ValueError("l, l' must be >= |m|")
    l_start = abs(m)
    M = rotated_matrix(m, xi, geom, spec, max(l, lp), branch)
    return complex(M[l - l_start, lp - l_start])


def m_em_block(l, lp, m, xi, geom):
    """Electromagnetic 2x2 block in the entrywise (two-index) convention.

    Layout ``[[TE-TE, TE-TM], [TM-TE, TM-TM]]``: the polarization mixing
    matrix multiplies ``diag(d_TE, -d_TM)`` from the right, with the sphere
    factors carrying the column momentum in the numerator and the row
    momentum in the denominator.  The zero-frequency limit of every entry
    reproduces :func:`m_static`; off the diagonal this convention differs
    from the determinant-ready :func:`em_matrix` by a non-diagonal
    similarity, so spectral quantities should be computed from the latter.
    """
    if min(l, lp) < max(1, abs(m)):
        raise ValueError("electromagnetic blocks need l, l' >= max(1, |m|)")
    geom.require_gap()
    if not xi > 0.0:
        raise ValueError("xi must be positive; use m_static for xi = 0")
    x = xi * geom.R
    y = 2.0 * xi * geom.L
    l_hi = max(l, lp)
    _, log_num_te, _, log_den_te = _sphere_factors_imag(DIRICHLET, x, l_hi)
    _, log_num_tm, s_den_tm, log_den_tm = _sphere_factors_imag("tm", x, l_hi)
    _, logk_y = specfun.log_ik_arrays(l + lp, y)
    hs = wigner.h_slice(l, lp, m)
    ks = np.arange(abs(l - lp), l + lp + 1)
    kk = ks.astype(float)
    lam = 0.5 * (kk * (kk + 1.0) - l * (l + 1.0) - lp * (lp + 1.0)) \
        / math.sqrt(l * (l + 1.0) * lp * (lp + 1.0))
    top = logk_y[l + lp]
    w = np.exp(logk_y[ks] - top)
    S = float(np.sum(w * hs))
    S_lam = float(np.sum(w * hs * lam))
    log_pref = 0.5 * math.log(math.pi / (4.0 * xi * geom.L)) + top
    tilde = 2.0 * m * xi * geom.L / math.sqrt(l * (l + 1.0) * lp * (lp + 1.0))
    d_te = math.exp(log_num_te[lp] - log_den_te[l] + log_pref)
    d_tm = s_den_tm[l] * math.exp(log_num_tm[lp] - log_den_tm[l] + log_pref)
    return np.array([[S_lam * d_te, -S * tilde * d_tm],
                     [S * tilde * d_te, -S_lam * d_tm]])
