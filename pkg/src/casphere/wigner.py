r"""Wigner 3j symbols and the geometric coupling factors of the translation
formulas.

The sphere-plane translation matrices need two 3j patterns only,
``(l l' l''; 0 0 0)`` and ``(l l' l''; m -m 0)``, combined into

.. math::
    H_{ll'}^{l''} = \sqrt{(2l+1)(2l'+1)}\,(2l''+1)
        \begin{pmatrix} l & l' & l''\\ 0&0&0\end{pmatrix}
        \begin{pmatrix} l & l' & l''\\ m&-m&0\end{pmatrix}.

For moderate momenta the Racah single sum with log-factorials and compensated
summation is accurate; the alternating sum cancels catastrophically at large
l, so beyond ``RACAH_L_MAX`` the whole l'' slice is generated by the
three-term recurrence in l'' (two-sided, matched, normalized by the sum
rule).  The parity pattern ``(0 0 0)`` has a cancellation-free closed form
used at every l.

The kernel sweeps l'' densely for every (l, l', m), so H slices are cached
as dense tensors.
"""

import math
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

#: largest momentum for which the float Racah sum is trusted; measured
#: against exact rational arithmetic the alternating sum holds 1e-10
#: relative accuracy only up to l ~ 20, so the crossover to the l''
#: recurrence sits safely below that
RACAH_L_MAX = 16

_lf = math.lgamma  # log factorial via lgamma(n+1)


def _logfac(n):
    return _lf(n + 1)


def _triangle_ok(j1, j2, j3):
    return abs(j1 - j2) <= j3 <= j1 + j2


def _three_j_000(j1, j2, j3):
    """Closed form for (j1 j2 j3; 0 0 0); zero for odd j1+j2+j3.

    Single product of factorials, no alternating sum, accurate at any l.
    """
    J = j1 + j2 + j3
    if J % 2 == 1:
        return 0.0
    g = J // 2
    log_delta = 0.5 * (_logfac(J - 2 * j1) + _logfac(J - 2 * j2)
                       + _logfac(J - 2 * j3) - _logfac(J + 1))
    log_ratio = _logfac(g) - _logfac(g - j1) - _logfac(g - j2) - _logfac(g - j3)
    return (-1.0) ** g * math.exp(log_delta + log_ratio)


def _three_j_racah(j1, j2, j3, m1, m2, m3):
    """Racah single-sum formula with log-factorials and compensated sum."""
    t1 = j2 - m1 - j3
    t2 = j1 + m2 - j3
    t3 = j1 + j2 - j3
    t4 = j1 - m1
    t5 = j2 + m2
    tmin = max(0, t1, t2)
    tmax = min(t3, t4, t5)
    terms = []
    for t in range(tmin, tmax + 1):
        lg = (_logfac(t) + _logfac(t - t1) + _logfac(t - t2)
              + _logfac(t3 - t) + _logfac(t4 - t) + _logfac(t5 - t))
        terms.append((-1.0) ** t * math.exp(-lg))
    s = math.fsum(terms)
    log_pref = 0.5 * (_logfac(j1 + j2 - j3) + _logfac(j1 - j2 + j3)
                      + _logfac(-j1 + j2 + j3) - _logfac(j1 + j2 + j3 + 1)
                      + _logfac(j1 + m1) + _logfac(j1 - m1)
                      + _logfac(j2 + m2) + _logfac(j2 - m2)
                      + _logfac(j3 + m3) + _logfac(j3 - m3))
    return (-1.0) ** (j1 - j2 - m3) * math.exp(log_pref) * s


def _log_three_j_top(j1, j2, m):
    """log |3j(j1 j2 j1+j2; m -m 0)| at the stretched top; sign is (-1)^(j1-j2)."""
    return 0.5 * (_logfac(2 * j1) + _logfac(2 * j2) + 2.0 * _logfac(j1 + j2)
                  - _logfac(2 * j1 + 2 * j2 + 1)
                  - _logfac(j1 - m) - _logfac(j1 + m)
                  - _logfac(j2 - m) - _logfac(j2 + m))


def _recurrence_slice(j1, j2, m):
    """All 3j(j1 j2 j; m -m 0) for j in [|j1-j2| .. j1+j2] by l''-recurrence.

    Two-sided: forward from j_min and backward from j_max while the
    respective minimal solutions grow, matched in the classical region,
    normalized with sum_j (2j+1) f(j)^2 = 1 and the stretched-top sign.
    Requires m != 0 (the m = 0 pattern has a closed form).
    """
    jmin = abs(j1 - j2)
    jmax = j1 + j2
    n = jmax - jmin + 1
    if n == 1:
        val = 1.0 / math.sqrt(2.0 * jmax + 1.0)
        return np.array([(-1.0) ** (j1 - j2) * val])

    def A(j):
        return j * math.sqrt(float(j * j - (j1 - j2) ** 2)
                             * float((j1 + j2 + 1) ** 2 - j * j))

    def B(j):
        return -(2.0 * j + 1.0) * (2.0 * m) * j * (j + 1.0)

    f = np.zeros(n)
    if jmin == 0:
        # j1 == j2: the j = 0 relation is empty, seed two exact elements
        f[0] = (-1.0) ** (j1 - m) / math.sqrt(2.0 * j1 + 1.0)
        f[1] = (-1.0) ** (j1 - m) * m / math.sqrt(
            j1 * (j1 + 1.0) * (2.0 * j1 + 1.0))
        istart = 1
    else:
        f[0] = 1.0  # A(jmin) = 0, so f(jmin) seeds alone
        istart = 0
    ifwd = istart
    falling = 0
    for i in range(istart, n - 1):
        j = jmin + i
        prev = f[i - 1] if i > 0 else 0.0
        f[i + 1] = -(B(j) * f[i] + (j + 1.0) * A(j) * prev) / (j * A(j + 1))
        ifwd = i + 1
        if abs(f[i + 1]) > _RESCALE:
            f[: i + 2] /= abs(f[i + 1])
        # three consecutive decreases mark the classical region (a single
        # dip can be an accidental zero of the growing solution)
        falling = falling + 1 if abs(f[i + 1]) < abs(f[i]) else 0
        if i > istart and falling >= 3:
            break
    g = np.zeros(n)
    # backward sweep from jmax (A(jmax+1) = 0)
    g[n - 1] = 1.0
    ibwd = n - 1
    for i in range(n - 1, 0, -1):
        j = jmin + i
        nxt2 = g[i + 1] if i < n - 1 else 0.0
        g[i - 1] = -(j * A(j + 1) * nxt2 + B(j) * g[i]) / ((j + 1.0) * A(j))
        ibwd = i - 1
        if abs(g[i - 1]) > _RESCALE:
            g[i - 1:] /= abs(g[i - 1])
        if ibwd <= ifwd:
            break
    # match where both sweeps are farthest from an accidental zero
    k, best = ibwd, -1.0
    for i in range(ibwd, ifwd + 1):
        q = min(abs(f[i]), abs(g[i]))
        if q > best:
            best, k = q, i
    if best <= 0.0:
        out = g.copy()  # degenerate overlap; the backward sweep covers it
    else:
        out = np.concatenate((f[:k] * (g[k] / f[k]), g[k:]))
    js = np.arange(jmin, jmax + 1, dtype=float)
    out /= math.sqrt(float(np.sum((2.0 * js + 1.0) * out * out)))
    if out[-1] * (-1.0) ** (j1 - j2) < 0.0:
        out = -out
    return out


_RESCALE = 1e250


@lru_cache(maxsize=200000)
def _slice_m(j1, j2, m):
    """Cached l'' slice of 3j(j1 j2 .; m -m 0), as a read-only array."""
    if m == 0:
        vals = np.array([_three_j_000(j1, j2, j)
                         for j in range(abs(j1 - j2), j1 + j2 + 1)])
    elif max(j1, j2) <= RACAH_L_MAX:
        vals = np.array([_three_j_racah(j1, j2, j, m, -m, 0)
                         for j in range(abs(j1 - j2), j1 + j2 + 1)])
    else:
        vals = _recurrence_slice(j1, j2, m)
    vals.flags.writeable = False
    return vals


def three_j(j1, j2, j3, m1, m2, m3):
    """Wigner 3j symbol for the patterns (0,0,0) and (m,-m,0).

    Out-of-domain inputs (triangle violation, |m| > j, m1+m2+m3 != 0)
    return 0 by convention.  Other m patterns are supported through the
    Racah sum up to ``RACAH_L_MAX`` and rejected beyond.
    """
    if m1 + m2 + m3 != 0:
        return 0.0
    if not _triangle_ok(j1, j2, j3):
        return 0.0
    if abs(m1) > j1 or abs(m2) > j2 or abs(m3) > j3:
        return 0.0
    if m1 == 0 and m2 == 0 and m3 == 0:
        return _three_j_000(j1, j2, j3)
    if m3 == 0 and m1 == -m2:
        return float(_slice_m(j1, j2, m1)[j3 - abs(j1 - j2)])
    if max(j1, j2, j3) <= RACAH_L_MAX:
        return _three_j_racah(j1, j2, j3, m1, m2, m3)
    raise NotImplementedError(
        "general m patterns are only available up to l = RACAH_L_MAX")


def h_factor(l, lp, lpp, m):
    """Geometric coupling H_{l l'}^{l''} for azimuthal index m.

    Zero outside the triangle domain and for odd l+l'+l''.
    """
    w0 = three_j(l, lp, lpp, 0, 0, 0)
    if w0 == 0.0:
        return 0.0
    wm = three_j(l, lp, lpp, m, -m, 0)
    return math.sqrt((2.0 * l + 1.0) * (2.0 * lp + 1.0)) * (2.0 * lpp + 1.0) * w0 * wm


def h_slice(l, lp, m):
    """H_{l l'}^{l''} over l'' = |l-l'| .. l+l' as an array."""
    jmin = abs(l - lp)
    w0 = _slice_m(l, lp, 0)
    wm = w0 if m == 0 else _slice_m(l, lp, abs(m))
    pref = math.sqrt((2.0 * l + 1.0) * (2.0 * lp + 1.0))
    js = np.arange(jmin, l + lp + 1, dtype=float)
    return pref * (2.0 * js + 1.0) * w0 * wm


_H_TENSOR_CACHE = {}
_LAMBDA_TENSOR_CACHE = {}


def h_tensor(m, l_start, l_max, alternating=False):
    """Dense tensor ``H[a, b, k]`` with l = l_start+a, l' = l_start+b,
    l'' = k in 0..2*l_max.

    With ``alternating=True`` the entries carry the extra factor
    ``(-1)^((l+l'-l'')/2)`` of the rotated representation.  Entries outside
    the triangle domain are zero.  Results are cached; population is
    idempotent, so concurrent first use is safe.
    """
    key = (m, l_start, l_max, alternating)
    out = _H_TENSOR_CACHE.get(key)
    if out is not None:
        return out
    ls = range(l_start, l_max + 1)
    n = l_max - l_start + 1
    H = np.zeros((n, n, 2 * l_max + 1))
    for a, l in enumerate(ls):
        for b, lp in enumerate(ls):
            if b < a:
                continue
            sl = h_slice(l, lp, m)
            ks = np.arange(abs(l - lp), l + lp + 1)
            if alternating:
                sl = sl * (-1.0) ** ((l + lp - ks) // 2)
            H[a, b, ks] = sl
            H[b, a, ks] = sl  # H is symmetric in (l, l') for both patterns
    H.flags.writeable = False
    _H_TENSOR_CACHE[key] = H
    return H


def lambda_tensor(m, l_start, l_max):
    """Polarization-diagonal factor Lambda_{ll'}^{l''} on the h_tensor grid."""
    key = (m, l_start, l_max)
    out = _LAMBDA_TENSOR_CACHE.get(key)
    if out is not None:
        return out
    ls = np.arange(l_start, l_max + 1, dtype=float)
    k = np.arange(0, 2 * l_max + 1, dtype=float)
    l = ls[:, None, None]
    lp = ls[None, :, None]
    kk = k[None, None, :]
    lam = 0.5 * (kk * (kk + 1.0) - l * (l + 1.0) - lp * (lp + 1.0)) \
        / np.sqrt(l * (l + 1.0) * lp * (lp + 1.0))
    lam.flags.writeable = False
    _LAMBDA_TENSOR_CACHE[key] = lam
    return lam


def log_h_top_matrix(l_start, l_max, m):
    """log H_{l l'}^{l+l'} (stretched top) as a dense (n, n) matrix.

    The two stretched-top 3j signs cancel, so H_top > 0 and a pure log
    matrix suffices.  Used by the static (zero-frequency) kernel where only
    l'' = l+l' survives.
    """
    ls = np.arange(l_start, l_max + 1, dtype=float)
    l = ls[:, None]
    lp = ls[None, :]
    common = 0.5 * (gammaln(2 * l + 1) + gammaln(2 * lp + 1)
                    + 2.0 * gammaln(l + lp + 1) - gammaln(2 * l + 2 * lp + 2))
    log3j0 = common - gammaln(l + 1) - gammaln(lp + 1)
    log3jm = common - 0.5 * (gammaln(l - m + 1) + gammaln(l + m + 1)
                             + gammaln(lp - m + 1) + gammaln(lp + m + 1))
    return 0.5 * (np.log(2 * l + 1) + np.log(2 * lp + 1)) \
        + np.log(2 * (l + lp) + 1) + log3j0 + log3jm


def clear_caches():
    """Drop all cached tensors and slices (mainly for tests)."""
    _H_TENSOR_CACHE.clear()
    _LAMBDA_TENSOR_CACHE.clear()
    _slice_m.cache_clear()
