r"""Parallel plates at finite temperature and the proximity force
approximation for the sphere.

The free energy per unit area of two parallel conducting planes at
separation d and temperature T is written as

.. math::
    \mathcal{F}_\parallel(d, T) = -\frac{\pi^2}{720\,d^3}\,(1 + g(2dT)),

which defines the temperature function g; a single scalar mode carries half
of this (``mode_count = 1``).  The sphere results involve a second function
h with

.. math::
    h(x) = 90 x^4 \sum_{m\ge1}\left[\frac{\coth(m\pi x)}{(m\pi x)^3}
           - \frac{1}{(m\pi x)^4}\right]
         = 2\int_1^\infty \frac{dt}{t^3}\, g(t x).

Both satisfy exact inversion symmetries, ``g(x) = x^4 g(1/x)`` and
``h(1/x) = 5/x^2 - h(x)/x^4`` (so h(1) = 5/2), and the derivative identity
``d/dx [h(x)/x^2] = -(2/x^3) g(x)`` ties h to the force.  The sums here are
rearranged into exponentially convergent form, exact to machine precision
for x >= the small-x switch point, below which the power asymptotics carry
only exponentially small errors.

PFA itself integrates the plate result over the sphere profile,
``F_pfa = 2 pi R^2 int_0^1 dt (1-t) F_par(d + R t, T)``, and the force is
the negative d derivative, written with one partial integration as
``f_pfa = 2 pi R (F_par(d,T) - int_0^1 dt F_par(d + R t, T))``.
"""

import math
import warnings
from dataclasses import dataclass

from scipy.integrate import quad

ZETA3 = 1.2020569031595942854
PI3 = math.pi ** 3

#: below this the exponentially-small-error power forms are used
G_SMALL_X = 1e-2
H_SMALL_X = 2e-2


@dataclass(frozen=True)
class PlatePoint:
    """Separation, temperature and mode count of a parallel-plate system."""

    d: float
    T: float
    mode_count: int = 2

    def __post_init__(self):
        if not self.d > 0.0:
            raise ValueError("plate separation must be positive")
        if self.T < 0.0:
            raise ValueError("temperature must be non-negative")
        if self.mode_count not in (1, 2):
            raise ValueError("mode_count must be 1 (scalar) or 2 (electromagnetic)")


def g_function(x):
    """Temperature function g(x) of the parallel plates.

    Exponentially convergent rearrangement of the mode sum,

    ``g = -1 + 45 zeta(3) x / pi^3 + 45 x^4 * (exp-small corrections)``,

    used for x >= 1e-2; below, the small-x asymptotics
    ``45 zeta(3) x^3/pi^3 - x^4`` (error ~exp(-2 pi^2/x)) take over.
    """
    if x < 0.0:
        raise ValueError("g is defined for x >= 0")
    if x == 0.0:
        return 0.0
    if x < G_SMALL_X:
        return 45.0 * ZETA3 * x ** 3 / PI3 - x ** 4
    s = 0.0
    m = 1
    while True:
        y = m * math.pi * x
        e = math.exp(-2.0 * y)
        t = 2.0 * e / (y ** 3 * (1.0 - e)) + 4.0 * e / (y * (1.0 - e)) ** 2
        s += t
        if t < 1e-18 * (s + 1e-300) or y > 45.0:
            break
        m += 1
    return -1.0 + 45.0 * ZETA3 * x / PI3 + 45.0 * x ** 4 * s


def g_asymptotic(x):
    """The two power asymptotics of g (they coincide at x = 1)."""
    if x <= 1.0:
        return 45.0 * ZETA3 * x ** 3 / PI3 - x ** 4
    return 45.0 * ZETA3 * x / PI3 - 1.0


def g_from_momentum_integral(x, n_terms=40):
    """g(x) from the transverse-momentum integral representation
    (slow; validation path for the mode sum)."""
    if x <= 0.0:
        raise ValueError("the integral representation needs x > 0")
    s = 0.0
    for n in range(1, n_terms + 1):
        a = 2.0 * math.pi * n * x

        def integrand(k, a=a):
            return k * math.log1p(-math.exp(-math.hypot(a, k)))

        v, _ = quad(integrand, 0.0, a + 60.0, limit=200)
        s += v
        if abs(v) < 1e-18 * abs(s):
            break
    return -1.0 + 45.0 * ZETA3 * x / PI3 - 90.0 * x / PI3 * s


def h_function(x):
    """Temperature function h(x) of the sphere at small separation.

    Normalized so that the inversion symmetry ``h(1/x) = 5/x^2 - h(x)/x^4``
    holds exactly, giving h(1) = 5/2; equivalently
    ``h(x) = 2 int_1^inf dt g(t x)/t^3``.  Exponentially convergent
    rearrangement for x >= 2e-2, power form ``5x^2 - 90 zeta(3) x^3/pi^3
    + x^4`` below.
    """
    if x < 0.0:
        raise ValueError("h is defined for x >= 0")
    if x == 0.0:
        return 0.0
    if x < H_SMALL_X:
        return 5.0 * x ** 2 - 90.0 * ZETA3 * x ** 3 / PI3 + x ** 4
    s = 0.0
    m = 1
    while True:
        y = m * math.pi * x
        e = math.exp(-2.0 * y)
        t = 2.0 * e / (y ** 3 * (1.0 - e))
        s += t
        if t < 1e-18 * (s + 1e-300) or y > 45.0:
            break
        m += 1
    return 90.0 * ZETA3 * x / PI3 - 1.0 + 90.0 * x ** 4 * s


def h_from_g_integral(x):
    """h(x) = 2 int_1^inf dt g(t x)/t^3 (validation path, adaptive)."""
    if x <= 0.0:
        raise ValueError("the integral representation needs x > 0")
    # split where g switches to its linear regime for a smooth quad
    split = max(2.0, 4.0 / x)
    v1, _ = quad(lambda t: g_function(t * x) / t ** 3, 1.0, split,
                 limit=400, epsabs=1e-14, epsrel=1e-13)
    # beyond the split g(tx) = 45 z3 t x/pi^3 - 1 up to exp-small terms
    v2, _ = quad(lambda t: g_function(t * x) / t ** 3, split, split * 40.0,
                 limit=400, epsabs=1e-14, epsrel=1e-13)
    hi = split * 40.0
    tail = 45.0 * ZETA3 * x / (PI3 * hi) - 0.5 / hi ** 2
    return 2.0 * (v1 + v2 + tail)


def g_third_moment(cut=40.0):
    """int_0^inf dt g(t)/t^3 with the analytic linear-regime tail; equals 5/2."""
    v, _ = quad(lambda t: g_function(t) / t ** 3 if t > 0 else 45.0 * ZETA3 / PI3,
                0.0, cut, limit=400, epsabs=1e-12, epsrel=1e-12)
    tail = 45.0 * ZETA3 / (PI3 * cut) - 0.5 / cut ** 2
    return v + tail


def parallel_plates_free_energy(p):
    """Free energy per unit area of parallel plates, (mode_count/2) *
    (-pi^2/720 d^3) * (1 + g(2dT))."""
    return (p.mode_count / 2.0) * (-math.pi ** 2 / (720.0 * p.d ** 3)) \
        * (1.0 + g_function(2.0 * p.d * p.T))


def _fpar(d, T, mode_count):
    return parallel_plates_free_energy(PlatePoint(d, T, mode_count))


def pfa_free_energy(geom, T, mode_count=2):
    """PFA free energy 2 pi R^2 int_0^1 dt (1-t) F_par(d + R t, T).

    The 1/(d+Rt)^3 spike at t = 0 is resolved by substituting
    u = ln(d + R t).
    """
    geom.require_gap()
    R, d = geom.R, geom.d

    def integrand(u):
        sep = math.exp(u)
        t = (sep - d) / R
        return (1.0 - t) * _fpar(sep, T, mode_count) * sep / R

    v, _ = quad(integrand, math.log(d), math.log(d + R),
                limit=400, epsabs=1e-14, epsrel=1e-12)
    return 2.0 * math.pi * R * R * v


def pfa_force(geom, T, mode_count=2):
    """PFA force 2 pi R (F_par(d,T) - int_0^1 dt F_par(d + R t, T))."""
    geom.require_gap()
    R, d = geom.R, geom.d

    def integrand(u):
        sep = math.exp(u)
        return _fpar(sep, T, mode_count) * sep / R

    v, _ = quad(integrand, math.log(d), math.log(d + R),
                limit=400, epsabs=1e-14, epsrel=1e-12)
    return 2.0 * math.pi * R * (_fpar(d, T, mode_count) - v)


def pfa_thermal_force(geom, T, mode_count=2):
    """Temperature-dependent part of the PFA force, f(T) - f(0)."""
    return pfa_force(geom, T, mode_count) - pfa_force(geom, 0.0, mode_count)


# -- closed-form regime expansions ------------------------------------------

def _g_profile_integral(rt, weight_one_minus_t):
    """int_0^1 dt [(1-t)] g(2 t RT)/t^3, the eps->0 profile integrals."""
    if rt == 0.0:
        return 0.0

    def f(t):
        if t <= 0.0:
            return 360.0 * ZETA3 * rt ** 3 / PI3
        w = (1.0 - t) if weight_one_minus_t else 1.0
        return w * g_function(2.0 * t * rt) / t ** 3

    v, _ = quad(f, 0.0, 1.0, limit=400, epsabs=1e-13, epsrel=1e-12)
    return v


def pfa_energy_low_medium(geom, T, mode_count=2):
    """Fixed-RT expansion of the PFA free energy (low/medium temperature)."""
    R, d = geom.R, geom.d
    eps = geom.eps
    rt = R * T
    bracket = 1.0 + 2.0 * eps ** 2 * _g_profile_integral(rt, True)
    return (mode_count / 2.0) * (-PI3 * R / (720.0 * d * d)) * bracket


def pfa_force_low_medium(geom, T, mode_count=2):
    """Fixed-RT expansion of the PFA force (low/medium temperature)."""
    R, d = geom.R, geom.d
    eps = geom.eps
    rt = R * T
    bracket = 1.0 + eps ** 3 * (360.0 * ZETA3 / PI3) * rt ** 3 \
        - eps ** 3 * _g_profile_integral(rt, False)
    return (mode_count / 2.0) * (-PI3 * R / (360.0 * d ** 3)) * bracket


def pfa_energy_medium_high(geom, T, mode_count=2):
    """Fixed-dT expansion: -(pi^3 R/720 d^2) (1 + h(2dT)) per mode pair."""
    R, d = geom.R, geom.d
    return (mode_count / 2.0) * (-PI3 * R / (720.0 * d * d)) \
        * (1.0 + h_function(2.0 * d * T))


def pfa_force_medium_high(geom, T, mode_count=2):
    """Fixed-dT expansion: -(pi^3 R/360 d^3) (1 + g(2dT)) per mode pair."""
    R, d = geom.R, geom.d
    return (mode_count / 2.0) * (-PI3 * R / (360.0 * d ** 3)) \
        * (1.0 + g_function(2.0 * d * T))


def pfa_energy_low_t(geom, T, mode_count=2):
    """dT << RT << 1: bracket 1 + eps^2 (360 zeta3/pi^3)(RT)^3."""
    R, d = geom.R, geom.d
    eps = geom.eps
    bracket = 1.0 + eps ** 2 * (360.0 * ZETA3 / PI3) * (R * T) ** 3
    return (mode_count / 2.0) * (-PI3 * R / (720.0 * d * d)) * bracket


def pfa_force_low_t(geom, T, mode_count=2):
    """dT << RT << 1: bracket 1 + 8 eps^3 (RT)^4."""
    R, d = geom.R, geom.d
    eps = geom.eps
    bracket = 1.0 + 8.0 * eps ** 3 * (R * T) ** 4
    return (mode_count / 2.0) * (-PI3 * R / (360.0 * d ** 3)) * bracket


def pfa_energy_medium_t(geom, T, mode_count=2):
    """RT >> 1 at small dT: bracket 1 + 20 eps^2 (RT)^2 (uses the third
    moment of g, int t^-3 g = 5/2)."""
    R, d = geom.R, geom.d
    eps = geom.eps
    bracket = 1.0 + 20.0 * eps ** 2 * (R * T) ** 2
    return (mode_count / 2.0) * (-PI3 * R / (720.0 * d * d)) * bracket


def pfa_force_medium_t(geom, T, mode_count=2):
    """RT >> 1 at small dT: bracket 1 + eps^3 (360 zeta3/pi^3)(RT)^3."""
    R, d = geom.R, geom.d
    eps = geom.eps
    bracket = 1.0 + eps ** 3 * (360.0 * ZETA3 / PI3) * (R * T) ** 3
    return (mode_count / 2.0) * (-PI3 * R / (360.0 * d ** 3)) * bracket


def pfa_energy_high_t(geom, T, mode_count=2):
    """dT >> 1: -zeta(3) R T/(4 d) per mode pair, exp-small corrections."""
    return (mode_count / 2.0) * (-ZETA3 * geom.R * T / (4.0 * geom.d))


def pfa_force_high_t(geom, T, mode_count=2):
    """dT >> 1: -zeta(3) R T/(4 d^2) per mode pair."""
    return (mode_count / 2.0) * (-ZETA3 * geom.R * T / (4.0 * geom.d ** 2))


def pfa_regime(geom, T, regime, mode_count=2):
    """Closed-form regime expansions of the PFA energy and force.

    regime 'low_medium' evaluates the fixed-RT forms, 'medium_high' the
    fixed-dT forms.  A warning is emitted when the inputs violate the
    regime inequalities (d << R always; low/medium wants dT << 1,
    medium/high wants RT >> 1).
    """
    geom.require_gap()
    dt = geom.d * T
    rt = geom.R * T
    if geom.eps > 0.3:
        warnings.warn(f"PFA regime formulas assume d << R; eps = {geom.eps:.3g}",
                      stacklevel=2)
    if regime == "low_medium":
        if dt > 1.0:
            warnings.warn(f"low/medium regime assumes dT << 1; dT = {dt:.3g}",
                          stacklevel=2)
        return {"energy": pfa_energy_low_medium(geom, T, mode_count),
                "force": pfa_force_low_medium(geom, T, mode_count)}
    if regime == "medium_high":
        if rt < 1.0:
            warnings.warn(f"medium/high regime assumes RT >> 1; RT = {rt:.3g}",
                          stacklevel=2)
        return {"energy": pfa_energy_medium_high(geom, T, mode_count),
                "force": pfa_force_medium_high(geom, T, mode_count)}
    raise ValueError(f"unknown regime {regime!r}")
