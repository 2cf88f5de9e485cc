r"""Exact sphere-plane observables: Matsubara free energy, vacuum energy,
thermal part, and force.

Three equivalent representations are implemented (units hbar = c = k_B = 1):

* the Matsubara sum
  ``F = (T/2) Tr ln(1-M(0)) + T sum_{n>=1} Tr ln(1-M(2 pi T n))``,
  with the n = 0 term always taken from the closed-form static kernel,
* the zero-temperature limit
  ``E_0 = (1/2pi) int_0^inf dxi Tr ln(1-M(xi))``,
* the pure temperature part on the real frequency axis,
  ``F_T = (T/2pi) int_0^inf dxi n_1(xi) * (-2) Im Tr ln(1-M(i xi T))``
  with the Boltzmann factor ``n_1(xi) = 1/(e^xi - 1)``,

connected by ``F = E_0 + F_T``.  Real-frequency integrands oscillate on the
scale pi/(2 L T) in the Boltzmann variable, so panels never exceed half
that scale; panels are refined adaptively, with a pole signal from the
special-function layer splitting the offending panel.

The force is the negative derivative of the requested energy with respect
to the surface separation, computed by Richardson-extrapolated central
differences (no analytic dM/dd trace formula is used).
"""

import math
from dataclasses import dataclass, field as dc_field, replace

import numpy as np

from . import trlog
from .kernel import Geometry, SCALAR
from .specfun import PoleError
from .trlog import Truncation


class ConvergenceError(ArithmeticError):
    """A sum or quadrature failed to reach the requested tolerance."""


@dataclass
class EnergyResult:
    """Value with truncation-error estimate and convergence diagnostics."""

    value: float
    error_estimate: float
    diagnostics: dict = dc_field(default_factory=dict)

    def __float__(self):
        return float(self.value)

    @property
    def converged(self):
        return bool(self.diagnostics.get("converged", False))


# -- nested Clenshaw-Curtis panels -------------------------------------------

def _cc_weights(n):
    """Clenshaw-Curtis nodes/weights on [-1, 1], endpoints included.

    n must be odd so the (n+1)/2-point subrule is nested at every other
    node and provides the embedded error estimate.
    """
    N = n - 1
    k = np.arange(N // 2 + 1)
    v = 2.0 / (1.0 - 4.0 * k * k)
    g = np.concatenate([v, v[len(v) - 2:0:-1]])
    w = np.real(np.fft.ifft(g))
    weights = np.empty(n)
    weights[0] = 0.5 * w[0]
    weights[1:N] = w[1:N]
    weights[N] = 0.5 * w[0]
    nodes = np.cos(np.pi * np.arange(n) / N)
    return nodes[::-1].copy(), weights[::-1].copy()


_CC_CACHE = {}


def _cc_rule(n):
    if n not in _CC_CACHE:
        if n % 2 == 0:
            raise ValueError("panel rule needs an odd point count")
        nodes, weights = _cc_weights(n)
        sub_nodes, sub_weights = _cc_weights(n // 2 + 1)
        _CC_CACHE[n] = (nodes, weights, sub_weights)
    return _CC_CACHE[n]


def _integrate_panel(f, a, b, npts):
    """One panel with the nested rule; returns (value, error estimate)."""
    nodes, weights, sub_weights = _cc_rule(npts)
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    vals = np.array([f(mid + half * x) for x in nodes])
    full = half * float(np.dot(weights, vals))
    coarse = half * float(np.dot(sub_weights, vals[::2]))
    return full, abs(full - coarse)


def _adaptive_panels(f, a, b, npts, tol_abs, max_depth=28):
    """Bisect [a, b] until the embedded estimate is below tol_abs.

    A PoleError raised by the integrand splits the panel as well (shifting
    the nodes off the resonance); panels below width 1e-12 give up and
    propagate the error.
    """
    stack = [(a, b, 0)]
    total, err = 0.0, 0.0
    while stack:
        lo, hi, depth = stack.pop()
        try:
            v, e = _integrate_panel(f, lo, hi, npts)
        except PoleError:
            if hi - lo < 1e-12:
                raise
            mid = 0.5 * (lo + hi)
            stack.append((mid, hi, depth + 1))
            stack.append((lo, mid, depth + 1))
            continue
        if e > tol_abs * (hi - lo) / (b - a) and depth < max_depth:
            mid = 0.5 * (lo + hi)
            stack.append((mid, hi, depth + 1))
            stack.append((lo, mid, depth + 1))
        else:
            total += v
            err += e
    return total, err


def _panel_sweep(f, width, xi_max, npts, rel_tol):
    """Integrate f over (0, xi_max) in fixed panels with adaptive refinement.

    The sweep stops early once three consecutive panels contribute less
    than rel_tol * 1e-3 of the running total (the integrands here decay
    exponentially).
    """
    panels = []
    a = 0.0
    while a < xi_max:
        b = min(a + width, xi_max)
        panels.append((a, b))
        a = b
    # first pass for the overall scale
    scale = 0.0
    rough = []
    small_run = 0
    for lo, hi in panels:
        v, e = _integrate_panel(f, lo, hi, npts)
        rough.append((lo, hi, v, e))
        scale += v
        if abs(v) < rel_tol * 1e-3 * max(abs(scale), 1e-300):
            small_run += 1
            if small_run >= 3:
                break
        else:
            small_run = 0
    tol_abs = rel_tol * 1e-2 * max(abs(scale), 1e-300)
    total, err = 0.0, 0.0
    for lo, hi, v, e in rough:
        if e > tol_abs * (hi - lo) / max(xi_max, hi - lo):
            v, e = _adaptive_panels(f, lo, hi, npts, tol_abs)
        total += v
        err += e
    return total, err


class _SweepState:
    """Per-sweep bookkeeping for the frequency integrands.

    The orbital cutoff required varies slowly along the frequency axis, so
    the automatic growth is re-verified only on every sixth node; in
    between, the last sufficient cutoff (plus one growth step) is used
    directly.  The running magnitude scale feeds the growth test's
    absolute floor, which keeps oscillatory zero crossings from triggering
    runaway growth.
    """

    VERIFY_EVERY = 6

    def __init__(self, geom, spec, trunc, evaluation, part=None):
        self.geom = geom
        self.spec = spec
        self.trunc = trunc
        self.evaluation = evaluation
        self.part = part
        self.l_used = None
        self.m_used = 0
        self.converged = True
        self.hint = None
        self.scale = 0.0
        self.count = 0

    def evaluate(self, xi):
        self.count += 1
        fixed = (self.hint is not None and self.trunc.l_max is None
                 and self.count % self.VERIFY_EVERY != 1)
        if fixed:
            trunc = replace(self.trunc, l_max=self.hint + 4)
            val, diag = trlog.trace_over_m(
                self.evaluation, self.geom, self.spec, trunc, xi=xi,
                part=self.part)
        else:
            val, diag = trlog.trace_over_m(
                self.evaluation, self.geom, self.spec, self.trunc, xi=xi,
                part=self.part, l_max_start=self.hint,
                scale_floor=1e-3 * self.scale)
            if self.trunc.l_max is None:
                # the converged value was computed one growth step above
                # the sufficient cutoff; seeding one step below stops the
                # cutoff from ratcheting up at every node
                self.hint = max(self.spec.l_min + 4, diag["l_max_used"] - 4)
        self.l_used = max(self.l_used or 0, diag["l_max_used"])
        self.m_used = max(self.m_used, diag["m_max_used"])
        self.converged = self.converged and diag["converged"]
        proj = self.part(val) if self.part else abs(val)
        self.scale = max(self.scale, abs(proj))
        return val


# -- observables --------------------------------------------------------------

def matsubara_free_energy(geom, spec, T, trunc=None):
    """Free energy from the Matsubara representation.

    ``F = (T/2) * trace(0) + T * sum_{n>=1} trace(2 pi T n)`` with the
    zero mode from the static kernel; the sum stops when the last term
    drops below ``rel_tol * 1e-2`` of the running sum (the terms decay
    like exp(-4 pi n T d)).
    """
    if not T > 0.0:
        raise ValueError("matsubara_free_energy needs T > 0; use vacuum_energy")
    geom.require_gap()
    trunc = trunc or Truncation()
    tot0, diag0 = trlog.trace_over_m(trlog.STATIC, geom, spec, trunc)
    F = 0.5 * T * tot0.real
    l_used = diag0["l_max_used"]
    m_used = diag0["m_max_used"]
    converged = diag0["converged"]
    n = 1
    last = math.inf
    while True:
        xi = 2.0 * math.pi * T * n
        term, diag = trlog.trace_over_m(trlog.IMAG_AXIS, geom, spec, trunc, xi=xi)
        F += T * term.real
        l_used = max(l_used, diag["l_max_used"])
        m_used = max(m_used, diag["m_max_used"])
        converged = converged and diag["converged"]
        last = abs(T * term.real)
        if last < trunc.rel_tol * 1e-2 * max(abs(F), 1e-300):
            break
        n += 1
        if n > trunc.n_max:
            raise ConvergenceError(
                f"Matsubara sum needs more than n_max={trunc.n_max} terms; "
                "T*d is too small for this representation")
    return EnergyResult(F, last + trunc.rel_tol * 1e-2 * abs(F),
                        {"l_max_used": l_used, "m_max_used": m_used,
                         "n_max_used": n, "converged": converged})


def vacuum_energy(geom, spec, trunc=None):
    """Zero-temperature energy (1/2pi) int_0^inf dxi Tr ln(1 - M(xi)).

    The integrand decays like exp(-2 d xi); panels are cut off where it
    falls below ~1e-16 of its peak.
    """
    geom.require_gap()
    trunc = trunc or Truncation()
    state = _SweepState(geom, spec, trunc, trlog.IMAG_AXIS)

    def integrand(xi):
        xi = max(xi, 1e-10)  # panel endpoints touch 0; the integrand is continuous there
        val = state.evaluate(xi)
        return val.real

    xi_cut = 19.0 / geom.d + 5.0 / geom.L
    width = min(2.0 / geom.d, 2.0 / geom.R, xi_cut / 8.0)
    total, err = _panel_sweep(integrand, width, xi_cut, trunc.quad_points,
                              trunc.rel_tol)
    value = total / (2.0 * math.pi)
    return EnergyResult(value, err / (2.0 * math.pi),
                        {"l_max_used": state.l_used, "m_max_used": state.m_used,
                         "xi_max_used": xi_cut, "converged": state.converged})


def thermal_part(geom, spec, T, trunc=None):
    """Pure temperature part F_T from the rotated (real-frequency)
    representation.

    ``F_T = (T/2pi) int_0^inf dxi n_1(xi) (-2) Im Tr ln(1 - M(i xi T))``.
    Scalar fields only: the electromagnetic continuation of the rotated
    kernel is not validated.  Panels are no wider than half the
    oscillation scale pi/(2 L T); the Boltzmann factor cuts the range at
    ``ln(1/rel_tol) + 20``.  The orbital sums converge at a rate set by
    the J/Y ratio, independent of the separation, so d = 0 is allowed.
    """
    if spec.kind != SCALAR:
        raise NotImplementedError(
            "thermal_part is available for scalar fields only")
    if not T > 0.0:
        raise ValueError("thermal_part needs T > 0")
    trunc = trunc or Truncation()
    state = _SweepState(geom, spec, trunc, trlog.ROTATED, part=np.imag)

    def integrand(xi):
        # endpoints touch 0 where n_1 diverges but the product is finite
        xi = max(xi, 1e-8)
        n1 = 1.0 / math.expm1(xi)
        tr = state.evaluate(xi * T)
        return n1 * (-2.0) * tr.imag

    xi_max = math.log(1.0 / trunc.rel_tol) + 20.0
    width = min(math.pi / (2.0 * geom.L * T), 3.0)
    total, err = _panel_sweep(integrand, width, xi_max, trunc.quad_points,
                              trunc.rel_tol)
    value = T / (2.0 * math.pi) * total
    return EnergyResult(value, T / (2.0 * math.pi) * err,
                        {"l_max_used": state.l_used, "m_max_used": state.m_used,
                         "xi_max_used": xi_max, "converged": state.converged})


_TARGETS = {"total": lambda geom, spec, T, trunc:
            matsubara_free_energy(geom, spec, T, trunc),
            "thermal_part": lambda geom, spec, T, trunc:
            thermal_part(geom, spec, T, trunc)}


def force(geom, spec, T, trunc=None, target="total"):
    """Force -dF/dd on the chosen energy target by central differences.

    Step ``h = max(1e-3 d, 1e-4 R)`` (clamped to d/2), Richardson
    extrapolated once; the error estimate combines the two stencil widths.
    Negative values mean attraction.
    """
    if target not in _TARGETS:
        raise ValueError(f"unknown force target {target!r}")
    geom.require_gap()
    if geom.d < 10 * np.finfo(float).eps:
        raise ValueError("separation too small for a finite-difference step")
    trunc = trunc or Truncation()
    evaluate = _TARGETS[target]
    h = max(1e-3 * geom.d, 1e-4 * geom.R)
    h = min(h, 0.5 * geom.d)
    results = {}
    for dd in (geom.d + h, geom.d - h, geom.d + 0.5 * h, geom.d - 0.5 * h):
        results[dd] = evaluate(Geometry(geom.R, dd), spec, T, trunc)
    f_h = -(results[geom.d + h].value - results[geom.d - h].value) / (2.0 * h)
    f_h2 = -(results[geom.d + 0.5 * h].value - results[geom.d - 0.5 * h].value) / h
    value = (4.0 * f_h2 - f_h) / 3.0
    stencil_err = abs(f_h2 - f_h) / 3.0
    quad_err = max(r.error_estimate for r in results.values()) / h
    diag = dict(results[geom.d + h].diagnostics)
    diag["converged"] = all(r.converged for r in results.values())
    diag["step"] = h
    return EnergyResult(value, stencil_err + quad_err, diag)
