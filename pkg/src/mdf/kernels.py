"""Smearing kernels, their Fourier transforms, and admissibility checks.

A kernel is a real, even, nonnegative function f on the line that
extends analytically to the strip |Im z| <= 1/4.  Each kernel exposes

* ``eval(t)``       -- values on the real axis (vectorized),
* ``strip_eval(t, s)`` -- values at t + i s for |s| <= 1/4,
* ``hat(kappa)``    -- the Fourier transform  int f(t) e^{i kappa t} dt.

Two routes to ``hat`` exist: a closed form where available, and a
composite Gauss-Legendre quadrature (64 nodes per panel, panel width
1/2, symmetric truncation chosen from the kernel's decay, plus an
analytic tail correction for slowly decaying kernels).  The quadrature
route is deliberately independent so it can serve as an oracle for the
closed forms, and vice versa.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import exp1

from .errors import NotAdmissible, QuadratureNotConverged

PANEL_WIDTH = 0.5
PANEL_NODES = 64

QUAD_REL_TARGET = 1e-9


@lru_cache(maxsize=32)
def _panel_rule(radius, width, nodes):
    """Composite Gauss-Legendre nodes/weights covering [-radius, radius]."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    m = int(np.ceil(2 * radius / width))
    edges = np.linspace(-radius, radius, m + 1)
    half = np.diff(edges) / 2.0
    mid = (edges[:-1] + edges[1:]) / 2.0
    t = (mid[:, None] + half[:, None] * x[None, :]).reshape(-1)
    wt = (half[:, None] * w[None, :]).reshape(-1)
    return t, wt


def integrate_on_line(g, radius, width=PANEL_WIDTH, nodes=PANEL_NODES):
    """Integrate a vectorized callable g(t) over [-radius, radius].

    g may return an array whose leading axis matches t; the weighted sum
    is taken over that axis, so matrix-valued integrands work directly.
    """
    t, wt = _panel_rule(float(radius), float(width), int(nodes))
    vals = g(t)
    return np.tensordot(wt, vals, axes=(0, 0))


class KernelFunction:
    """Base class; concrete kernels fill in eval/strip_eval and hat data."""

    name = "kernel"
    #: closed-form hat available
    has_closed_hat = False
    #: truncation radius giving quadrature tail below ~1e-13 (None = needs tail)
    truncation_radius = None

    def eval(self, t):
        raise NotImplementedError

    def strip_eval(self, t, s):
        raise NotImplementedError

    def hat(self, kappa):
        """Fourier transform at kappa (closed form when the kernel has one)."""
        if self.has_closed_hat:
            raise NotImplementedError
        return self.hat_quadrature(kappa)

    def tail_hat(self, kappa, radius):
        """Analytic value of int_{|t| > radius} f(t) e^{i kappa t} dt, or None."""
        return None

    def hat_quadrature(self, kappa):
        """Quadrature route for the Fourier transform (vectorized in kappa).

        Integrates f(t) e^{i kappa t} over [-T, T] with the fixed panel
        rule and adds the kernel's analytic tail when it has one.  The
        panel width is halved once as a convergence check.
        """
        kappa = np.asarray(kappa, dtype=float)
        T = self.truncation_radius
        if T is None:
            T = self._grow_truncation()

        def run(width):
            def g(t):
                return self.eval(t)[:, None] * np.exp(1j * np.outer(t, kappa.reshape(-1)))

            core = integrate_on_line(g, T, width=width)
            return core

        coarse = run(PANEL_WIDTH)
        fine = run(PANEL_WIDTH / 2)
        scale = np.maximum(np.abs(fine), 1e-30)
        if np.max(np.abs(fine - coarse) / scale) > QUAD_REL_TARGET:
            raise QuadratureNotConverged(
                f"panel refinement changed the {self.name} transform by more "
                f"than {QUAD_REL_TARGET}"
            )
        out = fine
        tail = self.tail_hat(kappa.reshape(-1), T)
        if tail is not None:
            out = out + tail
        out = np.real(out).reshape(kappa.shape)
        return out if out.ndim else float(out)

    def _grow_truncation(self):
        T = 16.0
        while T <= 1024.0:
            edge = abs(float(np.max(np.abs(self.eval(np.array([-T, T]))))))
            if edge < 1e-14:
                return T
            T *= 2
        raise QuadratureNotConverged(
            f"{self.name} kernel decays too slowly for plain truncation and "
            "provides no analytic tail"
        )


class F0Kernel(KernelFunction):
    """The distinguished kernel 2 / (e^{2 pi t} + e^{-2 pi t}) = sech(2 pi t).

    Its transform is (e^{kappa/4} + e^{-kappa/4})^{-1} in closed form,
    and its boundary combination f(t + i/4) + f(t - i/4) is the Dirac
    delta in the distributional sense (the boundary lines carry simple
    poles at t = 0).
    """

    name = "f0"
    has_closed_hat = True
    # (2/pi) e^{-2 pi T} < 1e-13 already at T = 5
    truncation_radius = 5.0
    boundary_status = "distributional"

    def eval(self, t):
        t = np.asarray(t, dtype=float)
        # stable sech: 2 e^{-2 pi |t|} / (1 + e^{-4 pi |t|})
        e = np.exp(-2 * np.pi * np.abs(t))
        return 2 * e / (1 + e * e)

    def strip_eval(self, t, s):
        z = np.asarray(t, dtype=complex) + 1j * s
        with np.errstate(over="ignore", invalid="ignore"):
            return 1.0 / np.cosh(2 * np.pi * z)

    def hat(self, kappa):
        kappa = np.asarray(kappa, dtype=float)
        out = 0.5 / np.cosh(kappa / 4.0)
        return out if out.ndim else float(out)


class CauchyKernel(KernelFunction):
    """Unit-mass Cauchy density s / (pi (s^2 + t^2)) with scale s > 1/4.

    The scale requirement keeps the poles at +- i s outside the closed
    strip |Im z| <= 1/4 with margin.  The transform is e^{-s |kappa|}.
    The quadrature route cannot reach 1e-9 by truncation alone (the
    density decays like 1/t^2), so the tail integral over |t| > T is
    added in closed form via the exponential integral E1.
    """

    name = "cauchy"
    has_closed_hat = True
    truncation_radius = 64.0

    def __init__(self, scale=1.0):
        if not scale > 0.25:
            raise NotAdmissible(
                f"Cauchy scale {scale} must exceed 1/4 for strip analyticity"
            )
        self.scale = float(scale)

    def eval(self, t):
        t = np.asarray(t, dtype=float)
        s = self.scale
        return s / (np.pi * (s * s + t * t))

    def strip_eval(self, t, s):
        z = np.asarray(t, dtype=complex) + 1j * s
        sc = self.scale
        return sc / (np.pi * (sc * sc + z * z))

    def hat(self, kappa):
        kappa = np.asarray(kappa, dtype=float)
        out = np.exp(-self.scale * np.abs(kappa))
        return out if out.ndim else float(out)

    def tail_hat(self, kappa, radius):
        """int_{|t| > radius} f(t) e^{i kappa t} dt, exactly.

        Partial fractions give f = (1/2 pi i)(1/(t - is) - 1/(t + is));
        each one-sided piece rotates onto the E1 contour, so for k > 0

            int_T^inf f e^{ikt} dt
                = (1/2 pi i)(e^{-ks} E1(-ik(T-is)) - e^{ks} E1(-ik(T+is))),

        the opposite tail is its conjugate (f real, even), and the
        transform itself is even in kappa.
        """
        kappa = np.asarray(kappa, dtype=float)
        s, T = self.scale, float(radius)
        k = np.abs(kappa)
        out = np.empty(k.shape, dtype=float)
        zero = k < 1e-300
        out[zero] = (2.0 / np.pi) * np.arctan(s / T)
        kp = k[~zero]
        if kp.size:
            if np.max(kp) * s > 700:
                raise QuadratureNotConverged(
                    "Cauchy tail factor e^{|kappa| s} overflows; use the closed form"
                )
            one_sided = (
                np.exp(-kp * s) * exp1(-1j * kp * (T - 1j * s))
                - np.exp(kp * s) * exp1(-1j * kp * (T + 1j * s))
            ) / (2j * np.pi)
            out[~zero] = 2 * np.real(one_sided)
        return out


class CosineModulatedF0(KernelFunction):
    """Signed control kernel f0(t) cos(alpha t).

    This is *not* admissible (it changes sign on the real axis), and the
    induced quadratic forms lose the Markov property.  It is shipped so
    the Markovianity checks have a counterexample they are known to
    catch.  The transform is the shifted average
    (hat_f0(kappa + alpha) + hat_f0(kappa - alpha)) / 2.
    """

    name = "signed_f0"
    has_closed_hat = True
    truncation_radius = 5.0

    def __init__(self, alpha=6.0):
        self.alpha = float(alpha)
        self._f0 = F0Kernel()

    def eval(self, t):
        t = np.asarray(t, dtype=float)
        return self._f0.eval(t) * np.cos(self.alpha * t)

    def strip_eval(self, t, s):
        z = np.asarray(t, dtype=complex) + 1j * s
        return self._f0.strip_eval(t, s) * np.cos(self.alpha * z)

    def hat(self, kappa):
        kappa = np.asarray(kappa, dtype=float)
        f0h = self._f0.hat
        out = 0.5 * (f0h(kappa + self.alpha) + f0h(kappa - self.alpha))
        return out if out.ndim else float(out)


def _pole_tail(kappa, radius, poles):
    """Tail  int_{|t| > radius} g(t) e^{i kappa t} dt  for a real, even g
    given by the partial-fraction form g = (1/2 pi i) sum_j c_j / (t - i b_j).

    For kappa > 0 each one-sided term rotates onto the exponential
    integral:  int_T^inf e^{i k t}/(t - i b) dt = e^{-k b} E1(-i k (T - i b));
    the left tail is the complex conjugate and the total is even in kappa.
    """
    kappa = np.asarray(kappa, dtype=float)
    T = float(radius)
    k = np.abs(kappa)
    if np.any(k < 1e-300):
        raise ValueError("pole tail is for kappa != 0; handle zero separately")
    if np.max(k) * max(abs(b) for b, _ in poles) > 700:
        raise QuadratureNotConverged("pole tail factor overflows")
    one_sided = np.zeros(k.shape, dtype=complex)
    for b, c in poles:
        one_sided += c * np.exp(-k * b) * exp1(-1j * k * (T - 1j * b))
    one_sided /= 2j * np.pi
    return 2 * np.real(one_sided)


class BoundaryCombination(KernelFunction):
    """The boundary weight w(t) = f(t + i/4) + f(t - i/4) of a base kernel.

    Used to verify the contour-shift identity: smearing with w equals
    applying T after smearing with f.  Only meaningful for kernels that
    are finite on the boundary lines (the f0 boundary combination is a
    distribution and is rejected here).
    """

    has_closed_hat = True

    def __init__(self, base):
        if getattr(base, "boundary_status", None) == "distributional":
            raise NotAdmissible(
                "the f0 boundary combination is a delta; smear with it "
                "is the identity and has no pointwise weight"
            )
        self.base = base
        self.name = f"boundary({base.name})"
        self.truncation_radius = base.truncation_radius

    def eval(self, t):
        w = self.base.strip_eval(t, 0.25) + self.base.strip_eval(t, -0.25)
        return np.real(w)

    def strip_eval(self, t, s):
        return self.base.strip_eval(t, s + 0.25) + self.base.strip_eval(t, s - 0.25)

    def hat(self, kappa):
        kappa = np.asarray(kappa, dtype=float)
        e = np.exp(kappa / 4.0)
        out = (e + 1.0 / e) * self.base.hat(kappa)
        return out if out.ndim else float(out)

    def tail_hat(self, kappa, radius):
        if not isinstance(self.base, CauchyKernel):
            return None
        s = self.base.scale
        a = 0.25
        poles = [(s - a, 1.0), (-(s + a), -1.0), (s + a, 1.0), (-(s - a), -1.0)]
        kappa = np.asarray(kappa, dtype=float)
        out = _pole_tail(np.where(np.abs(kappa) < 1e-300, 1e-8, kappa), radius, poles)
        zero = np.abs(kappa) < 1e-300
        if np.any(zero):
            # exact: int_{|t|>T} w dt = 4 Re (1/pi)(pi/2 - arctan((T + i a)/s))
            z = (float(radius) + 1j * a) / s
            val = 4.0 * float(np.real(np.pi / 2 - np.arctan(z))) / np.pi
            out = np.where(zero, val, out)
        return out


class TabulatedKernel(KernelFunction):
    """Kernel backed by user callables; the transform runs on quadrature.

    Parameters
    ----------
    fn : callable
        Vectorized real-axis values.
    strip_fn : callable, optional
        Vectorized (t, s) -> f(t + i s); required for admissibility checks.
    name : str
    truncation_radius : float, optional
        Override the automatic truncation search.
    """

    has_closed_hat = False

    def __init__(self, fn, strip_fn=None, name="tabulated", truncation_radius=None):
        self._fn = fn
        self._strip_fn = strip_fn
        self.name = name
        self.truncation_radius = truncation_radius

    def eval(self, t):
        return np.asarray(self._fn(np.asarray(t, dtype=float)))

    def strip_eval(self, t, s):
        if self._strip_fn is None:
            raise NotAdmissible(f"kernel {self.name!r} has no strip extension")
        return np.asarray(self._strip_fn(t, s))


def fourier_hat(f, kappa):
    """Fourier transform of a kernel at (array of) kappa.

    Closed form when the kernel carries one, quadrature otherwise.
    """
    return f.hat(kappa)


def fourier_hat_quadrature(f, kappa):
    """Quadrature route for the transform, regardless of closed forms."""
    return f.hat_quadrature(kappa)


# ---------------------------------------------------------------------------
# Admissibility
# ---------------------------------------------------------------------------

POSITIVITY_GRID = (-50.0, 50.0, 0.01)
DECAY_FIT_RANGE = (10.0, 50.0)
BOUNDARY_IM_TOL = 1e-10
BOUNDARY_RE_FLOOR = -1e-12


@dataclass(frozen=True)
class AdmissibilityCertificate:
    """Outcome of the three admissibility conditions on documented grids.

    ``boundary_status`` is one of ``"pointwise"`` (condition (b) holds on
    the sample grid), ``"distributional"`` (exempt kernel whose boundary
    combination is a delta), or ``"failed"``.
    """

    kernel: str
    positivity_ok: bool
    boundary_status: str
    decay_p: float
    decay_log_M: float
    decay_ok: bool
    grid: str

    @property
    def boundary_sum_ok(self):
        return self.boundary_status in ("pointwise", "distributional")

    @property
    def granted(self):
        return self.positivity_ok and self.boundary_sum_ok and self.decay_ok


def check_admissible(f):
    """Sample the admissibility conditions for a kernel.

    (a) nonnegativity on the real grid [-50, 50] step 0.01;
    (b) Re(f(t + i/4) + f(t - i/4)) >= -1e-12 with imaginary part below
        1e-10 on the same grid (skipped for kernels whose boundary
        combination is distributional);
    (c) a least-squares fit of log|f| against log(1 + |t|) over
        |t| in [10, 50] on nine strip lines must have slope <= -p with
        p > 1.

    Returns a certificate; nothing is raised on failure.
    """
    lo, hi, step = POSITIVITY_GRID
    t = np.arange(lo, hi + step / 2, step)

    vals = f.eval(t)
    positivity_ok = bool(np.min(vals) >= -1e-14)

    if getattr(f, "boundary_status", None) == "distributional":
        boundary_status = "distributional"
    else:
        b = f.strip_eval(t, 0.25) + f.strip_eval(t, -0.25)
        ok = np.min(np.real(b)) >= BOUNDARY_RE_FLOOR and np.max(
            np.abs(np.imag(b))
        ) <= BOUNDARY_IM_TOL
        boundary_status = "pointwise" if ok else "failed"

    fit_lo, fit_hi = DECAY_FIT_RANGE
    mask = (np.abs(t) >= fit_lo) & (np.abs(t) <= fit_hi)
    tt = t[mask]
    logs = np.log(1.0 + np.abs(tt))
    strip_logs = []
    worst_slope = -np.inf
    for s in np.linspace(-0.25, 0.25, 9):
        av = np.maximum(np.abs(f.strip_eval(tt, s)), 1e-300)
        la = np.log(av)
        strip_logs.append(la)
        slope = float(np.polyfit(logs, la, 1)[0])
        worst_slope = max(worst_slope, slope)
    p = -worst_slope
    log_M = max(float(np.max(la + p * logs)) for la in strip_logs)
    decay_ok = bool(p > 1.0)

    return AdmissibilityCertificate(
        kernel=f.name,
        positivity_ok=positivity_ok,
        boundary_status=boundary_status,
        decay_p=float(p),
        decay_log_M=float(log_M),
        decay_ok=decay_ok,
        grid=f"t in [{lo}, {hi}] step {step}; decay fit |t| in [{fit_lo}, {fit_hi}], 9 strip lines",
    )


def kernel_from_descriptor(desc):
    """Build a kernel from its scenario-file descriptor.

    Accepts ``"f0"``, ``{"cauchy": {"scale": s}}``, or
    ``{"signed_f0": {"alpha": a}}`` (the shipped negative control).
    """
    if desc == "f0":
        return F0Kernel()
    if isinstance(desc, dict) and len(desc) == 1:
        (kind, params), = desc.items()
        if kind == "cauchy":
            return CauchyKernel(scale=float(params.get("scale", 1.0)))
        if kind == "signed_f0":
            return CosineModulatedF0(alpha=float(params.get("alpha", 6.0)))
    raise NotAdmissible(f"unknown kernel descriptor: {desc!r}")
