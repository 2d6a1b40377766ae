"""Analytic modular calculus for a standard form.

Every map here is an entrywise multiplier in the rho-eigenbasis: the
flow at complex time z multiplies the (j, k) entry by exp(i z kappa_jk),
and a kernel smear multiplies it by the kernel transform at kappa_jk.
The same mechanism lifts to superoperators, whose double-index entries
pick up the transform at differences of the exponents; that lift is
what makes the exact spectral engine of the Dirichlet module possible.
"""

import numpy as np

from .errors import Overflow
from .kernels import F0Kernel, PANEL_WIDTH, integrate_on_line
from .linalg import check_square
from .standard_form import SuperOperator

OVERFLOW_EXPONENT = 700.0

D_PLUS_QUARTER = "D_plus_quarter"
D_MINUS_QUARTER = "D_minus_quarter"
T_MAP = "T"
S_MAP = "S"


def _guard_exponent(sf, im_z):
    worst = abs(im_z) * float(np.max(np.abs(sf.kappa)))
    if worst > OVERFLOW_EXPONENT:
        raise Overflow(
            f"modular exponent {worst:.1f} exceeds the double-precision guard "
            f"({OVERFLOW_EXPONENT:g})"
        )


def _multiply_entrywise(sf, A, factors):
    A = check_square(A, sf.dim, "operator")
    return sf.from_eigenbasis(sf.to_eigenbasis(A) * factors)


def sigma(sf, A, z):
    """Modular flow at complex time z: sigma_z(A) = Delta^{iz} A Delta^{-iz}.

    In the rho-eigenbasis the (j, k) entry is multiplied by
    exp(i z kappa_jk); for real z this is the unitary conjugation by
    rho^{iz}, for z = -i/4 it is rho^{1/4} A rho^{-1/4}, etc.

    Raises
    ------
    Overflow
        If |Im z| * max|kappa| exceeds the exponent guard.
    """
    z = complex(z)
    _guard_exponent(sf, z.imag)
    return _multiply_entrywise(sf, A, np.exp(1j * z * sf.kappa))


def modular_map(sf, A, which):
    """One of the quarter-shift maps D_{1/4}, D_{-1/4}, T = sum, S = difference.

    D_{1/4}(A) = sigma_{-i/4}(A) carries the entrywise factor e^{kappa/4},
    D_{-1/4} the factor e^{-kappa/4}; T and S combine them.
    """
    _guard_exponent(sf, 0.25)
    e = np.exp(sf.kappa / 4.0)
    if which == D_PLUS_QUARTER:
        factors = e
    elif which == D_MINUS_QUARTER:
        factors = 1.0 / e
    elif which == T_MAP:
        factors = e + 1.0 / e
    elif which == S_MAP:
        factors = e - 1.0 / e
    else:
        raise ValueError(f"unknown modular map {which!r}")
    return _multiply_entrywise(sf, A, factors)


def apply_I0(sf, A):
    """The inverse of T: smearing with the distinguished kernel f0.

    Entrywise the factor is (e^{kappa/4} + e^{-kappa/4})^{-1}, which is
    the closed-form transform of f0 at kappa.
    """
    return _multiply_entrywise(sf, A, F0Kernel().hat(sf.kappa))


def smear(sf, A, f):
    """Weighted flow average  int sigma_t(A) f(t) dt.

    The (j, k) entry of A is multiplied by the kernel transform at
    kappa_jk.  Operands that are products of shifted flows should be
    pre-shifted by the caller via :func:`sigma`; the integrand is then a
    plain flow orbit of the shifted product.
    """
    return _multiply_entrywise(sf, A, f.hat(sf.kappa))


def smear_quadrature(sf, A, f, width=PANEL_WIDTH):
    """Direct t-quadrature of  int sigma_t(A) f(t) dt  (oracle route).

    Integrates the matrix-valued orbit on the kernel's truncation range
    with the fixed panel rule, then adds the kernel's analytic tail
    entrywise (the orbit of entry (j, k) is the pure phase
    e^{i t kappa_jk}, so the tail factorizes exactly).
    """
    A = check_square(A, sf.dim, "operator")
    A_eig = sf.to_eigenbasis(A)
    T = f.truncation_radius or 16.0

    def orbit(t):
        phases = np.exp(1j * np.multiply.outer(t, sf.kappa))
        return f.eval(t)[:, None, None] * phases * A_eig[None, :, :]

    core = integrate_on_line(orbit, T, width=width)
    tail = f.tail_hat(sf.kappa.reshape(-1), T)
    if tail is not None:
        core = core + tail.reshape(sf.kappa.shape) * A_eig
    return sf.from_eigenbasis(core)


def boundary_combination_smear(sf, A, f):
    """Flow average against the boundary combination f(t+i/4) + f(t-i/4).

    By a contour shift this equals T applied to the plain smear, i.e.
    the entrywise factor (e^{kappa/4} + e^{-kappa/4}) hat_f(kappa).  For
    f0 the boundary combination is the Dirac delta and the result is A
    itself, returned exactly.
    """
    if isinstance(f, F0Kernel):
        return check_square(A, sf.dim, "operator").copy()
    _guard_exponent(sf, 0.25)
    e = np.exp(sf.kappa / 4.0)
    return _multiply_entrywise(sf, A, (e + 1.0 / e) * f.hat(sf.kappa))


# ---------------------------------------------------------------------------
# The same calculus one level up: maps on superoperators
# ---------------------------------------------------------------------------

def superop_flow_factors(sf):
    """Frequency grid nu_a - nu_b for superoperator entries.

    A superoperator K in rho-eigenbasis coordinates transforms under
    Delta^{it} K Delta^{-it} by the entrywise phase
    exp(i t (nu_a - nu_b)), where nu is the vectorized kappa grid.
    """
    nu = sf.nu
    return nu[:, None] - nu[None, :]


def superop_smear(sf, K, f):
    """Smear a superoperator along the flow:  int Delta^{it} K Delta^{-it} f(t) dt.

    Entrywise in the eigenbasis double-index coordinates this multiplies
    by the kernel transform at nu_a - nu_b.
    """
    V = sf.superop_basis_change()
    K_eig = V @ K.mat @ V.conj().T
    K_eig = K_eig * f.hat(superop_flow_factors(sf))
    return SuperOperator(V.conj().T @ K_eig @ V, sf.dim)


def superop_sigma(sf, K, z):
    """Flow conjugation of a superoperator at complex time z."""
    z = complex(z)
    freq = superop_flow_factors(sf)
    if abs(z.imag) * float(np.max(np.abs(freq))) > OVERFLOW_EXPONENT:
        raise Overflow("superoperator flow exponent exceeds the guard")
    V = sf.superop_basis_change()
    K_eig = V @ K.mat @ V.conj().T
    K_eig = K_eig * np.exp(1j * z * freq)
    return SuperOperator(V.conj().T @ K_eig @ V, sf.dim)


def superop_modular_map(sf, K, which):
    """Quarter-shift maps lifted to superoperators (same four as modular_map)."""
    freq = superop_flow_factors(sf)
    if 0.25 * float(np.max(np.abs(freq))) > OVERFLOW_EXPONENT:
        raise Overflow("superoperator flow exponent exceeds the guard")
    e = np.exp(freq / 4.0)
    if which == D_PLUS_QUARTER:
        factors = e
    elif which == D_MINUS_QUARTER:
        factors = 1.0 / e
    elif which == T_MAP:
        factors = e + 1.0 / e
    elif which == S_MAP:
        factors = e - 1.0 / e
    else:
        raise ValueError(f"unknown modular map {which!r}")
    V = sf.superop_basis_change()
    K_eig = (V @ K.mat @ V.conj().T) * factors
    return SuperOperator(V.conj().T @ K_eig @ V, sf.dim)


def superop_smear_quadrature(sf, K, f):
    """Quadrature route for the superoperator flow average (oracle route).

    The double-index entries of K carry pure phase orbits, so the
    integral reduces entrywise to the kernel transform computed by
    t-quadrature plus its analytic tail.  Exercises the kernel's
    pointwise values where :func:`superop_smear` uses the closed-form
    transform.
    """
    V = sf.superop_basis_change()
    K_eig = V @ K.mat @ V.conj().T
    K_eig = K_eig * f.hat_quadrature(superop_flow_factors(sf))
    return SuperOperator(V.conj().T @ K_eig @ V, sf.dim)
