"""Concrete standard form of the n x n matrix algebra with a faithful state.

The Hilbert space is the algebra itself with the trace inner product
``<X, Y> = Tr(X* Y)``.  For a faithful density matrix rho the cyclic
vector is ``xi0 = rho^{1/2}``, the modular conjugation is ``J X = X*``,
the modular operator acts as ``Delta X = rho X rho^{-1}``, and the
natural positive cone is exactly the set of positive semidefinite
matrices.  The algebra acts by left multiplication, its commutant by
right multiplication.

All modular data reduces to the exponent grid

    kappa[j, k] = log(lambda_j) - log(lambda_k)

over the eigenvalues of rho, which the rest of the package consumes.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimMismatch, NoConvergence, NotAState, NotFaithful, NotJReal
from .linalg import (
    check_square,
    conj_swap_perm,
    dagger,
    eigh_fixed,
    hermitian_defect,
    hs_norm,
    psd_clip,
    unvec,
    vec,
)

EPS_FAITHFUL = 1e-8
HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
JREAL_TOL = 1e-10

DYKSTRA_STEP_TOL = 1e-10
DYKSTRA_MAX_ITER = 10_000
DYKSTRA_FAIL_RESIDUAL = 1e-6


class DensityMatrix:
    """A faithful quantum state on the n x n matrix algebra.

    Parameters
    ----------
    entries : array_like
        Square complex matrix; must be Hermitian, trace one, and have
        smallest eigenvalue at least ``EPS_FAITHFUL``.

    Raises
    ------
    NotAState
        If the matrix is not Hermitian or not normalized.
    NotFaithful
        If the smallest eigenvalue is below the faithfulness floor.
    """

    def __init__(self, entries):
        A = check_square(entries, what="density matrix")
        if hermitian_defect(A) > HERMITICITY_TOL:
            raise NotAState("density matrix is not Hermitian")
        tr = np.trace(A)
        if abs(tr - 1.0) > TRACE_TOL:
            raise NotAState(f"density matrix has trace {tr}, expected 1")
        w = np.linalg.eigvalsh(A)
        if w[0] < EPS_FAITHFUL:
            raise NotFaithful(
                f"smallest eigenvalue {w[0]:.3e} is below the faithfulness "
                f"floor {EPS_FAITHFUL:.0e}"
            )
        self.entries = (A + dagger(A)) / 2.0
        self.dim = A.shape[0]

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim})"


@dataclass(frozen=True)
class StandardForm:
    """Spectral data of a faithful state, precomputed once.

    Fields
    ------
    rho : DensityMatrix
    eigenvalues : descending eigenvalues of rho (all > 0)
    eigenvectors : unitary matrix whose columns are the eigenvectors
    xi0 : rho^{1/2}, the cyclic vector
    kappa : antisymmetric grid of modular exponents
    """

    rho: DensityMatrix
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    xi0: np.ndarray
    kappa: np.ndarray
    log_eigenvalues: np.ndarray = field(repr=False, default=None)

    @property
    def dim(self):
        return self.rho.dim

    @property
    def nu(self):
        """Modular exponents indexed by the vectorized basis: nu[j*n+k] = kappa[j,k]."""
        return self.kappa.reshape(-1)

    def to_eigenbasis(self, A):
        """Coordinates of a matrix in the rho-eigenbasis."""
        U = self.eigenvectors
        return dagger(U) @ A @ U

    def from_eigenbasis(self, A_eig):
        """Back-transform from the rho-eigenbasis to the working basis."""
        U = self.eigenvectors
        return U @ A_eig @ dagger(U)

    def rho_power(self, p):
        """rho^p via the cached eigendecomposition."""
        U = self.eigenvectors
        return (U * self.eigenvalues**p) @ dagger(U)

    def superop_basis_change(self):
        """Unitary V with V @ vec(X) = vec(U* X U) for U the eigenvector matrix."""
        U = self.eigenvectors
        return np.kron(dagger(U), U.T)


def build_standard_form(rho):
    """Construct the standard-form data for a faithful state.

    Parameters
    ----------
    rho : DensityMatrix or array_like
        The state; arrays are validated on the way in.

    Returns
    -------
    StandardForm
        With eigenvalues in descending order, phase-fixed eigenvectors,
        xi0 = rho^{1/2} and the exponent grid kappa.
    """
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(rho)
    w, U = eigh_fixed(rho.entries)
    logw = np.log(w)
    kappa = logw[:, None] - logw[None, :]
    xi0 = (U * np.sqrt(w)) @ dagger(U)
    xi0 = (xi0 + dagger(xi0)) / 2.0
    return StandardForm(
        rho=rho,
        eigenvalues=w,
        eigenvectors=U,
        xi0=xi0,
        kappa=kappa,
        log_eigenvalues=logw,
    )


def tracial_state(n):
    """The standard form of the normalized trace (rho = I/n)."""
    return build_standard_form(np.eye(n) / n)


def gibbs_state(h, beta=1.0):
    """Standard form of the Gibbs state exp(-beta h)/Z for Hermitian h."""
    h = check_square(h, what="hamiltonian")
    w, V = np.linalg.eigh(h)
    g = np.exp(-beta * (w - w.min()))
    g = g / g.sum()
    rho = (V * g) @ dagger(V)
    return build_standard_form(rho)


# ---------------------------------------------------------------------------
# Algebra and commutant actions
# ---------------------------------------------------------------------------

def left_act(sf, A, X):
    """GNS action of the algebra: pi(A) X = A X."""
    A = check_square(A, sf.dim, "operator")
    X = check_square(X, sf.dim, "vector")
    return A @ X


def right_j_act(sf, A, X):
    """Commutant action j(A) X = X A* (with J X = X*)."""
    A = check_square(A, sf.dim, "operator")
    X = check_square(X, sf.dim, "vector")
    return X @ dagger(A)


def jordan_decompose(sf, xi):
    """Split a J-real vector into orthogonal positive parts.

    Parameters
    ----------
    xi : array_like
        Hermitian matrix within ``JREAL_TOL`` (symmetrized before use).

    Returns
    -------
    (xi_plus, xi_minus)
        Positive semidefinite matrices with xi = xi_plus - xi_minus and
        <xi_plus, xi_minus> = 0 (spectral splitting).

    Raises
    ------
    NotJReal
        If xi is farther than ``JREAL_TOL`` from Hermitian.
    """
    xi = check_square(xi, sf.dim, "vector")
    if hermitian_defect(xi) > JREAL_TOL:
        raise NotJReal("vector is not J-real (Hermitian) within tolerance")
    xi = (xi + dagger(xi)) / 2.0
    w, V = np.linalg.eigh(xi)
    plus = (V * np.maximum(w, 0.0)) @ dagger(V)
    minus = (V * np.maximum(-w, 0.0)) @ dagger(V)
    return plus, minus


def project_order_interval(sf, eta):
    """Nearest point of the order interval [0, xi0] in the trace norm.

    Uses Dykstra's alternating projection between the two spectral
    half-constraints {eta >= 0} and {eta <= xi0}; each half-projection
    is an exact eigenvalue clip.  Iteration stops when successive
    iterates differ by less than ``DYKSTRA_STEP_TOL`` in the norm
    induced by the trace inner product.

    Raises
    ------
    NotJReal
        For a non-Hermitian input.
    NoConvergence
        If the iteration cap is reached while the step size is still
        above ``DYKSTRA_FAIL_RESIDUAL``.
    """
    eta = check_square(eta, sf.dim, "vector")
    if hermitian_defect(eta) > JREAL_TOL:
        raise NotJReal("order-interval projection needs a J-real vector")
    eta = (eta + dagger(eta)) / 2.0
    xi0 = sf.xi0

    x = eta
    p = np.zeros_like(eta)
    q = np.zeros_like(eta)
    step = np.inf
    for _ in range(DYKSTRA_MAX_ITER):
        y = psd_clip(x + p)
        p = x + p - y
        x_new = xi0 - psd_clip(xi0 - (y + q))
        q = y + q - x_new
        step = hs_norm(x_new - x)
        x = x_new
        if step < DYKSTRA_STEP_TOL:
            break
    else:
        if step > DYKSTRA_FAIL_RESIDUAL:
            raise NoConvergence(
                f"Dykstra projection stalled with step {step:.3e} after "
                f"{DYKSTRA_MAX_ITER} iterations"
            )
    return (x + dagger(x)) / 2.0


def symmetric_embed(sf, A):
    """Symmetric embedding of the algebra: A -> rho^{1/4} A rho^{1/4}."""
    A = check_square(A, sf.dim, "operator")
    r = sf.rho_power(0.25)
    return r @ A @ r


def symmetric_unembed(sf, X):
    """Inverse of :func:`symmetric_embed` (rho faithful makes it exact)."""
    X = check_square(X, sf.dim, "vector")
    r = sf.rho_power(-0.25)
    return r @ X @ r


# ---------------------------------------------------------------------------
# Dense superoperators on the vectorized Hilbert space
# ---------------------------------------------------------------------------

class SuperOperator:
    """Dense linear map on vectorized n x n matrices.

    The basis convention is the row-major pair index (j, k) -> j*n + k,
    so that ``kron(A, B.T)`` is the map X -> A X B.  Because the basis
    is orthonormal for the trace inner product, the Hilbert-space
    adjoint is the plain conjugate transpose of the dense matrix.
    """

    __slots__ = ("mat", "dim", "_eig")

    def __init__(self, mat, dim=None):
        mat = np.asarray(mat, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimMismatch(f"superoperator matrix has shape {mat.shape}")
        if dim is None:
            dim = int(round(np.sqrt(mat.shape[0])))
        if dim * dim != mat.shape[0]:
            raise DimMismatch(
                f"superoperator of size {mat.shape[0]} is not on {dim}x{dim} matrices"
            )
        self.mat = mat
        self.dim = dim
        self._eig = None

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, n):
        return cls(np.zeros((n * n, n * n), dtype=complex), n)

    @classmethod
    def identity(cls, n):
        return cls(np.eye(n * n, dtype=complex), n)

    @classmethod
    def left_mult(cls, A):
        """X -> A X."""
        A = check_square(A, what="operator")
        n = A.shape[0]
        return cls(np.kron(A, np.eye(n)), n)

    @classmethod
    def right_mult(cls, B):
        """X -> X B."""
        B = check_square(B, what="operator")
        n = B.shape[0]
        return cls(np.kron(np.eye(n), B.T), n)

    @classmethod
    def sandwich(cls, A, B):
        """X -> A X B."""
        A = check_square(A, what="operator")
        B = check_square(B, A.shape[0], "operator")
        return cls(np.kron(A, B.T), A.shape[0])

    @classmethod
    def commutant_j(cls, A):
        """The commutant element j(A): X -> X A*."""
        return cls.right_mult(dagger(A))

    # -- algebra -----------------------------------------------------------
    def apply(self, X):
        X = check_square(X, self.dim, "vector")
        return unvec(self.mat @ vec(X), self.dim)

    def adjoint(self):
        return SuperOperator(dagger(self.mat), self.dim)

    def norm(self):
        """Operator (spectral) norm of the dense matrix."""
        return float(np.linalg.norm(self.mat, 2))

    def selfadjoint_defect(self):
        return float(np.linalg.norm(self.mat - dagger(self.mat), 2))

    def j_real_defect(self):
        """Distance from commuting with the conjugation J (antilinear).

        J K J is linear again with dense matrix S conj(K) S, where S is
        the transpose permutation; the defect is ||K - S conj(K) S||.
        """
        S = conj_swap_perm(self.dim)
        return float(np.linalg.norm(self.mat - S @ self.mat.conj() @ S, 2))

    def eigh(self):
        """Cached eigendecomposition (requires self-adjointness upstream)."""
        if self._eig is None:
            w, V = np.linalg.eigh(self.mat)
            self._eig = (w, V)
        return self._eig

    def __add__(self, other):
        return SuperOperator(self.mat + other.mat, self.dim)

    def __sub__(self, other):
        return SuperOperator(self.mat - other.mat, self.dim)

    def __neg__(self):
        return SuperOperator(-self.mat, self.dim)

    def __mul__(self, scalar):
        return SuperOperator(self.mat * scalar, self.dim)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return SuperOperator(self.mat @ other.mat, self.dim)

    def __repr__(self):
        return f"SuperOperator(dim={self.dim})"
