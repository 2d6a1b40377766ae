"""Dense linear-algebra helpers shared across the package.

Conventions used everywhere:

* An element of the Hilbert space is an n x n complex matrix ``X`` with
  inner product ``<X, Y> = Tr(X* Y)`` (conjugate linear in the first slot).
* Vectorization is row-major: ``vec(X)[j*n + k] = X[j, k]``, so that
  ``vec(A X B) = kron(A, B.T) @ vec(X)``.
"""

import numpy as np

from .errors import DimMismatch


def dagger(A):
    """Conjugate transpose."""
    return np.asarray(A).conj().T


def hs_inner(X, Y):
    """Trace inner product Tr(X* Y), conjugate linear in X."""
    return complex(np.trace(dagger(X) @ Y))


def hs_norm(X):
    """Norm induced by the trace inner product (Frobenius norm)."""
    return float(np.linalg.norm(X, "fro"))


def vec(X):
    """Row-major vectorization of a square matrix."""
    return np.asarray(X).reshape(-1)


def unvec(v, n):
    """Inverse of :func:`vec`."""
    v = np.asarray(v)
    if v.size != n * n:
        raise DimMismatch(f"vector of size {v.size} is not {n}x{n}")
    return v.reshape(n, n)


def check_square(A, n=None, what="matrix"):
    """Return A as a complex square ndarray, checking the dimension."""
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimMismatch(f"{what} has shape {A.shape}, expected square")
    if n is not None and A.shape[0] != n:
        raise DimMismatch(f"{what} has dimension {A.shape[0]}, expected {n}")
    return A


def hermitian_defect(A):
    """Spectral-norm distance from A to its own conjugate transpose."""
    return float(np.linalg.norm(A - dagger(A), 2))


def eigh_fixed(A):
    """Eigendecomposition of a Hermitian matrix with fixed conventions.

    Eigenvalues are returned in descending order via a stable sort (ties
    keep the ascending-LAPACK relative order), and each eigenvector's
    phase is fixed so that its first component of significant magnitude
    is real and positive.  This makes the decomposition reproducible for
    a given input; within a degenerate eigenvalue block the basis is
    whatever LAPACK returns, which is harmless downstream because all
    derived quantities depend only on the spectral projections.

    Returns
    -------
    w : (n,) float array, descending
    V : (n, n) complex array, columns are eigenvectors
    """
    w, V = np.linalg.eigh(np.asarray(A, dtype=complex))
    order = np.argsort(-w, kind="stable")
    w = w[order]
    V = V[:, order]
    for i in range(V.shape[1]):
        col = V[:, i]
        idx = np.argmax(np.abs(col) > 0.1 * np.abs(col).max())
        phase = col[idx] / abs(col[idx])
        V[:, i] = col / phase
    return w, V


def psd_clip(A):
    """Nearest positive semidefinite matrix to Hermitian A (spectral clip)."""
    w, V = np.linalg.eigh(A)
    w = np.maximum(w, 0.0)
    return (V * w) @ dagger(V)


def min_eigenvalue(A):
    """Smallest eigenvalue of a Hermitian matrix."""
    return float(np.linalg.eigvalsh(A)[0])


def conj_swap_perm(n):
    """Permutation matrix S with S @ vec(X) = vec(X.T).

    Together with entrywise conjugation this realizes the modular
    conjugation J X = X* at the vectorized level:
    ``vec(JX) = S @ conj(vec(X))``.
    """
    S = np.zeros((n * n, n * n))
    for j in range(n):
        for k in range(n):
            S[j * n + k, k * n + j] = 1.0
    return S


# ---------------------------------------------------------------------------
# Seeded random matrix samplers (Ginibre convention: entries ~ CN(0, 1))
# ---------------------------------------------------------------------------

def ginibre(n, rng):
    """Complex Ginibre matrix, entries (g + i g') / sqrt(2)."""
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)


def random_hermitian(n, rng):
    """GUE-style Hermitian matrix built from a Ginibre sample."""
    G = ginibre(n, rng)
    return (G + dagger(G)) / 2.0


def random_psd(n, rng):
    """Random positive semidefinite matrix G G*."""
    G = ginibre(n, rng)
    return G @ dagger(G)


def haar_unitary(n, rng):
    """Haar-distributed unitary via QR of a Ginibre matrix."""
    Q, R = np.linalg.qr(ginibre(n, rng))
    return Q * (np.diag(R) / np.abs(np.diag(R)))
