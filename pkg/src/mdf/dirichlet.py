"""Dirichlet operators built from a coupling matrix and an admissible weight.

Given a coupling x and a weight function f, the energy form is

    E(eta, xi) = int f(t) [ <d1(t) eta, d1(t) xi> + <d2(t) eta, d2(t) xi> ] dt,

where d1(t) xi = sigma_{t-i/4}(x) xi - xi sigma_{t+i/4}(x) and d2(t) is
the same derivation for the adjoint coupling.  The associated positive
operator H (E(eta, xi) = <eta, H xi>) annihilates xi0, commutes with the
modular conjugation, and generates a Markovian semigroup on the positive
cone whenever f passes the admissibility checks.

Two independent engines build H:

``exact_spectral``
    Uses the covariance d(t) = U_t d(0) U_t* of the derivations under
    the flow: the double-index entries of the base quadratic
    G0 = d1(0)* d1(0) + d2(0)* d2(0) pick up the closed-form transform
    of f at the frequency differences.  Exact up to rounding; scales to
    the full supported dimension range.

``quadrature``
    Assembles the derivations literally at every node of a fixed panel
    rule and accumulates f(t) d(t)* d(t), adding the weight's analytic
    tail beyond the truncation radius.  Serves as the oracle route for
    cross-checking the spectral engine and is priced for small dims.

The two must agree to ``ENGINE_AGREEMENT_RTOL`` in relative spectral
norm; :func:`crosscheck_engines` raises ``EngineDisagreement`` otherwise.
"""

from dataclasses import dataclass

import numpy as np

from .errors import EngineDisagreement, NotAdmissible
from .kernels import (
    PANEL_NODES,
    PANEL_WIDTH,
    BoundaryCombination,
    F0Kernel,
    _panel_rule,
    check_admissible,
)
from .linalg import (
    check_square,
    dagger,
    ginibre,
    hs_inner,
    hs_norm,
    random_hermitian,
    random_psd,
)
from .modular import (
    T_MAP,
    sigma,
    superop_flow_factors,
    superop_modular_map,
    superop_smear,
    superop_smear_quadrature,
)
from .standard_form import SuperOperator, jordan_decompose

ENGINE_EXACT = "exact_spectral"
ENGINE_QUADRATURE = "quadrature"
ENGINES = (ENGINE_EXACT, ENGINE_QUADRATURE)

#: engines past this relative gap are treated as a build failure
ENGINE_AGREEMENT_RTOL = 1e-6

#: batched quadrature nodes are sized so a chunk holds ~4M superop entries
_CHUNK_ENTRIES = 1 << 22

_CERT_CACHE = {}


def ensure_admissible(f):
    """Return the (cached) admissibility certificate of f or raise.

    Raises
    ------
    NotAdmissible
        If any of positivity, boundary behaviour, or strip decay fails.
    """
    cert = _CERT_CACHE.get(f.name)
    if cert is None:
        cert = check_admissible(f)
        _CERT_CACHE[f.name] = cert
    if not cert.granted:
        raise NotAdmissible(
            f"weight {f.name!r} is not admissible: positivity_ok="
            f"{cert.positivity_ok}, boundary={cert.boundary_status!r}, "
            f"decay_ok={cert.decay_ok}"
        )
    return cert


@dataclass(frozen=True, eq=False)
class DirichletSpec:
    """Inputs of one Dirichlet-operator build.

    ``check_kernel=False`` skips the admissibility gate; that is the
    switch for deliberately signed weights used as negative controls.
    The quadrature engine additionally requires a certified decay rate
    (or the distinguished weight), since a truncated panel rule is
    meaningless for slowly decaying weights without an analytic tail.
    """

    x: np.ndarray
    kernel: "F0Kernel" = None
    engine: str = ENGINE_EXACT
    check_kernel: bool = True

    def __post_init__(self):
        object.__setattr__(
            self, "x", check_square(np.asarray(self.x, dtype=complex), what="coupling")
        )
        if self.kernel is None:
            object.__setattr__(self, "kernel", F0Kernel())
        if self.engine not in ENGINES:
            raise ValueError(f"unknown engine {self.engine!r}; expected one of {ENGINES}")
        if self.check_kernel:
            cert = ensure_admissible(self.kernel)
            if self.engine == ENGINE_QUADRATURE and not cert.decay_ok:
                raise NotAdmissible(
                    f"weight {self.kernel.name!r} has no certified decay; "
                    "the quadrature engine cannot truncate it"
                )


def _resolve_spec(spec, kernel, engine, check_kernel):
    if isinstance(spec, DirichletSpec):
        return spec
    return DirichletSpec(x=spec, kernel=kernel, engine=engine, check_kernel=check_kernel)


def derivation_at(sf, x, t=0.0):
    """The derivation at time t: xi -> sigma_{t-i/4}(x) xi - xi sigma_{t+i/4}(x)."""
    left = sigma(sf, x, t - 0.25j)
    right = sigma(sf, x, t + 0.25j)
    return SuperOperator.left_mult(left) - SuperOperator.right_mult(right)


def coupling_quadratic(sf, x):
    """Base quadratic G0 = d1(0)* d1(0) + d2(0)* d2(0) of the coupling pair."""
    d1 = derivation_at(sf, x, 0.0)
    d2 = derivation_at(sf, dagger(x), 0.0)
    return d1.adjoint() @ d1 + d2.adjoint() @ d2


def split_self_adjoint(x):
    """Self-adjoint pair (x1, x2) with x = (x1 - i x2)/sqrt(2).

    The normalization makes the coupling quadratics match:
    G0(x) = (G0(x1) + G0(x2)) / 2, so the Dirichlet operator of x is the
    mean of the two self-adjoint ones.
    """
    x = np.asarray(x, dtype=complex)
    x1 = (x + dagger(x)) / np.sqrt(2.0)
    x2 = 1j * (x - dagger(x)) / np.sqrt(2.0)
    return x1, x2


def _flow_shifted_orbit(sf, x, ts, shift):
    """Batched sigma_{t + i*shift}(x) over a vector of real times.

    Returns an array of shape (len(ts), n, n); the imaginary offset is
    applied once to the eigenbasis coefficients, the real times as pure
    phases.
    """
    x_eig = sf.to_eigenbasis(x) * np.exp(-float(shift) * sf.kappa)
    phases = np.exp(1j * np.multiply.outer(np.asarray(ts, dtype=float), sf.kappa))
    U = sf.eigenvectors
    return U @ (phases * x_eig[None, :, :]) @ dagger(U)


def _structured_tail(sf, G0, kernel, radius):
    """Tail of the weighted quadratic beyond the truncation radius.

    Past the truncation radius the integrand is the exact flow orbit of
    G0, so the tail is the entrywise analytic tail transform; weights
    without one (fast-decaying, radius chosen for ~1e-13 mass) get zero.
    """
    tail = kernel.tail_hat(superop_flow_factors(sf), radius)
    if tail is None:
        return SuperOperator.zero(sf.dim)
    V = sf.superop_basis_change()
    G_eig = V @ G0.mat @ V.conj().T
    return SuperOperator(V.conj().T @ (G_eig * tail) @ V, sf.dim)


def _dirichlet_quadrature(sf, x, kernel):
    n = sf.dim
    N = n * n
    radius = kernel.truncation_radius or 16.0
    ts, ws = _panel_rule(float(radius), PANEL_WIDTH, PANEL_NODES)
    fw = ws * kernel.eval(ts)
    eye = np.eye(n)
    H = np.zeros((N, N), dtype=complex)
    chunk = max(1, _CHUNK_ENTRIES // (N * N))
    for lo in range(0, ts.size, chunk):
        tc = ts[lo : lo + chunk]
        wc = fw[lo : lo + chunk]
        m = tc.size
        for y in (x, dagger(x)):
            A = _flow_shifted_orbit(sf, y, tc, -0.25)
            B = _flow_shifted_orbit(sf, y, tc, +0.25)
            D = np.einsum("kip,jq->kijpq", A, eye).reshape(m, N, N)
            D -= np.einsum("ip,kqj->kijpq", eye, B).reshape(m, N, N)
            H += np.einsum("k,kab,kac->bc", wc, D.conj(), D, optimize=True)
    core = SuperOperator(H, n)
    return core + _structured_tail(sf, coupling_quadratic(sf, x), kernel, radius)


def dirichlet_operator(sf, spec, kernel=None, engine=ENGINE_EXACT, check_kernel=True):
    """Dirichlet operator of a coupling for a weight kernel.

    ``spec`` may be a :class:`DirichletSpec` or a bare coupling matrix
    (then the remaining keywords fill in the rest).  No symmetrization
    is applied to the result: self-adjointness is a property to be
    observed (and is, for admissible weights), not enforced.

    Raises
    ------
    NotAdmissible
        If the weight fails its certificate and the check is on.
    """
    spec = _resolve_spec(spec, kernel, engine, check_kernel)
    x = check_square(spec.x, sf.dim, "coupling")
    if spec.engine == ENGINE_EXACT:
        return superop_smear(sf, coupling_quadratic(sf, x), spec.kernel)
    return _dirichlet_quadrature(sf, x, spec.kernel)


def form_eval(sf, spec, eta, xi, kernel=None, engine=ENGINE_EXACT, check_kernel=True):
    """Energy form E(eta, xi), conjugate-linear in eta.

    The exact engine evaluates <eta, H xi> through the assembled
    operator; the quadrature engine accumulates the two derivation
    inner products f(t) <d(t) eta, d(t) xi> node by node at the matrix
    level (never forming H), plus the structured tail.
    """
    spec = _resolve_spec(spec, kernel, engine, check_kernel)
    eta = check_square(eta, sf.dim, "vector")
    xi = check_square(xi, sf.dim, "vector")
    if spec.engine == ENGINE_EXACT:
        H = dirichlet_operator(sf, spec)
        return complex(hs_inner(eta, H.apply(xi)))
    x = check_square(spec.x, sf.dim, "coupling")
    radius = spec.kernel.truncation_radius or 16.0
    ts, ws = _panel_rule(float(radius), PANEL_WIDTH, PANEL_NODES)
    fw = ws * spec.kernel.eval(ts)
    total = 0j
    for y in (x, dagger(x)):
        A = _flow_shifted_orbit(sf, y, ts, -0.25)
        B = _flow_shifted_orbit(sf, y, ts, +0.25)
        d_eta = A @ eta - eta @ B
        d_xi = A @ xi - xi @ B
        total += np.einsum("k,kij,kij->", fw, d_eta.conj(), d_xi)
    tail_op = _structured_tail(sf, coupling_quadratic(sf, x), spec.kernel, radius)
    total += hs_inner(eta, tail_op.apply(xi))
    return complex(total)


def crosscheck_engines(sf, x, kernel=None, rtol=ENGINE_AGREEMENT_RTOL, check_kernel=True):
    """Relative spectral-norm gap between the two engine builds.

    Raises
    ------
    EngineDisagreement
        If the gap exceeds ``rtol`` — the signal that one of the two
        independent assembly routes is wrong.
    """
    He = dirichlet_operator(sf, x, kernel, ENGINE_EXACT, check_kernel)
    Hq = dirichlet_operator(sf, x, kernel, ENGINE_QUADRATURE, check_kernel)
    rel = (He - Hq).norm() / max(He.norm(), 1e-300)
    if rel > rtol:
        raise EngineDisagreement(
            f"exact and quadrature engines differ by {rel:.3e} relative, "
            f"above the {rtol:g} agreement bar"
        )
    return rel


def verify_boundary_shift(sf, x, f):
    """Residual of the contour-shift identity for a finite-boundary weight.

    The flow average of the coupling sandwich x ( . ) x* + x* ( . ) x
    dressed by the T map must equal the direct flow average against the
    boundary weight f(t+i/4) + f(t-i/4).  The left side uses closed-form
    transforms, the right side pointwise quadrature of the boundary
    weight, so the identity is exercised end to end.
    """
    x = check_square(np.asarray(x, dtype=complex), sf.dim, "coupling")
    K0 = SuperOperator.sandwich(x, dagger(x)) + SuperOperator.sandwich(dagger(x), x)
    lhs = superop_modular_map(sf, superop_smear(sf, K0, f), T_MAP)
    rhs = superop_smear_quadrature(sf, K0, BoundaryCombination(f))
    return (lhs - rhs).norm() / max(lhs.norm(), 1e-300)


# ---------------------------------------------------------------------------
# Property report
# ---------------------------------------------------------------------------

#: E(xi_plus, xi_minus) above this counts as a Markovianity violation
NEGATIVITY_TOL = 1e-9


@dataclass(frozen=True)
class DirichletReport:
    """Measured invariants of one Dirichlet operator.

    ``negativity_violations`` counts sampled Hermitian vectors whose
    orthogonal positive parts gave Re E(xi_plus, xi_minus) above
    ``NEGATIVITY_TOL`` (the form-level Markovianity criterion demands
    <= 0 up to noise); ``jordan_negativity_max`` records the worst
    value.  ``cone_form_residual`` is the largest |E(xi, xi0)| over
    sampled positive vectors, ``conj_form_residual`` the largest gap in
    E(J xi, J xi) = conj(E(xi, xi)) over general samples.
    """

    engine: str
    h_xi0_residual: float
    j_real_residual: float
    conj_form_residual: float
    selfadjoint_defect: float
    psd_min_eig: float
    negativity_violations: int
    jordan_negativity_max: float
    cone_form_residual: float
    samples: int

    def ok(self, tol=1e-8, psd_tol=1e-9):
        return (
            self.h_xi0_residual < tol
            and self.j_real_residual < tol
            and self.conj_form_residual < tol
            and self.selfadjoint_defect < tol
            and self.psd_min_eig > -psd_tol
            and self.negativity_violations == 0
            and self.cone_form_residual < tol
        )


def verify_dirichlet(sf, spec, samples=100, seed=0):
    """Measure the defining properties of the operator built from spec."""
    rng = np.random.default_rng(seed)
    spec = _resolve_spec(spec, None, ENGINE_EXACT, True)
    H = dirichlet_operator(sf, spec)
    h_xi0 = hs_norm(H.apply(sf.xi0))
    herm = (H.mat + dagger(H.mat)) / 2.0
    psd_min_eig = float(np.linalg.eigvalsh(herm)[0])
    violations = 0
    neg_max = -np.inf
    cone_max = 0.0
    conj_max = 0.0
    for _ in range(samples):
        xi = random_hermitian(sf.dim, rng)
        plus, minus = jordan_decompose(sf, xi)
        val = float(np.real(hs_inner(plus, H.apply(minus))))
        neg_max = max(neg_max, val)
        if val > NEGATIVITY_TOL:
            violations += 1
        psd = random_psd(sf.dim, rng)
        cone_max = max(cone_max, abs(complex(hs_inner(psd, H.apply(sf.xi0)))))
        g = ginibre(sf.dim, rng)
        e_g = complex(hs_inner(g, H.apply(g)))
        e_jg = complex(hs_inner(dagger(g), H.apply(dagger(g))))
        conj_max = max(conj_max, abs(e_jg - np.conj(e_g)))
    return DirichletReport(
        engine=spec.engine,
        h_xi0_residual=h_xi0,
        j_real_residual=H.j_real_defect(),
        conj_form_residual=conj_max,
        selfadjoint_defect=H.selfadjoint_defect(),
        psd_min_eig=psd_min_eig,
        negativity_violations=violations,
        jordan_negativity_max=neg_max,
        cone_form_residual=cone_max,
        samples=samples,
    )
