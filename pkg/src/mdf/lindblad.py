"""Detailed-balance Lindblad generators and their induced operators.

The generator acts on the algebra as

    L(A) = sum_k ( y_k* y_k A - 2 y_k* A y_k + A y_k* y_k ) + i[Q, A],

with jump coefficients y_k and a Hermitian drift Q.  Conjugating by
the symmetric embedding i0(A) = rho^{1/4} A rho^{1/4} turns L into an
operator H on the GNS space, and the central theme of this module is
when that H is self-adjoint (detailed balance) and how it decomposes
into Dirichlet operators of the flow-shifted couplings x_k =
sigma_{i/4}(y_k).

The drift that makes H self-adjoint is not free: :func:`build_Q`
computes it from the couplings by a flow average, and the balance
condition

    sum_k x_k ( . ) x_k*  =  sum_k x_k* ( . ) x_k

is the exchangeability of each coupling family with its adjoints that
the decomposition theorems require.  Several assembly routes for H
coexist on purpose (direct conjugation, flow-shifted closed forms for
H and H*, the Dirichlet sum); their pairwise agreement is part of the
test suite, so each route guards the others.
"""

from dataclasses import dataclass

import numpy as np

from .dirichlet import dirichlet_operator, ensure_admissible, split_self_adjoint
from .errors import BalanceViolated, NotSelfAdjoint
from .kernels import BoundaryCombination, F0Kernel
from .linalg import check_square, dagger, ginibre, hermitian_defect, hs_inner, hs_norm
from .modular import (
    S_MAP,
    T_MAP,
    boundary_combination_smear,
    modular_map,
    sigma,
    smear,
    superop_smear,
)
from .standard_form import SuperOperator, tracial_state

#: balance-condition residual above this blocks the decomposition paths
BALANCE_TOL = 1e-8

#: Hermiticity bar for the drift
Q_HERMITIAN_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class LindbladSpec:
    """Jump coefficients and drift of one generator.

    The couplings x_k = sigma_{i/4}(y_k) are derived, not stored: the
    conversion depends on the state, so it lives in
    :func:`couplings_of` / :func:`spec_from_couplings`.
    """

    ys: tuple
    Q: np.ndarray = None

    def __post_init__(self):
        ys = tuple(
            check_square(np.asarray(y, dtype=complex), what="jump coefficient")
            for y in self.ys
        )
        if not ys:
            raise ValueError("need at least one jump coefficient")
        n = ys[0].shape[0]
        ys = tuple(check_square(y, n, "jump coefficient") for y in ys)
        object.__setattr__(self, "ys", ys)
        Q = self.Q
        if Q is None:
            Q = np.zeros((n, n), dtype=complex)
        Q = check_square(np.asarray(Q, dtype=complex), n, "drift")
        if hermitian_defect(Q) > Q_HERMITIAN_TOL:
            raise NotSelfAdjoint("drift Q must be Hermitian")
        object.__setattr__(self, "Q", Q)

    @property
    def dim(self):
        return self.ys[0].shape[0]


def couplings_of(sf, spec):
    """The derived couplings x_k = sigma_{i/4}(y_k)."""
    return [sigma(sf, y, 0.25j) for y in spec.ys]


def spec_from_couplings(sf, xs, Q="auto", f=None):
    """Spec with y_k = sigma_{-i/4}(x_k); Q='auto' computes the drift."""
    xs = [check_square(np.asarray(x, dtype=complex), sf.dim, "coupling") for x in xs]
    ys = [sigma(sf, x, -0.25j) for x in xs]
    if isinstance(Q, str):
        if Q != "auto":
            raise ValueError(f"unknown drift mode {Q!r}")
        Q = build_Q(sf, xs, f)
    return LindbladSpec(ys=tuple(ys), Q=Q)


def lindblad_superop(spec):
    """Dense matrix of L (pure algebra, no state involved)."""
    n = spec.dim
    op = SuperOperator.zero(n)
    for y in spec.ys:
        yd = dagger(y)
        w = yd @ y
        op = op + SuperOperator.left_mult(w) + SuperOperator.right_mult(w)
        op = op - 2.0 * SuperOperator.sandwich(yd, y)
    op = op + 1j * (SuperOperator.left_mult(spec.Q) - SuperOperator.right_mult(spec.Q))
    return op


def lindblad_apply(spec, A):
    """L(A) evaluated termwise (conservative: L(I) = 0; *-preserving)."""
    A = check_square(A, spec.dim, "operator")
    out = np.zeros_like(A)
    for y in spec.ys:
        yd = dagger(y)
        w = yd @ y
        out += w @ A - 2.0 * (yd @ A @ y) + A @ w
    out += 1j * (spec.Q @ A - A @ spec.Q)
    return out


def _embedding_pair(sf):
    r = sf.rho_power(0.25)
    r_inv = sf.rho_power(-0.25)
    return SuperOperator.sandwich(r, r), SuperOperator.sandwich(r_inv, r_inv)


def induced_operator(sf, spec):
    """H = i0 . L . i0^{-1} by explicit conjugation with the embedding."""
    e0, e0_inv = _embedding_pair(sf)
    return e0 @ lindblad_superop(spec) @ e0_inv


def induced_operator_shifted(sf, spec):
    """Closed form of H from flow-shifted coefficients.

    Pushing rho^{1/4} factors through each term of L turns the
    conjugation into quarter-shifted left/right/sandwich coefficients;
    this route never forms the embedding, so it is an independent
    assembly of the same operator (exact identity, any drift).
    """
    op = SuperOperator.zero(spec.dim)
    for y in spec.ys:
        w = dagger(y) @ y
        op = op + SuperOperator.left_mult(sigma(sf, w, -0.25j))
        op = op + SuperOperator.right_mult(sigma(sf, w, 0.25j))
        op = op - 2.0 * SuperOperator.sandwich(
            sigma(sf, dagger(y), -0.25j), sigma(sf, y, 0.25j)
        )
    op = op + 1j * SuperOperator.left_mult(sigma(sf, spec.Q, -0.25j))
    op = op - 1j * SuperOperator.right_mult(sigma(sf, spec.Q, 0.25j))
    return op


def induced_adjoint_shifted(sf, spec):
    """Closed form of the HS-adjoint H* from flow-shifted coefficients.

    Termwise the adjoint of :func:`induced_operator_shifted`; having it
    as its own assembly lets tests measure ||H - H*|| from two
    independently built operators.
    """
    op = SuperOperator.zero(spec.dim)
    for y in spec.ys:
        w = dagger(y) @ y
        op = op + SuperOperator.left_mult(sigma(sf, w, 0.25j))
        op = op + SuperOperator.right_mult(sigma(sf, w, -0.25j))
        op = op - 2.0 * SuperOperator.sandwich(
            sigma(sf, y, 0.25j), sigma(sf, dagger(y), -0.25j)
        )
    op = op - 1j * SuperOperator.left_mult(sigma(sf, spec.Q, 0.25j))
    op = op + 1j * SuperOperator.right_mult(sigma(sf, spec.Q, -0.25j))
    return op


def build_Q(sf, xs, f=None, central_offset=0.0):
    """Drift matrix from the couplings by a weighted flow average.

    For each coupling, Q_k = i * int sigma_t( x* sigma_{-i/2}(x)
    - sigma_{i/2}(x*) x ) f(t) dt, evaluated by the exact smearing
    engine; the total is the sum.  The integrand matrix is
    anti-Hermitian, so Q comes out Hermitian.  A central offset c adds
    c*I, which provably changes neither L nor H (the generator only
    sees Q through commutators); it exists so tests can assert that.
    """
    if f is None:
        f = F0Kernel()
    n = sf.dim
    Q = np.zeros((n, n), dtype=complex)
    for x in xs:
        x = check_square(np.asarray(x, dtype=complex), n, "coupling")
        m0 = dagger(x) @ sigma(sf, x, -0.5j) - sigma(sf, dagger(x), 0.5j) @ x
        Q = Q + 1j * smear(sf, m0, f)
    return Q + float(central_offset) * np.eye(n)


# ---------------------------------------------------------------------------
# Balance condition and self-adjointness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BalanceReport:
    """Residuals of the two equivalent balance statements.

    ``condition_residual`` is the superoperator norm of
    X -> sum x_k X x_k* - x_k* X x_k; ``lemma_residual`` the worst
    normalized residual of the quarter-shifted sandwich identity over
    random matrices.  ``equivalent`` records that the two verdicts
    agree — their co-vanishing is itself a theorem under test.
    """

    condition_residual: float
    lemma_residual: float
    equivalent: bool

    @property
    def balanced(self):
        return self.condition_residual < BALANCE_TOL


def check_balance_condition(sf, xs, samples=64, seed=0):
    """Measure both faces of the balance condition for a coupling family."""
    xs = [check_square(np.asarray(x, dtype=complex), sf.dim, "coupling") for x in xs]
    cond = SuperOperator.zero(sf.dim)
    dressed = SuperOperator.zero(sf.dim)
    for x in xs:
        xd = dagger(x)
        cond = cond + SuperOperator.sandwich(x, xd) - SuperOperator.sandwich(xd, x)
        dressed = dressed + SuperOperator.sandwich(
            sigma(sf, x, 0.25j), sigma(sf, xd, -0.25j)
        )
        dressed = dressed - SuperOperator.sandwich(
            sigma(sf, xd, 0.25j), sigma(sf, x, -0.25j)
        )
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        a = ginibre(sf.dim, rng)
        worst = max(worst, hs_norm(dressed.apply(a)) / hs_norm(a))
    cond_res = cond.norm()
    equivalent = (cond_res < BALANCE_TOL) == (worst < BALANCE_TOL)
    return BalanceReport(
        condition_residual=cond_res, lemma_residual=worst, equivalent=equivalent
    )


@dataclass(frozen=True)
class SelfAdjointnessReport:
    """||H - H*|| next to the drift-criterion residual.

    The criterion equation moves every Q-dependence of H - H* to one
    side and every coupling-dependence to the other; its residual and
    the operator residual must vanish together (``consistent``).
    """

    operator_residual: float
    criterion_residual: float
    consistent: bool


def _criterion_sides(sf, spec):
    tq = modular_map(sf, spec.Q, T_MAP)
    lhs = 1j * (SuperOperator.left_mult(tq) - SuperOperator.right_mult(tq))
    w = sum(dagger(y) @ y for y in spec.ys)
    sw = modular_map(sf, w, S_MAP)
    rhs = -SuperOperator.left_mult(sw) + SuperOperator.right_mult(sw)
    for y in spec.ys:
        rhs = rhs + 2.0 * SuperOperator.sandwich(
            sigma(sf, dagger(y), -0.25j), sigma(sf, y, 0.25j)
        )
        rhs = rhs - 2.0 * SuperOperator.sandwich(
            sigma(sf, y, 0.25j), sigma(sf, dagger(y), -0.25j)
        )
    return lhs, rhs


def selfadjointness_residual(sf, spec, tol=1e-8):
    """Self-adjointness of H measured two independent ways."""
    H = induced_operator(sf, spec)
    op_res = H.selfadjoint_defect()
    lhs, rhs = _criterion_sides(sf, spec)
    crit_res = (lhs - rhs).norm()
    return SelfAdjointnessReport(
        operator_residual=op_res,
        criterion_residual=crit_res,
        consistent=(op_res < tol) == (crit_res < tol),
    )


def criterion_matches_adjoint_gap(sf, spec):
    """Exact-identity residual: (criterion LHS - RHS) == H - H*.

    Both sides are assembled from flow-shifted coefficients, so this
    should vanish to rounding regardless of balance or drift choice.
    """
    lhs, rhs = _criterion_sides(sf, spec)
    gap = induced_operator_shifted(sf, spec) - induced_adjoint_shifted(sf, spec)
    return ((lhs - rhs) - gap).norm()


# ---------------------------------------------------------------------------
# Decompositions
# ---------------------------------------------------------------------------

def _require_balanced(sf, xs):
    report = check_balance_condition(sf, xs)
    if not report.balanced:
        raise BalanceViolated(
            f"coupling family is unbalanced (residual "
            f"{report.condition_residual:.3e}); the decomposition "
            "identities assume balance"
        )
    return report


def decompose_H(sf, xs, f=None):
    """Dirichlet operators [H_k] of the couplings; their sum is H.

    Requires balance; the comparison of sum(H_k) with the induced
    operator of the drift-completed spec is the caller's (the sum is
    returned piecewise so tests can also inspect the parts).
    """
    _require_balanced(sf, xs)
    if f is None:
        f = F0Kernel()
    return [dirichlet_operator(sf, x, f) for x in xs]


def decomposition_residual(sf, xs):
    """|| induced H  -  sum_k H_k || for a balanced family.

    Pinned to the distinguished weight: only there does the plain
    generator shape correspond to the Dirichlet sum (the boundary
    combination degenerates to a delta).
    """
    parts = decompose_H(sf, xs)
    total = parts[0]
    for p in parts[1:]:
        total = total + p
    spec = spec_from_couplings(sf, xs, Q="auto")
    return (induced_operator(sf, spec) - total).norm()


def selfadjoint_component_decomposition(sf, xs):
    """Split each coupling into Hermitian components; L halves over them.

    Returns (components, residual) where components lists the 2m
    Hermitian matrices of the split and residual is the superoperator
    norm of L - (1/2) sum_k L_k, each L_k the generator of a single
    component with its own drift.  Requires balance.
    """
    _require_balanced(sf, xs)
    components = []
    for x in xs:
        x1, x2 = split_self_adjoint(x)
        components.extend([x2, x1])
    full = lindblad_superop(spec_from_couplings(sf, xs, Q="auto"))
    half = SuperOperator.zero(sf.dim)
    for c in components:
        half = half + lindblad_superop(spec_from_couplings(sf, [c], Q="auto"))
    residual = (full - 0.5 * half).norm()
    return components, residual


def y_reconstruction_residual(sf, xs):
    """Residual of  2 sum y_k* y_k = sum ( |sigma_{-i/4}(x_k)|^2 + |sigma_{-i/4}(x_k*)|^2 ).

    The two sides differ exactly by the (A = I instance of the) balance
    condition, so this vanishes for balanced families and is a witness
    otherwise.
    """
    n = sf.dim
    lhs = np.zeros((n, n), dtype=complex)
    rhs = np.zeros((n, n), dtype=complex)
    for x in xs:
        y = sigma(sf, x, -0.25j)
        lhs += 2.0 * (dagger(y) @ y)
        a = sigma(sf, x, -0.25j)
        b = sigma(sf, dagger(x), -0.25j)
        rhs += dagger(a) @ a + dagger(b) @ b
    return float(np.linalg.norm(lhs - rhs, 2))


def kms_symmetry_residual(sf, spec, samples=50, seed=0):
    """Worst sampled violation of <i0(LA), i0(B)> = <i0(A), i0(LB)>.

    This is the symmetry of the generator in the embedded inner
    product; it vanishes exactly when the induced H is self-adjoint.
    """
    rng = np.random.default_rng(seed)
    r = sf.rho_power(0.25)

    def embed(a):
        return r @ a @ r

    worst = 0.0
    for _ in range(samples):
        a = ginibre(sf.dim, rng)
        b = ginibre(sf.dim, rng)
        la = lindblad_apply(spec, a)
        lb = lindblad_apply(spec, b)
        lhs = complex(hs_inner(embed(la), embed(b)))
        rhs = complex(hs_inner(embed(a), embed(lb)))
        worst = max(worst, abs(lhs - rhs) / (hs_norm(a) * hs_norm(b)))
    return worst


# ---------------------------------------------------------------------------
# General-weight generator (single coupling)
# ---------------------------------------------------------------------------

def general_f_generator(sf, x, f, _left_coefficient_both_adjoint=False):
    """Generator for one coupling under a general admissible weight.

    Each half carries boundary-weight-smeared coefficients

        L1(A) = 1/2 [ C1 A + A C1 - 2 * smeared sandwich ] + (i/2)[Q1, A],

    with C1 the flow average of sigma_{i/4}(x*) sigma_{-i/4}(x) against
    f(t+i/4) + f(t-i/4), and L2 the same with x and x* exchanged.  The
    diagnostic flag assembles a deliberately wrong variant whose left
    coefficient uses the adjoint coupling in both factors — the
    embedding identity detects the difference for non-normal couplings,
    which is how tests pin the correct combination.

    Raises
    ------
    NotAdmissible
        For weights without a certificate.
    """
    x = check_square(np.asarray(x, dtype=complex), sf.dim, "coupling")
    if not isinstance(f, F0Kernel):
        ensure_admissible(f)
    xd = dagger(x)
    op = SuperOperator.zero(sf.dim)
    for a, b in ((xd, x), (x, xd)):
        # coefficient sigma_{i/4}(a) sigma_{-i/4}(b), flow-averaged
        # against the boundary weight
        left_pair = (a, a) if _left_coefficient_both_adjoint else (a, b)
        p_left = sigma(sf, left_pair[0], 0.25j) @ sigma(sf, left_pair[1], -0.25j)
        p = sigma(sf, a, 0.25j) @ sigma(sf, b, -0.25j)
        c_left = boundary_combination_smear(sf, p_left, f)
        c_right = boundary_combination_smear(sf, p, f)
        k = SuperOperator.sandwich(sigma(sf, a, 0.25j), sigma(sf, b, -0.25j))
        if isinstance(f, F0Kernel):
            k_smeared = k  # boundary weight of the distinguished kernel is a delta
        else:
            k_smeared = superop_smear(sf, k, BoundaryCombination(f))
        q1 = build_Q(sf, [b], f)
        op = op + 0.5 * (
            SuperOperator.left_mult(c_left) + SuperOperator.right_mult(c_right)
        )
        op = op - k_smeared
        op = op + 0.5j * (SuperOperator.left_mult(q1) - SuperOperator.right_mult(q1))
    return op


def general_f_embedding_residual(sf, x, f, samples=50, seed=0, **kwargs):
    """Worst sampled residual of  i0(L(A)) = H i0(A)  for the general-weight pair."""
    rng = np.random.default_rng(seed)
    L = general_f_generator(sf, x, f, **kwargs)
    H = dirichlet_operator(sf, x, f, check_kernel=not isinstance(f, F0Kernel))
    r = sf.rho_power(0.25)
    worst = 0.0
    for _ in range(samples):
        a = ginibre(sf.dim, rng)
        la = L.apply(a)
        lhs = r @ la @ r
        rhs = H.apply(r @ a @ r)
        worst = max(worst, hs_norm(lhs - rhs) / hs_norm(a))
    return worst


# ---------------------------------------------------------------------------
# Tracial state
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TracialReport:
    """Checks specific to rho = I/n, where the flow is trivial.

    ``q_norm`` must be exactly zero (the drift integrand cancels
    algebraically); ``identity_residual`` measures i[Q, .] against the
    sandwich-difference map it must equal; the symmetrized generator
    (couplings and adjoints weighted half each) is self-adjoint
    unconditionally and coincides with the plain one exactly for
    balanced families.
    """

    q_norm: float
    balance_residual: float
    identity_residual: float
    sym_selfadjoint_defect: float
    plain_vs_sym: float
    sym_vs_dirichlet: float


def tracial_symmetric_generator(ys):
    """The symmetrized generator: half the coupling terms plus half the adjoint terms."""
    ys = tuple(np.asarray(y, dtype=complex) for y in ys)
    n = ys[0].shape[0]
    op = SuperOperator.zero(n)
    for y in ys:
        for a in (y, dagger(y)):
            ad = dagger(a)
            w = ad @ a
            op = op + 0.5 * (
                SuperOperator.left_mult(w) + SuperOperator.right_mult(w)
            )
            op = op - SuperOperator.sandwich(ad, a)
    return op


def verify_tracial_case(xs):
    """Run the trivial-flow checks for a coupling family at rho = I/n."""
    xs = [np.asarray(x, dtype=complex) for x in xs]
    n = xs[0].shape[0]
    sf = tracial_state(n)
    q = build_Q(sf, xs)
    balance = check_balance_condition(sf, xs)
    spec = LindbladSpec(ys=tuple(xs), Q=q)  # flow is trivial: y_k = x_k
    plain = lindblad_superop(spec)
    sym = tracial_symmetric_generator(xs)
    ident = 1j * (SuperOperator.left_mult(q) - SuperOperator.right_mult(q))
    for y in xs:
        ident = ident - SuperOperator.sandwich(dagger(y), y)
        ident = ident + SuperOperator.sandwich(y, dagger(y))
    dirich = SuperOperator.zero(n)
    for x in xs:
        dirich = dirich + dirichlet_operator(sf, x)
    return TracialReport(
        q_norm=float(np.linalg.norm(q, 2)),
        balance_residual=balance.condition_residual,
        identity_residual=ident.norm(),
        sym_selfadjoint_defect=sym.selfadjoint_defect(),
        plain_vs_sym=(plain - sym).norm(),
        sym_vs_dirichlet=(sym - dirich).norm(),
    )
