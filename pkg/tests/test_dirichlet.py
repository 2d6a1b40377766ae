"""Dirichlet operators and forms checked against hand-computable cases.

The oracles here are independent of the library's assembly route:

* at the trace state the flow is trivial and the operator collapses to
  a double commutator, computable in three lines;
* for a two-level state and the corner coupling e_12 every ingredient
  is a single Bohr frequency, so the whole superoperator has a closed
  form in terms of left/right/sandwich multipliers.
"""

import numpy as np
import pytest

from mdf import (
    CauchyKernel,
    CosineModulatedF0,
    DimMismatch,
    DirichletSpec,
    F0Kernel,
    NotAdmissible,
    SuperOperator,
    build_standard_form,
    crosscheck_engines,
    derivation_at,
    dirichlet_operator,
    form_eval,
    jordan_decompose,
    split_self_adjoint,
    symmetric_embed,
    tracial_state,
    verify_boundary_shift,
    verify_dirichlet,
)
from mdf.dirichlet import ENGINE_QUADRATURE
from mdf.linalg import dagger, ginibre, hs_inner, hs_norm, random_hermitian


def _e(i, j, n=2):
    m = np.zeros((n, n), dtype=complex)
    m[i, j] = 1.0
    return m


# ---------------------------------------------------------------------------
# oracle 1: trace state => double commutator
# ---------------------------------------------------------------------------

def test_tracial_operator_is_double_commutator(rng):
    """At rho = I/n the flow is constant, so
    H X = hat_f(0) * ([x*, [x, X]] + [x, [x*, X]]) with hat_f0(0) = 1/2."""
    sf = tracial_state(3)
    x = ginibre(3, rng)
    H = dirichlet_operator(sf, x)
    for _ in range(10):
        X = ginibre(3, rng)
        oracle = 0.5 * (
            dagger(x) @ (x @ X - X @ x)
            - (x @ X - X @ x) @ dagger(x)
            + x @ (dagger(x) @ X - X @ dagger(x))
            - (dagger(x) @ X - X @ dagger(x)) @ x
        )
        np.testing.assert_allclose(H.apply(X), oracle, atol=1e-12)


def test_tracial_hermitian_coupling_gap_is_four():
    # x = diag(1, -1): H = [x, [x, .]] has eigenvalues {0, 0, 4, 4}
    sf = tracial_state(2)
    H = dirichlet_operator(sf, np.diag([1.0, -1.0]))
    w = np.linalg.eigvalsh(H.mat)
    np.testing.assert_allclose(sorted(w), [0, 0, 4, 4], atol=1e-12)


def test_tracial_form_is_commutator_overlap(rng):
    sf = tracial_state(3)
    x = random_hermitian(3, rng)
    eta, xi = ginibre(3, rng), ginibre(3, rng)
    val = form_eval(sf, x, eta, xi)
    comm = lambda a, b: a @ b - b @ a
    oracle = complex(hs_inner(comm(x, eta), comm(x, xi)))
    assert abs(val - oracle) < 1e-12


# ---------------------------------------------------------------------------
# oracle 2: two-level corner coupling, fully explicit superoperator
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("p", [0.5, 0.75, 0.9])
def test_two_level_corner_coupling_closed_form(p):
    """x = e_12 has a single Bohr frequency c = log(p/(1-p)), so the
    coupling quadratic is frequency-flat and smearing only contributes
    hat_f0(0) = 1/2:

        2 H = e^{c/2} L(e_22) + e^{-c/2} R(e_11) - S(e_21, e_12) - S(e_12, e_21)
            + e^{-c/2} L(e_11) + e^{c/2} R(e_22) - S(e_12, e_21) - S(e_21, e_12)

    (first line from x, second from x*)."""
    sf = build_standard_form(np.diag([p, 1 - p]))
    c = np.log(p / (1 - p))
    L, R, S = SuperOperator.left_mult, SuperOperator.right_mult, SuperOperator.sandwich
    e11, e12, e21, e22 = _e(0, 0), _e(0, 1), _e(1, 0), _e(1, 1)
    up = np.exp(c / 2)
    dn = np.exp(-c / 2)
    oracle = 0.5 * (
        up * L(e22) + dn * R(e11) + dn * L(e11) + up * R(e22)
        - 2.0 * S(e21, e12) - 2.0 * S(e12, e21)
    )
    H = dirichlet_operator(sf, e12)
    assert (H - oracle).norm() < 1e-13


# ---------------------------------------------------------------------------
# structural identities
# ---------------------------------------------------------------------------

def test_derivation_kills_the_cyclic_vector(sf3, rng):
    # sigma_{t-i/4}(x) rho^{1/2} = rho^{1/2} sigma_{t+i/4}(x) for every t
    x = ginibre(3, rng)
    for t in (0.0, 0.7, -2.3):
        d = derivation_at(sf3, x, t)
        assert hs_norm(d.apply(sf3.xi0)) < 1e-12


def test_central_coupling_gives_zero_operator(sf3):
    H = dirichlet_operator(sf3, np.eye(3))
    assert H.norm() < 1e-14


def test_scalar_shift_of_coupling_is_invisible(sf3, rng):
    x = ginibre(3, rng)
    H1 = dirichlet_operator(sf3, x)
    H2 = dirichlet_operator(sf3, x + (0.8 - 0.3j) * np.eye(3))
    assert (H1 - H2).norm() < 1e-11


def test_split_into_self_adjoint_parts(sf3, rng):
    x = ginibre(3, rng)
    x1, x2 = split_self_adjoint(x)
    np.testing.assert_allclose(x1, dagger(x1), atol=1e-14)
    np.testing.assert_allclose(x2, dagger(x2), atol=1e-14)
    np.testing.assert_allclose((x1 - 1j * x2) / np.sqrt(2), x, atol=1e-14)
    H = dirichlet_operator(sf3, x)
    H1 = dirichlet_operator(sf3, x1)
    H2 = dirichlet_operator(sf3, x2)
    assert (H - 0.5 * (H1 + H2)).norm() < 1e-11


@pytest.mark.parametrize("make_kernel", [F0Kernel, lambda: CauchyKernel(scale=1.0)])
def test_operator_properties(sf3, rng, make_kernel):
    x = ginibre(3, rng)
    H = dirichlet_operator(sf3, x, make_kernel())
    assert H.selfadjoint_defect() < 1e-12
    assert H.j_real_defect() < 1e-12
    assert hs_norm(H.apply(sf3.xi0)) < 1e-12
    w, _ = H.eigh()
    assert w[0] > -1e-12


def test_form_is_conjugate_symmetric(sf3, rng):
    x = ginibre(3, rng)
    eta, xi = ginibre(3, rng), ginibre(3, rng)
    assert abs(form_eval(sf3, x, eta, xi) - np.conj(form_eval(sf3, x, xi, eta))) < 1e-12


def test_form_vanishes_against_cyclic_vector(sf3, rng):
    x = ginibre(3, rng)
    eta = ginibre(3, rng)
    assert abs(form_eval(sf3, x, eta, sf3.xi0)) < 1e-12
    assert abs(form_eval(sf3, x, sf3.xi0, eta)) < 1e-12


def test_form_is_negative_on_jordan_pairs(sf3, rng):
    # E(xi_+, xi_-) <= 0: the first Dirichlet contraction property
    x = random_hermitian(3, rng)
    for _ in range(20):
        h = random_hermitian(3, rng)
        plus, minus = jordan_decompose(sf3, h)
        val = complex(form_eval(sf3, x, plus, minus))
        assert val.real <= 1e-10
        assert abs(val.imag) < 1e-10


def test_interval_contraction_on_embedded_positives(sf3, rng):
    # E(p, xi0 - p') >= small negative for embedded order-interval pairs
    x = random_hermitian(3, rng)
    H = dirichlet_operator(sf3, x)
    w, _ = H.eigh()
    assert w[0] > -1e-11


# ---------------------------------------------------------------------------
# the two engines
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("make_kernel", [F0Kernel, lambda: CauchyKernel(scale=1.0)])
def test_engines_agree(sf2, rng, make_kernel):
    x = ginibre(2, rng)
    rel = crosscheck_engines(sf2, x, make_kernel())
    assert rel < 1e-9


def test_engines_agree_on_degenerate_spectrum(sf4, rng):
    x = ginibre(4, rng)
    rel = crosscheck_engines(sf4, x, CauchyKernel(scale=1.0))
    assert rel < 1e-8


def test_quadrature_form_route(sf2, rng):
    x = ginibre(2, rng)
    spec = DirichletSpec(x=x, kernel=CauchyKernel(scale=1.0), engine=ENGINE_QUADRATURE)
    eta, xi = ginibre(2, rng), ginibre(2, rng)
    direct = form_eval(sf2, spec, eta, xi)
    H = dirichlet_operator(sf2, x, CauchyKernel(scale=1.0))
    assert abs(direct - complex(hs_inner(eta, H.apply(xi)))) < 1e-8


def test_boundary_shift_identity(sf3, rng):
    x = ginibre(3, rng)
    assert verify_boundary_shift(sf3, x, CauchyKernel(scale=1.0)) < 1e-8


# ---------------------------------------------------------------------------
# spec validation and reporting
# ---------------------------------------------------------------------------

def test_spec_rejects_nonsquare_coupling():
    with pytest.raises(DimMismatch):
        DirichletSpec(x=np.ones((2, 3)))


def test_spec_rejects_unknown_engine(rng):
    with pytest.raises(ValueError):
        DirichletSpec(x=ginibre(2, rng), engine="magic")


def test_spec_rejects_signed_kernel_by_default(rng):
    with pytest.raises(NotAdmissible):
        DirichletSpec(x=ginibre(2, rng), kernel=CosineModulatedF0(alpha=6.0))
    # explicit escape hatch for controls
    DirichletSpec(x=ginibre(2, rng), kernel=CosineModulatedF0(alpha=6.0),
                  check_kernel=False)


def test_verification_report_is_clean(sf3, rng):
    x = random_hermitian(3, rng)
    rep = verify_dirichlet(sf3, DirichletSpec(x=x), samples=50, seed=4)
    assert rep.ok()
    assert rep.negativity_violations == 0
    assert rep.psd_min_eig > -1e-11


def test_verification_flags_signed_kernel(rng):
    # the pinned control configuration must be caught by the report
    sf = build_standard_form(np.diag([0.9, 0.1]))
    x = random_hermitian(2, np.random.default_rng(0))
    spec = DirichletSpec(x=x, kernel=CosineModulatedF0(alpha=6.0), check_kernel=False)
    rep = verify_dirichlet(sf, spec, samples=50, seed=4)
    assert not rep.ok()
    assert rep.psd_min_eig < -1e-3
