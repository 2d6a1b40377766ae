"""Scenario runner: JSON in, verification suites out, exit codes for CI.

A scenario file pins a state, a coupling family, and a weight kernel;
the runner executes the requested verification suites in dependency
order and writes a machine-readable report next to the input.  Exit
code 0 means every suite passed, 1 means at least one suite recorded a
failure, 2 means the input could not be used at all.

Scenario schema (JSON object):

    name          string
    dim           int (<= 32, or the MDF_MAX_DIM env override)
    state         "tracial"
                  | {"gibbs": {"hamiltonian": MATRIX, "beta": number}}
                  | {"density": MATRIX}
    coefficients  [MATRIX, ...]
                  | {"random": {"kind": "hermitian"|"ginibre"|"balanced_pair",
                                "count": int, "seed": int}}
    kernel        "f0" | {"cauchy": {"scale": s}} | {"signed_f0": {"alpha": a}}
    suites        optional subset of SUITES (default: all)
    tolerances    optional {name: positive number} overrides
    seed          optional int (sampling seed; --seed wins)
    negative_control  optional bool: the scenario is expected to break
                      Markovianity, and the semigroup suite passes only
                      if violations are observed

    MATRIX        row-major nested lists of [re, im] pairs

Scenarios are independent and reports deterministic for a fixed
scenario + seed, so a corpus can be farmed out or diffed freely.
"""

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from .dirichlet import (
    DirichletSpec,
    crosscheck_engines,
    dirichlet_operator,
    form_eval,
    split_self_adjoint,
    verify_boundary_shift,
    verify_dirichlet,
)
from .errors import (
    EngineDisagreement,
    NotAdmissible,
    NotFaithful,
    NotAState,
    SchemaError,
)
from .kernels import CauchyKernel, check_admissible, kernel_from_descriptor
from .linalg import dagger, ginibre, hs_inner, hs_norm, min_eigenvalue, random_hermitian
from .lindblad import (
    check_balance_condition,
    criterion_matches_adjoint_gap,
    decomposition_residual,
    general_f_embedding_residual,
    induced_adjoint_shifted,
    induced_operator,
    induced_operator_shifted,
    kms_symmetry_residual,
    selfadjoint_component_decomposition,
    selfadjointness_residual,
    spec_from_couplings,
    y_reconstruction_residual,
)
from .modular import apply_I0, modular_map, sigma, smear, smear_quadrature, superop_sigma, T_MAP
from .semigroup import SemigroupProbe, markovianity_report, semigroup_operator, spectral_gap
from .standard_form import (
    SuperOperator,
    build_standard_form,
    gibbs_state,
    jordan_decompose,
    project_order_interval,
    symmetric_embed,
    symmetric_unembed,
    tracial_state,
)

SUITES = (
    "standard_form",
    "modular",
    "dirichlet",
    "lindblad",
    "semigroup",
    "proof_regression",
)

DEFAULT_MAX_DIM = 32

DEFAULT_TOLERANCES = {
    "algebraic": 1e-10,
    "integral": 1e-8,
    "cross_engine": 1e-7,
    "decomposition": 1e-7,
    "interval": 1e-8,
    "psd": 1e-9,
    "negativity": 1e-9,
}

PROBE_TIMES = (0.1, 1.0, 10.0)
SUITE_SAMPLES = 100


# ---------------------------------------------------------------------------
# JSON codecs and schema validation
# ---------------------------------------------------------------------------

def matrix_to_json(A):
    """Row-major nested lists of [re, im] pairs."""
    A = np.asarray(A, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in A]


def matrix_from_json(obj, path, n=None):
    if not isinstance(obj, list) or not obj:
        raise SchemaError(f"{path}: expected a nonempty list of rows")
    rows = len(obj)
    out = np.zeros((rows, rows), dtype=complex) if n is None else np.zeros((n, n), complex)
    if n is not None and rows != n:
        raise SchemaError(f"{path}: expected {n} rows, got {rows}")
    if n is None:
        n = rows
        out = np.zeros((n, n), dtype=complex)
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != n:
            raise SchemaError(f"{path}[{i}]: expected a row of {n} entries")
        for j, entry in enumerate(row):
            if (
                not isinstance(entry, list)
                or len(entry) != 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in entry)
            ):
                raise SchemaError(f"{path}[{i}][{j}]: expected an [re, im] number pair")
            out[i, j] = complex(entry[0], entry[1])
    return out


def _plain(value):
    """Recursively convert report values to JSON-encodable plain types."""
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return matrix_to_json(value)
    return value


def max_dim():
    raw = os.environ.get("MDF_MAX_DIM")
    if raw is None:
        return DEFAULT_MAX_DIM
    try:
        return int(raw)
    except ValueError as exc:
        raise SchemaError(f"MDF_MAX_DIM: not an integer ({raw!r})") from exc


@dataclass(frozen=True, eq=False)
class Scenario:
    """Validated scenario, coefficients still symbolic when random."""

    name: str
    dim: int
    state: object
    coefficients: object
    kernel_descriptor: object
    suites: tuple
    tolerances: dict
    seed: int
    negative_control: bool
    raw: dict


def parse_scenario(obj):
    """Validate a scenario JSON object; SchemaError points at offending keys."""
    if not isinstance(obj, dict):
        raise SchemaError("scenario: expected a JSON object")
    known = {
        "name",
        "dim",
        "state",
        "coefficients",
        "kernel",
        "suites",
        "tolerances",
        "seed",
        "negative_control",
    }
    for key in obj:
        if key not in known:
            raise SchemaError(f"{key}: unknown scenario key")

    name = obj.get("name")
    if not isinstance(name, str) or not name:
        raise SchemaError("name: expected a nonempty string")

    dim = obj.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 2:
        raise SchemaError("dim: expected an integer >= 2")
    if dim > max_dim():
        raise SchemaError(f"dim: {dim} exceeds the maximum {max_dim()} (MDF_MAX_DIM)")

    state = obj.get("state")
    if state == "tracial":
        pass
    elif isinstance(state, dict) and set(state) == {"gibbs"}:
        g = state["gibbs"]
        if not isinstance(g, dict) or set(g) - {"hamiltonian", "beta"}:
            raise SchemaError("state.gibbs: expected {hamiltonian, beta}")
        matrix_from_json(g.get("hamiltonian"), "state.gibbs.hamiltonian", dim)
        beta = g.get("beta", 1.0)
        if not isinstance(beta, (int, float)) or isinstance(beta, bool) or beta <= 0:
            raise SchemaError("state.gibbs.beta: expected a positive number")
    elif isinstance(state, dict) and set(state) == {"density"}:
        matrix_from_json(state["density"], "state.density", dim)
    else:
        raise SchemaError('state: expected "tracial", {"gibbs": ...}, or {"density": ...}')

    coeffs = obj.get("coefficients")
    if isinstance(coeffs, list) and coeffs:
        for i, m in enumerate(coeffs):
            matrix_from_json(m, f"coefficients[{i}]", dim)
    elif isinstance(coeffs, dict) and set(coeffs) == {"random"}:
        r = coeffs["random"]
        if not isinstance(r, dict) or set(r) - {"kind", "count", "seed"}:
            raise SchemaError("coefficients.random: expected {kind, count, seed}")
        if r.get("kind") not in ("hermitian", "ginibre", "balanced_pair"):
            raise SchemaError(
                "coefficients.random.kind: expected hermitian | ginibre | balanced_pair"
            )
        count = r.get("count", 1)
        if not isinstance(count, int) or isinstance(count, bool) or count < 1:
            raise SchemaError("coefficients.random.count: expected a positive integer")
        rseed = r.get("seed", 0)
        if not isinstance(rseed, int) or isinstance(rseed, bool):
            raise SchemaError("coefficients.random.seed: expected an integer")
    else:
        raise SchemaError(
            'coefficients: expected a list of matrices or {"random": {...}}'
        )

    negative_control = obj.get("negative_control", False)
    if not isinstance(negative_control, bool):
        raise SchemaError("negative_control: expected a boolean")

    kernel_desc = obj.get("kernel", "f0")
    try:
        kernel = kernel_from_descriptor(kernel_desc)
    except (NotAdmissible, TypeError, KeyError) as exc:
        raise SchemaError(f"kernel: {exc}") from exc
    if not negative_control and not check_admissible(kernel).granted:
        raise SchemaError(
            "kernel: not admissible; signed weights require negative_control: true"
        )

    suites = obj.get("suites", list(SUITES))
    if not isinstance(suites, list) or not suites:
        raise SchemaError("suites: expected a nonempty list")
    for s in suites:
        if s not in SUITES:
            raise SchemaError(f"suites: unknown suite {s!r} (known: {', '.join(SUITES)})")
    suites = tuple(s for s in SUITES if s in suites)  # dependency order

    tolerances = dict(DEFAULT_TOLERANCES)
    overrides = obj.get("tolerances", {})
    if not isinstance(overrides, dict):
        raise SchemaError("tolerances: expected an object")
    for key, value in overrides.items():
        if key not in DEFAULT_TOLERANCES:
            raise SchemaError(f"tolerances.{key}: unknown tolerance")
        if not isinstance(value, (int, float)) or isinstance(value, bool) or value <= 0:
            raise SchemaError(f"tolerances.{key}: expected a positive number")
        tolerances[key] = float(value)

    seed = obj.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise SchemaError("seed: expected an integer")

    return Scenario(
        name=name,
        dim=dim,
        state=state,
        coefficients=coeffs,
        kernel_descriptor=kernel_desc,
        suites=suites,
        tolerances=tolerances,
        seed=seed,
        negative_control=negative_control,
        raw=obj,
    )


def build_state(scenario):
    if scenario.state == "tracial":
        return tracial_state(scenario.dim)
    if "gibbs" in scenario.state:
        g = scenario.state["gibbs"]
        h = matrix_from_json(g["hamiltonian"], "state.gibbs.hamiltonian", scenario.dim)
        return gibbs_state(h, float(g.get("beta", 1.0)))
    rho = matrix_from_json(scenario.state["density"], "state.density", scenario.dim)
    return build_standard_form(rho)


def resolve_coefficients(scenario):
    coeffs = scenario.coefficients
    if isinstance(coeffs, list):
        return [
            matrix_from_json(m, f"coefficients[{i}]", scenario.dim)
            for i, m in enumerate(coeffs)
        ]
    r = coeffs["random"]
    rng = np.random.default_rng(r.get("seed", 0))
    kind = r["kind"]
    count = r.get("count", 1)
    out = []
    for _ in range(count):
        if kind == "hermitian":
            out.append(random_hermitian(scenario.dim, rng))
        elif kind == "ginibre":
            out.append(ginibre(scenario.dim, rng))
        else:  # balanced_pair
            g = ginibre(scenario.dim, rng)
            out.extend([g, dagger(g)])
    return out


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------

def _suite_standard_form(sf, xs, kernel, tol, seed):
    rng = np.random.default_rng(seed)
    res = {}
    res["state_min_eigenvalue"] = float(sf.eigenvalues[-1])
    res["xi0_normalization"] = abs(hs_norm(sf.xi0) - 1.0)
    res["j_fixes_xi0"] = hs_norm(dagger(sf.xi0) - sf.xi0)
    res["flow_fixes_xi0"] = hs_norm(sigma(sf, sf.xi0, -1.0j) - sf.xi0)
    worst_embed = 0.0
    worst_jordan = 0.0
    worst_proj = 0.0
    worst_member = 0.0
    for _ in range(20):
        a = ginibre(sf.dim, rng)
        worst_embed = max(
            worst_embed, hs_norm(symmetric_unembed(sf, symmetric_embed(sf, a)) - a)
        )
        h = random_hermitian(sf.dim, rng)
        plus, minus = jordan_decompose(sf, h)
        worst_jordan = max(
            worst_jordan,
            hs_norm((plus - minus) - h),
            abs(complex(hs_inner(plus, minus))),
        )
        p = project_order_interval(sf, h)
        worst_proj = max(worst_proj, hs_norm(project_order_interval(sf, p) - p))
        worst_member = max(
            worst_member, -min_eigenvalue(p), -min_eigenvalue(sf.xi0 - p)
        )
    res["embedding_roundtrip"] = worst_embed
    res["jordan_split"] = worst_jordan
    res["interval_projection_idempotent"] = worst_proj
    res["interval_projection_membership"] = worst_member
    passed = (
        res["state_min_eigenvalue"] > 0
        and res["xi0_normalization"] < tol["algebraic"]
        and res["j_fixes_xi0"] < tol["algebraic"]
        and res["flow_fixes_xi0"] < tol["algebraic"]
        and res["embedding_roundtrip"] < tol["integral"]
        and res["jordan_split"] < tol["algebraic"]
        and res["interval_projection_idempotent"] < tol["integral"]
        and res["interval_projection_membership"] < tol["integral"]
    )
    return {"passed": bool(passed), "residuals": res, "notes": []}


def _suite_modular(sf, xs, kernel, tol, seed):
    rng = np.random.default_rng(seed)
    res = {}
    worst_group = 0.0
    worst_star = 0.0
    worst_inverse = 0.0
    worst_j = 0.0
    for _ in range(10):
        a = ginibre(sf.dim, rng)
        s_t = complex(rng.normal(), 0.1 * rng.normal())
        z_t = complex(rng.normal(), 0.1 * rng.normal())
        lhs = sigma(sf, sigma(sf, a, s_t), z_t)
        worst_group = max(worst_group, hs_norm(lhs - sigma(sf, a, s_t + z_t)) / hs_norm(a))
        worst_star = max(
            worst_star,
            hs_norm(sigma(sf, dagger(a), np.conj(z_t)) - dagger(sigma(sf, a, z_t)))
            / hs_norm(a),
        )
        worst_inverse = max(
            worst_inverse,
            hs_norm(modular_map(sf, apply_I0(sf, a), T_MAP) - a) / hs_norm(a),
        )
        K = SuperOperator.commutant_j(a)
        lhs_op = superop_sigma(sf, K, z_t)
        rhs_op = SuperOperator.commutant_j(sigma(sf, a, np.conj(z_t)))
        worst_j = max(worst_j, (lhs_op - rhs_op).norm() / hs_norm(a))
    res["flow_group_law"] = worst_group
    res["flow_star_compatibility"] = worst_star
    res["smear_inverts_T"] = worst_inverse
    res["flow_commutant_compatibility"] = worst_j
    worst_smear = 0.0
    for x in xs:
        exact = smear(sf, x, kernel)
        quad = smear_quadrature(sf, x, kernel)
        worst_smear = max(worst_smear, hs_norm(exact - quad) / max(hs_norm(exact), 1e-300))
    res["smear_exact_vs_quadrature"] = worst_smear
    passed = (
        worst_group < tol["algebraic"]
        and worst_star < tol["algebraic"]
        and worst_inverse < tol["algebraic"]
        and worst_j < tol["algebraic"]
        and worst_smear < tol["integral"]
    )
    return {"passed": bool(passed), "residuals": res, "notes": []}


def _suite_dirichlet(sf, xs, kernel, tol, seed, negative_control=False):
    notes = []
    res = {}
    violations = []
    check_kernel = not negative_control
    reports = []
    for i, x in enumerate(xs):
        spec = DirichletSpec(x=x, kernel=kernel, check_kernel=check_kernel)
        rep = verify_dirichlet(sf, spec, samples=SUITE_SAMPLES, seed=seed + i)
        reports.append(rep)
        for field in (
            "h_xi0_residual",
            "j_real_residual",
            "conj_form_residual",
            "selfadjoint_defect",
            "cone_form_residual",
        ):
            res[f"x{i}_{field}"] = getattr(rep, field)
        res[f"x{i}_psd_min_eig"] = rep.psd_min_eig
        res[f"x{i}_negativity_violations"] = rep.negativity_violations
        if rep.negativity_violations:
            violations.append(
                {"coefficient": i, "kind": "form_negativity", "count": rep.negativity_violations}
            )
    worst_split = 0.0
    worst_form = 0.0
    rng = np.random.default_rng(seed)
    for i, x in enumerate(xs):
        H = dirichlet_operator(sf, x, kernel, check_kernel=check_kernel)
        x1, x2 = split_self_adjoint(x)
        H1 = dirichlet_operator(sf, x1, kernel, check_kernel=check_kernel)
        H2 = dirichlet_operator(sf, x2, kernel, check_kernel=check_kernel)
        worst_split = max(worst_split, (H - 0.5 * (H1 + H2)).norm())
        eta, xi = ginibre(sf.dim, rng), ginibre(sf.dim, rng)
        e_direct = form_eval(
            sf,
            DirichletSpec(x=x, kernel=kernel, check_kernel=check_kernel),
            eta,
            xi,
        )
        worst_form = max(worst_form, abs(e_direct - complex(hs_inner(eta, H.apply(xi)))))
    res["split_identity"] = worst_split
    res["form_matches_operator"] = worst_form
    cross = None
    if sf.dim <= 4:
        try:
            cross = max(
                crosscheck_engines(sf, x, kernel, check_kernel=check_kernel) for x in xs
            )
            res["engine_crosscheck"] = cross
        except EngineDisagreement as exc:
            res["engine_crosscheck"] = float("inf")
            violations.append({"kind": "engine_disagreement", "detail": str(exc)})
    else:
        notes.append("engine cross-check skipped (dim > 4: quadrature engine is priced out)")
    if isinstance(kernel, CauchyKernel):
        shift = max(verify_boundary_shift(sf, x, kernel) for x in xs)
        res["boundary_shift_identity"] = shift
    structure_ok = all(
        rep.h_xi0_residual < tol["integral"]
        and rep.j_real_residual < tol["integral"]
        and rep.selfadjoint_defect < tol["integral"]
        for rep in reports
    )
    markov_ok = all(
        rep.negativity_violations == 0
        and rep.psd_min_eig > -tol["psd"]
        and rep.cone_form_residual < tol["integral"]
        for rep in reports
    )
    shared_ok = (
        worst_split < tol["integral"]
        and worst_form < tol["integral"]
        and (cross is None or cross < tol["cross_engine"])
        and res.get("boundary_shift_identity", 0.0) < tol["integral"]
    )
    if negative_control:
        # the signed weight must keep the structure and is allowed (not
        # required, at this suite's level) to break Markovianity
        passed = structure_ok and shared_ok
        notes.append("negative control: Markovianity fields are informational here")
    else:
        passed = structure_ok and markov_ok and shared_ok
    return {"passed": bool(passed), "residuals": res, "notes": notes, "violations": violations}


def _suite_lindblad(sf, xs, kernel, tol, seed):
    notes = []
    res = {}
    balance = check_balance_condition(sf, xs, seed=seed)
    res["balance_condition"] = balance.condition_residual
    res["balance_lemma"] = balance.lemma_residual
    res["balance_equivalent"] = balance.equivalent
    spec = spec_from_couplings(sf, xs, Q="auto")
    sa = selfadjointness_residual(sf, spec)
    res["selfadjointness_operator"] = sa.operator_residual
    res["selfadjointness_criterion"] = sa.criterion_residual
    res["selfadjointness_consistent"] = sa.consistent
    res["criterion_matches_adjoint_gap"] = criterion_matches_adjoint_gap(sf, spec)
    H = induced_operator(sf, spec)
    res["assembly_conjugation_vs_shifted"] = (H - induced_operator_shifted(sf, spec)).norm()
    res["kms_symmetry"] = kms_symmetry_residual(sf, spec, samples=25, seed=seed)
    res["kms_consistent"] = (res["kms_symmetry"] < tol["integral"]) == (
        sa.operator_residual < tol["integral"]
    )
    if balance.balanced:
        res["dirichlet_decomposition"] = decomposition_residual(sf, xs)
        _, comp_res = selfadjoint_component_decomposition(sf, xs)
        res["component_decomposition"] = comp_res
        res["y_reconstruction"] = y_reconstruction_residual(sf, xs)
        balanced_ok = (
            res["dirichlet_decomposition"] < tol["decomposition"]
            and res["component_decomposition"] < tol["decomposition"]
            and res["y_reconstruction"] < tol["integral"]
            and sa.operator_residual < tol["integral"]
        )
    else:
        notes.append(
            "decomposition identities skipped: BalanceViolated "
            f"(condition residual {balance.condition_residual:.3e})"
        )
        balanced_ok = True
    if isinstance(kernel, CauchyKernel):
        worst = max(
            general_f_embedding_residual(sf, x, kernel, samples=20, seed=seed) for x in xs
        )
        res["general_weight_embedding"] = worst
        balanced_ok = balanced_ok and worst < tol["decomposition"]
    passed = (
        res["balance_equivalent"]
        and res["selfadjointness_consistent"]
        and res["kms_consistent"]
        and res["criterion_matches_adjoint_gap"] < tol["algebraic"]
        and res["assembly_conjugation_vs_shifted"] < tol["algebraic"]
        and balanced_ok
    )
    return {"passed": bool(passed), "residuals": res, "notes": notes}


def _suite_semigroup(sf, xs, kernel, tol, seed, negative_control=False):
    notes = []
    res = {}
    violations = []
    check_kernel = not negative_control
    H = None
    for x in xs:
        Hk = dirichlet_operator(sf, x, kernel, check_kernel=check_kernel)
        H = Hk if H is None else H + Hk
    probe = SemigroupProbe(H=H, times=PROBE_TIMES, samples=SUITE_SAMPLES, seed=seed)
    rep = markovianity_report(sf, probe)
    res["interval_violations"] = rep.interval_violations
    res["extreme_violations"] = rep.extreme_violations
    res["positivity_violations"] = rep.positivity_violations
    res["form_violations"] = rep.form_violations
    res["worst_interval_margin"] = rep.worst_interval_margin
    res["worst_positivity_margin"] = rep.worst_positivity_margin
    res["worst_form_gap"] = rep.worst_form_gap
    res["xi0_invariance"] = rep.xi0_invariance_max
    res["j_real"] = rep.j_real_max
    for w in rep.witnesses:
        violations.append({"kind": w[0], "t": w[1], "sample": w[2], "margin": w[3]})
    gap, kernel_dim = spectral_gap(H)
    res["spectral_gap"] = gap
    res["kernel_dimension"] = kernel_dim
    # semigroup law and symmetry at one time pair
    rng = np.random.default_rng(seed)
    Ts, Tt, Tst = (semigroup_operator(H, t) for t in (0.3, 0.9, 1.2))
    res["semigroup_law"] = (Tst - Ts @ Tt).norm()
    a, b = ginibre(sf.dim, rng), ginibre(sf.dim, rng)
    res["semigroup_symmetry"] = abs(
        complex(hs_inner(Ts.apply(a), b)) - complex(hs_inner(a, Ts.apply(b)))
    )
    law_ok = res["semigroup_law"] < 1e-9 and res["semigroup_symmetry"] < 1e-9
    if negative_control:
        passed = law_ok and not rep.markovian
        if rep.markovian:
            notes.append("negative control FAILED to produce any violation")
        else:
            notes.append("negative control produced violations as designed")
    else:
        passed = law_ok and rep.markovian
    return {"passed": bool(passed), "residuals": res, "notes": notes, "violations": violations}


def _suite_proof_regression(sf, xs, kernel, tol, seed):
    """The identity chain behind the theorems, as pure regressions."""
    notes = []
    res = {}
    spec = spec_from_couplings(sf, xs, Q="auto")
    H = induced_operator(sf, spec)
    res["conjugation_vs_shifted"] = (H - induced_operator_shifted(sf, spec)).norm()
    res["adjoint_assembly_vs_dagger"] = float(
        np.linalg.norm(
            induced_adjoint_shifted(sf, spec).mat - dagger(induced_operator_shifted(sf, spec).mat),
            2,
        )
    )
    res["criterion_matches_adjoint_gap"] = criterion_matches_adjoint_gap(sf, spec)
    balance = check_balance_condition(sf, xs, seed=seed)
    if balance.balanced:
        res["dirichlet_decomposition"] = decomposition_residual(sf, xs)
    else:
        notes.append("decomposition regression skipped (family unbalanced)")
    if isinstance(kernel, CauchyKernel):
        res["boundary_shift_identity"] = max(
            verify_boundary_shift(sf, x, kernel) for x in xs
        )
        res["general_weight_embedding"] = max(
            general_f_embedding_residual(sf, x, kernel, samples=20, seed=seed)
            for x in xs
        )
    passed = (
        res["conjugation_vs_shifted"] < tol["algebraic"]
        and res["adjoint_assembly_vs_dagger"] < tol["algebraic"]
        and res["criterion_matches_adjoint_gap"] < tol["algebraic"]
        and res.get("dirichlet_decomposition", 0.0) < tol["decomposition"]
        and res.get("boundary_shift_identity", 0.0) < tol["integral"]
        and res.get("general_weight_embedding", 0.0) < tol["decomposition"]
    )
    return {"passed": bool(passed), "residuals": res, "notes": notes}


_SUITE_RUNNERS = {
    "standard_form": _suite_standard_form,
    "modular": _suite_modular,
    "dirichlet": _suite_dirichlet,
    "lindblad": _suite_lindblad,
    "semigroup": _suite_semigroup,
    "proof_regression": _suite_proof_regression,
}


# ---------------------------------------------------------------------------
# Orchestration
# ---------------------------------------------------------------------------

def run_scenario_object(scenario, seed=None):
    """Execute a parsed scenario; returns the report dict."""
    actual_seed = scenario.seed if seed is None else int(seed)
    sf = build_state(scenario)
    xs = resolve_coefficients(scenario)
    kernel = kernel_from_descriptor(scenario.kernel_descriptor)
    started = time.perf_counter()
    suites = {}
    for name in scenario.suites:
        runner = _SUITE_RUNNERS[name]
        kwargs = {}
        if name in ("dirichlet", "semigroup"):
            kwargs["negative_control"] = scenario.negative_control
        suites[name] = runner(sf, xs, kernel, scenario.tolerances, actual_seed, **kwargs)
    report = {
        "scenario": scenario.raw,
        "version": __version__,
        "seed": actual_seed,
        "wall_clock_s": time.perf_counter() - started,
        "suites": suites,
        "passed": all(s["passed"] for s in suites.values()),
    }
    return _plain(report)


def run_scenario(path, out=None, seed=None, suites=None):
    """File-level runner: parse, execute, write report. Returns (report, exit code)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        return None, 2
    except json.JSONDecodeError as exc:
        print(f"error: {path} is not valid JSON: {exc}", file=sys.stderr)
        return None, 2
    try:
        scenario = parse_scenario(obj)
        if suites:
            unknown = [s for s in suites if s not in SUITES]
            if unknown:
                raise SchemaError(f"--suites: unknown suite {unknown[0]!r}")
            scenario = Scenario(
                name=scenario.name,
                dim=scenario.dim,
                state=scenario.state,
                coefficients=scenario.coefficients,
                kernel_descriptor=scenario.kernel_descriptor,
                suites=tuple(s for s in SUITES if s in suites),
                tolerances=scenario.tolerances,
                seed=scenario.seed,
                negative_control=scenario.negative_control,
                raw=scenario.raw,
            )
        report = run_scenario_object(scenario, seed=seed)
    except (SchemaError, NotAState, NotFaithful, NotAdmissible) as exc:
        print(f"error: {scenario_context(path)}: {exc}", file=sys.stderr)
        return None, 2
    out_path = out or default_report_path(path)
    write_report(report, out_path)
    print_summary(report, out_path)
    return report, 0 if report["passed"] else 1


def scenario_context(path):
    return os.path.basename(str(path))


def default_report_path(path):
    base, _ = os.path.splitext(str(path))
    return base + ".report.json"


def write_report(report, out_path):
    """Write atomically so a crashed run never leaves a half report."""
    tmp = f"{out_path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, out_path)


def print_summary(report, out_path):
    name = report["scenario"].get("name", "?")
    verdict = "PASS" if report["passed"] else "FAIL"
    print(f"{name}: {verdict} ({report['wall_clock_s']:.2f}s) -> {out_path}")
    for suite, data in report["suites"].items():
        mark = "ok " if data["passed"] else "FAIL"
        worst = ""
        numeric = {
            k: v
            for k, v in data["residuals"].items()
            if isinstance(v, float) and np.isfinite(v)
        }
        if numeric:
            key = max(numeric, key=lambda k: abs(numeric[k]))
            worst = f"  worst {key} = {numeric[key]:.3e}"
        print(f"  [{mark}] {suite}{worst}")
        for note in data.get("notes", []):
            print(f"        note: {note}")


# ---------------------------------------------------------------------------
# Generation and corpus
# ---------------------------------------------------------------------------

def generate_scenario(seed, dim, kind):
    """A reproducible random scenario as a plain dict."""
    if kind not in ("hermitian", "ginibre", "balanced_pair"):
        raise SchemaError(f"kind: unknown generator kind {kind!r}")
    if dim > max_dim():
        raise SchemaError(f"dim: {dim} exceeds the maximum {max_dim()}")
    rng = np.random.default_rng(seed)
    g = ginibre(dim, rng)
    rho = g @ dagger(g) + 0.1 * np.eye(dim)
    rho /= np.trace(rho).real
    return {
        "name": f"generated_{kind}_n{dim}_seed{seed}",
        "dim": dim,
        "state": {"density": matrix_to_json(rho)},
        "coefficients": {"random": {"kind": kind, "count": 1, "seed": seed}},
        "kernel": "f0",
        "seed": seed,
    }


def corpus_dir():
    return os.path.join(os.path.dirname(__file__), "corpus")


def corpus_paths():
    d = corpus_dir()
    return sorted(
        os.path.join(d, f) for f in os.listdir(d) if f.endswith(".json")
    )


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="mdf",
        description="verification suites for modular Dirichlet forms and "
        "detailed-balance generators",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario file")
    p_run.add_argument("file")
    p_run.add_argument("--out", help="report path (default: beside the input)")
    p_run.add_argument("--seed", type=int, help="override the sampling seed")
    p_run.add_argument("--suites", help="comma-separated subset of suites")

    p_gen = sub.add_parser("generate", help="emit a reproducible random scenario")
    p_gen.add_argument("--seed", type=int, required=True)
    p_gen.add_argument("--dim", type=int, required=True)
    p_gen.add_argument(
        "--kind", required=True, choices=("hermitian", "ginibre", "balanced_pair")
    )
    p_gen.add_argument("--out", help="output path (default: <name>.json in cwd)")

    p_corpus = sub.add_parser("corpus", help="run every bundled scenario")
    p_corpus.add_argument("--out-dir", help="directory for the reports")

    args = parser.parse_args(argv)

    if args.command == "run":
        suites = args.suites.split(",") if args.suites else None
        _, code = run_scenario(args.file, out=args.out, seed=args.seed, suites=suites)
        return code

    if args.command == "generate":
        try:
            scenario = generate_scenario(args.seed, args.dim, args.kind)
        except SchemaError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        out = args.out or f"{scenario['name']}.json"
        with open(out, "w", encoding="utf-8") as fh:
            json.dump(scenario, fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"wrote {out}")
        return 0

    # corpus
    out_dir = args.out_dir
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    worst = 0
    for path in corpus_paths():
        out = None
        if out_dir:
            out = os.path.join(out_dir, os.path.basename(default_report_path(path)))
        _, code = run_scenario(path, out=out)
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
