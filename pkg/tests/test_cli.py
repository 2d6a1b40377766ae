"""Scenario files, the verification runner, and its exit codes."""

import json
import os

import numpy as np
import pytest

from mdf import SchemaError
from mdf.cli import (
    Scenario,
    corpus_paths,
    generate_scenario,
    main,
    matrix_from_json,
    matrix_to_json,
    parse_scenario,
    resolve_coefficients,
    run_scenario_object,
)
from mdf.linalg import dagger, ginibre


def _minimal(**overrides):
    base = {
        "name": "minimal",
        "dim": 2,
        "state": "tracial",
        "coefficients": [matrix_to_json(np.diag([1.0, -1.0]))],
        "kernel": "f0",
    }
    base.update(overrides)
    return base


# ---------------------------------------------------------------------------
# codecs and schema
# ---------------------------------------------------------------------------

def test_matrix_roundtrip(rng):
    A = ginibre(3, rng)
    np.testing.assert_allclose(matrix_from_json(matrix_to_json(A), "m"), A, atol=0)


def test_matrix_errors_carry_the_path():
    with pytest.raises(SchemaError, match=r"m\[0\]\[1\]"):
        matrix_from_json([[[1, 0], [2]], [[0, 0], [0, 0]]], "m")
    with pytest.raises(SchemaError, match="rows"):
        matrix_from_json([[[1, 0]]], "m", n=2)


def test_parse_accepts_the_minimal_scenario():
    s = parse_scenario(_minimal())
    assert isinstance(s, Scenario)
    assert s.suites == (
        "standard_form",
        "modular",
        "dirichlet",
        "lindblad",
        "semigroup",
        "proof_regression",
    )


@pytest.mark.parametrize(
    "patch, key",
    [
        ({"name": ""}, "name"),
        ({"dim": 1}, "dim"),
        ({"state": {"gibbs": {}}}, "state.gibbs"),
        ({"coefficients": []}, "coefficients"),
        ({"coefficients": {"random": {"kind": "magic"}}}, "coefficients.random.kind"),
        ({"kernel": {"sinc": {}}}, "kernel"),
        ({"suites": ["dirichlet", "nonsense"]}, "suites"),
        ({"tolerances": {"algebraic": -1}}, "tolerances.algebraic"),
        ({"tolerances": {"bogus": 1e-8}}, "tolerances.bogus"),
        ({"unexpected": 1}, "unexpected"),
    ],
)
def test_parse_rejections_point_at_the_key(patch, key):
    with pytest.raises(SchemaError, match=key.replace(".", r"\.").replace("[", r"\[")):
        parse_scenario(_minimal(**patch))


def test_signed_kernel_requires_the_control_flag():
    with pytest.raises(SchemaError, match="negative_control"):
        parse_scenario(_minimal(kernel={"signed_f0": {"alpha": 6.0}}))
    s = parse_scenario(
        _minimal(kernel={"signed_f0": {"alpha": 6.0}}, negative_control=True)
    )
    assert s.negative_control


def test_dim_cap_env_override(monkeypatch):
    big = _minimal(dim=40, coefficients={"random": {"kind": "hermitian", "count": 1, "seed": 0}})
    with pytest.raises(SchemaError, match="MDF_MAX_DIM"):
        parse_scenario(big)
    monkeypatch.setenv("MDF_MAX_DIM", "64")
    parse_scenario(big)  # parsing only; nothing heavy runs
    monkeypatch.setenv("MDF_MAX_DIM", "8")
    with pytest.raises(SchemaError):
        parse_scenario(big)


def test_balanced_pair_resolves_to_adjoint_pairs():
    s = parse_scenario(
        _minimal(coefficients={"random": {"kind": "balanced_pair", "count": 2, "seed": 5}})
    )
    xs = resolve_coefficients(s)
    assert len(xs) == 4
    np.testing.assert_allclose(xs[1], dagger(xs[0]), atol=0)
    np.testing.assert_allclose(xs[3], dagger(xs[2]), atol=0)


# ---------------------------------------------------------------------------
# running
# ---------------------------------------------------------------------------

def test_report_is_deterministic():
    s = parse_scenario(_minimal(suites=["standard_form", "dirichlet", "semigroup"]))
    r1 = run_scenario_object(s, seed=3)
    r2 = run_scenario_object(s, seed=3)
    r1.pop("wall_clock_s")
    r2.pop("wall_clock_s")
    assert r1 == r2  # equality of every printed digit


def test_report_carries_scenario_echo_and_metadata():
    s = parse_scenario(_minimal(suites=["standard_form"]))
    r = run_scenario_object(s)
    assert r["scenario"]["name"] == "minimal"
    assert r["seed"] == 0
    assert "version" in r
    assert r["passed"] is True


def test_unbalanced_family_gets_a_skip_note():
    s = parse_scenario(
        _minimal(
            dim=3,
            state={"density": matrix_to_json(np.diag([0.5, 0.3, 0.2]))},
            coefficients={"random": {"kind": "ginibre", "count": 1, "seed": 3}},
            suites=["lindblad"],
        )
    )
    r = run_scenario_object(s)
    assert r["passed"]
    notes = r["suites"]["lindblad"]["notes"]
    assert any("BalanceViolated" in n for n in notes)
    assert "dirichlet_decomposition" not in r["suites"]["lindblad"]["residuals"]


# ---------------------------------------------------------------------------
# command line
# ---------------------------------------------------------------------------

def test_run_exits_zero_and_writes_report(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps(_minimal(suites=["standard_form", "semigroup"])))
    out = tmp_path / "r.json"
    assert main(["run", str(p), "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["passed"]


def test_run_default_report_path(tmp_path):
    p = tmp_path / "scenario.json"
    p.write_text(json.dumps(_minimal(suites=["standard_form"])))
    assert main(["run", str(p)]) == 0
    assert (tmp_path / "scenario.report.json").exists()


def test_run_exits_one_on_failing_suite(tmp_path):
    p = tmp_path / "tight.json"
    p.write_text(
        json.dumps(
            _minimal(suites=["standard_form"], tolerances={"algebraic": 1e-300})
        )
    )
    assert main(["run", str(p)]) == 1


def test_run_exits_two_on_schema_problems(tmp_path, capsys):
    missing = tmp_path / "nope.json"
    assert main(["run", str(missing)]) == 2

    garbled = tmp_path / "garbled.json"
    garbled.write_text("{not json")
    assert main(["run", str(garbled)]) == 2

    badkernel = tmp_path / "badkernel.json"
    badkernel.write_text(json.dumps(_minimal(kernel={"sinc": {}})))
    assert main(["run", str(badkernel)]) == 2
    assert "kernel" in capsys.readouterr().err


def test_run_exits_two_on_unfaithful_state(tmp_path, capsys):
    p = tmp_path / "singular.json"
    p.write_text(
        json.dumps(
            _minimal(state={"density": matrix_to_json(np.diag([1.0, 0.0]))})
        )
    )
    assert main(["run", str(p)]) == 2
    assert "singular.json" in capsys.readouterr().err


def test_suites_flag_filters_and_validates(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps(_minimal()))
    out = tmp_path / "r.json"
    assert main(["run", str(p), "--suites", "standard_form", "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert list(report["suites"]) == ["standard_form"]
    assert main(["run", str(p), "--suites", "bogus"]) == 2


def test_generate_is_byte_stable(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    assert main(["generate", "--seed", "1", "--dim", "2", "--kind", "hermitian",
                 "--out", str(a)]) == 0
    assert main(["generate", "--seed", "1", "--dim", "2", "--kind", "hermitian",
                 "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_generated_scenario_runs_green(tmp_path):
    p = tmp_path / "g.json"
    assert main(["generate", "--seed", "2", "--dim", "2", "--kind", "balanced_pair",
                 "--out", str(p)]) == 0
    assert main(["run", str(p), "--out", str(tmp_path / "g.report.json")]) == 0


def test_generate_scenario_object_shape():
    s = generate_scenario(3, 2, "ginibre")
    parsed = parse_scenario(s)
    assert parsed.dim == 2
    xs = resolve_coefficients(parsed)
    assert len(xs) == 1


# ---------------------------------------------------------------------------
# the bundled corpus
# ---------------------------------------------------------------------------

def test_corpus_is_complete():
    names = {os.path.basename(p) for p in corpus_paths()}
    assert names == {
        "tracial_double_commutator.json",
        "gibbs_two_level.json",
        "gibbs_three_level_degenerate.json",
        "balanced_pair_cauchy.json",
        "unbalanced_single.json",
        "nonmarkovian_control.json",
    }


def test_corpus_runs_green(tmp_path):
    assert main(["corpus", "--out-dir", str(tmp_path)]) == 0
    # the tracial scenario pins the spectral gap of the double commutator
    tracial = json.loads((tmp_path / "tracial_double_commutator.report.json").read_text())
    gap = tracial["suites"]["semigroup"]["residuals"]["spectral_gap"]
    assert gap == pytest.approx(4.0, abs=1e-10)
    # the control scenario must show violations yet pass as a control
    control = json.loads((tmp_path / "nonmarkovian_control.report.json").read_text())
    assert control["passed"]
    semi = control["suites"]["semigroup"]["residuals"]
    assert semi["interval_violations"] > 0
    assert semi["positivity_violations"] > 0
    assert control["suites"]["semigroup"]["violations"]
