import io
import json
import subprocess
import sys
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from lrk.cli import run
from lrk.manifest import ManifestParseError, SectionConflict, dump_manifest, parse_manifest

FIX = Path(__file__).parent / "fixtures"


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def structured(*argv):
    code, out, err = call(*argv, "--format", "structured")
    return code, (json.loads(out) if out else None), err


# manifests -----------------------------------------------------------------

def test_parse_minimal_poisson():
    m = parse_manifest('[ring]\nvariables = ["x", "y"]\n\n[poisson]\nbracket."x,y" = "x"\n')
    assert m.kind == "poisson"
    assert len(m.poisson.bracket_table) == 1


def test_section_conflict():
    with pytest.raises(SectionConflict):
        parse_manifest((FIX / "conflict.toml").read_text())


def test_bad_polynomial_is_located():
    with pytest.raises(ManifestParseError) as exc:
        parse_manifest((FIX / "bad_poly.toml").read_text())
    assert (exc.value.line, exc.value.column) == (5, 20)


def test_invalid_toml_is_located():
    with pytest.raises(ManifestParseError) as exc:
        parse_manifest('[ring]\nvariables = ["x"\n')
    assert exc.value.line is not None


@pytest.mark.parametrize("name", ["aff1", "linear_plane", "trivial_plane", "so3", "action", "bent_module"])
def test_round_trip(name):
    m = parse_manifest((FIX / f"{name}.toml").read_text())
    assert parse_manifest(dump_manifest(m)) == m


coeff = st.integers(-3, 3)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(coeff, st.integers(0, 2), st.integers(0, 2)), max_size=4),
       st.sampled_from([[1, 1], [1, 2], [2, 3]]))
def test_round_trip_random_poisson(terms, weights):
    body = " + ".join(f"({c})*x^{i}*y^{j}" for c, i, j in terms) or "0"
    text = f'[ring]\nvariables = ["x", "y"]\nweights = {weights}\n\n[poisson]\nbracket."x,y" = "{body}"\n'
    m = parse_manifest(text)
    assert parse_manifest(dump_manifest(m)) == m


# commands ------------------------------------------------------------------

def test_validate_aff1():
    code, out, _ = call("validate", FIX / "aff1.toml")
    assert code == 0 and "all axioms hold" in out


def test_validate_modules():
    assert call("validate", FIX / "action.toml")[0] == 0
    code, out, _ = call("validate", FIX / "bent_module.toml")
    assert code == 1 and "NOT flat" in out


def test_modular_linear_plane():
    code, out, _ = call("modular", FIX / "linear_plane.toml")
    assert code == 0
    assert "modular_vector_field: -d/dy" in out and "doubling: PASS" in out
    code, data, _ = structured("modular", FIX / "linear_plane.toml")
    assert data["lr_modular_cocycle"] == {"dy:0": "-2"}


def test_modular_aff1():
    code, data, _ = structured("modular", FIX / "aff1.toml")
    assert code == 0 and data["class_in_h1"] == ["1"]


def test_cohomology_trivial_plane_row():
    code, data, _ = structured("cohomology", FIX / "trivial_plane.toml", "--max-degree", 2, "--max-weight", 3)
    assert code == 0
    rows = {(r["degree"], r["weight"]): r["dim"] for r in data["table"]}
    assert rows[(1, 2)] == 6
    assert not data["truncated"]
    code, out, _ = call("cohomology", FIX / "trivial_plane.toml", "--max-degree", 2, "--max-weight", 3)
    assert any(line.split() == ["1", "2", "6"] for line in out.splitlines())


def test_homology_and_duality_so3():
    code, data, _ = structured("homology", FIX / "so3.toml", "--module", "A_poisson")
    assert code == 0
    code, data, _ = structured("duality-check", FIX / "so3.toml")
    assert code == 0 and data["verdict"] == "PASS"


def test_fundamental_class_command():
    code, data, _ = structured("fundamental-class", FIX / "aff1.toml")
    assert code == 0 and data["certified"] and data["solution_space_dim"] == 1
    assert data["representative"] == {"0:e1^e2": "1"}


def test_pairing_gram_is_rational_strings():
    code, data, _ = structured("pairing", FIX / "trivial_plane.toml", "--max-weight", 2)
    assert code == 0 and data["table"]
    for row in data["table"]:
        assert row["nondegenerate"]
        assert all(isinstance(x, str) for r in row["gram"] for x in r)


@pytest.mark.parametrize("command", ["validate", "cohomology", "modular", "duality-check"])
def test_jacobi_violation_exits_one(command):
    code, out, err = call(command, FIX / "bad_jacobi.toml")
    assert code == 1
    if command != "validate":
        assert "Jacobi" in err


def test_usage_errors_exit_two(tmp_path):
    assert call("cohomology", FIX / "bad_poly.toml")[0] == 2
    assert call("validate", FIX / "conflict.toml")[0] == 2
    assert call("validate", tmp_path / "missing.toml")[0] == 2
    assert call("frobnicate", FIX / "aff1.toml")[0] == 2
    assert call("cohomology", FIX / "aff1.toml", "--max-weight", "many")[0] == 2
    assert call("cohomology", FIX / "aff1.toml", "--module", "nope")[0] == 2
    assert call("cohomology", FIX / "aff1.toml", "--module", "C")[0] == 2


def test_console_script_byte_identical():
    cmd = [sys.executable, "-m", "lrk.cli", "cohomology", str(FIX / "so3.toml"), "--format", "structured"]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second and first
