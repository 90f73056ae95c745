import io
import json
import math
import subprocess
import sys

import pytest

from deltaplates.cli import run

PAIR = '{"unit_label": "um", "plates": [{"position": 0, "ideal": "perfect_e"}, {"position": 1, "ideal": "perfect_e"}]}'
MD = ('{"plates": [{"position": 0, "lambda_e": 2, "lambda_g": 1}, '
      '{"position": 0.8, "lambda_e": 0.5, "lambda_g": 3}, {"position": 1.5, "lambda_e": 4}]}')


@pytest.fixture
def stack_file(tmp_path):
    def write(text, name="stack.json"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return write


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_energy_json(stack_file):
    code, out, _ = call("energy", "--stack", stack_file(PAIR))
    assert code == 0
    data = json.loads(out)
    assert data["quantity"] == "energy_per_area"
    assert data["value"] == pytest.approx(-math.pi ** 2 / 720, rel=1e-9)
    assert data["path"] == "KappaOnly1D"
    assert data["inputs"]["stack"]["unit_label"] == "um"


def test_energy_csv(stack_file):
    code, out, _ = call("energy", "--stack", stack_file(MD), "--format", "csv", "--rel-tol", "1e-6")
    assert code == 0
    header, row = out.splitlines()
    assert header.startswith("quantity,value")
    assert row.endswith("General2D")


def test_pressure(stack_file):
    path = stack_file(PAIR)
    code, out, _ = call("pressure", "--stack", path, "--plate", "2")
    data = json.loads(out)
    assert code == 0 and data["method"] == "derivative"
    assert data["value"] == pytest.approx(-math.pi ** 2 / 240, rel=1e-9)
    assert data["sign_convention"] == "+ = pushed toward larger z"
    code, out, err = call("pressure", "--stack", path, "--plate", "2", "--stress", "--format", "csv")
    assert code == 0 and "sign convention" in err
    assert float(out.splitlines()[1].split(",")[1]) == pytest.approx(-math.pi ** 2 / 240, rel=1e-9)


@pytest.mark.parametrize("argv", [["--plate", "1", "--stress"], ["--plate", "5"]])
def test_pressure_bad_requests(stack_file, argv):
    code, _, err = call("pressure", "--stack", stack_file(PAIR), *argv)
    assert code == 1 and err.startswith("error")


def test_sweep(stack_file):
    code, out, err = call("sweep", "--stack", stack_file(PAIR), "--gap", "1", "--from", "1", "--to", "2",
                          "--points", "3")
    assert code == 0
    assert out.count("\n") == 4
    assert "+ = pushed toward larger z" in err


def test_coeffs(stack_file):
    code, out, _ = call("coeffs", "--stack", stack_file(PAIR), "--zeta", "0.3", "--kperp", "0.4")
    data = json.loads(out)
    assert code == 0
    assert data["kappa"] == pytest.approx(0.5)
    assert [p["r"] for p in data["H"]["plates"]] == [1.0, 1.0]
    assert data["E"]["T"] == 0.0
    assert data["H"]["delta"] == pytest.approx(1 - math.exp(-1.0))


def test_diagram():
    code, out, _ = call("diagram", "--n", "4")
    assert code == 0
    assert out.splitlines() == ["Δ12·Δ23·Δ34", "Δ12·Δ24", "Δ13·Δ34", "Δ14"]


def test_diagram_too_small():
    assert call("diagram", "--n", "1")[0] == 1


def test_greens(stack_file):
    code, out, _ = call("greens", "--stack", stack_file(MD), "--mode", "E", "--zeta", "0.5", "--kperp", "1",
                        "--z", "0.3", "--zprime", "1.1")
    data = json.loads(out)
    assert code == 0 and data["region"] == [2, 2] and data["value"] > 0


def test_greens_on_plate(stack_file):
    code, _, _ = call("greens", "--stack", stack_file(MD), "--mode", "H", "--zeta", "0.5", "--kperp", "1",
                      "--z", "0.8", "--zprime", "1.1")
    assert code == 1


def test_check_passes(stack_file):
    code, out, _ = call("check", "--stack", stack_file(MD))
    assert code == 0
    assert all(line.startswith(("PASS", "SKIP")) for line in out.splitlines())


def test_exit_codes(stack_file, tmp_path):
    assert call("energy", "--stack", str(tmp_path / "missing.json"))[0] == 1
    assert call("energy", "--stack", stack_file("{oops"))[0] == 1
    assert call("energy", "--stack", stack_file('{"plates": []}'))[0] == 1
    assert call("energy", "--stack", stack_file('{"plates": [{"position": 0}]}'))[0] == 1
    assert call("energy")[0] == 1
    assert call("frobnicate")[0] == 1
    assert call("energy", "--stack", stack_file(PAIR), "--rel-tol", "-1")[0] == 1
    code, _, err = call("energy", "--stack", stack_file(PAIR), "--rel-tol", "1e-16")
    assert code == 2 and "did not converge" in err


def test_parse_error_reports_location(stack_file):
    code, _, err = call("energy", "--stack", stack_file('{"plates": [\n  {"position": }]}'))
    assert code == 1 and "line 2" in err


def test_output_is_deterministic(stack_file):
    path = stack_file(MD)
    first = call("energy", "--stack", path)
    assert call("energy", "--stack", path) == first


def test_module_entry_point(stack_file):
    proc = subprocess.run([sys.executable, "-m", "deltaplates", "diagram", "--n", "3"],
                          capture_output=True, text=True, encoding="utf-8")
    assert proc.returncode == 0
    assert proc.stdout.splitlines() == ["Δ12·Δ23", "Δ13"]
