import json
import math
import os
import subprocess
import sys

import pytest

from nevlab.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, main, parse_complex_arg, parse_psi
from nevlab.funcalg import Const, Poly, Rational

GAMMA = '{"kind": "gamma"}'
DOUBLE_EXP = '{"kind": "exp", "inner": {"kind": "exp", "inner": {"kind": "z"}}}'


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_characteristic_csv(capsys, tmp_path):
    path = tmp_path / "gamma.json"
    path.write_text(GAMMA)
    code, out, _ = run(capsys, "characteristic", "-f", str(path), "--rmin", "10", "--rmax", "100",
                       "--per-decade", "4")
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0] == "r,m,N,T,quadError,nodes" and len(lines) == 6


def test_nudge_note(capsys):
    code, _, err = run(capsys, "characteristic", "-f", GAMMA, "--rmin", "1", "--rmax", "10",
                       "--per-decade", "4")
    assert code == EXIT_OK
    assert "moved to" in err


def test_order(capsys):
    code, out, _ = run(capsys, "order", "-f", '{"kind": "exp", "inner": {"kind": "poly", "coeffs": [0, 0, 1]}}',
                       "--rmin", "5", "--rmax", "20")
    assert code == EXIT_OK
    d = json.loads(out)
    assert d["order"] == 2 and abs(d["fitted"] - 2) < 0.1


def test_verify_char_shift_gamma(capsys):
    code, out, _ = run(capsys, "verify", "--theorem", "char-shift", "-f", GAMMA, "--eta", "1",
                       "--rmax", "100")
    assert code == EXIT_OK
    assert json.loads(out)["verdict"] == "pass"


def test_verify_counterexample(capsys):
    code, out, _ = run(capsys, "verify", "--theorem", "counterexample", "--rmax", "1000")
    assert code == EXIT_OK
    rep = json.loads(out)
    assert len(rep["samples"]) == 50 and all(s["rhs"] >= 1 for s in rep["samples"])


def test_failing_fixture_exits_2(capsys):
    code, out, err = run(capsys, "verify", "--theorem", "quotient-proximity", "-f", DOUBLE_EXP,
                         "--eta", str(math.log(2)), "--rmin", "2", "--rmax", "4", "--per-decade", "8")
    assert code == EXIT_FAIL
    assert json.loads(out)["verdict"] == "fail"
    assert "verdict: fail" in err


def test_inconclusive_exits_0(capsys):
    code, out, err = run(capsys, "verify", "--theorem", "pointwise", "-f", GAMMA, "--gamma", "1.5")
    assert code == EXIT_OK
    assert json.loads(out)["verdict"] == "inconclusive"
    assert "inconclusive" in err


@pytest.mark.parametrize("argv", [
    ["verify", "--theorem", "char-shift", "-f", '{"kind": "product", "factors": [{"kind": "gamma"}, {"kind": "bogus"}]}'],
    ["verify", "--theorem", "char-shift", "-f", "/nonexistent/f.json"],
    ["verify", "--theorem", "char-shift", "-f", GAMMA, "--rmin", "0.1"],
    ["verify", "--theorem", "char-shift", "-f", GAMMA, "--per-decade", "2"],
    ["verify", "--theorem", "char-shift", "-f", GAMMA, "--rmin", "50", "--rmax", "20"],
    ["verify", "--theorem", "char-shift"],
    ["verify", "--theorem", "no-such-theorem"],
    ["verify", "--theorem", "mohonko", "-f", GAMMA],
    ["whittaker", "--psi", "exp(z)"],
    ["whittaker", "--psi", "z*w"],
    ["whittaker", "--psi", "0"],
    ["cartan", "--points", "[]"],
    ["analyze-eq", "--equation", '{"coeffs": [{"kind": "gamma"}, {"kind": "const", "c": 1}]}'],
])
def test_input_errors_exit_1(capsys, argv):
    try:
        code = main(argv)
    except SystemExit as exc:  # argparse usage errors
        code = exc.code
    _, err = capsys.readouterr()
    assert code == EXIT_INPUT
    assert "error:" in err


def test_spec_error_names_node(capsys):
    _, _, err = run(capsys, "order", "-f",
                    '{"kind": "product", "factors": [{"kind": "gamma"}, {"kind": "bogus"}]}')
    assert "malformed function spec" in err and "$.factors[1].kind" in err


def test_whittaker(capsys):
    code, out, _ = run(capsys, "whittaker", "--psi", "z", "--check-samples", "100")
    assert code == EXIT_OK
    d = json.loads(out)
    assert d["a"] == [0.0, 0.0] and d["zeros"] == [[0.0, 0.0]] and d["poles"] == []
    assert d["residual"] <= 1e-9 and d["verdict"] == "pass"


def test_whittaker_tolerance_violation(capsys):
    code, out, _ = run(capsys, "whittaker", "--psi", "3*(z-1)/(z+2)", "--check-samples", "20",
                       "--tolerance", "0")
    d = json.loads(out)
    assert (code, d["verdict"]) == ((EXIT_FAIL, "fail") if d["residual"] > 0 else (EXIT_OK, "pass"))


def test_analyze_eq(capsys):
    eq = {"coeffs": [{"kind": "poly", "coeffs": [1, 1]}, {"kind": "z"},
                     {"kind": "poly", "coeffs": [0, -1, 1]}, {"kind": "poly", "coeffs": [0, 2, -3, 1]}],
          "form": "delta", "lagged": True}
    code, out, _ = run(capsys, "analyze-eq", "--equation", json.dumps(eq))
    assert code == EXIT_OK
    d = json.loads(out)
    assert d["lowerBound"] == "no-bound" and d["shiftDegrees"] == [3, 3, 3, 3]


def test_cartan_points_and_function(capsys):
    code, out, _ = run(capsys, "cartan", "--points", "[[0, 0], [10, 0]]", "--B", "1")
    assert code == EXIT_OK
    d = json.loads(out)
    assert sum(x["radius"] for x in d["disks"]) == pytest.approx(2.0)
    assert "intervals" in d
    code, out, _ = run(capsys, "cartan", "-f", GAMMA, "--rmax", "10", "--B", "0.5")
    assert code == EXIT_OK and len(json.loads(out)["disks"]) >= 1


@pytest.mark.parametrize("theorem", ["lemma-calpha", "lemma-circle-average", "cartan-lemma"])
def test_randomized_checks_pass(capsys, theorem):
    code, out, _ = run(capsys, "verify", "--theorem", theorem, "--trials", "50", "--samples", "100")
    assert code == EXIT_OK, out


@pytest.mark.parametrize("fixture", ["exp-pi", "square", "tan", "product-exp"])
def test_ahh_fixture(capsys, fixture):
    code, _, _ = run(capsys, "verify", "--theorem", "ahh-degree", "--fixture", fixture,
                     "--rmin", "5", "--rmax", "40", "--per-decade", "4")
    assert code == EXIT_OK


def test_deterministic_output(tmp_path, capsys):
    outs = []
    for k in range(2):
        p = tmp_path / f"r{k}.json"
        main(["verify", "--theorem", "cartan-lemma", "--trials", "30", "--samples", "50",
              "--seed", "7", "-o", str(p)])
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]
    p = tmp_path / "r2.json"
    main(["verify", "--theorem", "cartan-lemma", "--trials", "30", "--samples", "50",
          "--seed", "8", "-o", str(p)])
    assert p.read_bytes() != outs[0]


def test_atomic_write_leaves_no_temp_files(tmp_path, capsys):
    out = tmp_path / "curve.csv"
    out.write_text("old")
    assert main(["characteristic", "-f", GAMMA, "--rmin", "10", "--rmax", "20", "--per-decade", "4",
                 "-o", str(out)]) == EXIT_OK
    assert out.read_text().startswith("r,m,N,T")
    assert os.listdir(tmp_path) == ["curve.csv"]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "nevlab", "whittaker", "--psi", "2"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)["a"][0] == pytest.approx(math.log(2))


def test_parse_helpers():
    assert parse_complex_arg("1+2i") == 1 + 2j
    assert parse_complex_arg("[0.5, -1]") == 0.5 - 1j
    assert parse_complex_arg(3) == 3
    assert isinstance(parse_psi("2"), Const)
    assert isinstance(parse_psi("z**2 + 1"), Poly)
    psi = parse_psi("3*(z-1)/(z+2)")
    assert isinstance(psi, Rational)
    assert psi.divisor(5).same_as(Rational.from_roots([1], [-2], 3).divisor(5))
