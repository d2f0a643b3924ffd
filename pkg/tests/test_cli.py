import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from cli_cases import CASES, render_case, run_case
from conjugacy.cli import main

GOLDEN = Path(__file__).parent / "golden"


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name, update_golden):
    path = GOLDEN / f"{name}.txt"
    text = render_case(name)
    if update_golden:
        path.write_text(text)
    assert path.exists(), f"missing golden {path.name}; run pytest --update-golden"
    assert text == path.read_text()
    assert text.startswith(f"exit: {CASES[name][1]}\n")


def test_verify_identity_chebyshev_passes():
    rc, out, _ = run_case("identity_chebyshev")
    assert rc == 0 and json.loads(out)["pass"] is True


def test_law_kf_exempt_row():
    rc, out, _ = run_case("law_kf_half")
    assert rc == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    exempt = [r for r in rows if r["exempt"] == "1"]
    assert len(exempt) == 1
    assert float(exempt[0]["points"]) == 0.0 and float(exempt[0]["multiplier"]) == 4.0
    assert {int(r["period"]) for r in rows} == set(range(1, 9))


def test_fit_bc_names_assumption():
    rc, out, err = run_case("fit_bc_bad")
    assert rc == 2 and out == ""
    assert "a_L > 1" in err


def test_law_violation_exit_code():
    # full-shift unimodal map whose multipliers are not powers of two
    spec = json.dumps({"rational": {"num": [1, 0, "-5/2", 0, "1/2"]}, "domain": [-1, 1]})
    assert main(["multiplier-law", "--map", spec, "--H", '{"num": [1, 0, -1]}', "--pmax", "2"]) == 1
    assert main(["multiplier-law", "--map", spec, "--pmax", "2"]) == 2


def test_output_file(tmp_path, capsys):
    target = tmp_path / "out.csv"
    rc = main(["orbits", "--family", "chebyshev", "--pmax", "2", "--output", str(target)])
    assert rc == 0 and capsys.readouterr().out == ""
    assert target.read_text().splitlines()[0] == "itinerary,period,points,multiplier"


def test_density_small_run():
    rc = main(["density", "--family", "logistic", "--n", "5000", "--bins", "50", "--tol", "1e-6"])
    assert rc == 1


def test_usage_errors(capsys):
    assert main(["fit-sn", "--family", "saddle-node"]) == 2
    assert "error:" in capsys.readouterr().err
    assert main(["fixed-points", "--map", "{not json"]) == 2
    with pytest.raises(SystemExit) as info:
        main(["no-such-command"])
    assert info.value.code == 2


def test_sweep_rows_sorted():
    rc, out, _ = run_case("sweep_bc")
    mus = [float(r["mu"]) for r in csv.DictReader(io.StringIO(out))]
    assert rc == 0 and mus == sorted(mus)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "conjugacy", "verify-identity", "--family", "chebyshev"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout == run_case("identity_chebyshev")[1]
