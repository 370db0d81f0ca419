import json
import subprocess
import sys

import pytest

from helmlattice.cli import main

BASE = ["--k-re", "1.2", "--k-im", "0.05"]


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_green_csv_to_stdout(capsys):
    code, out, _ = run(capsys, "green", *BASE, "--nmax", "3")
    assert code == 0
    lines = [l for l in out.splitlines() if not l.startswith("#")]
    assert lines[0].split(",")[:2] == ["m", "n"]
    assert len(lines) == 1 + 25


def test_output_is_byte_identical(tmp_path):
    paths = [tmp_path / f"{i}.json" for i in range(2)]
    for p in paths:
        assert main(["halfline", *BASE, "--phi-in", "0.6", "--nmax", "3",
                     "--format", "json", "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    data = json.loads(paths[0].read_text())
    assert data["meta"]["max_boundary_residual"] < 1e-9


@pytest.mark.parametrize("method", ["double", "single", "recursive", "oracle"])
def test_green_methods(capsys, method):
    code, _, _ = run(capsys, "green", *BASE, "--nmax", "2", "--method", method, "--box", "20")
    assert code == 0


def test_validate_halfline_passes(capsys):
    code, out, _ = run(capsys, "validate", "halfline", *BASE, "--phi-in", "0.6283185307179586",
                       "--nmax", "6")
    assert code == 0
    assert out.strip().endswith("OK")


def test_validate_flipped_branch_fails(capsys):
    code, out, _ = run(capsys, "validate", "halfline", *BASE, "--phi-in", "0.6", "--nmax", "4",
                       "--flip-branch")
    assert code == 2
    assert "FAIL" in out


def test_validate_green(capsys):
    code, out, _ = run(capsys, "validate", "green", *BASE, "--nmax", "6")
    assert code == 0, out


@pytest.mark.parametrize("args", [
    ["halfline", *BASE],                                   # missing angle
    ["green", "--k-re", "1.2", "--k-im", "-0.1"],          # lossy sign
    ["wedge", *BASE, "--phi-in", "-0.3"],                  # angle outside the quadrant
    ["green", *BASE, "--method", "wh"],                    # method of another problem
    ["green", *BASE, "--nmax", "0"],
    ["frobnicate"],
])
def test_usage_errors(capsys, args):
    with pytest.raises(SystemExit) as e:
        raise SystemExit(main(args))
    assert e.value.code == 1


def test_console_script_entry():
    r = subprocess.run([sys.executable, "-m", "helmlattice.cli", "--version"],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert r.stdout.strip()
