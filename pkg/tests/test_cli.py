import csv
import json
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest

from msylvester import cli
from msylvester import operator as op
from msylvester.multipole import Skeleton, skeleton_to_harmonic
from msylvester.spinstate import SpinState
from msylvester.symtensor import SymTensor, delta, from_vectors


def write(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def files(tmp_path, rng):
    skel = Skeleton.from_axes(rng.normal(size=(3, 3)), 1.5, -1)
    h = skeleton_to_harmonic(skel)
    psi = SpinState(3, rng.normal(size=4) + 1j * rng.normal(size=4))
    obs = op.observable_from_polynomials([SymTensor(d, rng.normal(size=(d + 1) * (d + 2) // 2)) for d in range(4)])
    return {
        "skeleton": skel,
        "tensor": write(tmp_path / "tensor.json", SymTensor(4, rng.normal(size=15)).to_json()),
        "harmonic": write(tmp_path / "harmonic.json", h.to_json()),
        "traceful": write(tmp_path / "traceful.json", delta(1).to_float().to_json()),
        "state": write(tmp_path / "state.json", psi.to_json()),
        "observable": write(tmp_path / "obs.json", obs.to_json()),
        "high": write(tmp_path / "high.json", op.classical_from_polynomial(SymTensor(5, rng.normal(size=21))).to_json()),
        "zero_state": write(tmp_path / "zero.json", {"two_j": 1, "amplitudes": [{"re": 0}, {"re": 0}]}),
        "big": write(tmp_path / "big.json", {"rank": 17, "coeffs": []}),
        "sectorial": write(tmp_path / "sect.json", from_vectors([[1, 1j, 0]] * 2).to_json()),
        "garbage": str((tmp_path / "garbage.json").write_text("{not json") and tmp_path / "garbage.json"),
    }


# ------------------------------------------------------------------- commands

def test_decompose(files, tmp_path, capsys):
    out = tmp_path / "out.json"
    assert cli.main(["decompose", files["tensor"], "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert [c["order"] for c in doc["components"]] == [4, 2, 0]
    assert doc["residual"] < 1e-12
    assert "components" in capsys.readouterr().err


def test_decompose_stdout(files, capsys):
    assert cli.main(["decompose", files["tensor"]]) == 0
    assert json.loads(capsys.readouterr().out)["residual"] < 1e-12


def test_sylvester_with_circles(files, tmp_path):
    out = tmp_path / "skel.json"
    assert cli.main(["sylvester", files["harmonic"], "--circles", "360", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    ref = files["skeleton"]
    assert doc["order"] == 3 and doc["sign"] == ref.sign
    assert doc["scale"] == pytest.approx(ref.scale, rel=1e-8)
    np.testing.assert_allclose(np.abs(np.array(doc["axes"]) @ ref.axes.T).max(axis=1), 1, atol=1e-8)
    with open(tmp_path / "skel.circles.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["circle_index", "x", "y", "z"]
    assert len(rows) - 1 == 360 * 3


def test_expect_all_methods(files, tmp_path):
    out = tmp_path / "e.json"
    assert cli.main(["expect", files["state"], files["observable"], "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    vals = doc["values"]
    assert set(vals) == {"tensor", "skeleton", "oracle"}
    assert doc["max_delta"] < 1e-9
    assert vals["tensor"] == pytest.approx(vals["oracle"], abs=1e-9)


def test_expect_method_filter(files, capsys):
    assert cli.main(["expect", files["state"], files["observable"], "--method", "tensor,oracle"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert set(doc["values"]) == {"tensor", "oracle"}
    assert cli.main(["expect", files["state"], files["observable"], "--method", "magic"]) == cli.EXIT_PARSE


def test_husimi(files, tmp_path):
    out = tmp_path / "q.csv"
    assert cli.main(["husimi", files["state"], "--grid", "8", "--out", str(out)]) == 0
    with open(out) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["theta_index", "phi_index", "theta", "phi", "Q"]
    assert len(rows) - 1 == 8 * 16
    q = np.array([float(r[4]) for r in rows[1:]])
    assert np.all(q >= 0) and np.all(q <= 1 + 1e-12)
    stars = json.loads((tmp_path / "q.stars.json").read_text())
    assert stars["two_j"] == 3 and len(stars["stars"]) == 3


def test_husimi_grid_minimum(files):
    assert cli.main(["husimi", files["state"], "--grid", "4"]) == cli.EXIT_PARSE


# ----------------------------------------------------------------- exit codes

@pytest.mark.parametrize(
    "argv, code",
    [
        (["decompose", "{garbage}"], cli.EXIT_PARSE),
        (["decompose", "/nonexistent/file.json"], cli.EXIT_PARSE),
        (["decompose", "{big}"], cli.EXIT_RANK),
        (["sylvester", "{traceful}"], cli.EXIT_TRACE),
        (["sylvester", "{sectorial}"], cli.EXIT_PAIRING),
        (["expect", "{state}", "{high}"], cli.EXIT_ORDER),
        (["husimi", "{zero_state}"], cli.EXIT_ZERO_STATE),
        (["expect", "{tensor}", "{observable}"], cli.EXIT_PARSE),
    ],
)
def test_exit_codes(files, argv, code, capsys):
    argv = [a.format(**files) for a in argv]
    assert cli.main(argv) == code
    assert capsys.readouterr().err.startswith("error:")


def test_sylvester_too_few_circle_points(files):
    assert cli.main(["sylvester", files["harmonic"], "--circles", "2"]) == cli.EXIT_PARSE


def test_no_partial_output_on_error(files, tmp_path):
    out = tmp_path / "never.json"
    cli.main(["sylvester", files["traceful"], "--out", str(out)])
    assert not out.exists()


# ---------------------------------------------------------------------- check

def test_check_deterministic(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    assert cli.main(["check", "--out", str(a)]) == 0
    assert cli.main(["check", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    text = a.read_text()
    assert text.count("[PASS]") == 12 and "all checks passed" in text


def test_check_detects_broken_alpha(monkeypatch, capsys):
    # A wrong Q-symbol factor must be caught by the self-check.
    real = op.alpha

    def broken(two_j, order):
        return real(two_j, order) * (Fraction(11, 10) if order >= 2 else 1)

    monkeypatch.setattr(op, "alpha", broken)
    assert cli.main(["check"]) == cli.EXIT_FAIL
    out = capsys.readouterr().out
    assert "[FAIL] Q" in out


def test_module_entry_point(files):
    res = subprocess.run(
        [sys.executable, "-m", "msylvester", "decompose", files["tensor"]], capture_output=True, text=True
    )
    assert res.returncode == 0
    assert json.loads(res.stdout)["components"]


# ---------------------------------------------------------- worked examples

def test_decompose_zz_and_zero(tmp_path, capsys):
    zz = write(tmp_path / "zz.json", from_vectors([[0, 0, 1.0], [0, 0, 1.0]]).to_json())
    assert cli.main(["decompose", zz]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["components"]) == 2 and doc["residual"] < 1e-12
    zero = write(tmp_path / "zero.json", {"rank": 3, "coeffs": []})
    assert cli.main(["decompose", zero]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert all(not c["coeffs"] for c in doc["components"])


def test_sylvester_zz(tmp_path, capsys):
    h = skeleton_to_harmonic(Skeleton.from_axes([[0, 0, 1], [0, 0, 1]]))
    assert cli.main(["sylvester", write(tmp_path / "h.json", h.to_json())]) == 0
    doc = json.loads(capsys.readouterr().out)
    np.testing.assert_allclose(doc["axes"], [[0, 0, 1], [0, 0, 1]], atol=1e-7)


def test_expect_spin_half_jz(tmp_path, capsys):
    state = write(tmp_path / "s.json", SpinState.basis(1, 0.5).to_json())
    jz = write(tmp_path / "o.json", op.classical_from_polynomial(SymTensor(1, [0.0, 0.0, 1.0])).to_json())
    assert cli.main(["expect", state, jz]) == 0
    doc = json.loads(capsys.readouterr().out)
    for v in doc["values"].values():
        assert v == pytest.approx(0.5, abs=1e-12)
    const = write(tmp_path / "c.json", op.constant_observable(1.75).to_json())
    assert cli.main(["expect", state, const]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["max_delta"] == pytest.approx(0.0, abs=1e-14)
    assert doc["values"]["tensor"] == pytest.approx(1.75)


def test_expect_order_three_at_spin_one(tmp_path):
    state = write(tmp_path / "s.json", SpinState.basis(2, 0).to_json())
    obs = op.classical_from_polynomial(from_vectors([[0, 0, 1.0]] * 3))
    assert cli.main(["expect", state, write(tmp_path / "o.json", obs.to_json())]) == cli.EXIT_ORDER


def test_husimi_top_state_and_normalisation(tmp_path):
    two_j = 4
    out = tmp_path / "q.csv"
    state = write(tmp_path / "s.json", SpinState.basis(two_j, 2).to_json())
    assert cli.main(["husimi", state, "--grid", "16", "--out", str(out)]) == 0
    with open(out) as fh:
        rows = [list(map(float, r)) for r in list(csv.reader(fh))[1:]]
    arr = np.array(rows)
    assert int(arr[np.argmax(arr[:, 4]), 0]) == 0
    # Midpoint-rule area weights sin(theta) dtheta dphi.
    d = np.pi / 16
    total = np.sum(arr[:, 4] * np.sin(arr[:, 2]) * d * d)
    assert total == pytest.approx(4 * np.pi / (two_j + 1), rel=1e-2)
