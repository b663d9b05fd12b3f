from __future__ import annotations

import json
import subprocess
import sys

import numpy as np
import pytest

from bellchain import channels
from bellchain.cli import UsageError, main, parse_target
from bellchain.qstate import load_state, save_state


@pytest.fixture
def mg_file(tmp_path):
    path = tmp_path / "mg.json"
    save_state(channels.majumdar_ghosh_state(4), path)
    return path


class TestParseTarget:
    def test_angles(self):
        np.testing.assert_allclose(parse_target("0,0").amplitudes, [1, 0])
        np.testing.assert_allclose(parse_target(f"{np.pi},0").amplitudes, [0, 1], atol=1e-15)

    def test_complex(self):
        np.testing.assert_allclose(parse_target("1,1i").amplitudes, np.array([1, 1j]) / np.sqrt(2))

    def test_normalises(self):
        np.testing.assert_allclose(parse_target("3+0i,4+0i").amplitudes, [0.6, 0.8])

    @pytest.mark.parametrize("text", ["1", "a,b", "0i,0i", ",1"])
    def test_rejects(self, text):
        with pytest.raises(UsageError):
            parse_target(text)


def test_ground_state_then_classify(tmp_path, capsys):
    out = tmp_path / "g.json"
    assert main(["ground-state", "--model", "heisenberg-nnn", "--sites", "4", "--beta", "0.5", "--out", str(out)]) == 0
    assert "energy=-1.5" in capsys.readouterr().out
    assert load_state(out).sites == 4
    assert main(["classify", "--channel", str(out)]) == 0
    lines = capsys.readouterr().out.splitlines()
    weights = json.loads(lines[0].removeprefix("weights "))
    assert max(weights.values()) == pytest.approx(1)
    assert lines[1].startswith("O=3 ")


def test_teleport_table(mg_file, capsys):
    assert main(["teleport", "--channel", str(mg_file), "--target", "1,0", "--trials", "5", "--seed", "3"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "seed=3 subspace=++ pairs=2"
    rows = out[2:18]
    assert len(rows) == 16 and all(r.endswith("1.000000000000") for r in rows)
    assert out[-1].startswith("sampled trials=5 mean_fidelity=1.0")


def test_explicit_subspace(mg_file, capsys):
    assert main(["teleport", "--channel", str(mg_file), "--target", "0,0", "--subspace=-+"]) == 0
    assert "subspace=-+" in capsys.readouterr().out


def test_sweep_is_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert main(["sweep", "--channels", "6", "--sites", "4", "--seed", "8", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(a.read_text().splitlines()) == 7
    assert "branch-average violations=0" in capsys.readouterr().out


def test_qudit_demo(capsys):
    assert main(["qudit-demo", "--local-dim", "3", "--seed", "1"]) == 0
    rows = capsys.readouterr().out.splitlines()[2:]
    assert len(rows) == 9 and all(r.endswith("1.000000000000") for r in rows)


def test_cluster_check(capsys):
    assert main(["cluster-check", "--sites", "4"]) == 0
    after = capsys.readouterr().out.splitlines()[-1]
    assert json.loads(after.removeprefix("after "))["++"] == pytest.approx(1)


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        ["sweep", "--out", "x.csv"],
        ["ground-state", "--sites", "4", "--out", "x.json"],
        ["teleport", "--channel", "x.json"],
        ["sweep", "--channels", "1", "--seed", "-1", "--out", "x.csv"],
        ["classify", "--channel", "x.json", "--subspace", "00"],
    ],
)
def test_usage_errors_exit_one(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        code = main(argv)
        raise SystemExit(code)
    assert exc.value.code == 1


def test_odd_chain_exits_two(tmp_path):
    path = tmp_path / "odd.json"
    save_state(channels.basis_state([0, 0, 0]), path)
    assert main(["classify", "--channel", str(path)]) == 2


def test_missing_file_exits_two(tmp_path):
    assert main(["classify", "--channel", str(tmp_path / "none.json")]) == 2


def test_oversize_exits_two(tmp_path):
    assert main(["ground-state", "--model", "ising", "--sites", "15", "--out", str(tmp_path / "x")]) == 2


def test_console_script_module():
    r = subprocess.run([sys.executable, "-m", "bellchain.cli", "bogus"], capture_output=True, text=True)
    assert r.returncode == 1
