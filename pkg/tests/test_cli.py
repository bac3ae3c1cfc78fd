import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from multiblotto import GameSpec, PartitionSampler, RngStream, SphereSampler, check_bids, parse_game
from multiblotto.boolean import BooleanSampler
from multiblotto.cli import main
from multiblotto.dispatch import FixedStrategy, dispatch_sampler, draw, run_payoff_tournament
from multiblotto.errors import NoKnownEquilibrium


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def sphere_game(tmp_path):
    return write(tmp_path, "sphere.json", {"k": 3, "values": [5, 4, 3, 2, 1]})


@pytest.fixture
def boolean_game(tmp_path):
    return write(tmp_path, "bool.json", {"k": 4, "values": [3, 2, 1], "budget": 2, "variant": "boolean"})


def test_dispatch_examples():
    assert isinstance(dispatch_sampler(GameSpec.continuous(4, [1] * 8)), PartitionSampler)
    assert isinstance(dispatch_sampler(GameSpec.continuous(3, [5, 4, 3, 2, 1])), SphereSampler)
    with pytest.raises(NoKnownEquilibrium):
        dispatch_sampler(GameSpec.continuous(4, [5, 4, 3, 2, 1]))
    assert isinstance(dispatch_sampler(GameSpec.boolean(3, [1, 1], 1)), BooleanSampler)
    assert isinstance(dispatch_sampler(GameSpec.continuous(2, [2, 1, 1]), (1, 2, 2)), PartitionSampler)


def test_draw_independent_of_workers():
    sampler = SphereSampler(GameSpec.continuous(3, [5, 4, 3, 2, 1]))
    a = draw(sampler, 70_000, RngStream(3), workers=1)
    b = draw(sampler, 70_000, RngStream(3), workers=3)
    np.testing.assert_array_equal(a, b)


def test_tournament_sphere_fair_share():
    spec = GameSpec.continuous(3, [5, 4, 3, 2, 1])
    s = SphereSampler(spec)
    res = run_payoff_tournament(spec, [s, s, s], 100_000, RngStream(4))
    assert np.all(np.abs(res.mean - 5) <= 4 * res.stderr)


def test_tournament_boolean_fair_share():
    spec = GameSpec.boolean(3, [1, 1], 1)
    s = BooleanSampler(spec)
    res = run_payoff_tournament(spec, [s, s, s], 100_000, RngStream(5))
    assert np.all(np.abs(res.mean - 2 / 3) <= 4 * res.stderr)


def test_tournament_two_player_pure_is_deterministic():
    spec = GameSpec.boolean(2, [3, 1, 2], 2)
    s = BooleanSampler(spec)
    res = run_payoff_tournament(spec, [s, s], 50, RngStream(6))
    np.testing.assert_array_equal(res.stderr, [0, 0])
    np.testing.assert_array_equal(res.mean, [3, 3])


def test_sample_csv_roundtrip(sphere_game, tmp_path, capsys):
    out = tmp_path / "s.csv"
    assert main(["sample", "--game", sphere_game, "--samples", "500", "--out", str(out)]) == 0
    rows = list(csv.reader(io.StringIO(out.read_text())))
    assert rows[0] == ["b1", "b2", "b3", "b4", "b5"]
    bids = np.array(rows[1:], dtype=float)
    assert bids.shape == (500, 5)
    check_bids(parse_game(json.loads(open(sphere_game).read())).spec, np.repeat(bids[:, None, :], 3, axis=1))
    np.testing.assert_array_equal(bids, draw(SphereSampler(GameSpec.continuous(3, [5, 4, 3, 2, 1])), 500, RngStream(42)))


def test_sample_json_and_determinism(boolean_game, capsys):
    assert main(["sample", "--game", boolean_game, "--samples", "50", "--format", "json", "--seed", "9"]) == 0
    first = capsys.readouterr().out
    assert main(["sample", "--game", boolean_game, "--samples", "50", "--format", "json", "--seed", "9"]) == 0
    assert capsys.readouterr().out == first
    doc = json.loads(first)
    bids = np.array(doc["samples"])
    assert np.all(bids.sum(axis=1) == 2)
    assert doc["seed"] == 9


def test_solve_boolean(boolean_game, capsys):
    assert main(["solve-boolean", "--game", boolean_game]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert set(doc) == {"p", "x_star", "achieved_tol", "exploitability_bound"}
    assert sum(doc["p"]) == 2
    assert doc["exploitability_bound"] <= 1e-6


def test_solve_boolean_needs_boolean(sphere_game, capsys):
    assert main(["solve-boolean", "--game", sphere_game]) == 1


def test_verify_passes(sphere_game, tmp_path, capsys):
    out = tmp_path / "report.json"
    code = main(["verify", "--game", sphere_game, "--samples", "20000", "--out", str(out)])
    assert code == 0
    assert "overall: pass" in capsys.readouterr().out
    assert json.loads(out.read_text())["passed"] is True


def test_verify_boolean_to_stdout(boolean_game, capsys):
    assert main(["verify", "--game", boolean_game, "--samples", "20000"]) == 0
    captured = capsys.readouterr()
    assert json.loads(captured.out)["passed"] is True
    assert "overall: pass" in captured.err


def test_no_equilibrium_exit_code(tmp_path, capsys):
    game = write(tmp_path, "g.json", {"k": 4, "values": [5, 4, 3, 2, 1]})
    assert main(["sample", "--game", game]) == 3
    assert "error" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["sample", "--game", "missing.json"],
        ["sample"],
        ["sample", "--game", "x", "--samples", "0"],
        ["sample", "--game", "x", "--seed", "-1"],
        ["sample", "--game", "x", "--bogus"],
        ["frobnicate"],
    ],
)
def test_invalid_invocations(argv, capsys):
    assert main(argv) == 1


def test_invalid_game_file(tmp_path, capsys):
    assert main(["sample", "--game", write(tmp_path, "g.json", {"k": 1, "values": [1]})]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["sample", "--game", str(bad)]) == 1


def test_payoff_with_fixed_deviator(tmp_path, capsys):
    game = write(tmp_path, "g.json", {"k": 3, "values": [1, 1, 1]})
    fixed = write(tmp_path, "f.json", {"1": [1.0, 0.0, 0.0]})
    assert main(["payoff", "--game", game, "--fixed", fixed, "--samples", "20000", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["rounds"] == 20000
    assert doc["mean"][0] <= 1 + 4 * doc["stderr"][0]
    assert sum(doc["mean"]) == pytest.approx(3.0)


def test_payoff_csv(sphere_game, capsys):
    assert main(["payoff", "--game", sphere_game, "--samples", "1000"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "player,mean,stderr" and len(lines) == 4


def test_payoff_rejects_bad_fixed(tmp_path, capsys):
    game = write(tmp_path, "g.json", {"k": 3, "values": [1, 1, 1]})
    assert main(["payoff", "--game", game, "--fixed", write(tmp_path, "f.json", {"5": [1, 0, 0]})]) == 1
    assert main(["payoff", "--game", game, "--fixed", write(tmp_path, "h.json", {"1": [2, 0, 0]})]) == 1


def test_module_entry_point(sphere_game):
    proc = subprocess.run(
        [sys.executable, "-m", "multiblotto", "sample", "--game", sphere_game, "--samples", "3"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "b1,b2,b3,b4,b5"
    assert len(proc.stdout.splitlines()) == 4


def test_fixed_strategy_shapes():
    f = FixedStrategy([1.0, 0.0])
    assert f.sample(RngStream(0)).shape == (2,)
    assert f.sample(RngStream(0), (4, 2)).shape == (4, 2, 2)
