import json
import subprocess
import sys

import pytest

from fipsynth.cli import main
from fipsynth.io import load_twotape, read_json, strategy_from_json
from fipsynth.oracle import verify_strategy
from fipsynth.twotape import relation_equivalent

from conftest import fixture_path, game, relation


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def write_doc(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def test_validate_ok(capsys):
    code, out, _ = run(capsys, "validate", fixture_path("peek"))
    assert code == 0 and "valid (2 players, 3 moves)" in out


def test_validate_reports_visibility_witness(capsys, tmp_path):
    doc = read_json(fixture_path("peek"))
    doc["act"]["b"] = "y"
    code, out, _ = run(capsys, "validate", write_doc(tmp_path, "leaky.json", doc))
    assert code == 1
    assert out.startswith("visibility:") and "witness=['a', 'b']" in out


def test_unreadable_and_truncated_files(capsys, tmp_path):
    code, _, err = run(capsys, "validate", tmp_path / "missing.json")
    assert code == 2 and err.startswith("error:")
    cut = tmp_path / "cut.json"
    cut.write_text(fixture_path("peek").read_text()[:200])
    assert run(capsys, "validate", cut)[0] == 2


def test_schema_violation(capsys, tmp_path):
    doc = read_json(fixture_path("peek"))
    del doc["coloring"]
    code, _, err = run(capsys, "synth", write_doc(tmp_path, "nocolor.json", doc))
    assert code == 2 and "coloring" in err


def test_unknown_letter(capsys, tmp_path):
    doc = read_json(fixture_path("peek"))
    doc["observations"][0]["delta"]["s,z"] = "s"
    assert run(capsys, "validate", write_doc(tmp_path, "z.json", doc))[0] == 2


def test_synth_writes_verified_strategy(capsys, tmp_path):
    out_path = tmp_path / "strategy.json"
    code, out, _ = run(capsys, "synth", fixture_path("sync-reach"), "--out", out_path, "--table")
    assert code == 0
    assert "player-wins; strategy with 7 states" in out
    assert "first action: wait" in out
    s = strategy_from_json(read_json(out_path), game("sync-reach").moves)
    assert verify_strategy(game("sync-reach"), s, 6).ok
    code, out, _ = run(capsys, "oracle", fixture_path("sync-reach"), "--depth", "3", "--verify", out_path)
    assert code == 0 and json.loads(out)["pass"] is True


def test_synth_loses(capsys):
    code, out, _ = run(capsys, "synth", fixture_path("nosync-reach"))
    assert code == 1 and out.strip().endswith("player-loses")


def test_synth_limits(capsys, monkeypatch):
    code, out, _ = run(capsys, "synth", fixture_path("sync-reach"), "--max-nodes", 4)
    assert code == 3
    assert '"nodes": 4' in out and '"limit": 4' in out
    monkeypatch.setenv("FIPSYNTH_MAX_NODES", "2")
    assert run(capsys, "synth", fixture_path("sync-reach"))[0] == 3


def test_condition_override(capsys, tmp_path):
    # peek with an unreachable target color loses
    code, out, _ = run(capsys, "synth", fixture_path("peek"),
                       "--condition-override", '{"kind": "reachability", "targets": ["nowhere"]}')
    assert code == 1
    cond = write_doc(tmp_path, "cond.json", {"kind": "parity", "priorities": {"idle": 1, "even": 0, "odd": 1}})
    assert run(capsys, "synth", fixture_path("peek"), "--condition-override", cond)[0] == 0


def test_synth_dot(capsys, tmp_path):
    dot = tmp_path / "a.dot"
    assert run(capsys, "synth", fixture_path("peek"), "--dot", dot)[0] == 0
    assert dot.read_text().startswith("digraph arena {")


def test_arena_outputs(capsys, tmp_path):
    code, out, _ = run(capsys, "arena", fixture_path("hier4"), "--dot", tmp_path / "a.dot",
                       "--json", tmp_path / "a.json")
    assert code == 0 and json.loads(out) == {"nodes": 7, "edges": 18}
    assert len(read_json(tmp_path / "a.json")["nodes"]) == 7


def test_normalize_output(capsys, tmp_path):
    code, out, _ = run(capsys, "normalize", fixture_path("peek"))
    doc = json.loads(out)
    assert code == 0 and doc["moves"] == ["-|a", "-|b", "c|c"]
    code, out, _ = run(capsys, "normalize", fixture_path("peek"), "--out", tmp_path / "n.json")
    assert read_json(tmp_path / "n.json") == doc


def test_inspect(capsys):
    code, out, _ = run(capsys, "inspect", fixture_path("peek"), "--history", "a,b")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "profiles: (-,a) (-,b)"
    assert lines[1].startswith("{0}: {")
    code, out, _ = run(capsys, "inspect", fixture_path("peek"))
    assert out.splitlines()[0] == "profiles: "


def test_inspect_unknown_move(capsys):
    assert run(capsys, "inspect", fixture_path("peek"), "--history", "a,q")[0] == 2


def test_to_2dfa_round_trip(capsys, tmp_path):
    out_path = tmp_path / "peek-2dfa.json"
    code, out, _ = run(capsys, "to-2dfa", fixture_path("peek"), "--out", out_path)
    assert code == 0
    assert relation_equivalent(load_twotape(out_path), relation("fig5c"))[0]
    code, out, _ = run(capsys, "to-2dfa", fixture_path("peek"))
    assert json.loads(out)["kind"] == "two-tape-dfa"
    assert run(capsys, "check-2dfa", out_path)[0] == 0


def test_check_2dfa(capsys):
    code, out, _ = run(capsys, "check-2dfa", fixture_path("fig8"))
    assert code == 0 and out.startswith("ok:")
    code, out, _ = run(capsys, "check-2dfa", fixture_path("fig5c-asymmetric"))
    assert code == 1 and out.startswith("fails symmetry")
    witness = json.loads(out.splitlines()[1].removeprefix("witness: "))
    assert len(witness) == 2 and all(len(w) <= 4 for w in witness)


def test_oracle_pass_and_vacuous_depth(capsys):
    code, out, _ = run(capsys, "oracle", fixture_path("peek"), "--depth", 5)
    report = json.loads(out)
    assert code == 0 and report["pass"] and report["depth"] == 5
    # two coalitions, then knowledge, bisimulation and relation checks
    assert len(report["checks"]) == 5
    code, out, _ = run(capsys, "oracle", fixture_path("peek"), "--depth", 0)
    assert code == 0 and json.loads(out)["pass"]


def test_oracle_rejects_losing_strategy(capsys, tmp_path):
    from fipsynth.io import strategy_to_json
    from fipsynth.strategy import constant_strategy

    g = game("sync-reach")
    path = write_doc(tmp_path, "const.json", strategy_to_json(constant_strategy(g.moves, "guessA")))
    code, out, _ = run(capsys, "oracle", fixture_path("sync-reach"), "--depth", 2, "--verify", path)
    report = json.loads(out)
    assert code == 1 and not report["pass"]
    failed = [c for c in report["checks"] if not c["pass"]]
    assert len(failed) == 1 and failed[0]["detail"]["play"][0] == "guessA1"


def test_strict_visibility_flag(capsys):
    assert run(capsys, "validate", fixture_path("peek"), "--strict-visibility", "reachable")[0] == 0
    with pytest.raises(SystemExit):
        main(["validate", str(fixture_path("peek")), "--strict-visibility", "sometimes"])


def test_module_entry_point():
    done = subprocess.run([sys.executable, "-m", "fipsynth", "validate", str(fixture_path("peek"))],
                          capture_output=True, text=True)
    assert done.returncode == 0 and "valid" in done.stdout
