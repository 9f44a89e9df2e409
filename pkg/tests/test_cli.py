import json

from conftest import TREES
from itc.cli import main

BAD3 = str(TREES / "t_bad3.json")


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_check_worked_tree(capsys):
    code, out = run(capsys, "check", BAD3)
    assert code == 0
    assert "bad_for_crit = {1}" in out
    assert "weakly normal: false" in out


def test_check_malformed_input(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{oops")
    assert main(["check", str(p)]) == 2
    assert main(["check", str(tmp_path / "missing.json")]) == 2


def test_normalize_worked_tree(tmp_path, capsys):
    dot = tmp_path / "n.dot"
    code, out = run(capsys, "normalize", BAD3, "--emit-stages", "--dot", str(dot))
    assert code == 0
    assert "domain: {0, 1, <0,2>, <1,2>}" in out
    stages = [json.loads(line) for line in out.splitlines() if line.startswith("{")]
    assert len(stages) == 1
    assert stages[0]["preds"] == {"<0,2>": "0", "<1,2>": "0"}
    assert dot.read_text().startswith("digraph normalization {")


def test_normalize_normal_tree_takes_no_stages(tmp_path, capsys):
    p = tmp_path / "one.json"
    p.write_text(json.dumps({"universe_size": 10, "descriptors": [{"id": 0, "crit": 3, "len": 8, "index": 8}],
                             "tree": [{"extender_rank": 0, "tpred_next": 0}]}))
    code, out = run(capsys, "normalize", str(p))
    assert code == 0
    assert "stages: 0" in out and "domain: {0, 1}" in out
    code, out = run(capsys, "check", str(p))
    assert "normal: true" in out and "bad_for_crit = {}" in out


def test_normalize_prunes_deadwood_first(capsys):
    code, out = run(capsys, "normalize", str(TREES / "gap_support.json"))
    assert code == 0
    assert out.splitlines()[:2] == ["pruned [0, 1)", "stages: 0"]


def test_support_queries(capsys):
    code, out = run(capsys, "support", BAD3, "--node", "2")
    assert code == 0
    assert "E_1: support {0}" in out
    assert "finite support: ok" in out


def test_embed_commands(capsys):
    assert run(capsys, "embed", BAD3)[0] == 0
    assert run(capsys, "embed", BAD3, "--identity")[0] == 0
    code, out = run(capsys, "embed", BAD3, "--support", "0,1")
    assert code == 0 and "sigma(2) = 2" in out
    assert run(capsys, "embed", BAD3, "--support", "1")[0] == 2


def test_selftest_empty_corpus(capsys):
    code, out = run(capsys, "selftest", "--corpus-size", "0")
    assert code == 0 and "result: ok" in out


def test_selftest_is_reproducible(tmp_path, capsys):
    args = ["selftest", "--corpus-size", "8", "--seed", "4", "--reproducer", str(tmp_path / "r.json")]
    first = run(capsys, *args)
    second = run(capsys, *args)
    assert first == second
