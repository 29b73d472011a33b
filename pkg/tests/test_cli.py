import io
import json

import pytest

from topofuse.cli import main
from topofuse.netio import parse_net


def run(*argv):
    buf = io.StringIO()
    code = main([str(a) for a in argv], out=buf)
    return code, buf.getvalue()


@pytest.fixture
def f(fixtures_dir):
    return lambda name: fixtures_dir / f"{name}.json"


def test_fuse_demo(f, tmp_path):
    out, trace, dot = tmp_path / "fused.json", tmp_path / "t.jsonl", tmp_path / "f.dot"
    code, text = run("fuse", f("demo_d1"), f("demo_d2"), "--out", out, "--trace", trace,
                     "--dot", dot, "--checked")
    assert code == 0
    assert "k_rev=1 k_eq=2" in text
    doc = json.loads(out.read_text())
    assert sorted(map(tuple, doc["fused"]["arcs"])) == sorted(
        [("a", "c"), ("b", "d"), ("e", "c"), ("c", "f"), ("d", "f"), ("a", "d"), ("b", "e"), ("a", "b")])
    assert sorted(map(tuple, doc["transformed"][1]["arcs"])) == sorted(
        [("a", "b"), ("a", "c"), ("b", "d"), ("b", "e"), ("a", "d")])
    assert sum("->" in ln for ln in dot.read_text().splitlines()) == 8

    code, text = run("validate", f("demo_d1"), f("demo_d2"), "--trace", trace)
    assert code == 0 and "replay ok" in text

    code, text = run("export-dot", out)
    assert code == 0 and text == dot.read_text()


def test_fuse_needs_two_inputs(f, capsys):
    assert run("fuse", f("demo_d1"))[0] == 2


def test_cyclic_input_reports_witness(tmp_path, f, capsys):
    bad = tmp_path / "cyc.json"
    bad.write_text(json.dumps({"name": "c", "nodes": [{"name": "p"}, {"name": "q"}],
                               "arcs": [["p", "q"], ["q", "p"]]}))
    assert run("fuse", bad, f("demo_d1"))[0] == 2
    assert "p -> q -> p" in capsys.readouterr().err


def test_compromise_output(f):
    code, text = run("compromise", f("author1"), f("author2"), "--query", "A", "--evidence", "B=true")
    assert code == 0
    assert text.splitlines() == [
        "query: A",
        "evidence: B=true",
        "weights: 0.500000, 0.500000",
        "state  prior       posterior   author1     author2",
        "false  0.341463    0.444700    0.032258    0.857143",
        "true   0.658537    0.555300    0.967742    0.142857",
        "dropped (impossible evidence): none",
    ]


def test_compromise_degenerate_weights(f):
    code, text = run("compromise", f("author1"), f("author2"), "--query", "A",
                     "--evidence", "B=true", "--weights", "1,0")
    assert code == 0
    assert "true   0.967742    0.967742    0.967742    0.142857" in text


def test_compromise_single_modes(f):
    code, text = run("compromise", f("author1"), f("author2"), "--query", "A",
                     "--evidence", "B=true", "--mode", "prior")
    assert code == 0 and "0.658537" in text and "0.555300" not in text
    code, text = run("compromise", f("author1"), f("author2"), "--query", "A",
                     "--evidence", "B=true", "--mode", "posterior")
    assert code == 0 and "0.555300" in text and "0.658537" not in text


def test_compromise_errors(f, capsys):
    assert run("compromise", f("author1"), f("author2"), "--query", "Z")[0] == 2
    assert run("compromise", f("author1"), f("author2"), "--query", "A", "--evidence", "B")[0] == 2
    assert run("compromise", f("author1"), f("author2"), "--query", "A", "--weights", "1")[0] == 2
    assert run("compromise", f("demo_d1"), f("demo_d2"), "--query", "a")[0] == 2


def test_infer(f):
    code, text = run("infer", f("author2"), "--query", "A", "--evidence", "B=true")
    assert code == 0
    assert text == "false\t0.857143\ntrue\t0.142857\n"


def test_gen_random(tmp_path, capsys):
    code, text = run("gen-random", "--nodes", 5, "--density", 0, "--seed", 1)
    assert code == 0 and parse_net(text).arcs == frozenset()
    code, text = run("gen-random", "--nodes", 5, "--density", 1, "--seed", 1)
    assert len(parse_net(text).arcs) == 10
    a = run("gen-random", "--nodes", 7, "--density", 0.4, "--seed", 9, "--cpts")[1]
    b = run("gen-random", "--nodes", 7, "--density", 0.4, "--seed", 9, "--cpts")[1]
    assert a == b
    code, _ = run("gen-random", "--nodes", 6, "--seed", 3, "--pair", "--out-dir", tmp_path)
    assert code == 0 and len(list(tmp_path.glob("*.json"))) == 2
    assert run("gen-random", "--nodes", 5, "--density", 1.5)[0] == 2
    assert run("gen-random", "--nodes", 0)[0] == 2


def test_bench(capsys):
    code, text = run("bench", "--sizes", "4,6", "--trials", 2, "--worst-case", 8)
    assert code == 0
    assert "worst case" in text and "bounds hold" in text
    assert run("bench", "--sizes", "x")[0] == 2


def test_validate_plain_and_missing_file(f, capsys):
    code, text = run("validate", f("author1"), f("demo_d2"))
    assert code == 0 and "bayes net" in text and "structure" in text
    assert run("validate", "/nonexistent.json")[0] == 2


def test_export_dot_net(f):
    code, text = run("export-dot", f("demo_d2"))
    assert code == 0 and sum("->" in ln for ln in text.splitlines()) == 4
