from __future__ import annotations

import csv
import io
import json
import socket
import subprocess
import sys

import pytest

from sted.cli import main


def write(path, value):
    path.write_text(json.dumps(value))
    return str(path)


@pytest.fixture
def pair(tmp_path):
    a = write(tmp_path / "a.json", {"user_name": "ann", "age": 30, "tags": ["x", "y"]})
    b = write(tmp_path / "b.json", {"userName": "ann", "age": 31, "tags": ["y", "x"]})
    return a, b


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_compare_identical(tmp_path, capsys):
    a = write(tmp_path / "a.json", {"a": [1, 2]})
    code, out, _ = run(capsys, "compare", a, a)
    assert code == 0
    assert json.loads(out) == {"score": 1.0, "mode": "hybrid", "differences": []}


def test_compare_report_and_threshold(pair, capsys):
    code, out, _ = run(capsys, "compare", *pair)
    report = json.loads(out)
    assert code == 0 and 0 < report["score"] < 1
    assert {d["path"] for d in report["differences"]} >= {"$.age"}
    code, _, _ = run(capsys, "compare", *pair, "--threshold", "0.999")
    assert code == 3


def test_compare_modes_and_ted(pair, capsys):
    _, out, _ = run(capsys, "compare", *pair, "--mode", "structural")
    assert json.loads(out)["mode"] == "structural"
    _, out, _ = run(capsys, "compare", *pair, "--metric", "ted")
    rep = json.loads(out)
    assert rep["metric"] == "ted" and rep["score"] < 1
    code, out, _ = run(capsys, "compare", *pair, "--pretty")
    assert code == 0 and out.startswith("sted score: ")


def test_compare_full_lists_unchanged(pair, capsys):
    _, out, _ = run(capsys, "compare", *pair, "--full")
    kinds = {d["kind"] for d in json.loads(out)["differences"]}
    assert "unchanged" in kinds


def test_bad_input_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"a": ')
    code, out, err = run(capsys, "compare", str(bad), str(bad))
    assert code == 2 and out == "" and "bad.json" in err
    code, _, _ = run(capsys, "compare", str(tmp_path / "missing.json"), str(bad))
    assert code == 2
    cfg = write(tmp_path / "cfg.json", {"mode": "sideways"})
    code, _, _ = run(capsys, "compare", str(bad), str(bad), "--config", cfg)
    assert code == 2


def _free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def test_provider_failure_exit_4(pair, tmp_path, capsys):
    cfg = write(
        tmp_path / "remote.json",
        {"provider": {"kind": "remote-http", "endpoint": f"http://127.0.0.1:{_free_port()}/embed", "retries": 0, "timeout_ms": 500}},
    )
    code, _, err = run(capsys, "compare", *pair, "--config", cfg, "--cache", str(tmp_path / "cache"))
    assert code == 4 and "error" in err


def test_consistency(tmp_path, capsys):
    d = tmp_path / "runs"
    d.mkdir()
    for i in range(4):
        write(d / f"r{i}.json", {"id": 1, "name": "ann", "n": i % 2})
    code, out, _ = run(capsys, "consistency", str(d), "--jobs", "1")
    rep = json.loads(out)
    assert code == 0 and rep["n_outputs"] == 4 and rep["mode"] == "hybrid"
    _, out, _ = run(capsys, "consistency", str(d / "*.json"), "--all-modes", "--jobs", "1")
    both = json.loads(out)
    assert set(both) == {"structural", "semantic", "hybrid"}
    assert both["structural"]["consistency_score"] == 1.0
    code, _, _ = run(capsys, "consistency", str(d), "--threshold", "1.0", "--jobs", "1")
    assert code == 3


def test_consistency_skip_bad(tmp_path, capsys, caplog):
    a = write(tmp_path / "a.json", {"x": 1})
    (tmp_path / "b.json").write_text("nope")
    code, _, _ = run(capsys, "consistency", a, str(tmp_path / "b.json"), "--jobs", "1")
    assert code == 2
    code, out, _ = run(capsys, "consistency", a, str(tmp_path / "b.json"), "--skip-bad", "--jobs", "1")
    assert code == 0 and json.loads(out)["consistency_score"] == 1.0
    assert "skipping" in caplog.text
    code, _, _ = run(capsys, "consistency", str(tmp_path / "none*.json"))
    assert code == 2


def _tree_bytes(root):
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def test_generate_and_sweep(tmp_path, capsys):
    out1, out2 = tmp_path / "c1", tmp_path / "c2"
    for out in (out1, out2):
        code, stdout, _ = run(capsys, "generate", "--count", "3", "--seed", "5", "--out", str(out))
        assert code == 0 and json.loads(stdout)["cases"] == 3 * 32
    assert _tree_bytes(out1) == _tree_bytes(out2)
    code, csv1, _ = run(capsys, "sweep", "--corpus", str(out1), "--jobs", "1")
    assert code == 0
    rows = list(csv.reader(io.StringIO(csv1)))
    assert rows[0] == ["case_id", "kind", "ratio", "metric", "score"]
    assert len(rows) == 1 + 3 * 32 * 2
    target = tmp_path / "scores.csv"
    run(capsys, "sweep", "--corpus", str(out2 / "manifest.jsonl"), "--out", str(target), "--jobs", "2")
    assert target.read_text() == csv1


def test_generate_options(tmp_path, capsys):
    spec = write(tmp_path / "spec.json", {"target_depth": 3, "target_fields": 12})
    code, out, _ = run(
        capsys, "generate", "--count", "2", "--kind", "nest", "--out", str(tmp_path / "g"), "--base-spec", spec
    )
    assert code == 0 and json.loads(out)["cases"] == 2
    code, out, _ = run(capsys, "generate", "--count", "2", "--kind", "semantic", "--ratio", "0.3", "--out", str(tmp_path / "h"))
    assert json.loads(out)["cases"] == 2
    for bad in (["--ratio", "0.25"], ["--kind", "shuffle"], ["--count", "0"]):
        code, _, _ = run(capsys, "generate", "--out", str(tmp_path / "x"), *bad)
        assert code == 2


def test_sweep_keep_going_column(tmp_path, capsys):
    run(capsys, "generate", "--count", "1", "--kind", "flatten", "--out", str(tmp_path / "c"))
    (tmp_path / "c" / "variants" / "flatten" / "000.json").write_text("[")
    code, _, _ = run(capsys, "sweep", "--corpus", str(tmp_path / "c"), "--jobs", "1")
    assert code == 2
    code, out, _ = run(capsys, "sweep", "--corpus", str(tmp_path / "c"), "--keep-going", "--jobs", "1")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0][-1] == "error" and rows[1][4] == "" and rows[1][5]


def test_cache_commands(pair, tmp_path, capsys):
    cache = str(tmp_path / "cache")
    run(capsys, "compare", *pair, "--cache", cache)
    _, out, _ = run(capsys, "cache", "stats", "--cache", cache)
    assert json.loads(out)["entries"] > 0
    _, out, _ = run(capsys, "cache", "clear", "--cache", cache)
    assert json.loads(out)["removed"] > 0
    _, out, _ = run(capsys, "cache", "stats", "--cache", cache)
    assert json.loads(out)["entries"] == 0


def test_module_entry_point(pair):
    proc = subprocess.run([sys.executable, "-m", "sted", "compare", *pair], capture_output=True, text=True)
    assert proc.returncode == 0 and "score" in proc.stdout
