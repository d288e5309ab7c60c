import json

import numpy as np
import pytest

from dummykit import cli
from dummykit.dataio import load_tudataset, read_gram, write_graph
from dummykit.generate import claw, write_synthetic_tudataset
from dummykit.labels import LabelUniverse
from dummykit.transform import augment_dummy


@pytest.fixture(scope="module")
def data(tmp_path_factory):
    d = tmp_path_factory.mktemp("data")
    write_synthetic_tudataset(d, "SYN", 60, seed=3, mean_nodes=10, edge_labels=2)
    return d


def test_transform_round_trip_files(tmp_path):
    src = tmp_path / "claw.g"
    write_graph(src, claw("a"))
    mid, back = tmp_path / "h.g", tmp_path / "back.g"
    assert cli.run(["transform", "--op", "e2v", "--in", str(src), "--out", str(mid)]) == 0
    assert cli.run(["transform", "--op", "inv-e2v", "--in", str(mid), "--out", str(back)]) == 0
    assert back.read_bytes() == src.read_bytes()


def test_transform_to_stdout(tmp_path, capsys):
    src = tmp_path / "claw.g"
    write_graph(src, claw("b"))
    assert cli.run(["transform", "--op", "dummy", "--in", str(src)]) == 0
    assert capsys.readouterr().out.startswith("g 5 11\n")


@pytest.mark.parametrize("cmd", [[], ["transform"], ["stats"], ["gram"], ["classify"], ["roundtrip"], ["selftest"]])
def test_help(cmd, capsys):
    assert cli.run(cmd + ["--help"]) == 0
    assert "usage" in capsys.readouterr().out


def test_usage_errors(capsys):
    assert cli.run([]) == 2
    assert cli.run(["nope"]) == 2
    assert cli.run(["transform", "--op", "bad", "--in", "x"]) == 2
    assert cli.run(["classify", "--seeds", "5..1", "--dataset", "d", "--name", "n"]) == 2
    assert cli.run(["classify", "--name", "X"]) == 2


def test_data_errors(tmp_path, capsys):
    bad = tmp_path / "bad.g"
    bad.write_text("g 1 0\nv 0 a b\n")
    assert cli.run(["transform", "--op", "e2v", "--in", str(bad)]) == 1
    assert "bad.g:2" in capsys.readouterr().err
    assert cli.run(["transform", "--op", "e2v", "--in", str(tmp_path / "missing.g")]) == 1
    lone = tmp_path / "lone.g"
    lone.write_text("g 1 0\nv 0 a\n")
    assert cli.run(["transform", "--op", "e2v", "--in", str(lone)]) == 1
    assert cli.run(["stats", "--dataset", str(tmp_path), "--name", "NOPE"]) == 1


def test_parse_range():
    assert cli.parse_range("2020..2029") == list(range(2020, 2030))
    assert cli.parse_range("1,3, 5") == [1, 3, 5]
    assert cli.parse_range("7") == [7]


def test_default_jobs(monkeypatch):
    monkeypatch.setenv(cli.THREADS_ENV, "3")
    assert cli.default_jobs() == 3
    monkeypatch.delenv(cli.THREADS_ENV)
    assert cli.default_jobs() >= 1


def test_stats_dataset(data, capsys):
    assert cli.run(["stats", "--dataset", str(data), "--name", "SYN", "--variant", "gphi"]) == 0
    out = capsys.readouterr().out
    ds = load_tudataset(data, "SYN", LabelUniverse())
    avg_v = np.mean([g.n + 1 for g in ds.graphs])
    avg_e = np.mean([g.m + 2 * g.n for g in ds.graphs])
    assert f"avg_vertices={avg_v:.2f} avg_edges={avg_e:.2f}" in out
    assert out.count("\n") == 1


def test_stats_per_graph_and_file(data, tmp_path, capsys):
    assert cli.run(["stats", "--dataset", str(data), "--name", "SYN", "--per-graph"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 60 + 3 and out[0].startswith("graph=0 n=")
    f = tmp_path / "c.g"
    write_graph(f, claw("b"))
    assert cli.run(["stats", "--in", str(f)]) == 0
    assert "v_h_Phi=4 e_h_Phi=6" in capsys.readouterr().out


def test_gram_and_classify(data, tmp_path, capsys):
    k = tmp_path / "k.bin"
    assert cli.run(["gram", "--dataset", str(data), "--name", "SYN", "--kernel", "wl", "--h", "2",
                    "--variant", "e2v", "--extended", "--out", str(k)]) == 0
    M = read_gram(k)
    assert M.n == 60 and M.normalized and M.spec.extended
    assert np.all(np.diag(M.values) == 1.0)
    r1, r2 = tmp_path / "r1.txt", tmp_path / "r2.txt"
    common = ["classify", "--dataset", str(data), "--name", "SYN", "--seeds", "2020..2022", "--c-grid", "0.1,10"]
    assert cli.run(common + ["--gram", str(k), "--out", str(r1), "--jobs", "1"]) == 0
    assert cli.run(common + ["--gram", str(k), "--out", str(r2), "--jobs", "2"]) == 0
    text = r1.read_text()
    assert text == r2.read_text()
    lines = text.splitlines()
    assert lines[0] == "# base=wl h=2 variant=e2v extended=1 normalize_addends=1"
    assert len(lines) == 5 and lines[-1].startswith("mean=")


def test_classify_raw_gram_is_normalized(data, tmp_path):
    k = tmp_path / "k.bin"
    assert cli.run(["gram", "--dataset", str(data), "--name", "SYN", "--kernel", "gr", "--raw", "--out", str(k)]) == 0
    assert not read_gram(k).normalized
    out = tmp_path / "r.txt"
    assert cli.run(["classify", "--dataset", str(data), "--name", "SYN", "--gram", str(k),
                    "--seeds", "1", "--out", str(out)]) == 0
    assert "h=-" in out.read_text()


def test_classify_gram_size_mismatch(data, tmp_path):
    write_synthetic_tudataset(tmp_path, "OTHER", 12, seed=1)
    k = tmp_path / "k.bin"
    assert cli.run(["gram", "--dataset", str(tmp_path), "--name", "OTHER", "--out", str(k)]) == 0
    assert cli.run(["classify", "--dataset", str(data), "--name", "SYN", "--gram", str(k)]) == 1


def test_config_round_trip(data, tmp_path):
    cfg1, cfg2 = tmp_path / "c1.json", tmp_path / "c2.json"
    out1, out2 = tmp_path / "o1.txt", tmp_path / "o2.txt"
    assert cli.run(["--dump-config", str(cfg1), "classify", "--dataset", str(data), "--name", "SYN",
                    "--kernel", "sp", "--seeds", "4..5", "--c-grid", "1", "--out", str(out1)]) == 0
    conf = json.loads(cfg1.read_text())
    assert conf["kernel"] == "sp" and conf["seeds"] == [4, 5] and conf["command"] == "classify"
    assert cli.run(["--config", str(cfg1), "--dump-config", str(cfg2), "classify", "--out", str(out2)]) == 0
    conf2 = json.loads(cfg2.read_text())
    assert {k: v for k, v in conf2.items() if k != "out"} == {k: v for k, v in conf.items() if k != "out"}
    assert out1.read_text() == out2.read_text()


def test_roundtrip_command(data, tmp_path, capsys):
    assert cli.run(["roundtrip", "--dataset", str(data), "--name", "SYN"]) == 0
    assert "failures=0" in capsys.readouterr().out
    f = tmp_path / "g.g"
    write_graph(f, claw("d"))
    assert cli.run(["roundtrip", "--in", str(f)]) == 0


def test_roundtrip_skips_untransformable(tmp_path, capsys):
    f = tmp_path / "g.g"
    f.write_text("g 1 0\nv 0 a\n")
    assert cli.run(["roundtrip", "--in", str(f)]) == 0
    assert "skipped=1" in capsys.readouterr().out


def test_roundtrip_rejects_dummy_input(tmp_path):
    f = tmp_path / "g.g"
    write_graph(f, augment_dummy(claw("a")))
    assert cli.run(["roundtrip", "--in", str(f)]) == 1


def test_selftest(capsys):
    assert cli.run(["selftest", "--graphs", "50", "--seed", "9"]) == 0
    assert "failures=0" in capsys.readouterr().out
