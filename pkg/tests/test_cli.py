import csv
import json

import pytest

from hypercollapse.cli import main
from hypercollapse.hypergraph import Hypergraph, save


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_analyze_json_and_table(tmp_path, capsys):
    code, _ = run(capsys, "analyze", "--rho", "[0.1, 0.2, 0.7]", "--s-max", "2", "--points", "11",
                  "--out", str(tmp_path))
    assert code == 0
    prof = json.loads((tmp_path / "profile.json").read_text())
    assert prof["classification"] == "bicritical" and len(prof["xi"]) == 1
    rows = list(csv.reader(open(tmp_path / "envelopes.csv")))
    assert rows[0] == ["s", "g", "g_star"] and len(rows) == 12


def test_sample_collapse_domain_core(tmp_path, capsys):
    code, out = run(capsys, "sample", "--rho", "0.3,0.7", "--t", "0.5", "--n", "30", "--seed", "4")
    assert code == 0 and out.out.startswith("N 30\n")
    p = tmp_path / "h.txt"
    p.write_text(out.out)
    code, out = run(capsys, "collapse", str(p), "--format", "json")
    assert code == 0
    save(Hypergraph.from_edges(3, [[0, 1], [1, 2], [0, 2]]), tmp_path / "g.json")
    code, out = run(capsys, "core", str(tmp_path / "g.json"))
    assert json.loads(out.out) == {"core": [0, 1, 2]}
    save(Hypergraph.from_edges(3, [[1, 2], [0, 1, 2]]), tmp_path / "f.txt")
    code, out = run(capsys, "domain", str(tmp_path / "f.txt"), "--v0", "1")
    assert json.loads(out.out)["domain"] == [0, 1, 2]


def test_domain_with_patches_fails(tmp_path, capsys):
    save(Hypergraph.from_edges(3, [[1]]), tmp_path / "p.txt")
    code, out = run(capsys, "domain", str(tmp_path / "p.txt"), "--v0", "0")
    assert code == 2 and "patch" in out.err


def test_process_walk_chain(tmp_path, capsys):
    code, _ = run(capsys, "process", "--rho", "0.5,0.5", "--n", "200", "--horizon", "1",
                  "--grid", "0.5,1", "--seed", "1", "--events", "--out", str(tmp_path / "p"))
    assert code == 0 and (tmp_path / "p" / "events.csv").exists()
    code, _ = run(capsys, "walk", "--grid", "0.3,1.0", "--trials", "300", "--seed", "2", "--out", str(tmp_path / "w"))
    rows = list(csv.reader(open(tmp_path / "w" / "walks.csv")))
    assert rows[0] == ["trial", "t", "M"] and len(rows) == 601
    summary = json.loads((tmp_path / "w" / "walk_summary.json").read_text())
    assert summary["monotone"] is True
    code, _ = run(capsys, "chain", "--rho", "0.3,0.7", "--n", "30", "--t", "0.4", "--steps", "4",
                  "--trials", "10", "--seed", "3", "--out", str(tmp_path / "c"), "--format", "json")
    doc = json.loads((tmp_path / "c" / "chain.json").read_text())
    assert len(doc["rows"]) == 50 and set(doc["rows"][0]) == {"trial", "n", "Y", "Z"}


def test_experiment_command(tmp_path, capsys):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"kind": "core-check", "trials": 20, "master_seed": 9}))
    code, out = run(capsys, "experiment", str(p), "--out", str(tmp_path / "r"), "--format", "csv")
    assert code == 0 and "PASS core-duality" in out.err
    assert (tmp_path / "r" / "records.csv").read_text().startswith("schema_version,trial,n,m,core_size,agree")


def test_bad_rho(capsys):
    code, out = run(capsys, "analyze", "--rho", "0,0")
    assert code == 2 and out.err.startswith("error:")
