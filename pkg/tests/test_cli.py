import json
import math

import numpy as np
import pytest

from fairmsr.cli import main
from fairmsr.geometry import UsageError, exact_meb
from fairmsr.io import (InstanceError, dumps, format_instance, parse_instance,
                        validate_document)

PAIRS = "0,0\n1,0\n100,0\n101,0\n"


@pytest.fixture
def pairs(tmp_path):
    p = tmp_path / "pairs.csv"
    p.write_text(PAIRS)
    return p


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_two_pairs(capsys, pairs):
    code, out, _ = run(capsys, "solve", "--input", pairs, "--k", 2, "--epsilon", 0.3,
                       "--constraint", "none")
    doc = json.loads(out)
    assert code == 0 and doc["schema"] == 1
    assert 1.0 <= doc["refined_cost"] <= 1.3
    assert doc["parameters"]["k"] == 2 and doc["guarantee_factor"] > 1
    validate_document(doc, np.loadtxt(pairs, delimiter=","))


def test_lower_bound_three_is_single_cluster(capsys, pairs):
    code, out, _ = run(capsys, "solve", "--input", pairs, "--k", 2, "--epsilon", 0.3,
                       "--constraint", "lower-bound:3")
    assert code == 0
    assert json.loads(out)["refined_cost"] == pytest.approx(50.5)


def test_infeasible_exit_2(capsys, pairs):
    code, out, _ = run(capsys, "solve", "--input", pairs, "--k", 2, "--epsilon", 0.3,
                       "--constraint", "lower-bound:5")
    assert code == 2 and json.loads(out)["feasible"] is False


def test_empty_file_exit_1(capsys, tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text("")
    code, _, err = run(capsys, "solve", "--input", p, "--k", 2, "--epsilon", 0.3)
    assert code == 1 and "no data rows" in err


@pytest.mark.parametrize("text,line", [
    ("0,0\n1,x\n", 2),
    ("0,0\n\n1,2,3\n", 3),
    ("x,y\n0,0\n1,nan\n", 3),
    ("0,0,color:r\n1,1\n", 2),
])
def test_malformed_reports_line(capsys, tmp_path, text, line):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    code, _, err = run(capsys, "solve", "--input", p, "--k", 1, "--epsilon", 0.3)
    assert code == 1 and f"bad.csv:{line}:" in err


@pytest.mark.parametrize("argv", [
    ["solve", "--input", "x.csv", "--k", "2", "--epsilon", "0.7"],
    ["solve", "--k", "2"],
    ["bench", "--suite", "nope"],
    ["frobnicate"],
])
def test_usage_errors_exit_1(capsys, pairs, argv):
    argv = [str(pairs) if a == "x.csv" else a for a in argv]
    assert main(argv) == 1


def test_oracle_examples(capsys, pairs, tmp_path):
    code, out, _ = run(capsys, "oracle", "--input", pairs, "--k", 2)
    assert code == 0 and json.loads(out)["refined_cost"] == pytest.approx(1.0)
    one = tmp_path / "one.csv"
    one.write_text("3,4\n")
    code, out, _ = run(capsys, "oracle", "--input", one, "--k", 1)
    assert json.loads(out)["refined_cost"] == 0.0
    col = tmp_path / "col.csv"
    col.write_text("0,0,color:red\n1,0,color:blue\n100,0,color:red\n101,0,color:blue\n")
    code, out, _ = run(capsys, "oracle", "--input", col, "--k", 2,
                       "--constraint", "exact-fairness")
    assert json.loads(out)["refined_cost"] == pytest.approx(1.0)


def test_oracle_budget_exit_3(capsys, pairs, monkeypatch):
    monkeypatch.setenv("FAIR_MSR_BUDGET", "3")
    code, _, err = run(capsys, "oracle", "--input", pairs, "--k", 2)
    assert code == 3 and "budget" in err


def test_header_color_column_and_range_table(capsys, tmp_path):
    inst = tmp_path / "h.csv"
    inst.write_text("x,y,color\n0,0,a\n1,0,b\n5,0,a\n6,0,b\n")
    table = tmp_path / "t.csv"
    table.write_text("a,0.4,0.6\nb,0.4,0.6\n")
    code, out, _ = run(capsys, "solve", "--input", inst, "--k", 2, "--epsilon", 0.3,
                       "--constraint", f"range-balance:{table}")
    doc = json.loads(out)
    assert code == 0
    assert sorted(sorted(c["points"]) for c in doc["clusters"]) == [[0, 1], [2, 3]]
    table.write_text("a,0.4,0.6\nzz,0.4,0.6\n")
    code, _, err = run(capsys, "solve", "--input", inst, "--k", 2, "--epsilon", 0.3,
                       "--constraint", f"range-balance:{table}")
    assert code == 1 and "t.csv:2:" in err


def test_plot_data_and_output_file(capsys, pairs, tmp_path):
    plot, res = tmp_path / "plot.csv", tmp_path / "res.json"
    code, out, _ = run(capsys, "solve", "--input", pairs, "--k", 2, "--epsilon", 0.3,
                       "--output", res, "--emit-plot-data", plot)
    assert code == 0 and out == ""
    rows = plot.read_text().splitlines()
    assert rows[0] == "x0,x1,cluster,color" and len(rows) == 5
    ids = [r.split(",")[2] for r in rows[1:]]
    assert ids[0] == ids[1] != ids[2] == ids[3]
    assert json.loads(res.read_text())["feasible"]


def test_gen_is_deterministic(capsys):
    argv = ["gen", "--n", 8, "--d", 2, "--k-planted", 2, "--separation", 3, "--seed", 7]
    code, a, err = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert code == 0 and a == b
    P, _ = parse_instance(a)
    assert P.shape == (8, 2)
    planted = json.loads(err)["planted"]
    assert [p["size"] for p in planted] == [4, 4]
    for p, block in zip(planted, (P[:4], P[4:])):
        assert all(math.dist(p["center"], q) <= p["radius"] * (1 + 1e-9) for q in block)


def test_gen_exact_fair_colors(capsys):
    code, out, err = run(capsys, "gen", "--n", 12, "--k-planted", 3, "--colors", "exact-fair",
                         "--seed", 3)
    assert code == 0
    _, colors = parse_instance(out)
    sizes = [p["size"] for p in json.loads(err)["planted"]]
    start = 0
    for s in sizes:
        assert colors.counts(range(start, start + s)) == [s // 2, s // 2]
        start += s


@pytest.mark.parametrize("argv", [
    ["--n", 2, "--k-planted", 3],
    ["--n", 9, "--k-planted", 3, "--colors", "exact-fair"],
    ["--n", 4, "--k-planted", 1, "--colors", "7"],
    ["--n", 4, "--k-planted", 1, "--separation", 0],
])
def test_gen_contradictions_exit_1(capsys, argv):
    assert run(capsys, "gen", *argv)[0] == 1


def test_round_trip(capsys, tmp_path):
    inst = tmp_path / "g.csv"
    run(capsys, "gen", "--n", 12, "--k-planted", 2, "--colors", "exact-fair", "--seed", 1,
        "--output", inst)
    code, out, _ = run(capsys, "solve", "--input", inst, "--k", 2, "--epsilon", 0.3,
                       "--constraint", "exact-fairness", "--workers", 2)
    doc = json.loads(out)
    assert code == 0
    assert json.loads(dumps(doc)) == doc
    P, colors = parse_instance(inst.read_text())
    validate_document(doc, P)
    for c in doc["clusters"]:
        assert colors.counts(c["points"])[0] * 2 == len(c["points"])
        assert c["radius"] == pytest.approx(exact_meb(P[c["points"]]).radius, abs=1e-9)


def test_validate_document_catches_tampering(capsys, pairs):
    _, out, _ = run(capsys, "solve", "--input", pairs, "--k", 2, "--epsilon", 0.3)
    doc = json.loads(out)
    P = np.loadtxt(pairs, delimiter=",")
    doc["refined_cost"] += 0.1
    with pytest.raises(UsageError):
        validate_document(doc, P)
    doc = json.loads(out)
    doc["clusters"][0]["points"] = doc["clusters"][0]["points"][:1]
    with pytest.raises(UsageError):
        validate_document(doc, P)


def test_solve_output_is_byte_stable(capsys, pairs):
    argv = ["solve", "--input", pairs, "--k", 2, "--epsilon", 0.3]
    assert run(capsys, *argv)[1] == run(capsys, *argv, "--workers", 2)[1]
    code, out, _ = run(capsys, *argv, "--timing")
    assert code == 0 and "wall_time" in json.loads(out)["diagnostics"]


@pytest.mark.parametrize("suite,trials", [("ratio-vs-oracle", 10), ("grid-covering", 200),
                                          ("lemma-interval", 10)])
def test_bench_suites(capsys, suite, trials):
    code, a, _ = run(capsys, "bench", "--suite", suite, "--trials", trials, "--seed", 1)
    _, b, _ = run(capsys, "bench", "--suite", suite, "--trials", trials, "--seed", 1)
    assert code == 0 and a == b
    lines = a.splitlines()
    assert len(lines) >= trials + 2 and "violations=0" in lines[-1]
    if suite == "ratio-vs-oracle":
        assert lines[0].split("\t")[-3:] == ["oracle_cost", "solver_cost", "ratio"]


def test_bench_timing_column(capsys):
    _, out, _ = run(capsys, "bench", "--suite", "ratio-vs-oracle", "--trials", 2, "--timing")
    assert out.splitlines()[0].endswith("seconds")


def test_format_and_parse_round_trip():
    P = np.random.default_rng(0).normal(size=(5, 3))
    Q, colors = parse_instance(format_instance(P))
    assert colors is None and np.array_equal(P, Q)


def test_parse_comments_and_blank_lines():
    P, _ = parse_instance("# header comment\n\n1,2\n3,4\n")
    assert P.tolist() == [[1, 2], [3, 4]]
    with pytest.raises(InstanceError):
        parse_instance("# only a comment\n")
