"""End-to-end tests for the command-line front end (no subprocesses)."""

import csv
import json

import pytest

from fendec.cli import CSV_COLUMNS, main


def run(argv):
    return main(argv)


def test_gen_writes_requested_replications(tmp_path):
    out = tmp_path / "inst"
    code = run(["gen", "--n1", "4", "--n2", "3", "--scens", "3", "--reps", "3",
                "--seed", "7", "--out", str(out)])
    assert code == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == ["k.4.3.3a.sipx", "k.4.3.3b.sipx", "k.4.3.3c.sipx"]


def test_gen_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert run(["gen", "--n1", "4", "--n2", "3", "--scens", "2",
                    "--seed", "11", "--out", str(out)]) == 0
    assert (a / "k.4.3.2a.sipx").read_bytes() == (b / "k.4.3.2a.sipx").read_bytes()


def test_gen_requires_scens():
    with pytest.raises(SystemExit) as exc:
        run(["gen", "--n1", "4"])
    assert exc.value.code == 2


def test_gen_rejects_bad_reps(tmp_path):
    assert run(["gen", "--scens", "2", "--reps", "9", "--out", str(tmp_path)]) == 2


@pytest.fixture()
def toy_instance(tmp_path):
    out = tmp_path / "inst"
    run(["gen", "--n1", "4", "--n2", "3", "--scens", "3", "--seed", "5",
        "--out", str(out)])
    return out / "k.4.3.3a.sipx"


def test_solve_writes_exact_csv_columns(toy_instance, tmp_path, capsys):
    table = tmp_path / "runs.csv"
    code = run(["solve", str(toy_instance), "--alg", "sfd-r", "--csv", str(table)])
    assert code == 0
    assert "status=optimal" in capsys.readouterr().out
    with table.open() as fh:
        reader = csv.reader(fh)
        header = next(reader)
        row = next(reader)
    assert header == CSV_COLUMNS
    assert row[0] == "k.4.3.3a"
    assert row[1] == "sfd-r"
    assert float(row[7]) <= 1e-4  # gap_pct


def test_solve_agrees_with_direct(toy_instance, tmp_path):
    table = tmp_path / "runs.csv"
    for alg in ("sfd", "direct"):
        assert run(["solve", str(toy_instance), "--alg", alg, "--csv", str(table)]) == 0
    with table.open() as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 2  # appended, single header
    assert abs(float(rows[0]["lb"]) - float(rows[1]["lb"])) <= 1e-5


def test_solve_missing_file_is_io_error(tmp_path):
    assert run(["solve", str(tmp_path / "nope.sipx"), "--alg", "sfd"]) == 1


def test_solve_tiny_budget_still_reports(toy_instance, capsys):
    assert run(["solve", str(toy_instance), "--alg", "sfd", "--budget", "0.001"]) == 0
    out = capsys.readouterr().out
    assert "status=" in out and "gap=" in out


def test_seed_fallback_from_environment(toy_instance, tmp_path, monkeypatch):
    monkeypatch.setenv("FENDEC_SEED", "99")
    table = tmp_path / "runs.csv"
    run(["solve", str(toy_instance), "--alg", "direct", "--csv", str(table)])
    with table.open() as fh:
        row = next(csv.DictReader(fh))
    assert row["seed"] == "99"


def test_bench_grid_rows_and_averages(tmp_path, capsys):
    table = tmp_path / "bench.csv"
    code = run(["bench", "--sizes", "4.3.3", "--reps", "2", "--budget-iters", "20",
                "--csv", str(table), "--seed", "3"])
    assert code == 0
    with table.open() as fh:
        rows = list(csv.DictReader(fh))
    cells = [r for r in rows if not r["instance"].endswith(".avg")]
    avgs = [r for r in rows if r["instance"].endswith(".avg")]
    assert len(cells) == 2 * 3  # reps x algorithms
    assert len(avgs) == 3
    assert {r["algorithm"] for r in avgs} == {"sfd", "sfd-r", "direct"}
    assert "lowest average gap" in capsys.readouterr().out


def test_bench_counter_columns_deterministic(tmp_path):
    def counters(path):
        with open(path) as fh:
            return [
                (r["instance"], r["algorithm"], r["mips_solved"],
                 r["fenchel_cuts"], r["iterations"], r["lb"], r["ub"])
                for r in csv.DictReader(fh)
            ]
    args = ["bench", "--sizes", "4.3.3", "--reps", "2", "--budget-iters", "20",
            "--seed", "3"]
    assert run(args + ["--csv", str(tmp_path / "one.csv")]) == 0
    assert run(args + ["--csv", str(tmp_path / "two.csv")]) == 0
    assert counters(tmp_path / "one.csv") == counters(tmp_path / "two.csv")


def test_bench_accepts_instance_files(toy_instance, tmp_path):
    table = tmp_path / "bench.csv"
    code = run(["bench", str(toy_instance), "--algs", "sfd,direct",
                "--budget-iters", "20", "--csv", str(table)])
    assert code == 0
    with table.open() as fh:
        rows = list(csv.DictReader(fh))
    assert {r["algorithm"] for r in rows} == {"sfd", "direct"}
    assert all(r["instance"].startswith("k.4.3.3a") for r in rows)


def test_bench_emits_svg_plots(tmp_path):
    pytest.importorskip("matplotlib")
    plots = tmp_path / "plots"
    code = run(["bench", "--sizes", "4.3.3", "--reps", "1", "--budget-iters", "15",
                "--csv", str(tmp_path / "b.csv"), "--plots", str(plots)])
    assert code == 0
    assert sorted(p.name for p in plots.iterdir()) == ["cuts.svg", "gap.svg", "mips.svg"]


def test_isg_demo_passes(capsys):
    assert run(["isg-demo"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 3
    assert "FAIL" not in out


def test_isg_demo_json_traces(capsys):
    assert run(["isg-demo", "--json"]) == 0
    records = json.loads(capsys.readouterr().out)
    assert [r["final"] for r in records] == [[1, 2], [1, 2], [2, 0]]
    assert all(r["ok"] for r in records)
    assert records[2]["steps"][-1]["rule"] == "probe"


def test_isg_demo_corruption_detected(capsys):
    assert run(["isg-demo", "--demo3-upper", "4"]) == 3
    assert "FAIL" in capsys.readouterr().out
