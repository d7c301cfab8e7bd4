import csv
import json

import pytest
from click.testing import CliRunner
from jsonschema import validate

from immersions import cli as cli_module
from immersions.cli import cli, parse_float_list, parse_int_list
from immersions.errors import ConsistencyError
from immersions.experiment import CSV_FIELDS, SCHEMA_PATH
from immersions.immersion import parse_certificate
from immersions.tournament import parse_tournament


@pytest.fixture
def run(tmp_path):
    runner = CliRunner()

    def _run(*args, **kw):
        return runner.invoke(cli, [str(a) for a in args], catch_exceptions=False, **kw)

    return _run


def gen(run, tmp_path, name, *params, seed=None):
    out = tmp_path / f"{name}-{'-'.join(map(str, params))}-{seed}.txt"
    prefix = ["--seed", seed] if seed is not None else []
    res = run(*prefix, "gen", name, *params, "-o", out)
    assert res.exit_code == 0, res.output
    return out


def test_list_parsers():
    assert parse_int_list("3..6") == [3, 4, 5, 6]
    assert parse_int_list("2,5..6") == [2, 5, 6]
    assert parse_float_list("3..5") == [3.0, 4.0, 5.0]
    assert parse_float_list("2.5,3") == [2.5, 3.0]


def test_gen_regular(run, tmp_path):
    path = gen(run, tmp_path, "regular", 7)
    T = parse_tournament(path.read_text())
    assert set(T.out_degrees().tolist()) == {3}


def test_gen_min_outdegree_keywords(run, tmp_path):
    path = gen(run, tmp_path, "min-outdegree", "k=3", "n=6")
    assert parse_tournament(path.read_text()).min_out_degree() == 1


def test_gen_prints_summary(run, tmp_path):
    res = run("gen", "regular", 7, "-o", tmp_path / "r.txt")
    assert "n=7" in res.output and "min=3" in res.output


def test_gen_is_deterministic(run, tmp_path):
    a = run("gen", "random", 20, "seed=1").stdout
    b = run("gen", "random", 20, "seed=1").stdout
    assert a == b
    assert run("--seed", 1, "gen", "random", 20).stdout == a


@pytest.mark.parametrize("args", [("regular", 6), ("regular",), ("bogus", 3), ("regular", "x"), ("regular", 7, 7),
                                  ("random", 5, "foo=1")])
def test_gen_usage_errors(run, args):
    assert run("gen", *args).exit_code == 2


def test_find_tt_transitive(run, tmp_path):
    path = gen(run, tmp_path, "transitive", 5)
    cert = tmp_path / "c.cert"
    res = run("find", "tt", path, "-k", 5, "--cert", cert)
    assert res.exit_code == 0
    imm = parse_certificate(cert.read_text())
    assert imm.length_histogram() == {1: 10}
    assert run("verify", path, cert).exit_code == 0


def test_find_tt_regular_lower_bound(run, tmp_path):
    path = gen(run, tmp_path, "regular", 5)
    res = run("find", "tt", path, "-k", 4)
    assert res.exit_code == 1 and "status=failure" in res.output


def test_find_kd_near_regular(run, tmp_path):
    path = gen(run, tmp_path, "random-regular", 237, seed=3)
    cert = tmp_path / "kd.cert"
    res = run("find", "kd", path, "-k", 2, "--cert", cert)
    assert res.exit_code == 0, res.output
    imm = parse_certificate(cert.read_text())
    assert imm.max_length() <= 3
    assert run("verify", path, cert).exit_code == 0


def test_find_kd_infeasible_and_best_effort(run, tmp_path):
    path = gen(run, tmp_path, "min-outdegree", 3, 20)
    res = run("find", "kd", path, "-k", 3)
    assert res.exit_code == 1 and "infeasible" in res.output
    assert run("--best-effort", "find", "kd", path, "-k", 3).exit_code in (0, 1)


def test_find_parse_error(run, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("3\n010\n001\n10x\n")
    res = run("find", "tt", bad, "-k", 2)
    assert res.exit_code == 2 and "line 4" in res.stderr
    assert run("find", "tt", tmp_path / "missing.txt", "-k", 2).exit_code == 2


def test_find_consistency_failure(run, tmp_path, monkeypatch):
    path = gen(run, tmp_path, "transitive", 5)

    def boom(*a, **k):
        raise ConsistencyError("|C|<=5k", "forced")

    monkeypatch.setattr(cli_module, "find_tt_immersion", boom)
    res = run("find", "tt", path, "-k", 3)
    assert res.exit_code == 3 and "|C|<=5k" in res.stderr


def tamper(cert_text, old, new):
    assert old in cert_text
    return cert_text.replace(old, new, 1)


def test_verify_tampered_certificates(run, tmp_path):
    path = gen(run, tmp_path, "transitive", 4)
    cert = tmp_path / "c.cert"
    run("find", "tt", path, "-k", 3, "--cert", cert)
    text = cert.read_text()
    dup = tmp_path / "dup.cert"
    dup.write_text(tamper(text, "0 2 : 0 2", "0 2 : 0 1 2"))
    res = run("verify", path, dup, "--weak")
    assert res.exit_code == 1 and "edge-duplication" in res.output
    res = run("verify", path, dup)
    assert res.exit_code == 1 and "strongness" in res.output
    garbage = tmp_path / "g.cert"
    garbage.write_text("nonsense\n")
    assert run("verify", path, garbage).exit_code == 2


def test_verify_detects_branch_internal_detour(run, tmp_path):
    path = gen(run, tmp_path, "transitive", 6)
    cert = tmp_path / "c.cert"
    cert.write_text("pattern TT\nk 3\nbranches 0 3 5\n0 3 : 0 3\n0 5 : 0 3 5\n3 5 : 3 4 5\n")
    assert run("verify", path, cert, "--weak").exit_code == 1  # 0->3 reused
    cert.write_text("pattern TT\nk 3\nbranches 0 3 5\n0 3 : 0 3\n0 5 : 0 1 5\n3 5 : 3 5\n")
    assert run("verify", path, cert).exit_code == 0
    cert.write_text("pattern TT\nk 3\nbranches 0 2 5\n0 2 : 0 2\n0 5 : 0 2 5\n2 5 : 2 4 5\n")
    res = run("verify", path, cert)
    assert res.exit_code == 1 and "strongness" in res.output


def test_oracle_commands(run, tmp_path):
    path = gen(run, tmp_path, "triangle-blowup", 4, 4, 4)
    assert run("oracle", "find", path, "-k", 4, "--pattern", "kd", "--max-len", 2).exit_code == 1
    cert = tmp_path / "o.cert"
    assert run("oracle", "find", path, "-k", 4, "--pattern", "kd", "--max-len", 3, "--cert", cert).exit_code == 0
    assert run("verify", path, cert, "--max-len", 3).exit_code == 0
    res = run("--budget", 3, "oracle", "find", path, "-k", 4, "--pattern", "kd", "--max-len", 3)
    assert res.exit_code == 4 and "unknown" in res.output
    res = run("oracle", "f-bound", "-k", 3, "--n-max", 4)
    assert "f(3) strong=4" in res.output and "f(3) weak=4" in res.output


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_experiment_zero_trials(run, tmp_path):
    out = tmp_path / "e.csv"
    res = run("experiment", "tt", "--k", 3, "--ratios", "3", "--trials", 0, "--out-csv", out)
    assert res.exit_code == 0
    assert out.read_text().strip() == ",".join(CSV_FIELDS)
    summary = json.loads(out.with_suffix(".summary.json").read_text())
    validate(summary, json.loads(SCHEMA_PATH.read_text()))
    assert summary["trials"] == 0


def test_experiment_oracle_summary(run, tmp_path):
    out = tmp_path / "o.csv"
    summary_path = tmp_path / "o.json"
    res = run("experiment", "oracle", "--k", 3, "--ratios", 4, "--trials", 1, "--out-csv", out,
              "--summary", summary_path)
    assert res.exit_code == 0
    summary = json.loads(summary_path.read_text())
    validate(summary, json.loads(SCHEMA_PATH.read_text()))
    assert summary["f_values"] == {"3": "4"}


def strip_time(rows):
    return [{k: v for k, v in r.items() if k not in ("wall_time", "certificate")} for r in rows]


def test_experiment_replays_and_parallel_match(run, tmp_path):
    args = ["experiment", "tt", "--k", "3,4", "--ratios", "3,6", "--trials", 3, "--seeds", "5,6,7"]
    a, b, c = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
    run(*args, "--out-csv", a, "--cert-dir", tmp_path / "ca")
    run(*args, "--out-csv", b, "--cert-dir", tmp_path / "cb")
    run("--workers", 2, *args, "--out-csv", c)
    ra, rb, rc = read_rows(a), read_rows(b), read_rows(c)
    assert [r["trial"] for r in ra] == [str(i) for i in range(12)]
    assert strip_time(ra) == strip_time(rb) == strip_time(rc)
    for ra_row, rb_row in zip(ra, rb):
        if ra_row["certificate"]:
            assert open(ra_row["certificate"]).read() == open(rb_row["certificate"]).read()
    summary = json.loads(a.with_suffix(".summary.json").read_text())
    validate(summary, json.loads(SCHEMA_PATH.read_text()))
    assert {(c["k"], c["n"]) for c in summary["cells"]} == {(3, 9), (3, 18), (4, 12), (4, 24)}


def test_experiment_kd_records_trace(run, tmp_path):
    out = tmp_path / "kd.csv"
    res = run("experiment", "kd", "--k", 2, "--ratios", 118, "--n-offset", 1, "--trials", 1,
              "--generator", "random-regular", "--out-csv", out)
    assert res.exit_code == 0
    (row,) = read_rows(out)
    assert row["outcome"] == "success" and row["n"] == "237"
    assert "!" not in row["checks"] and "|active|>=32k" in row["checks"]


def test_experiment_errors_recorded_per_row(run, tmp_path):
    out = tmp_path / "err.csv"
    # even n for the random-regular generator raises inside each trial
    res = run("experiment", "kd", "--k", 2, "--ratios", 50, "--trials", 2, "--generator", "random-regular",
              "--out-csv", out)
    assert res.exit_code == 0
    rows = read_rows(out)
    assert [r["outcome"] for r in rows] == ["error", "error"]


def test_log_env(run, tmp_path):
    path = gen(run, tmp_path, "transitive", 5)
    res = run("find", "tt", path, "-k", 3, env={"IMMERSION_LOG": "debug"})
    assert res.exit_code == 0
