"""End-to-end checks of the command line: records, caching, exit codes."""

import json

import pytest

from cis import cli


def test_prob_complete_json_record(run_cli):
    code, out = run_cli("prob-complete", "--m", "2", "--n", "2")
    assert code == 0
    rec = json.loads(out)
    assert rec["schema"] == 1
    assert rec["quantity"] == "prob-complete"
    assert rec["params"] == {"m": 2, "n": 2, "engine": "gf"}
    assert rec["value"] == "5/6"
    assert rec["meta"]["approx"] == pytest.approx(5 / 6)
    assert rec["meta"]["cached"] is False
    assert "timestamp" in rec["meta"]


def test_second_run_is_served_from_cache(run_cli, tmp_path):
    _, first = run_cli("l1-closed", "--m", "2")
    code, second = run_cli("l1-closed", "--m", "2")
    assert code == 0
    rec1, rec2 = json.loads(first), json.loads(second)
    assert rec1["meta"]["cached"] is False
    assert rec2["meta"]["cached"] is True
    assert rec1["value"] == rec2["value"]
    assert len(list((tmp_path / "cache").rglob("*.json"))) == 1


def test_corrupt_cache_entry_is_recomputed(run_cli, tmp_path, capsys):
    run_cli("prob-complete", "--m", "2", "--n", "3")
    (entry,) = (tmp_path / "cache").rglob("*.json")
    entry.write_text("{this is not json", encoding="utf-8")
    capsys.readouterr()
    code, out = run_cli("prob-complete", "--m", "2", "--n", "3")
    assert code == 0
    rec = json.loads(out)
    assert rec["meta"]["cached"] is False
    assert "corrupt cache entry" in capsys.readouterr().err


def test_cache_is_keyed_by_version(run_cli, monkeypatch):
    run_cli("l1-exact", "--m", "1")
    _, hit = run_cli("l1-exact", "--m", "1")
    assert json.loads(hit)["meta"]["cached"] is True
    monkeypatch.setattr(cli, "__version__", "0.0.0+test")
    _, miss = run_cli("l1-exact", "--m", "1")
    assert json.loads(miss)["meta"]["cached"] is False


def test_seedless_monte_carlo_is_not_cached(run_cli, tmp_path):
    code, out = run_cli("mc", "l1", "--m", "2", "--n", "4", "--trials", "64")
    assert code == 0
    rec = json.loads(out)
    assert rec["meta"]["cached"] is False
    assert isinstance(rec["meta"]["seed"], int)
    assert not list((tmp_path / "cache").rglob("*.json"))


def test_seeded_monte_carlo_caches_and_replays(run_cli):
    _, first = run_cli("mc", "l1", "--m", "2", "--n", "4", "--trials", "64", "--seed", "7")
    _, second = run_cli("mc", "l1", "--m", "2", "--n", "4", "--trials", "64", "--seed", "7")
    rec1, rec2 = json.loads(first), json.loads(second)
    assert rec2["meta"]["cached"] is True
    assert rec1["value"] == rec2["value"]
    assert rec1["stderr"] == rec2["stderr"]


def test_domain_error_exits_2(run_cli, capsys):
    code, _ = run_cli("prob-complete", "--m", "0", "--n", "2")
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_bad_pattern_exits_2(run_cli):
    code, _ = run_cli(
        "mc", "obs2", "--m", "2", "--n", "4", "--trials", "64", "--seed", "1",
        "--pattern", "2,x",
    )
    assert code == 2


def test_no_convergence_exits_3(run_cli):
    code, _ = run_cli("l1-exact", "--m", "2", "--max-n", "5")
    assert code == 3


def test_space_too_large_exits_4(run_cli):
    code, _ = run_cli("mc", "lmax", "--m", "2", "--n", "100000000",
                      "--trials", "16", "--seed", "1")
    assert code == 4


def test_moments_csv_layout(run_cli):
    code, out = run_cli(
        "mc", "moments", "--m", "2", "--n", "10", "--trials", "128",
        "--seed", "3", "--r-max", "3", "--format", "csv",
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "kind,r,estimate,std_error,target"
    # mean row plus central r=2,3 plus raw r=1..3
    assert len(lines) == 1 + 1 + 2 + 3


def test_plain_rendering(run_cli):
    code, out = run_cli("invgamma", "--y", "24", "--format", "plain")
    assert code == 0
    assert out.startswith("invgamma(")
    assert "5.0" in out


def test_out_writes_file_and_silences_stdout(run_cli, tmp_path):
    target = tmp_path / "result.json"
    code, out = run_cli("prob-complete", "--m", "3", "--n", "2", "--out", str(target))
    assert code == 0
    assert out == ""
    rec = json.loads(target.read_text(encoding="utf-8"))
    assert rec["value"] == "19/20"


def test_roots_power_sum_check(run_cli):
    code, out = run_cli("roots", "--m", "3", "--check-power-sums")
    assert code == 0
    rec = json.loads(out)
    assert len(rec["value"]) == 3
    assert rec["meta"]["power_sums_ok"] is True
    assert rec["meta"]["power_sum_max_deviation"] < 1e-9
