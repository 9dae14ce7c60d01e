import json

import pytest

from hatlab.cli import main
from hatlab.search import read_lp


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_set_dataset(capsys):
    code, out, _ = run(capsys, "verify-set", "dp18_n3k2")
    assert code == 0 and "3/10" in out


def test_verify_set_json(capsys):
    code, out, _ = run(capsys, "verify-set", "dp18_n3k2", "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["independent"] and d["size"] == 18 and d["probability"] == "3/10"


def test_verify_set_dependent_file(capsys, tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("n=2 k=2\n12\n13\n")
    code, out, _ = run(capsys, "verify-set", str(path))
    assert code == 1 and "NOT independent" in out


def test_strategy_evaluate_parity7(capsys):
    code, out, _ = run(capsys, "strategy", "parity_k1", "--n", "7", "--k", "1",
                       "--evaluate", "--threads", "1")
    assert code == 0
    assert "20160" in out and "1/2" in out


def test_strategy_evaluate_json_round_trip(capsys):
    from hatlab.simulate import EvalReport
    code, out, _ = run(capsys, "strategy", "double_parity", "--n", "3", "--k", "2",
                       "--evaluate", "--format", "json")
    report = EvalReport.from_json(out)
    assert code == 0 and str(report.probability) == "3/10"


def test_strategy_emit_and_verify(capsys, tmp_path):
    path = tmp_path / "s.txt"
    code, _, _ = run(capsys, "strategy", "mod_t:t=2,sigma=1", "--n", "4", "--k", "2",
                     "--emit", str(path))
    assert code == 0
    code, out, _ = run(capsys, "verify-set", str(path), "--format", "json")
    assert json.loads(out)["size"] == 108


def test_strategy_csv(capsys):
    code, out, _ = run(capsys, "strategy", "cyclic_n2", "--n", "2", "--k", "2",
                       "--evaluate", "--format", "csv")
    lines = out.splitlines()
    assert code == 0 and lines[0].startswith("spec,") and "1/3" in lines[1]


def test_simulate_trace(capsys):
    code, out, _ = run(capsys, "simulate", "cyclic_n2", "--n", "2", "--k", "2",
                       "--assignment", "2 1", "--assignment", "1 2", "--trace")
    assert code == 0
    assert out.splitlines() == ["2 1 -> 4 1  LOSS", "1 2 -> 1 2  WIN"]


def test_simulate_monte_carlo(capsys):
    code, out, _ = run(capsys, "simulate", "parity_k1", "--n", "4", "--monte-carlo", "500",
                       "--seed", "3", "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["samples"] == 500 and 0 <= d["estimate"] <= 1


def test_search_exact(capsys):
    code, out, _ = run(capsys, "search", "--n", "3", "--k", "2", "--exact", "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["size"] == 20 and d["optimal"]


def test_search_export(capsys, tmp_path):
    path = tmp_path / "m.lp"
    code, out, _ = run(capsys, "search", "--n", "2", "--k", "2", "--export-ilp", str(path))
    assert code == 0 and "12 variables" in out
    assert len(read_lp(path).constraints) == 8


def test_search_too_large_is_usage_error(capsys):
    code, _, err = run(capsys, "search", "--n", "7", "--k", "2", "--exact")
    assert code == 2 and "TooLarge" in err


def test_orbit(capsys, tmp_path):
    out_path = tmp_path / "o.txt"
    code, out, _ = run(capsys, "orbit", "--seeds", "seeds42_n5k2",
                       "--generators", "(24)(35);(1532)", "--out", str(out_path))
    assert code == 0 and "840" in out and "perfect" in out
    code, out, _ = run(capsys, "verify-set", str(out_path))
    assert code == 0 and "(perfect)" in out


@pytest.mark.parametrize("argv", [
    ["validate-od", "od_2_3_5"],
    ["validate-steiner", "fano"],
    ["validate-steiner", "s4511"],
    ["validate-latin", "latin6_n3k3"],
    ["validate-latin", "latin6_n4k2"],
    ["expand-steiner", "fano"],
    ["to-od", "reps15_n4k2"],
])
def test_validators_pass_on_embedded_data(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0, out


def test_validate_od_failure(capsys, tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1,2\n2,1\n3,3\n")
    code, out, _ = run(capsys, "validate-od", str(path))
    assert code == 1 and "INVALID" in out


def test_validate_latin_failure(capsys, tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("1 2\n1 2\n")
    code, _, _ = run(capsys, "validate-latin", str(path))
    assert code == 1


def test_teirlinck(capsys):
    code, out, _ = run(capsys, "teirlinck", "--n", "5", "--k", "6", "--format", "json")
    assert code == 0 and json.loads(out)["criterion"] is True


def test_best_residues(capsys):
    code, out, _ = run(capsys, "best-residues", "--n", "3", "--k", "2", "--format", "json")
    assert code == 0 and json.loads(out)["count"] == 18


def test_table1_small(capsys):
    code, out, _ = run(capsys, "table1", "--max-n", "3", "--max-k", "3")
    assert code == 0
    assert "FAIL" not in out
    assert "n=3 k=3" in out


def test_enumerate(capsys):
    code, out, _ = run(capsys, "enumerate", "--n", "2", "--k", "1")
    assert code == 0 and out.splitlines()[0] == "1 2" and len(out.splitlines()) == 6


def test_datasets_listing(capsys):
    code, out, _ = run(capsys, "datasets")
    assert code == 0 and "s4511" in out


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["verify-set"],
    ["search", "--n", "2", "--k", "2", "--wat"],
    ["verify-set", "no_such_dataset"],
    ["strategy", "nonsense", "--n", "2", "--k", "1"],
    ["simulate", "parity_k1", "--n", "3"],
])
def test_usage_errors_exit_2(capsys, argv):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 2


def test_threads_env(monkeypatch, capsys):
    monkeypatch.setenv("HATLAB_THREADS", "abc")
    code, _, _ = run(capsys, "strategy", "parity_k1", "--n", "3")
    assert code == 2
    monkeypatch.setenv("HATLAB_THREADS", "2")
    code, out, _ = run(capsys, "strategy", "parity_k1", "--n", "3")
    assert code == 0 and "12 members" in out
