import csv
import io
import json
from fractions import Fraction

import pytest

from efxlab import Instance
from efxlab.cli import EXIT_GUARANTEE, EXIT_OK, EXIT_VALIDATION, main
from efxlab.harness import (
    ALGORITHMS,
    SWEEP_COLUMNS,
    adversary_ordinal,
    adversary_query,
    default_lambda,
    execute,
    generate_instance,
    sweep,
)


def test_gen_deterministic():
    a = generate_instance("uniform", 3, 10, seed=7)
    b = generate_instance("uniform", 3, 10, seed=7)
    c = generate_instance("uniform", 3, 10, seed=8)
    assert a == b and a != c


def test_gen_bivalued_has_meta():
    inst = generate_instance("bivalued", 3, 8, seed=1)
    assert inst.bivalued_meta is not None
    for (h, low), row in zip(inst.bivalued_meta, inst.values):
        assert h > low > 0
        assert all(v in (h, low) for v in row)


def test_gen_query_lb_matches_family():
    inst = generate_instance("query_lb", 2, k=2, t=2)
    assert (inst.n, inst.m) == (2, 8)


def test_gen_ordinal_lb_cases():
    case1 = generate_instance("ordinal_lb", 2, 6, case=1)
    case2 = generate_instance("ordinal_lb", 2, 6, case=2)
    assert case1.values[0][1] == 0 and case2.values[0][1] == 1


def test_execute_bound_flag_recomputable():
    inst = generate_instance("uniform", 3, 12, seed=3)
    for alg in ("round_robin", "rrla"):
        record = execute(inst, alg)
        metric = record.alpha_efx if record.bound_kind == "efx" else record.alpha_ef1
        assert record.bound_satisfied == (metric >= record.bound)
        data = record.to_json()
        assert data["algorithm"] == alg


def test_execute_rejects_unknown_algorithm():
    inst = generate_instance("uniform", 2, 4, seed=0)
    with pytest.raises(Exception):
        execute(inst, "nope")


def test_default_lambda_admissible():
    for n, m, k in [(2, 8, 2), (5, 32, 2), (5, 32, 3), (4, 27, 3)]:
        lam = default_lambda(n, m, k)
        assert lam >= 1
        assert lam ** (2 * k - 1) * m >= n ** (2 * k - 1)


def test_sweep_deterministic_and_columns():
    config = {
        "runs": [
            {"kind": "uniform", "n": 3, "m": 8, "algorithm": "round_robin", "trials": 2, "seed": 5},
            {"kind": "bivalued", "n": 2, "m": 6, "algorithm": "mfrr", "trials": 1, "seed": 5},
        ]
    }
    out1, out2 = io.StringIO(), io.StringIO()
    sweep(config, out1)
    sweep(config, out2)
    assert out1.getvalue() == out2.getvalue()
    rows = list(csv.DictReader(io.StringIO(out1.getvalue())))
    assert len(rows) == 3
    assert list(rows[0].keys()) == SWEEP_COLUMNS
    assert all(r["error"] == "" for r in rows)


def test_sweep_empty_config_header_only():
    out = io.StringIO()
    sweep({"runs": []}, out)
    assert out.getvalue().strip() == ",".join(SWEEP_COLUMNS)


def test_sweep_records_errors_and_continues():
    config = {
        "runs": [
            {"kind": "uniform", "n": 2, "m": 6, "algorithm": "mfrr", "trials": 1},
            {"kind": "uniform", "n": 2, "m": 6, "algorithm": "round_robin", "trials": 1},
        ]
    }
    out = io.StringIO()
    sweep(config, out)
    rows = list(csv.DictReader(io.StringIO(out.getvalue())))
    assert "NotBivalued" in rows[0]["error"]
    assert rows[1]["error"] == ""


def test_adversary_ordinal_passes():
    for alg in ("round_robin", "rrla"):
        result = adversary_ordinal(3, 8, alg)
        assert result["pass"]


def test_adversary_query_passes():
    result = adversary_query(2, 2, 2, "rrla", budget=2)
    assert result["pass"] and result["consistent"]


# ---- CLI ---------------------------------------------------------------


def test_cli_gen_run_round_trip(tmp_path, capsys):
    path = tmp_path / "inst.json"
    assert main(["gen", "--kind", "uniform", "--n", "3", "--m", "8",
                 "--seed", "4", "--out", str(path)]) == EXIT_OK
    Instance.loads(path.read_text())
    assert main(["run", "--instance", str(path), "--alg", "rrla",
                 "--assert-bounds"]) == EXIT_OK
    record = json.loads(capsys.readouterr().out)
    assert record["bound_satisfied"] is True


def test_cli_env_seed(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("EFX_LAB_SEED", "9")
    assert main(["gen", "--kind", "uniform", "--n", "2", "--m", "4"]) == EXIT_OK
    first = capsys.readouterr().out
    assert main(["gen", "--kind", "uniform", "--n", "2", "--m", "4",
                 "--seed", "9"]) == EXIT_OK
    assert capsys.readouterr().out == first


def test_cli_validation_exit_code(tmp_path, capsys):
    path = tmp_path / "inst.json"
    main(["gen", "--kind", "uniform", "--n", "2", "--m", "4", "--out", str(path)])
    capsys.readouterr()
    # mfrr on a non-bivalued instance is a validation failure.
    assert main(["run", "--instance", str(path), "--alg", "mfrr"]) == EXIT_VALIDATION


def test_cli_oracle_and_verify(tmp_path, capsys):
    inst_path = tmp_path / "inst.json"
    main(["gen", "--kind", "uniform", "--n", "2", "--m", "5",
          "--seed", "2", "--out", str(inst_path)])
    capsys.readouterr()
    assert main(["oracle", "--instance", str(inst_path)]) == EXIT_OK
    result = json.loads(capsys.readouterr().out)
    alloc_path = tmp_path / "alloc.json"
    alloc_path.write_text(json.dumps(result["allocation"]))
    assert main(["verify", "--instance", str(inst_path),
                 "--allocation", str(alloc_path)]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["alpha_efx"] == result["best_alpha"]


def test_cli_verify_rejects_overlap(tmp_path, capsys):
    inst_path = tmp_path / "inst.json"
    main(["gen", "--kind", "uniform", "--n", "2", "--m", "4", "--out", str(inst_path)])
    alloc_path = tmp_path / "alloc.json"
    alloc_path.write_text(json.dumps({"bundles": [[0, 1], [1, 2, 3]]}))
    capsys.readouterr()
    assert main(["verify", "--instance", str(inst_path),
                 "--allocation", str(alloc_path)]) == EXIT_VALIDATION


def test_cli_adversary(capsys):
    code = main(["adversary", "--family", "ordinal", "--n", "2", "--m", "7",
                 "--alg", "round_robin"])
    result = json.loads(capsys.readouterr().out)
    assert code == EXIT_OK and result["pass"]


def test_cli_sweep(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"runs": [
        {"kind": "uniform", "n": 2, "m": 6, "algorithm": "round_robin", "trials": 1}
    ]}))
    out = tmp_path / "out.csv"
    assert main(["sweep", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 1 and rows[0]["bound_ok"] == "True"
