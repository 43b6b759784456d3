import json
import subprocess
import sys

import pytest
import yaml

from internality.cli import main
from internality.scenario import (
    BUNDLED,
    FIXTURES,
    Report,
    ScenarioError,
    bundled_names,
    bundled_path,
    dump_scenario,
    export_report,
    generate_example,
    load_scenario,
    report_from_json,
    run_scenario,
    scenario_from_dict,
)


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rigid_pairs(n=12):
    xs = [f"x{i}" for i in range(n)]
    return {"name": "rigid", "structure": {"sorts": {"X": xs}, "constants": {f"c{i}": ["X", x] for i, x in enumerate(xs)}},
            "quotient": {"object": "XxX", "relation": "unordered_pair"}, "checks": ["quotient"]}


@pytest.mark.parametrize("name", sorted(set(BUNDLED) | set(FIXTURES)))
def test_bundled_files_are_regenerable(name):
    text = bundled_path(name).read_text()
    kind, params = (BUNDLED | FIXTURES)[name]
    assert dump_scenario(generate_example(kind, **params)) == text


def test_generated_examples_load():
    for kind, params in [("gset", {"group": "Z2"}), ("vecspace", {"q": 3, "n": 1}), ("pair_quotient", {"p": 5}),
                         ("trivial", {})]:
        sc = scenario_from_dict(generate_example(kind, **params))
        assert sc.checks
    with pytest.raises(ScenarioError):
        generate_example("vecspace", q=2, n=5)
    with pytest.raises(ScenarioError):
        generate_example("nonsense")


def test_run_small_examples():
    rep = run_scenario(scenario_from_dict(generate_example("vecspace", q=3, n=1)))
    assert rep.ok and rep.data["results"]["groups"]["order"] == 2
    rep = run_scenario(scenario_from_dict(generate_example("pair_quotient", p=5)))
    assert rep.ok and rep.data["results"]["quotient"]["classes"] == 15


def test_expected_order_mismatch_exits_one(capsys, tmp_path):
    exp = tmp_path / "exp.yaml"
    exp.write_text("order: 5\n")
    code, out, _ = run_cli(capsys, "run", "vecspace_q2_n2", "--checks", "groups", "--expect-file", str(exp),
                           "--format", "json")
    assert code == 1
    res = json.loads(out)["results"]["groups"]
    assert not res["ok"] and res["order"] == 6 and res["expected_order"] == 5


def test_yaml_error_reports_position(capsys, tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("name: x\nstructure:\n  sorts: [a, b\n")
    code, _, err = run_cli(capsys, "validate", str(bad))
    assert code == 2 and "line" in err and "column" in err
    with pytest.raises(ScenarioError) as exc:
        load_scenario(bad)
    assert exc.value.line is not None and exc.value.column is not None


def test_schema_errors_exit_two(capsys, tmp_path):
    code, _, err = run_cli(capsys, "run", "trivial_cover", "--checks", "groups,bogus")
    assert code == 2 and "bogus" in err
    bad = tmp_path / "nosorts.yaml"
    bad.write_text("name: x\nstructure: {}\n")
    assert run_cli(capsys, "validate", str(bad))[0] == 2


def test_capacity_exits_three(capsys, tmp_path):
    p = tmp_path / "rigid.yaml"
    p.write_text(yaml.safe_dump(rigid_pairs()))
    code, _, err = run_cli(capsys, "run", str(p))
    assert code == 3 and "capacity" in err


def test_empty_check_list_gives_header_only(capsys, tmp_path):
    raw = generate_example("trivial")
    raw["checks"] = []
    p = tmp_path / "empty.yaml"
    p.write_text(dump_scenario(raw))
    code, out, _ = run_cli(capsys, "run", str(p), "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["results"] == {} and data["checks"] == []


def test_report_round_trip(capsys, tmp_path):
    out = tmp_path / "r.json"
    assert run_cli(capsys, "run", "gset_z3", "--format", "json", "-o", str(out))[0] == 0
    rep = report_from_json(out.read_text())
    assert export_report(rep, "json") == out.read_text()
    code, text, _ = run_cli(capsys, "report", str(out))
    assert code == 0 and "[PASS] groups" in text and text.rstrip().endswith("status: pass")


def test_report_of_failed_run_exits_one(capsys, tmp_path):
    r = Report("x", ["validate"])
    r.add("validate", False, reason="forced")
    p = tmp_path / "f.json"
    p.write_text(r.to_json())
    code, text, _ = run_cli(capsys, "report", str(p))
    assert code == 1 and "[FAIL] validate" in text
    p.write_text("{not json")
    assert run_cli(capsys, "report", str(p))[0] == 2


def test_json_output_is_deterministic(capsys):
    a = run_cli(capsys, "run", "vecspace_q3_n1", "--format", "json")[1]
    b = run_cli(capsys, "run", "vecspace_q3_n1", "--format", "json")[1]
    assert a == b


def test_list_and_generate(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "list")
    assert code == 0 and out.split() == bundled_names()
    p = tmp_path / "g.yaml"
    assert run_cli(capsys, "generate", "gset", "--group", "Z2", "-o", str(p))[0] == 0
    assert load_scenario(p).name == "gset_z2"


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "internality", "list"], capture_output=True, text=True, timeout=60)
    assert res.returncode == 0 and "gset_z2" in res.stdout


def test_unexpected_failures_are_reported_as_failures(capsys, tmp_path):
    # without add and mul the field sort is not rigid, so the cover is not closed
    raw = generate_example("vecspace", q=3, n=1)
    del raw["expected"]
    raw["structure"]["functions"] = {"smul": raw["structure"]["functions"]["smul"]}
    raw["structure"]["constants"] = {"vzero": ["V", "v0"]}
    raw["checks"] = ["cover", "hypotheses", "compact"]
    p = tmp_path / "loose.yaml"
    p.write_text(dump_scenario(raw))
    code, out, _ = run_cli(capsys, "run", str(p), "--format", "json")
    res = json.loads(out)["results"]
    assert code == 1
    assert not res["cover"]["ok"] and res["cover"]["failed_clauses"] == ["F_closed", "I_closed"]
    assert not res["hypotheses"]["ok"] and not res["compact"]["ok"]


def test_refusal_without_expectation_fails():
    raw = generate_example("synthetic_fixture", fixture="nonstrict_bi")
    assert run_scenario(scenario_from_dict(raw)).ok
    raw["expected"].pop("refusal_clause")
    rep = run_scenario(scenario_from_dict(raw))
    assert not rep.data["results"]["compact"]["ok"] and not rep.data["results"]["hypotheses"]["ok"]
