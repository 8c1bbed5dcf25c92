import json
from pathlib import Path

import pytest

from toridyn.cli import fan_json, main, parse_fan, run_job
from toridyn.corpus import endomorphisms, flip_threefold
from toridyn.errors import InputError

JOBS = Path(__file__).resolve().parent.parent / "jobs"
ENDO = sorted(name for name, _, _ in endomorphisms())


def _write(tmp_path, job, name="job.json"):
    p = tmp_path / name
    p.write_text(json.dumps(job))
    return str(p)


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def _load(name):
    return json.loads((JOBS / f"{name}.json").read_text())


@pytest.mark.parametrize("name", ENDO)
def test_every_corpus_job_runs(capsys, name):
    for command in ("analyze", "preper"):
        code, out, _ = _run(capsys, command, "--job", str(JOBS / f"{name}.json"))
        assert code == 0
        rep = json.loads(out)
        assert rep["command"] == command and rep["schema_version"] == "1"
    assert json.loads(out)["result"]["verdict"] == "dense"


def test_analyze_output_fields(capsys):
    code, out, _ = _run(capsys, "analyze", "--job", str(JOBS / "p1p1_diag_2_3.json"))
    res = json.loads(out)["result"]
    assert code == 0
    assert res["lambda1"]["minimal_polynomial"] == "x - 3"
    assert res["lambda1"]["coefficients"] == ["1", "-3"]
    assert res["int_amplified"] and res["amplified"] and not res["polarized"]
    assert out.endswith("}\n") and out == json.dumps(json.loads(out), sort_keys=True, indent=2) + "\n"


def test_difficulty_jobs(capsys):
    code, out, _ = _run(capsys, "difficulty", "--job", str(JOBS / "p1p1_diag_2_3_difficulty.json"))
    assert code == 0 and json.loads(out)["result"]["bound"] == "2"
    code, out, _ = _run(capsys, "difficulty", "--job", str(JOBS / "p1p1_id_times_2_relative0.json"))
    assert code == 0 and json.loads(out)["result"]["bound"] == "1"


def test_difficulty_without_base_is_input_error(capsys):
    code, _, err = _run(capsys, "difficulty", "--job", str(JOBS / "p1p1_diag_2_3.json"))
    assert code == 2 and "base" in err


def test_entropy_jobs(capsys):
    code, out, _ = _run(capsys, "entropy", "--job", str(JOBS / "entropy_irrational.json"))
    assert code == 0 and json.loads(out)["result"]["entropy"]["positive_entropy"]
    code, out, _ = _run(capsys, "entropy", "--job", str(JOBS / "entropy_quadrant_swap.json"))
    res = json.loads(out)["result"]
    assert code == 0 and not res["entropy"]["positive_entropy"] and res["dx"]["d1"] == "2"
    code, out, _ = _run(capsys, "entropy", "--job", str(JOBS / "entropy_p1p1_swap.json"))
    assert code == 0
    code, out, err = _run(capsys, "entropy", "--job", str(JOBS / "entropy_unipotent.json"))
    rep = json.loads(out)
    assert code == 2 and "error" in rep and rep["result"]["entropy"]["infinite_order_in_action"]


def test_malformed_fan_exits_2(capsys):
    code, out, err = _run(capsys, "analyze", "--job", str(JOBS / "malformed_overlap.json"))
    assert code == 2 and out == "" and err.startswith("toridyn:")


@pytest.mark.parametrize(
    "mutate",
    [
        lambda j: j.update(schema_version="2"),
        lambda j: j.update(surprise="1"),
        lambda j: j["lattice_map"][0].__setitem__(0, 2),
        lambda j: j["lattice_map"][0].__setitem__(0, "2.5"),
        lambda j: j.pop("fan"),
        lambda j: j.update(options={"strategy": "random"}),
    ],
)
def test_schema_violations_exit_2(capsys, tmp_path, mutate):
    job = _load("p1p1_diag_2_3")
    mutate(job)
    code, out, _ = _run(capsys, "analyze", "--job", _write(tmp_path, job))
    assert code == 2 and out == ""


def test_unreadable_job_exits_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert _run(capsys, "analyze", "--job", str(bad))[0] == 2
    assert _run(capsys, "analyze", "--job", str(tmp_path / "missing.json"))[0] == 2


def test_incomplete_fan_exits_3(capsys, tmp_path):
    job = {
        "schema_version": "1",
        "fan": {"rays": [["1", "0"], ["0", "1"]], "cones": [["0", "1"]]},
        "lattice_map": [["2", "0"], ["0", "2"]],
    }
    code, _, err = _run(capsys, "analyze", "--job", _write(tmp_path, job))
    assert code == 3 and "complete" in err


def test_branch_cap_exits_4_with_partial_report(capsys):
    code, out, _ = _run(capsys, "mmp", "--job", str(JOBS / "flip3_dilation_2.json"), "--branch-cap", "2")
    rep = json.loads(out)
    assert code == 4 and rep["partial"] is True and len(rep["result"]["traces"]) == 2


def test_strategy_flag(capsys):
    code, out, _ = _run(capsys, "mmp", "--job", str(JOBS / "flip3_dilation_2.json"), "--strategy", "first_ray")
    assert code == 0 and len(json.loads(out)["result"]["traces"]) == 1


def test_text_format_and_out_file(capsys, tmp_path):
    target = tmp_path / "report.txt"
    code, out, _ = _run(capsys, "preper", "--job", str(JOBS / "f1_identity.json"), "--format", "text", "--out", str(target))
    assert code == 0 and out == ""
    text = target.read_text()
    assert "dense" in text and not text.lstrip().startswith("{")


def test_fan_round_trip():
    fan = flip_threefold()
    assert parse_fan(fan_json(fan)) == fan
    with pytest.raises(InputError):
        run_job("analyze", {"schema_version": "1", "fan": fan_json(fan)})
