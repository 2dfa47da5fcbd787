import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from partalg.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def schema(name):
    text = resources.files("partalg").joinpath("schemas", f"{name}.json").read_text(encoding="utf-8")
    return json.loads(text)


JSON_CASES = [
    ("enum", ["enum", "3"]),
    ("enum", ["enum", "2", "2", "--tonal", "2"]),
    ("compose", ["compose", "P[2,2]:(1 2)(1' 2') ∘ P[2,2]:(1 2)(1' 2')"]),
    ("gram_matrix", ["gram", "--algebra", "P1", "--n", "3"]),
    ("gram_report", ["gram", "--algebra", "P2", "--n", "6", "--report"]),
    ("gram_report", ["gram", "--algebra", "P1", "--n", "3", "--smith"]),
    ("gram_report", ["gram", "--algebra", "P2", "--n", "5", "--report"]),
    ("potts", ["potts", "--q", "3", "--n", "5"]),
    ("potts", ["potts", "--q", "2", "--n", "4", "--signed", "--rank"]),
    ("sparse_matrix", ["potts", "--q", "2", "--image", "P[2,2]: (1 2')(2 1')"]),
    ("bratelli", ["bratelli", "--algebra", "P2", "--n-max", "3"]),
    ("dims", ["dims", "--what", "bell", "--args", "20"]),
    ("semisimple", ["semisimple", "--algebra", "P2", "--delta", "7/3", "--n", "4"]),
    ("semisimple", ["semisimple", "--algebra", "P1", "--delta", "0"]),
    ("oddeven", ["oddeven", "--n", "3"]),
]


@pytest.mark.parametrize("name,argv", JSON_CASES)
def test_json_outputs_validate(capsys, name, argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    assert code == 0, err
    jsonschema.validate(json.loads(out), schema(name))


def test_gram_report_example(capsys):
    code, out, _ = run(capsys, "gram", "--algebra", "P2", "--n", "6", "--report", "--format", "json")
    obj = json.loads(out)
    assert code == 0
    assert [(f["root"], f["mult"]) for f in obj["factors"]] == [(0, 31), (1, 30), (2, 15)]
    assert obj["degree"] == 76 and obj["checks"]["saturation"] is True


def test_dims_tcount(capsys):
    assert run(capsys, "dims", "--what", "tcount", "--args", "3", "2") == (0, "15\n", "")


def test_compose_tensor(capsys):
    code, out, _ = run(capsys, "compose", "P[1,1]:(1)(1') ⊗ P[1,1]:(1 1')")
    assert code == 0 and out == "1\tP[2,2]: (1)(2 2')(1')\n"


def test_text_and_csv(capsys):
    _, out, _ = run(capsys, "enum", "3")
    assert out.splitlines()[1] == "P[3,0]: (1 2)(3)"
    _, out, _ = run(capsys, "gram", "--algebra", "P1", "--n", "2", "--format", "csv")
    assert out == "d^2,d^1\nd^1,d^1\n"
    _, out, _ = run(capsys, "potts", "--q", "2", "--image", "P[3,0]: (1 2)(3)")
    assert [line.split("\t")[1] for line in out.splitlines()] == ["1", "1", "0", "0", "0", "0", "1", "1"]
    _, out, _ = run(capsys, "bratelli", "--algebra", "P1", "--n-max", "2")
    assert out.startswith("digraph")
    _, out, _ = run(capsys, "oddeven", "--n", "5")
    assert out == "holds true exponent 1\n"


def test_config_sets_format(capsys, tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("output_format = json\n")
    code, out, _ = run(capsys, "dims", "--what", "stirling", "--args", "4", "2", "--config", str(cfg))
    assert code == 0 and json.loads(out)["value"] == "7"


@pytest.mark.parametrize("argv", [
    ["oddeven", "--n", "4"],
    ["gram", "--algebra", "P2", "--n", "5", "--smith"],
    ["potts", "--q", "9", "--n", "9"],
    ["compose", "P[2,2]: (1 1)(2 2')"],
    ["compose", "P[1,1]:(1 1') ∘ P[2,2]:(1 1')(2 2')"],
    ["semisimple", "--algebra", "P2", "--delta", "abc"],
])
def test_domain_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == ""
    assert err.startswith("error: ") and err.count("\n") == 1


@pytest.mark.parametrize("argv", [
    [],
    ["gram", "--algebra", "P9", "--n", "2"],
    ["gram", "--n", "2"],
    ["dims", "--what", "bell", "--args", "1", "2"],
    ["potts", "--q", "2"],
    ["bratelli", "--algebra", "P1", "--n-max", "2", "--format", "csv"],
])
def test_usage_errors_exit_1(capsys, argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 1


def _cli(*argv, env=None):
    return subprocess.run([sys.executable, "-m", "partalg", *argv], capture_output=True, env=env)


def test_byte_identical_runs():
    for argv in (["bratelli", "--algebra", "P2", "--n-max", "4", "--format", "json"],
                 ["gram", "--algebra", "P1", "--n", "4", "--report", "--format", "json"],
                 ["compose", "P[2,2]:(1 2')(2 1') ∘ 2 d P[2,2]:(1 1')(2)(2')", "--format", "json"]):
        a, b = _cli(*argv), _cli(*argv)
        assert a.returncode == 0 and a.stdout == b.stdout and a.stdout


def test_module_entry_point_exit_codes(tmp_path):
    assert _cli("dims", "--what", "bell", "--args", "4").stdout == b"15\n"
    assert _cli("oddeven", "--n", "2").returncode == 2
    assert _cli("nonsense").returncode == 1


def test_threads_env(tmp_path):
    import os

    env = dict(os.environ, PARTALG_THREADS="1")
    r = _cli("gram", "--algebra", "P1", "--n", "4", "--report", env=env)
    assert r.returncode == 0 and b"saturation=true" in r.stdout
