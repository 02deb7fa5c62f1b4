import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from schreierstats.cli import main
from cli_cases import RANDOMIZED, commands, make_inputs


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    make_inputs(d)
    return d


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def schema(name):
    text = resources.files("schreierstats").joinpath(f"schemas/{name}.schema.json").read_text()
    return json.loads(text)


@pytest.mark.parametrize("name", ["balls", "typedist", "weakdist", "corr-profile", "pd",
                                  "rule-check", "rule-search", "irs-sample", "returning-words",
                                  "rep-k", "rep-contain"])
def test_outputs_validate_against_schemas(name, files, capsys):
    code, out, err = run(commands(files)[name], capsys)
    assert code == 0, err
    doc = json.loads(out)
    jsonschema.validate(doc, schema(name))
    assert doc["config"]["command"] == name
    assert "threads" not in doc["config"]
    if name in RANDOMIZED:
        assert doc["config"]["seed"] is not None


@pytest.mark.parametrize("name", ["balls", "typedist", "pd", "rule-search", "rep-contain"])
def test_tsv_output(name, files, capsys):
    code, out, _ = run(commands(files)[name] + ["--format", "tsv"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# config: ") and len(lines) >= 3
    width = len(lines[1].split("\t"))
    assert all(len(line.split("\t")) == width for line in lines[2:])


def test_gen_then_typedist(files, capsys):
    code, out, _ = run(["typedist", str(files / "c5.sg"), "--r", "1"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["result"]["probabilities"] == {"e|a|A": 1.0}


def test_pd_of_graph_with_itself(files, capsys):
    g = str(files / "c5.sg")
    code, out, _ = run(["pd", g, g, "--kmax", "3", "--rmax", "2", "--mode", "exhaustive",
                        "--budget", "4000", "--seed", "1"], capsys)
    assert code == 0 and json.loads(out)["result"]["pd"] == 0


def test_rule_search_values(files, capsys):
    code, out, _ = run(["rule-search", str(files / "c5.sg"), "--rule",
                        "builtin:proper_coloring:k=2", "--seed", "0"], capsys)
    res = json.loads(out)["result"]
    assert res["violating_fraction_exact"] == "2/5" and res["certified"]


def test_weakdist_value(files, capsys):
    c3 = files / "c3.sg"
    main(["gen", "cycle", "3", "-o", str(c3)])
    code, out, _ = run(["weakdist", str(c3), str(files / "c4.sg"), "--rmax", "2"], capsys)
    assert json.loads(out)["result"]["distance_exact"] == "1/4"


def test_template_vertex(files, capsys):
    argv = ["rule-check", str(files / "c5.sg"), str(files / "c5.col"), "--rule",
            "builtin:proper_coloring:k=2", "--template-vertex", "0"]
    code, out, _ = run(argv, capsys)
    assert code == 0 and json.loads(out)["result"]["violations"] == 2


@pytest.mark.parametrize("name", RANDOMIZED)
def test_missing_seed_is_usage_error(name, files, capsys):
    argv = commands(files)[name]
    i = argv.index("--seed")
    code, _, err = run(argv[:i] + argv[i + 2:], capsys)
    assert code == 1 and err.startswith("error:")


def test_usage_errors(files, capsys):
    assert run([], capsys)[0] == 1
    assert run(["typedist"], capsys)[0] == 1
    assert run(["typedist", str(files / "c5.sg"), "--r", "x"], capsys)[0] == 1
    assert run(["gen", "random", "5", "1"], capsys)[0] == 1
    assert run(["gen", "cycle", "5", "6"], capsys)[0] == 1
    g = str(files / "c5.sg")
    code, _, err = run(["pd", g, g, "--kmax", "3", "--rmax", "1", "--budget", "10", "--seed", "1"],
                       capsys)
    assert code == 1 and err.startswith("error:")


def test_data_errors(files, capsys):
    bad = files / "bad.sg"
    bad.write_text("3 1\n0 0 1\n")
    code, _, err = run(["typedist", str(bad), "--r", "1"], capsys)
    assert code == 2 and err.startswith("error:")
    assert run(["typedist", str(files / "missing.sg"), "--r", "1"], capsys)[0] == 2
    assert run(["rule-check", str(files / "c5.sg"), str(files / "c4.col"), "--rule",
                "builtin:proper_coloring:k=2"], capsys)[0] == 2
    assert run(["rule-check", str(files / "c5.sg"), str(files / "c5.col"), "--rule",
                "builtin:unknown"], capsys)[0] == 2
    assert run(["returning-words", str(files / "c5.sg"), "--vertex", "9", "--r", "1"], capsys)[0] == 2


def test_output_file_and_module_entry(files):
    out = files / "td.json"
    proc = subprocess.run([sys.executable, "-m", "schreierstats", "typedist", str(files / "c4.sg"),
                           "--r", "1", "-o", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == ""
    assert json.loads(out.read_text())["result"]["denominator"] == 4


@pytest.mark.parametrize("name", RANDOMIZED)
def test_thread_count_does_not_change_output(name, files, capsys):
    argv = commands(files)[name]
    runs = [run(argv + ["--threads", t], capsys) for t in ("1", "4")]
    assert runs[0][0] == runs[1][0] == 0
    assert runs[0][1] == runs[1][1]
