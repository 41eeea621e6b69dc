import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from infocontrib import cli, get_example
from infocontrib.corpus import EXAMPLES
from infocontrib.distribution import NormalizationWarning, dump_distribution
from infocontrib.shapley import OracleReport

GOLDEN = Path(__file__).parent / "golden"


def run(*argv):
    out = io.StringIO()
    code = cli.main(list(argv), out=out)
    return code, out.getvalue()


def table_rows(text):
    rows = {}
    for line in text.strip().splitlines()[1:]:
        label, value = line.rsplit(None, 1)
        rows[label.strip()] = float(value)
    return rows


@pytest.mark.parametrize("name", list(EXAMPLES))
def test_decompose_matches_golden(name):
    code, text = run("decompose", "--example", name, "--json")
    assert code == 0
    doc = json.loads(text)
    gold = json.loads((GOLDEN / f"{name}.json").read_text())
    assert doc["contributions"].keys() == gold["contributions"].keys()
    for label, value in gold["contributions"].items():
        assert doc["contributions"][label] == pytest.approx(value, abs=1e-5)
    assert doc["total"] == pytest.approx(gold["total"], abs=1e-5)
    assert abs(doc["residual"]) <= 1e-7
    assert all(c["passed"] for c in doc["diagnostics"]["checks"])


@pytest.mark.parametrize("name", ["and", "xormulticoal"])
def test_table_agrees_with_json(name):
    _, text = run("decompose", "-e", name)
    _, js = run("decompose", "-e", name, "--json")
    rows = table_rows(text)
    doc = json.loads(js)
    assert rows.pop("total") == pytest.approx(doc["total"], abs=5e-9)
    assert list(rows) == list(doc["contributions"])
    for label, value in rows.items():
        assert value == pytest.approx(doc["contributions"][label], abs=5e-9)


def test_xor_table():
    code, text = run("decompose", "-e", "xor")
    assert code == 0
    assert text.splitlines() == [
        "predictor  contribution (bits)",
        "{X1}       0.00000000",
        "{X2}       0.00000000",
        "{X1,X2}    1.00000000",
        "total      1.00000000",
    ]


def test_output_is_deterministic(tmp_path):
    path = tmp_path / "and.tsv"
    path.write_text(dump_distribution(get_example("threewayand")))
    first = run("decompose", str(path), "--json")
    second = run("decompose", str(path), "--json")
    assert first == second
    assert run("decompose", str(path), "--workers", "3") == run("decompose", str(path))


def test_file_input_and_target(tmp_path):
    path = tmp_path / "rdn.json"
    path.write_text(dump_distribution(get_example("rdn"), "json"))
    code, text = run("decompose", str(path), "--json")
    assert code == 0 and json.loads(text)["source"] == str(path)
    code, text = run("decompose", str(path), "--target", "X1", "--json")
    doc = json.loads(text)
    assert doc["target"] == "X1" and doc["inputs"] == ["X2", "Y"]


def test_lenient_flag(tmp_path):
    path = tmp_path / "skew.tsv"
    path.write_text("X1\tY\tp\n0\t0\t0.5\n1\t1\t0.3\n")
    assert run("decompose", str(path))[0] == cli.EXIT_PARSE
    with pytest.warns(NormalizationWarning):
        code, text = run("decompose", str(path), "--lenient")
    assert code == 0
    assert table_rows(text)["total"] == pytest.approx(0.9544340, abs=1e-6)


def test_base_e():
    _, text = run("decompose", "-e", "xor", "--base", "e")
    assert "contribution (nats)" in text
    assert table_rows(text)["{X1,X2}"] == pytest.approx(0.69314718, abs=1e-8)


def test_constraint_info():
    code, text = run("constraint-info", "-e", "xor", "--node", "(X1X2)(X1Y)(X2Y)")
    assert code == 0
    assert "information  1.00000000 bits" in text
    code, text = run("constraint-info", "-e", "xor", "--node", "(X1X2)(Y)", "--json")
    assert json.loads(text)["information"] == pytest.approx(1.0, abs=1e-10)


def test_lattice_command():
    code, text = run("lattice", "-n", "3")
    assert code == 0
    assert text.rstrip().endswith("maximal chains: 48")
    assert "nodes: 19" in text and "hasse edges: 31" in text
    _, js = run("lattice", "-n", "2", "--json")
    doc = json.loads(js)
    assert doc["maximal_chains"] == 2 and len(doc["nodes"]) == 5
    assert [e["weight"] for e in doc["edges"] if e["adds"] == "{X1}"] == ["1/2", "1/2"]


def test_examples_command():
    _, text = run("examples")
    assert len(text.strip().splitlines()) == 9
    _, js = run("examples", "--arity", "3", "--json")
    assert [e["name"] for e in json.loads(js)] == ["parity", "xormulticoal", "rboj", "threewayand"]


def test_oracle_check_command():
    code, text = run("oracle-check", "-e", "threewayand")
    assert code == 0 and "PASS" in text
    code, js = run("oracle-check", "-e", "xor", "--json")
    assert json.loads(js)["passed"] is True


class TestExitCodes:
    def test_usage(self, capsys):
        assert run("decompose")[0] == cli.EXIT_USAGE
        assert run("decompose", "-e", "nand")[0] == cli.EXIT_USAGE
        assert run("decompose", "missing.tsv")[0] == cli.EXIT_USAGE
        assert run("decompose", "-e", "xor", "--tol", "0")[0] == cli.EXIT_USAGE
        assert run("lattice", "-n", "6")[0] == cli.EXIT_USAGE
        with pytest.raises(SystemExit) as info:
            run("frobnicate")
        assert info.value.code == cli.EXIT_USAGE

    def test_parse(self, tmp_path):
        bad = tmp_path / "bad.tsv"
        bad.write_text("X1 Y p\n0 0 zero\n")
        assert run("decompose", str(bad))[0] == cli.EXIT_PARSE
        assert run("constraint-info", "-e", "xor", "--node", "(X1Q)(Y)")[0] == cli.EXIT_PARSE

    def test_convergence(self, tmp_path):
        path = tmp_path / "dense.tsv"
        lines = ["X1\tX2\tY\tp"]
        weights = [k + 1 for k in range(27)]
        for k, w in enumerate(weights):
            lines.append(f"{k // 9}\t{k // 3 % 3}\t{k % 3}\t{w}/{sum(weights)}")
        path.write_text("\n".join(lines) + "\n")
        code, _ = run("decompose", str(path), "--max-sweeps", "1", "--tol", "1e-300")
        assert code == cli.EXIT_CONVERGENCE

    def test_oracle_mismatch(self, monkeypatch):
        monkeypatch.setattr(cli, "oracle_check", lambda *a, **k: OracleReport({1: 0.0}, {1: 1.0}, 1.0))
        code, text = run("oracle-check", "-e", "xor")
        assert code == cli.EXIT_ORACLE and "FAIL" in text


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "infocontrib", "lattice", "-n", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.rstrip().endswith("maximal chains: 2")
