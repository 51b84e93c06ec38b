import csv
import io
import json
import subprocess
import sys

import pytest

from gqe import cli
from gqe.datasets import social_network_path

GRAPH = str(social_network_path())


def run_cli(capsys, *args):
    code = cli.main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def unwind_file(tmp_path):
    path = tmp_path / "unwind.cypher"
    path.write_text("MATCH (p:Person)\nWITH p\nUNWIND p.speaks AS lang\nRETURN p.name, lang\n", encoding="utf-8")
    return str(path)


def test_csv_output(capsys, unwind_file):
    code, out, _ = run_cli(capsys, "--graph", GRAPH, "--query", unwind_file, "--format", "csv")
    assert code == 0
    lines = out.split("\n")
    assert lines[0] == "p.name,lang"
    assert sorted(lines[1:-1]) == ["Alice,en", "Bob,fr", "Cecil,de", "Cecil,en"]
    assert "\r" not in out


def test_explain_skips_graph_loading(capsys, tmp_path):
    missing = str(tmp_path / "nope.json")
    code, out, _ = run_cli(capsys, "--graph", missing, "-e", "MATCH (p:Person) RETURN p", "--explain")
    assert code == 0
    assert out == "Projection(p)\n  GetVertices(p: Person)\n"
    assert run_cli(capsys, "--graph", missing, "-e", "MATCH (p:Person) RETURN p", "--explain")[1] == out


def test_missing_graph_exits_2(capsys, tmp_path):
    code, _, err = run_cli(capsys, "--graph", str(tmp_path / "missing.json"), "-e", "RETURN 1")
    assert code == 2 and err.startswith("error:")


def test_bad_graph_exits_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"vertices": [', encoding="utf-8")
    code, _, err = run_cli(capsys, "--graph", str(bad), "-e", "RETURN 1")
    assert code == 2 and err.startswith("error:") and "line 1" in err


@pytest.mark.parametrize("text", ["MATCH (p RETURN p", "MATCH (p) RETURN q", "UNWIND 3 AS x RETURN x"])
def test_query_errors_exit_1(capsys, text):
    code, _, err = run_cli(capsys, "--graph", GRAPH, "-e", text)
    assert code == 1 and err.startswith("error:")


def test_syntax_error_message_has_position(capsys):
    _, _, err = run_cli(capsys, "--graph", GRAPH, "-e", "MATCH (p RETURN p")
    assert err.strip().endswith("at line 1, column 10")


def test_value_rendering(capsys):
    q = "MATCH (p:Person)-[k:KNOWS]->(q) OPTIONAL MATCH (q)-[:KNOWS]->(z) RETURN p, k, z, p.speaks AS s"
    _, table, _ = run_cli(capsys, "--graph", GRAPH, "-e", q)
    assert "(:a)" in table and "[:1]" in table and "∅" in table and "[en]" in table
    _, text, _ = run_cli(capsys, "--graph", GRAPH, "-e", q, "--format", "json")
    records = json.loads(text)
    assert {"p": "(:b)", "k": "[:2]", "z": None, "s": ["fr"]} in records
    _, text, _ = run_cli(capsys, "--graph", GRAPH, "-e", q, "--format", "csv")
    rows = list(csv.reader(io.StringIO(text)))
    assert ["(:b)", "[:2]", "", "[fr]"] in rows


def test_formats_agree_on_row_count(capsys):
    q = "MATCH (p)-[:LIKES]->(m) RETURN p.name, m.language"
    _, csv_out, _ = run_cli(capsys, "--graph", GRAPH, "-e", q, "--format", "csv")
    _, json_out, _ = run_cli(capsys, "--graph", GRAPH, "-e", q, "--format", "json")
    _, table_out, _ = run_cli(capsys, "--graph", GRAPH, "-e", q)
    n = len(json.loads(json_out))
    assert n == 4
    assert len(csv_out.splitlines()) - 1 == n
    assert table_out.splitlines()[-1] == f"({n} rows)"


def test_csv_quoting(capsys, tmp_path):
    g = tmp_path / "g.json"
    g.write_text(json.dumps({"vertices": [{"id": "x", "properties": {"t": 'a,"b"'}}]}), encoding="utf-8")
    _, out, _ = run_cli(capsys, "--graph", str(g), "-e", "MATCH (v) RETURN v.t", "--format", "csv")
    assert out == 'v.t\n"a,""b"""\n'


def test_oracle_flag(capsys):
    code, _, err = run_cli(capsys, "--graph", GRAPH, "-e", "MATCH (a)-[:KNOWS*1..2]-(b) RETURN a, b", "--oracle")
    assert code == 0 and "oracle: MATCH" in err


def test_query_source_is_required_and_exclusive(capsys):
    with pytest.raises(SystemExit):
        cli.main(["--graph", GRAPH])
    with pytest.raises(SystemExit):
        cli.main(["--graph", GRAPH, "-e", "RETURN 1", "--query", "x"])


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "gqe", "--graph", GRAPH, "-e", "MATCH (p:Person) RETURN count(*) AS n", "--format", "csv"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and proc.stdout == "n\n4\n"
