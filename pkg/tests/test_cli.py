import json

import pytest

from scholia.cli import main
from scholia.model import Aspect, item
from scholia.queries import PanelQuerySpec, build_panel_query


def test_query_only_is_offline_and_matches_builder(capsys, monkeypatch):
    # no endpoint configured at all: --format query-only must not need one
    monkeypatch.setenv("SCHOLIA_ENDPOINT", "http://127.0.0.1:1/unreachable")
    code = main(["query", "author", "works-per-year-by-role", "Q20980928", "--format", "query-only"])
    out = capsys.readouterr().out
    assert code == 0
    spec = PanelQuerySpec(
        aspect=Aspect.AUTHOR, panel="works-per-year-by-role", subject=item(20980928)
    )
    assert out == build_panel_query(spec).text + "\n"


def test_query_json_executes(capsys, fixture_env):
    code = main(["query", "author", "coauthors", "Q8219", "--format", "json"])
    captured = capsys.readouterr()
    assert code == 0
    document = json.loads(captured.out)
    assert document["head"]["vars"] == ["coauthor", "coauthorLabel", "count"]
    assert document["results"]["bindings"]


def test_query_csv_column_order(capsys, fixture_env):
    code = main(["query", "author", "coauthors", "Q8219", "--format", "csv"])
    captured = capsys.readouterr()
    assert code == 0
    lines = captured.out.splitlines()
    assert lines[0] == "coauthor,coauthorLabel,count"
    assert len(lines) > 1


def test_aspect_command(capsys, fixture_env):
    code = main(["aspect", "Q8219"])
    assert code == 0
    assert capsys.readouterr().out.strip() == "author"


def test_search_command(capsys, fixture_env):
    code = main(["search", "Uta", "--limit", "3"])
    assert code == 0
    first = capsys.readouterr().out.splitlines()[0].split("\t")
    assert first[0] == "Q8219" and first[1] == "Uta Frith"


def test_panels_command(capsys):
    code = main(["panels"])
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 39
    assert any("works-per-year-by-role" in line for line in lines)


def test_write_bib_from_aux_command(tmp_path, capsys, fixture_env):
    aux = tmp_path / "example.aux"
    aux.write_text("\\citation{Q18507561}\n", encoding="utf-8")
    code = main(["write-bib-from-aux", str(aux)])
    assert code == 0
    assert (tmp_path / "example.bib").read_text(encoding="utf-8").startswith("@article{Q18507561,")
    assert "wrote 1 entries" in capsys.readouterr().err


def test_write_bib_from_aux_out_option(tmp_path, fixture_env):
    aux = tmp_path / "example.aux"
    aux.write_text("\\citation{Q18507561}\n", encoding="utf-8")
    out = tmp_path / "custom.bib"
    assert main(["write-bib-from-aux", str(aux), "--out", str(out)]) == 0
    assert out.exists()


def test_usage_errors_exit_1(capsys):
    assert main(["no-such-command"]) == 1
    assert main(["query", "frobnicate", "works-raw", "Q1", "--format", "query-only"]) == 1
    capsys.readouterr()


def test_runtime_errors_exit_2(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("SCHOLIA_ENDPOINT", "http://127.0.0.1:1/unreachable")
    assert main(["aspect", "Q8219"]) == 2
    assert main(["write-bib-from-aux", str(tmp_path / "missing.aux")]) == 2
    capsys.readouterr()


def test_json_errors_flag(tmp_path, capsys):
    code = main(["--json-errors", "write-bib-from-aux", str(tmp_path / "missing.aux")])
    captured = capsys.readouterr()
    assert code == 2
    error = json.loads(captured.err.strip())
    assert error["error"]["kind"] == "IoError"


def test_malformed_qid_is_runtime_error(capsys):
    assert main(["query", "author", "works-raw", "FOO", "--format", "query-only"]) == 2
    capsys.readouterr()
