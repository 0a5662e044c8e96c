from __future__ import annotations

import json
import subprocess
import sys

import pytest
from click.testing import CliRunner

import schemas
from conftest import PIPELINES_DIR
from cardpipe.cli import main

FOREST_LINE = str(PIPELINES_DIR / "brazil_forest_line.json")
ARGENTINA = str(PIPELINES_DIR / "players_argentina.json")


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def spain_file(tmp_path):
    doc = {"cards": [
        {"card": "open_csv_file", "inputs": {"file": "players"}},
        {"card": "filter", "inputs": {"column": "country", "comparator": "==", "value": "Spain"}},
        {"card": "average", "inputs": {"column": "age"}},
    ]}
    path = tmp_path / "spain.json"
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture()
def invalid_file(tmp_path):
    doc = {"cards": [
        {"card": "filter", "inputs": {"column": "a", "comparator": "==", "value": 1}},
    ]}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    return str(path)


def test_validate_forest_line_exit_zero(runner):
    result = runner.invoke(main, ["validate", FOREST_LINE])
    assert result.exit_code == 0
    assert "valid" in result.output


def test_validate_transform_first_exit_one(runner, invalid_file):
    result = runner.invoke(main, ["validate", invalid_file])
    assert result.exit_code == 1
    assert "TYPE_MISMATCH" in result.output


def test_validate_missing_file_exit_two(runner):
    result = runner.invoke(main, ["validate", "/nonexistent/x.json"])
    assert result.exit_code == 2


def test_validate_not_json_exit_two(runner, tmp_path):
    path = tmp_path / "x.json"
    path.write_text("{nope")
    result = runner.invoke(main, ["validate", str(path)])
    assert result.exit_code == 2


def test_validate_json_report(runner, invalid_file):
    result = runner.invoke(main, ["validate", invalid_file, "--json"])
    doc = json.loads(result.output)
    assert doc["ok"] is False
    assert doc["errors"][0]["code"] == "TYPE_MISMATCH"


def test_run_prints_scalar(runner, spain_file):
    result = runner.invoke(main, ["run", spain_file])
    assert result.exit_code == 0
    assert result.output.strip() == "28.5"


def test_run_prints_delimited_table(runner):
    result = runner.invoke(main, ["run", ARGENTINA])
    assert result.exit_code == 0
    lines = result.output.strip().splitlines()
    assert lines[0].rstrip("\r") == "name,club,country,age,potential,overall"
    assert len(lines) == 3
    assert "L. Messi" in lines[1]


def test_run_trace_has_four_step_blocks(runner):
    result = runner.invoke(main, ["run", FOREST_LINE, "--trace"])
    assert result.exit_code == 0
    steps = [line for line in result.output.splitlines() if line.startswith("[step ")]
    assert len(steps) == 4


def test_run_runtime_error_exit_one(runner, tmp_path):
    doc = {"cards": [
        {"card": "open_csv_file", "inputs": {"file": "players"}},
        {"card": "filter", "inputs": {"column": "age", "comparator": ">", "value": "x"}},
    ]}
    path = tmp_path / "r.json"
    path.write_text(json.dumps(doc))
    result = runner.invoke(main, ["run", str(path)])
    assert result.exit_code == 1
    assert "step 1" in result.output
    assert "UNCOERCIBLE_LITERAL" in result.output


def test_run_json_trace(runner, spain_file):
    result = runner.invoke(main, ["run", spain_file, "--json"])
    doc = json.loads(result.output)
    assert doc["steps"][-1]["scalar"]["value"] == 28.5


def test_render_writes_svg(runner, tmp_path):
    out = tmp_path / "forest_line.svg"
    result = runner.invoke(main, ["render", FOREST_LINE, "-o", str(out)])
    assert result.exit_code == 0
    svg = out.read_text()
    assert svg.startswith("<?xml")
    assert svg.count('class="data-point"') == 26
    assert "missing:" in svg  # the four-card pipeline sets no elements


def test_render_table_pipeline_as_table_view(runner, tmp_path):
    out = tmp_path / "table.svg"
    result = runner.invoke(main, ["render", ARGENTINA, "-o", str(out)])
    assert result.exit_code == 0
    assert out.read_text().count('class="data-point"') == 2 * 6


def test_render_scalar_pipeline_fails(runner, spain_file, tmp_path):
    result = runner.invoke(main, ["render", spain_file, "-o", str(tmp_path / "x.svg")])
    assert result.exit_code == 1


def test_grade_canonical_correct(runner, spain_file):
    result = runner.invoke(main, ["grade", "d3q6", spain_file])
    assert result.exit_code == 0
    assert "CORRECT" in result.output


def test_grade_wrong_pipeline_incorrect(runner):
    result = runner.invoke(main, ["grade", "d3q6", ARGENTINA])
    assert result.exit_code == 1
    assert "INCORRECT" in result.output


def test_grade_unknown_question_exit_two(runner, spain_file):
    result = runner.invoke(main, ["grade", "d9q9", spain_file])
    assert result.exit_code == 2


def test_grade_json_result(runner, spain_file):
    result = runner.invoke(main, ["grade", "d3q6", spain_file, "--json"])
    doc = json.loads(result.output)
    assert doc["verdict"] == "CORRECT"
    assert doc["points_awarded"] == 10


def test_json_outputs_match_documented_schemas(runner, spain_file, invalid_file):
    report = json.loads(runner.invoke(main, ["validate", invalid_file, "--json"]).output)
    schemas.check("validation-report.schema.json", report)
    trace = json.loads(runner.invoke(main, ["run", spain_file, "--json"]).output)
    schemas.check("trace.schema.json", trace)
    grade = json.loads(runner.invoke(main, ["grade", "d3q6", spain_file, "--json"]).output)
    schemas.check("grade-result.schema.json", grade)
    chart_trace = json.loads(runner.invoke(main, ["run", FOREST_LINE, "--json"]).output)
    schemas.check("trace.schema.json", chart_trace)
    schemas.check("chart-spec.schema.json", chart_trace["steps"][-1]["chart"])


def test_env_var_prefix_reaches_options():
    result = subprocess.run(
        [sys.executable, "-m", "cardpipe.cli", "serve"],
        env={"PATH": "/usr/bin:/bin", "CARDPIPE_SERVE_PORT": "70000"},
        capture_output=True, text=True,
    )
    assert result.returncode == 2
    assert "70000" in result.stderr
