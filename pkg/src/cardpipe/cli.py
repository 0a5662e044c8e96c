"""Command-line entry point.

Exit codes: 0 success (valid pipeline / CORRECT verdict), 1 domain failure
(validation errors, runtime failure, INCORRECT), 2 usage or IO problems.
All flags can also come from CARDPIPE_* environment variables.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import activity, engine
from .catalog import builtin_catalog
from .charts import ChartSpec
from .datasets import default_registry
from .errors import CardpipeError
from .svg import render_svg
from .table import serialize_csv, format_cell


def _load_pipeline(path: str) -> engine.Pipeline:
    try:
        text = Path(path).read_text("utf-8")
    except OSError as exc:
        click.echo(f"cannot read {path}: {exc.strerror}", err=True)
        sys.exit(2)
    try:
        return engine.Pipeline.from_json(json.loads(text))
    except (json.JSONDecodeError, CardpipeError) as exc:
        click.echo(f"not a pipeline document: {exc}", err=True)
        sys.exit(2)


def _make_env() -> engine.Env:
    return engine.Env(catalog=builtin_catalog(), registry=default_registry())


def _dump(doc) -> str:
    return json.dumps(doc, ensure_ascii=False, indent=2)


@click.group()
def main():
    """Card-based data pipelines: validate, run, render, grade, serve."""


@main.command()
@click.argument("pipeline_file")
@click.option("--json", "as_json", is_flag=True, help="Print the validation report as JSON.")
def validate(pipeline_file: str, as_json: bool):
    """Type-check a pipeline file without running it."""
    pipeline = _load_pipeline(pipeline_file)
    env = _make_env()
    report = engine.validate(pipeline, env.catalog, env.registry)
    click.echo(_dump(report.to_json()) if as_json else report.to_text())
    sys.exit(0 if report.ok else 1)


def _print_final(value):
    if isinstance(value, engine.Scalar):
        click.echo(format_cell(value.value))
    elif isinstance(value, ChartSpec):
        click.echo(_dump(value.to_json()))
    else:
        sys.stdout.write(serialize_csv(value))


@main.command()
@click.argument("pipeline_file")
@click.option("--trace", "show_trace", is_flag=True, help="Print every step's output, not just the last.")
@click.option("--json", "as_json", is_flag=True, help="Print the full execution trace as JSON.")
def run(pipeline_file: str, show_trace: bool, as_json: bool):
    """Execute a pipeline card by card and print the result."""
    pipeline = _load_pipeline(pipeline_file)
    env = _make_env()
    report = engine.validate(pipeline, env.catalog, env.registry)
    if not report.ok:
        click.echo(report.to_text(), err=True)
        sys.exit(1)
    trace = engine.execute(pipeline, env)
    if as_json:
        sys.stdout.write(engine.trace_json_text(trace))
        sys.exit(0 if trace.ok else 1)
    if show_trace:
        for step in trace.steps:
            click.echo(f"[step {step.step_index}] {step.card_id}: {step.summary}")
    if not trace.ok:
        err = trace.error
        click.echo(f"step {err.step_index} failed: {err.code}: {err.message}", err=True)
        sys.exit(1)
    if show_trace:
        click.echo("")
    _print_final(trace.final.value)


@main.command()
@click.argument("pipeline_file")
@click.option("-o", "--out", "out_file", required=True, help="Output .svg path.")
@click.option("--width", default=640, show_default=True)
@click.option("--height", default=400, show_default=True)
def render(pipeline_file: str, out_file: str, width: int, height: int):
    """Run a pipeline and render its chart to an SVG file.

    A pipeline ending in a table renders as a table view.
    """
    pipeline = _load_pipeline(pipeline_file)
    env = _make_env()
    report = engine.validate(pipeline, env.catalog, env.registry)
    if not report.ok:
        click.echo(report.to_text(), err=True)
        sys.exit(1)
    trace = engine.execute(pipeline, env)
    if not trace.ok:
        err = trace.error
        click.echo(f"step {err.step_index} failed: {err.code}: {err.message}", err=True)
        sys.exit(1)
    value = trace.final.value
    if isinstance(value, engine.Table):
        from .charts import build_chart, TABLE_VIEW

        value = build_chart(value, TABLE_VIEW, {})
    if not isinstance(value, ChartSpec):
        click.echo("pipeline result is a single value; nothing to draw", err=True)
        sys.exit(1)
    try:
        svg = render_svg(value, width=width, height=height)
    except CardpipeError as exc:
        click.echo(str(exc), err=True)
        sys.exit(1)
    Path(out_file).write_bytes(svg.encode("utf-8"))
    click.echo(f"wrote {out_file}")


@main.command()
@click.argument("question_id")
@click.argument("pipeline_file")
@click.option("--json", "as_json", is_flag=True, help="Print the grade result as JSON.")
def grade(question_id: str, pipeline_file: str, as_json: bool):
    """Grade a pipeline file against a question's canonical answer."""
    bank = {q.id: q for q in activity.load_question_bank()}
    if question_id not in bank:
        click.echo(f"unknown question: {question_id}", err=True)
        sys.exit(2)
    question = bank[question_id]
    if question.kind != activity.M:
        click.echo(f"question {question_id} is not pipeline-graded ({question.kind})", err=True)
        sys.exit(2)
    pipeline = _load_pipeline(pipeline_file)
    result = activity.grade_m_answer(question, pipeline, _make_env())
    if as_json:
        click.echo(_dump(result.to_json()))
    else:
        click.echo(f"{result.verdict}: {result.explanation}")
    sys.exit(0 if result.verdict == activity.CORRECT else 1)


@main.command()
@click.option("--port", default=8000, show_default=True, type=click.IntRange(1, 65535))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--data-dir", default=None, help="Directory for session event logs.")
@click.option("--ui-dir", default=None, help="Web UI asset directory (default: ./frontend if built).")
@click.option("--base-points", default=10, show_default=True)
@click.option("--time-bonus/--no-time-bonus", default=False, show_default=True)
@click.option("--time-bonus-window", default=60.0, show_default=True)
def serve(port: int, host: str, data_dir: str | None, ui_dir: str | None, base_points: int,
          time_bonus: bool, time_bonus_window: float):
    """Serve the HTTP API (and the web UI when its build is present)."""
    import uvicorn

    from .server import create_app

    policy = activity.ScoringPolicy(
        base_points=base_points,
        time_bonus_enabled=time_bonus,
        time_bonus_window_s=time_bonus_window,
    )
    ui_path = Path(ui_dir) if ui_dir else Path("frontend")
    if not (ui_path / "index.html").is_file():
        ui_path = None
    app = create_app(policy=policy, data_dir=Path(data_dir) if data_dir else None,
                     ui_dir=ui_path)
    uvicorn.run(app, host=host, port=port, log_level="info")


def entrypoint():
    main(auto_envvar_prefix="CARDPIPE")


if __name__ == "__main__":
    entrypoint()
