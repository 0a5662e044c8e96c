from __future__ import annotations

import requests

import schemas
from conftest import DATASETS_DIR, FOREST_URL
from cardpipe.catalog import builtin_catalog, load_catalog
from cardpipe.fetch import fetch_csv_url

FOREST_LINE_BODY = {"cards": [
    {"card": "open_csv_url", "inputs": {"url": FOREST_URL}},
    {"card": "filter", "inputs": {"column": "country", "comparator": "==", "value": "Brazil"}},
    {"card": "select_columns", "inputs": {"columns": ["year", "forest_area"]}},
    {"card": "line_chart", "inputs": {"x": "year", "y": "forest_area"}},
]}

SPAIN_BODY = {"cards": [
    {"card": "open_csv_file", "inputs": {"file": "players"}},
    {"card": "filter", "inputs": {"column": "country", "comparator": "==", "value": "Spain"}},
    {"card": "average", "inputs": {"column": "age"}},
]}

BAD_BODY = {"cards": [
    {"card": "filter", "inputs": {"column": "a", "comparator": "==", "value": 1}},
]}


def _session_with(live_server, *participants):
    resp = requests.post(f"{live_server}/api/v1/sessions", json={"roster": list(participants)})
    assert resp.status_code == 200
    return resp.json()["session_id"]


def test_cards_endpoint_roundtrips(live_server):
    resp = requests.get(f"{live_server}/api/v1/cards")
    assert resp.status_code == 200
    doc = resp.json()
    schemas.check("catalog.schema.json", doc)
    assert load_catalog(doc) == builtin_catalog()


def test_datasets_listing(live_server):
    resp = requests.get(f"{live_server}/api/v1/datasets")
    assert resp.status_code == 200
    manifests = resp.json()
    for manifest in manifests:
        schemas.check("dataset-manifest.schema.json", manifest)
    listed = {m["id"] for m in manifests}
    assert {"players", "forest_area", "plastic_production", "city_bikes",
            "research_budgets"} <= listed


def test_dataset_csv_equals_bundled_fixture(live_server):
    url = f"{live_server}/datasets/forest_area.csv"
    body = fetch_csv_url(url)
    assert body == (DATASETS_DIR / "forest_area.csv").read_bytes()
    assert requests.get(url).headers["content-type"].startswith("text/csv")


def test_dataset_csv_unknown_404(live_server):
    resp = requests.get(f"{live_server}/datasets/nope.csv")
    assert resp.status_code == 404
    schemas.check("api-error.schema.json", resp.json())


def test_dataset_csv_broken_upstream_500(live_server):
    resp = requests.get(f"{live_server}/datasets/external_broken.csv")
    assert resp.status_code == 500
    schemas.check("api-error.schema.json", resp.json())


def test_questions_endpoint_hides_answers(live_server):
    resp = requests.get(f"{live_server}/api/v1/questions")
    assert resp.status_code == 200
    questions = resp.json()["questions"]
    assert len(questions) == 21
    for q in questions:
        assert "answer_key" not in q
        assert "canonical_pipeline" not in q


def test_validate_endpoint(live_server):
    resp = requests.post(f"{live_server}/api/v1/pipelines/validate", json=FOREST_LINE_BODY)
    assert resp.status_code == 200
    doc = resp.json()
    schemas.check("validation-report.schema.json", doc)
    assert doc["ok"] is True

    resp = requests.post(f"{live_server}/api/v1/pipelines/validate", json=BAD_BODY)
    assert resp.status_code == 200
    doc = resp.json()
    assert doc["ok"] is False
    assert doc["errors"][0]["code"] == "TYPE_MISMATCH"


def test_execute_forest_line_four_steps(live_server):
    resp = requests.post(f"{live_server}/api/v1/pipelines/execute", json=FOREST_LINE_BODY)
    assert resp.status_code == 200
    doc = resp.json()
    schemas.check("trace.schema.json", doc)
    assert len(doc["steps"]) == 4
    assert doc["steps"][-1]["kind"] == "chart"
    assert len(doc["steps"][-1]["chart"]["data"]["x"]) == 26


def test_execute_invalid_pipeline_422(live_server):
    resp = requests.post(f"{live_server}/api/v1/pipelines/execute", json=BAD_BODY)
    assert resp.status_code == 422
    doc = resp.json()
    schemas.check("api-error.schema.json", doc)
    assert doc["error"]["code"] == "TYPE_MISMATCH"
    assert doc["error"]["report"]["ok"] is False


def test_execute_bad_document_400(live_server):
    resp = requests.post(f"{live_server}/api/v1/pipelines/execute", json={"cards": "nope"})
    assert resp.status_code == 400
    schemas.check("api-error.schema.json", resp.json())


def test_malformed_json_body_400(live_server):
    resp = requests.post(f"{live_server}/api/v1/pipelines/validate",
                         data="{not json", headers={"content-type": "application/json"})
    assert resp.status_code == 400
    schemas.check("api-error.schema.json", resp.json())


def test_execute_is_deterministic(live_server):
    url = f"{live_server}/api/v1/pipelines/execute"
    assert requests.post(url, json=FOREST_LINE_BODY).content == requests.post(url, json=FOREST_LINE_BODY).content


def test_render_pipeline_svg(live_server):
    resp = requests.post(f"{live_server}/api/v1/render", json={"pipeline": FOREST_LINE_BODY})
    assert resp.status_code == 200
    assert resp.headers["content-type"].startswith("image/svg+xml")
    assert resp.content.count(b'class="data-point"') == 26
    again = requests.post(f"{live_server}/api/v1/render", json={"pipeline": FOREST_LINE_BODY})
    assert again.content == resp.content


def test_render_scalar_pipeline_422(live_server):
    resp = requests.post(f"{live_server}/api/v1/render", json={"pipeline": SPAIN_BODY})
    assert resp.status_code == 422
    assert resp.json()["error"]["code"] == "NOT_RENDERABLE"


def test_render_bad_size_400(live_server):
    resp = requests.post(f"{live_server}/api/v1/render",
                         json={"pipeline": FOREST_LINE_BODY, "width": 0})
    assert resp.status_code == 400
    assert resp.json()["error"]["code"] == "ZERO_SIZE"


def test_render_chart_spec_body(live_server):
    chart = {"spec_version": 1, "kind": "LINE", "data": {"x": [1, 2], "y": [3.0, 4.0]},
             "title": "t", "x_label": "x", "y_label": "y", "legend": None}
    resp = requests.post(f"{live_server}/api/v1/render", json={"chart": chart})
    assert resp.status_code == 200
    assert resp.content.count(b'class="data-point"') == 2


def test_render_missing_body_field_400(live_server):
    resp = requests.post(f"{live_server}/api/v1/render", json={})
    assert resp.status_code == 400


def test_session_lifecycle(live_server):
    session_id = _session_with(live_server, "ada")
    resp = requests.post(f"{live_server}/api/v1/sessions/{session_id}/join",
                         json={"participant": "grace"})
    assert resp.status_code == 200
    schemas.check("session-state.schema.json", resp.json())

    # a correct pipeline answer scores the base points
    resp = requests.post(f"{live_server}/api/v1/sessions/{session_id}/answer",
                         json={"participant": "ada", "question_id": "d3q6",
                               "payload": SPAIN_BODY})
    assert resp.status_code == 200
    doc = resp.json()
    schemas.check("grade-result.schema.json", doc["grade"])
    assert doc["grade"]["verdict"] == "CORRECT"
    assert doc["score"] == 10

    # answering an already-correct question conflicts
    resp = requests.post(f"{live_server}/api/v1/sessions/{session_id}/answer",
                         json={"participant": "ada", "question_id": "d3q6",
                               "payload": SPAIN_BODY})
    assert resp.status_code == 409
    schemas.check("api-error.schema.json", resp.json())

    state = requests.get(f"{live_server}/api/v1/sessions/{session_id}").json()
    schemas.check("session-state.schema.json", state)
    assert state["scoreboard"]["ada"] == 10


def test_session_hint_flow(live_server):
    session_id = _session_with(live_server, "ada")
    base = f"{live_server}/api/v1/sessions/{session_id}"
    incomplete = {"cards": FOREST_LINE_BODY["cards"]}
    resp = requests.post(f"{base}/answer", json={
        "participant": "ada", "question_id": "d3q2", "payload": incomplete})
    assert resp.json()["grade"]["verdict"] == "INCORRECT"

    resp = requests.post(f"{base}/hint", json={"participant": "ada", "question_id": "d3q2"})
    assert resp.status_code == 200
    doc = resp.json()
    assert doc["hint"]["element"] == "TITLE"
    assert doc["hint"]["tip"]
    assert doc["score_delta"] == -1
    assert doc["score"] == -1


def test_hint_on_complete_chart_is_null(live_server):
    session_id = _session_with(live_server, "ada")
    base = f"{live_server}/api/v1/sessions/{session_id}"
    complete_wrong = {"cards": [
        {"card": "open_csv_url", "inputs": {"url": FOREST_URL}},
        {"card": "filter", "inputs": {"column": "country", "comparator": "==", "value": "Turkey"}},
        {"card": "select_columns", "inputs": {"columns": ["year", "forest_area"]}},
        {"card": "line_chart", "inputs": {"x": "year", "y": "forest_area"}},
        {"card": "set_title", "inputs": {"text": "t"}},
        {"card": "set_x_label", "inputs": {"text": "x"}},
        {"card": "set_y_label", "inputs": {"text": "y"}},
    ]}
    requests.post(f"{base}/answer", json={
        "participant": "ada", "question_id": "d3q2", "payload": complete_wrong})
    resp = requests.post(f"{base}/hint", json={"participant": "ada", "question_id": "d3q2"})
    assert resp.status_code == 200
    assert resp.json() == {"hint": None, "score_delta": 0, "score": 0}


def test_session_not_found(live_server):
    resp = requests.get(f"{live_server}/api/v1/sessions/nope")
    assert resp.status_code == 404
    schemas.check("api-error.schema.json", resp.json())


def test_unknown_participant_404(live_server):
    session_id = _session_with(live_server, "ada")
    resp = requests.post(f"{live_server}/api/v1/sessions/{session_id}/answer",
                         json={"participant": "nobody", "question_id": "d3q6", "payload": 0})
    assert resp.status_code == 404


def test_unknown_question_404(live_server):
    session_id = _session_with(live_server, "ada")
    resp = requests.post(f"{live_server}/api/v1/sessions/{session_id}/answer",
                         json={"participant": "ada", "question_id": "d9q9", "payload": 0})
    assert resp.status_code == 404


def test_bad_choice_400(live_server):
    session_id = _session_with(live_server, "ada")
    resp = requests.post(f"{live_server}/api/v1/sessions/{session_id}/answer",
                         json={"participant": "ada", "question_id": "d2q1", "payload": 99})
    assert resp.status_code == 400
    schemas.check("api-error.schema.json", resp.json())


def test_answer_missing_fields_400(live_server):
    session_id = _session_with(live_server, "ada")
    resp = requests.post(f"{live_server}/api/v1/sessions/{session_id}/answer",
                         json={"participant": "ada"})
    assert resp.status_code == 400


def test_session_scores_match_ledger_replay(live_server):
    session_id = _session_with(live_server, "ada")
    base = f"{live_server}/api/v1/sessions/{session_id}"
    requests.post(f"{base}/answer", json={
        "participant": "ada", "question_id": "d3q2", "payload": {"cards": FOREST_LINE_BODY["cards"]}})
    requests.post(f"{base}/hint", json={"participant": "ada", "question_id": "d3q2"})
    requests.post(f"{base}/hint", json={"participant": "ada", "question_id": "d3q2"})
    complete = {"cards": FOREST_LINE_BODY["cards"] + [
        {"card": "set_title", "inputs": {"text": "t"}},
        {"card": "set_x_label", "inputs": {"text": "x"}},
        {"card": "set_y_label", "inputs": {"text": "y"}},
    ]}
    resp = requests.post(f"{base}/answer", json={
        "participant": "ada", "question_id": "d3q2", "payload": complete})
    assert resp.json()["grade"]["verdict"] == "CORRECT"
    assert resp.json()["score"] == 8  # 10 base - 2 hints, as the ledger replays
    state = requests.get(base).json()
    assert state["scoreboard"]["ada"] == 8
