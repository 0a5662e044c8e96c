"""Gamified three-day question bank, grading, hints, and session scoring.

Pipeline-built answers are graded by result equivalence: any card sequence
whose final output matches the canonical answer is correct, card order be
damned. Sessions are event-sourced: the score IS the replay of the
submission/hint log, so a reported score can always be audited.
"""
from __future__ import annotations

import json
import secrets
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

from . import charts, engine
from .catalog import Catalog
from .errors import CardpipeError, NotFoundError
from .table import INTEGER, REAL, Table

OE, MC, CNV, M = "OE", "MC", "CNV", "M"
KINDS = (OE, MC, CNV, M)

CORRECT, INCORRECT, NEEDS_REVIEW = "CORRECT", "INCORRECT", "NEEDS_REVIEW"

REAL_TOLERANCE = 1e-9


class ActivityError(CardpipeError):
    code = "ACTIVITY"


class AlreadyAnsweredError(CardpipeError):
    code = "ALREADY_ANSWERED"


class BadChoiceError(CardpipeError):
    code = "BAD_CHOICE"


@dataclass(frozen=True)
class Question:
    id: str
    day: int
    number: int
    kind: str
    prompt: str
    options: tuple[str, ...] = ()
    answer_key: int | None = None
    base_points: int | None = None  # None -> policy default
    canonical_pipeline: engine.Pipeline | None = None
    expected_chart_kind: str | None = None
    hint_tip: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ActivityError(f"question {self.id!r}: unknown kind {self.kind!r}")
        if self.kind == MC:
            if not (2 <= len(self.options) <= 6):
                raise ActivityError(f"question {self.id!r}: MC needs 2-6 options")
            if self.answer_key is None or not (0 <= self.answer_key < len(self.options)):
                raise ActivityError(f"question {self.id!r}: MC needs a valid answer_key")
        if self.kind == M and self.canonical_pipeline is None:
            raise ActivityError(f"question {self.id!r}: M needs a canonical pipeline")

    def to_json(self, *, include_answers: bool = False) -> dict:
        doc: dict = {
            "id": self.id,
            "day": self.day,
            "number": self.number,
            "kind": self.kind,
            "prompt": self.prompt,
        }
        if self.options:
            doc["options"] = list(self.options)
        if self.base_points is not None:
            doc["base_points"] = self.base_points
        if self.expected_chart_kind:
            doc["expected_chart_kind"] = self.expected_chart_kind
        if include_answers:
            if self.answer_key is not None:
                doc["answer_key"] = self.answer_key
            if self.canonical_pipeline is not None:
                doc["canonical_pipeline"] = self.canonical_pipeline.to_json()
            if self.hint_tip:
                doc["hint_tip"] = self.hint_tip
        return doc


@dataclass(frozen=True)
class GradeResult:
    verdict: str
    points_awarded: int
    explanation: str

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "points_awarded": self.points_awarded,
            "explanation": self.explanation,
        }


@dataclass(frozen=True)
class ScoringPolicy:
    base_points: int = 10
    hint_cost: int = 1  # one card, one point
    time_bonus_enabled: bool = False
    time_bonus_points: int = 2
    time_bonus_window_s: float = 60.0

    def points_for(self, question: Question) -> int:
        return self.base_points if question.base_points is None else question.base_points


def load_question_bank() -> tuple[Question, ...]:
    text = resources.files("cardpipe.data").joinpath("questions.json").read_text("utf-8")
    doc = json.loads(text)
    questions = []
    for raw in doc["questions"]:
        pipeline = None
        if "canonical_pipeline" in raw:
            pipeline = engine.Pipeline.from_json(raw["canonical_pipeline"])
        questions.append(
            Question(
                id=raw["id"],
                day=raw["day"],
                number=raw["number"],
                kind=raw["kind"],
                prompt=raw["prompt"],
                options=tuple(raw.get("options", [])),
                answer_key=raw.get("answer_key"),
                base_points=raw.get("base_points"),
                canonical_pipeline=pipeline,
                expected_chart_kind=raw.get("expected_chart_kind"),
                hint_tip=raw.get("hint_tip"),
            )
        )
    return tuple(questions)


# --------------------------------------------------------------------------
# result equivalence


def _numbers_equal(a, b) -> bool:
    if isinstance(a, bool) or isinstance(b, bool):
        return False
    if isinstance(a, int) and isinstance(b, int):
        return a == b
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        fa, fb = float(a), float(b)
        if fa == fb:
            return True
        return abs(fa - fb) <= REAL_TOLERANCE * max(abs(fa), abs(fb))
    return False


def _cells_equal(a, b) -> bool:
    if a is None or b is None:
        return a is None and b is None
    if isinstance(a, str) or isinstance(b, str):
        return a == b
    return _numbers_equal(a, b)


def _row_sort_key(row):
    # stable type-aware ordering so multisets can be compared pairwise
    return tuple((0, "", float(c)) if isinstance(c, (int, float)) and not isinstance(c, bool)
                 else (1, c, 0.0) if isinstance(c, str) else (2, "", 0.0)
                 for c in row)


def _tables_equivalent(expected: Table, actual: Table) -> tuple[bool, str]:
    missing = [n for n in expected.column_names if not actual.has_column(n)]
    if missing:
        return False, f"answer is missing columns: {', '.join(missing)}"
    if actual.row_count != expected.row_count:
        return False, f"answer has {actual.row_count} rows, expected {expected.row_count}"
    names = list(expected.column_names)
    exp_rows = sorted(
        (tuple(expected.column(n).cells[i] for n in names) for i in range(expected.row_count)),
        key=_row_sort_key,
    )
    act_rows = sorted(
        (tuple(actual.column(n).cells[i] for n in names) for i in range(actual.row_count)),
        key=_row_sort_key,
    )
    for exp, act in zip(exp_rows, act_rows):
        if not all(_cells_equal(e, a) for e, a in zip(exp, act)):
            return False, "answer rows differ from the expected result"
    return True, "result matches"


def _scalar_equivalent(expected: engine.Scalar, actual: engine.Scalar) -> tuple[bool, str]:
    if _cells_equal(expected.value, actual.value):
        return True, "result matches"
    return False, (
        f"answer is {engine.format_cell(actual.value)}, "
        f"expected {engine.format_cell(expected.value)}"
    )


def _chart_pairs(spec: charts.ChartSpec):
    if spec.kind in (charts.LINE, charts.BAR):
        return sorted(zip(spec.data["x"], spec.data["y"]), key=_row_sort_key)
    if spec.kind == charts.PIE:
        return sorted(zip(spec.data["categories"], spec.data["values"]), key=_row_sort_key)
    return sorted(zip(spec.data["regions"], spec.data["values"]), key=_row_sort_key)


def _charts_equivalent(expected: charts.ChartSpec, actual: charts.ChartSpec) -> tuple[bool, str]:
    if actual.kind != expected.kind:
        return False, f"answer draws a {actual.kind} chart, expected {expected.kind}"
    if expected.kind == charts.TABLE_VIEW:
        ok, why = _tables_equivalent(
            Table.from_json(expected.data["table"]), Table.from_json(actual.data["table"])
        )
    else:
        exp_pairs, act_pairs = _chart_pairs(expected), _chart_pairs(actual)
        if len(exp_pairs) != len(act_pairs):
            ok, why = False, f"answer has {len(act_pairs)} data points, expected {len(exp_pairs)}"
        else:
            ok, why = True, "result matches"
            for (ek, ev), (ak, av) in zip(exp_pairs, act_pairs):
                if not (_cells_equal(ek, ak) and _cells_equal(ev, av)):
                    ok, why = False, "chart data differs from the expected result"
                    break
    if not ok:
        return False, why
    report = charts.check_completeness(actual)
    if not report.complete:
        return False, f"chart is missing required elements: {', '.join(report.missing)}"
    return True, "result matches"


def result_equivalent(expected, actual) -> tuple[bool, str]:
    """Compare final outputs, not card sequences.

    A TABLE_VIEW chart counts as the table it displays when a plain table
    is expected - showing the result does not change the result.
    """
    if isinstance(actual, charts.ChartSpec) and actual.kind == charts.TABLE_VIEW \
            and isinstance(expected, Table):
        actual = Table.from_json(actual.data["table"])
    if isinstance(expected, Table):
        if not isinstance(actual, Table):
            return False, "expected a table result"
        return _tables_equivalent(expected, actual)
    if isinstance(expected, engine.Scalar):
        if not isinstance(actual, engine.Scalar):
            return False, "expected a single value result"
        return _scalar_equivalent(expected, actual)
    if not isinstance(actual, charts.ChartSpec):
        return False, f"expected a {expected.kind} chart result"
    return _charts_equivalent(expected, actual)


# --------------------------------------------------------------------------
# grading


def _fresh_env(env: engine.Env) -> engine.Env:
    return engine.Env(
        catalog=env.catalog,
        registry=env.registry,
        store=engine.VariableStore(),
        fetcher=env.fetcher,
        allow_filesystem=env.allow_filesystem,
    )


def canonical_final(question: Question, env: engine.Env):
    trace = engine.execute(question.canonical_pipeline, _fresh_env(env))
    if not trace.ok:
        raise ActivityError(
            f"question {question.id!r}: canonical pipeline failed: {trace.error.message}"
        )
    return trace.final.value


def grade_m_answer(question: Question, submitted: engine.Pipeline, env: engine.Env,
                   policy: ScoringPolicy | None = None) -> GradeResult:
    """CORRECT iff the submission validates, runs, and its final output is
    result-equivalent to the canonical pipeline's final output."""
    if question.kind != M:
        raise ActivityError(f"question {question.id!r} is not pipeline-graded")
    policy = policy or ScoringPolicy()
    report = engine.validate(submitted, env.catalog, env.registry)
    if not report.ok:
        return GradeResult(INCORRECT, 0, f"pipeline does not validate:\n{report.to_text()}")
    trace = engine.execute(submitted, _fresh_env(env))
    if not trace.ok:
        err = trace.error
        return GradeResult(
            INCORRECT, 0, f"pipeline failed at step {err.step_index}: {err.code}: {err.message}"
        )
    actual = trace.final.value
    if question.expected_chart_kind and not (
        isinstance(actual, charts.ChartSpec) and actual.kind == question.expected_chart_kind
    ):
        return GradeResult(INCORRECT, 0, f"expected a {question.expected_chart_kind} chart result")
    expected = canonical_final(question, env)
    ok, why = result_equivalent(expected, actual)
    if ok:
        return GradeResult(CORRECT, policy.points_for(question), why)
    return GradeResult(INCORRECT, 0, why)


def grade_mc_answer(question: Question, choice: int,
                    policy: ScoringPolicy | None = None) -> GradeResult:
    if question.kind != MC:
        raise ActivityError(f"question {question.id!r} is not multiple choice")
    policy = policy or ScoringPolicy()
    if not isinstance(choice, int) or isinstance(choice, bool) or not (0 <= choice < len(question.options)):
        raise BadChoiceError(f"choice must be 0..{len(question.options) - 1}")
    if choice == question.answer_key:
        return GradeResult(CORRECT, policy.points_for(question), "correct choice")
    return GradeResult(INCORRECT, 0, "not the expected choice")


# --------------------------------------------------------------------------
# sessions

HINT_ORDER = (charts.TITLE, charts.X_LABEL, charts.Y_LABEL, charts.LEGEND)
TIP_ELEMENT = "TIP"  # marker for non-element (text) hints in the hint history


@dataclass(frozen=True)
class HintResult:
    element_card: charts.ChartElementCard | None
    tip: str | None
    score_delta: int

    def to_json(self) -> dict:
        if self.element_card is None and self.tip is None:
            return {"hint": None, "score_delta": 0}
        hint: dict = {}
        if self.element_card is not None:
            hint["element"] = self.element_card.element
            hint["tip"] = self.element_card.tip
        else:
            hint["tip"] = self.tip
        return {"hint": hint, "score_delta": self.score_delta}


def _now_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class _ParticipantState:
    score: int = 0
    answered: set = field(default_factory=set)  # question ids answered correctly
    hints: dict = field(default_factory=dict)  # question id -> set of charged elements
    latest_chart_missing: dict = field(default_factory=dict)  # question id -> list | None


class Session:
    """One classroom activity run; every state change appends one event."""

    def __init__(self, session_id: str, bank: tuple[Question, ...], env: engine.Env,
                 policy: ScoringPolicy | None = None, log_path: Path | None = None):
        self.id = session_id
        self.policy = policy or ScoringPolicy()
        self.env = env
        self._bank = {q.id: q for q in bank}
        self._participants: dict[str, _ParticipantState] = {}
        self._events: list[dict] = []
        self._log_path = log_path
        self._submissions: list[dict] = []

    @staticmethod
    def create(bank: tuple[Question, ...], env: engine.Env,
               policy: ScoringPolicy | None = None, roster: list[str] | None = None,
               log_dir: Path | None = None) -> "Session":
        session_id = secrets.token_urlsafe(12)
        log_path = (log_dir / f"{session_id}.jsonl") if log_dir else None
        session = Session(session_id, bank, env, policy, log_path)
        session._record({"type": "created", "session_id": session_id})
        for participant in roster or []:
            session.join(participant)
        return session

    # -- event log ----------------------------------------------------------

    def _record(self, event: dict):
        event = {**event, "ts": _now_iso()}
        self._events.append(event)
        self._apply(event)
        if self._log_path is not None:
            self._log_path.parent.mkdir(parents=True, exist_ok=True)
            with open(self._log_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(event, ensure_ascii=False) + "\n")

    def _apply(self, event: dict):
        kind = event["type"]
        if kind == "joined":
            self._participants.setdefault(event["participant"], _ParticipantState())
        elif kind == "submitted":
            state = self._participants[event["participant"]]
            state.score += event["points_awarded"]
            if event["verdict"] == CORRECT:
                state.answered.add(event["question_id"])
            if "chart_missing" in event:
                state.latest_chart_missing[event["question_id"]] = event["chart_missing"]
            self._submissions.append(event)
        elif kind == "hint":
            state = self._participants[event["participant"]]
            if event["charged"]:
                state.score -= self.policy.hint_cost
            state.hints.setdefault(event["question_id"], set()).add(event["element"])

    @property
    def events(self) -> list[dict]:
        return list(self._events)

    @staticmethod
    def replay_scores(events: list[dict], policy: ScoringPolicy | None = None) -> dict[str, int]:
        """Recompute every score from an event log alone."""
        policy = policy or ScoringPolicy()
        scores: dict[str, int] = {}
        for event in events:
            if event["type"] == "joined":
                scores.setdefault(event["participant"], 0)
            elif event["type"] == "submitted":
                scores[event["participant"]] = scores.get(event["participant"], 0) + event["points_awarded"]
            elif event["type"] == "hint" and event["charged"]:
                scores[event["participant"]] = scores.get(event["participant"], 0) - policy.hint_cost
        return scores

    # -- participants ---------------------------------------------------------

    def join(self, participant: str):
        if not participant:
            raise ActivityError("participant id must be non-empty")
        if participant not in self._participants:
            self._record({"type": "joined", "participant": participant})

    def _state_of(self, participant: str) -> _ParticipantState:
        if participant not in self._participants:
            raise NotFoundError("participant", participant)
        return self._participants[participant]

    def question(self, question_id: str) -> Question:
        if question_id not in self._bank:
            raise NotFoundError("question", question_id)
        return self._bank[question_id]

    # -- answering ------------------------------------------------------------

    def submit_answer(self, participant: str, question_id: str, payload,
                      elapsed_s: float | None = None) -> GradeResult:
        """Grade, apply the scoring policy, and append to the ledger.

        ``payload`` is a pipeline document (M), an option index (MC), or
        free text (OE/CNV, stored verbatim for moderation).
        """
        state = self._state_of(participant)
        question = self.question(question_id)
        if question_id in state.answered:
            raise AlreadyAnsweredError(f"{participant!r} already answered {question_id!r}")

        chart_missing = None
        stored_payload = payload
        if question.kind == M:
            pipeline = payload if isinstance(payload, engine.Pipeline) else engine.Pipeline.from_json(payload)
            stored_payload = pipeline.to_json()
            result = grade_m_answer(question, pipeline, self.env, self.policy)
            chart_missing = self._final_chart_missing(pipeline)
        elif question.kind == MC:
            result = grade_mc_answer(question, payload, self.policy)
        else:
            result = GradeResult(NEEDS_REVIEW, 0, "stored for moderator review")

        if (result.verdict == CORRECT and self.policy.time_bonus_enabled
                and elapsed_s is not None and elapsed_s <= self.policy.time_bonus_window_s):
            result = GradeResult(CORRECT, result.points_awarded + self.policy.time_bonus_points,
                                 result.explanation + " (time bonus)")

        event = {
            "type": "submitted",
            "participant": participant,
            "question_id": question_id,
            "verdict": result.verdict,
            "points_awarded": result.points_awarded,
            "payload": stored_payload,
        }
        if elapsed_s is not None:
            event["elapsed_s"] = elapsed_s
        if question.kind == M:
            event["chart_missing"] = chart_missing
        self._record(event)
        return result

    def _final_chart_missing(self, pipeline: engine.Pipeline) -> list[str] | None:
        """Missing elements of the submission's final chart, if it produced one."""
        try:
            trace = engine.execute(pipeline, _fresh_env(self.env))
        except CardpipeError:
            return None
        if not trace.ok or not isinstance(trace.final.value, charts.ChartSpec):
            return None
        return list(charts.check_completeness(trace.final.value).missing)

    # -- hints ------------------------------------------------------------------

    def request_hint(self, participant: str, question_id: str) -> HintResult:
        """Hand out the next missing chart-element card (or the question's tip).

        Each hint costs one point; the same element is never charged twice.
        A complete chart yields no hint and no deduction.
        """
        state = self._state_of(participant)
        question = self.question(question_id)
        if question_id in state.answered:
            raise AlreadyAnsweredError(f"{participant!r} already answered {question_id!r}")
        charged = state.hints.get(question_id, set())

        if question.expected_chart_kind:
            if question_id in state.latest_chart_missing:
                missing = state.latest_chart_missing[question_id]
                if missing is None:
                    missing = list(charts.REQUIRED_ELEMENTS[question.expected_chart_kind])
            else:
                missing = list(charts.REQUIRED_ELEMENTS[question.expected_chart_kind])
            missing = [e for e in HINT_ORDER if e in missing]
            if not missing:
                return HintResult(None, None, 0)
            uncharged = [e for e in missing if e not in charged]
            element = uncharged[0] if uncharged else missing[0]
            charge = bool(uncharged)
            card = self._element_card(element)
            self._record({"type": "hint", "participant": participant,
                          "question_id": question_id, "element": element, "charged": charge})
            return HintResult(card, None, -self.policy.hint_cost if charge else 0)

        if not question.hint_tip:
            return HintResult(None, None, 0)
        charge = TIP_ELEMENT not in charged
        self._record({"type": "hint", "participant": participant,
                      "question_id": question_id, "element": TIP_ELEMENT, "charged": charge})
        return HintResult(None, question.hint_tip, -self.policy.hint_cost if charge else 0)

    _ELEMENT_CARD_IDS = {
        charts.TITLE: "set_title",
        charts.X_LABEL: "set_x_label",
        charts.Y_LABEL: "set_y_label",
        charts.LEGEND: "set_legend",
    }

    def _element_card(self, element: str) -> charts.ChartElementCard:
        card = self.env.catalog.get_card(self._ELEMENT_CARD_IDS[element])
        return charts.ChartElementCard(element, card.tips or card.definition)

    # -- state -------------------------------------------------------------------

    def score_of(self, participant: str) -> int:
        return self._state_of(participant).score

    def scoreboard(self) -> dict[str, int]:
        return {p: s.score for p, s in sorted(self._participants.items())}

    def state_json(self) -> dict:
        return {
            "session_id": self.id,
            "participants": [
                {
                    "id": p,
                    "score": s.score,
                    "answered": sorted(s.answered),
                    "hints_taken": {q: sorted(e) for q, e in sorted(s.hints.items())},
                }
                for p, s in sorted(self._participants.items())
            ],
            "submissions": len(self._submissions),
        }
