// DOM bootstrap: wires the palette, canvas, output pane, and activity mode
// together. Layout mirrors familiar drag-and-drop block editors: palette on
// the left, program in the middle, output on the right.

import { ApiClient } from "./api.js";
import { ActivityController } from "./activity.js";
import {
  canvasCardHtml,
  hintHtml,
  paletteHtml,
  questionHtml,
  scoreboardHtml,
  stepListHtml,
  stepOutputHtml,
  verdictHtml,
} from "./render.js";
import {
  CanvasCard,
  insertCard,
  moveCard,
  newCanvasCard,
  removeCard,
  setInput,
  toPipelineDocument,
} from "./state.js";
import type {
  AnswerResponse,
  CatalogDoc,
  HintResponse,
  SessionState,
  TraceDoc,
  ValidationReport,
} from "./types.js";

const api = new ApiClient("");

let catalog: CatalogDoc;
let canvas: CanvasCard[] = [];
let report: ValidationReport | null = null;
let trace: TraceDoc | null = null;
let selectedStep: number | null = null;
let activity: ActivityController | null = null;

function $(selector: string): HTMLElement {
  const el = document.querySelector(selector);
  if (!el) throw new Error(`missing element ${selector}`);
  return el as HTMLElement;
}

// -- canvas ------------------------------------------------------------------

let validateTimer: ReturnType<typeof setTimeout> | null = null;

function scheduleValidate() {
  if (validateTimer) clearTimeout(validateTimer);
  validateTimer = setTimeout(() => {
    void revalidate();
  }, 250);
}

async function revalidate() {
  if (canvas.length === 0) {
    report = null;
    renderCanvas();
    return;
  }
  try {
    report = await api.validate(toPipelineDocument(canvas));
  } catch {
    report = null;
  }
  renderCanvas();
}

function renderCanvas() {
  const host = $("#canvas");
  if (canvas.length === 0) {
    host.innerHTML = '<p class="canvas-hint">Drag cards here to build a pipeline.</p>';
    return;
  }
  host.innerHTML = canvas.map((card, i) => canvasCardHtml(catalog, card, i, report)).join("");
  host.querySelectorAll<HTMLElement>(".canvas-card").forEach((el) => {
    el.addEventListener("dragstart", (ev) => {
      ev.dataTransfer?.setData("application/x-move", el.dataset.step ?? "");
    });
  });
  host.querySelectorAll<HTMLInputElement>("input.input, select.input").forEach((el) => {
    el.addEventListener("change", () => {
      canvas = setInput(canvas, Number(el.dataset.step), el.dataset.field ?? "", el.value);
      scheduleValidate();
    });
  });
  host.querySelectorAll<HTMLButtonElement>("button.remove").forEach((el) => {
    el.addEventListener("click", () => {
      canvas = removeCard(canvas, Number(el.dataset.step));
      scheduleValidate();
      renderCanvas();
    });
  });
}

function dropPosition(host: HTMLElement, clientY: number): number {
  const cards = [...host.querySelectorAll<HTMLElement>(".canvas-card")];
  for (let i = 0; i < cards.length; i++) {
    const rect = cards[i].getBoundingClientRect();
    if (clientY < rect.top + rect.height / 2) return i;
  }
  return cards.length;
}

function wireCanvasDropZone() {
  const host = $("#canvas");
  host.addEventListener("dragover", (ev) => ev.preventDefault());
  host.addEventListener("drop", (ev) => {
    ev.preventDefault();
    const position = dropPosition(host, ev.clientY);
    const moved = ev.dataTransfer?.getData("application/x-move");
    if (moved) {
      canvas = moveCard(canvas, Number(moved), position);
    } else {
      const cardId = ev.dataTransfer?.getData("text/plain");
      const spec = catalog.cards.find((c) => c.id === cardId);
      if (!spec) return;
      canvas = insertCard(canvas, newCanvasCard(spec), position);
    }
    scheduleValidate();
    renderCanvas();
  });
}

// -- output ---------------------------------------------------------------------

async function runPipeline() {
  if (canvas.length === 0) return;
  const doc = toPipelineDocument(canvas);
  const status = $("#run-status");
  status.textContent = "running…";
  try {
    trace = await api.execute(doc);
  } catch (err) {
    status.textContent = err instanceof Error ? err.message : String(err);
    return;
  }
  status.textContent = trace.error
    ? `failed at step ${trace.error.step_index}: ${trace.error.code}`
    : "done";
  selectedStep = trace.steps.length ? trace.steps.length - 1 : null;
  renderTrace();
}

function renderTrace() {
  if (!trace) return;
  $("#steps").innerHTML = stepListHtml(trace.steps, selectedStep);
  document.querySelectorAll<HTMLElement>("#steps .step").forEach((el) => {
    el.addEventListener("click", () => {
      selectedStep = Number(el.dataset.step);
      renderTrace();
    });
  });
  const output = $("#output");
  const step = trace.steps.find((s) => s.step_index === selectedStep);
  if (!step) {
    output.innerHTML = "";
    return;
  }
  output.innerHTML = stepOutputHtml(step);
  if (step.kind === "chart") {
    const upTo = canvas.slice(0, step.step_index + 1);
    void api.renderSvg(toPipelineDocument(upTo)).then((svg) => {
      const slot = output.querySelector(`[data-chart-step="${step.step_index}"]`);
      if (slot) slot.innerHTML = svg;
    });
  }
}

// -- activity mode ------------------------------------------------------------------

function activityEvents() {
  return {
    onVerdict(result: AnswerResponse) {
      $("#verdict").innerHTML = verdictHtml(result.grade, result.score);
    },
    onHint(result: HintResponse) {
      $("#hint-overlay").innerHTML = hintHtml(result);
    },
    onScoreboard(state: SessionState) {
      $("#scoreboard").innerHTML = scoreboardHtml(state.scoreboard);
    },
    onError(message: string) {
      $("#verdict").innerHTML = `<div class="verdict error">${message}</div>`;
    },
  };
}

function renderQuestion() {
  if (!activity) return;
  const question = activity.currentQuestion();
  if (!question) return;
  $("#question").innerHTML = questionHtml(question);
  $("#question").querySelectorAll<HTMLButtonElement>(".mc-option").forEach((el) => {
    el.addEventListener("click", () =>
      void activity?.submitChoice(question.id, Number(el.dataset.choice)));
  });
  $("#question").querySelector(".submit-pipeline")?.addEventListener("click", () => {
    void activity?.submitPipeline(question.id, toPipelineDocument(canvas));
  });
  $("#question").querySelector(".submit-text")?.addEventListener("click", () => {
    const text = ($("#question").querySelector(".free-answer") as HTMLTextAreaElement)?.value;
    void activity?.submitText(question.id, text ?? "");
  });
  $("#question").querySelector(".hint-button")?.addEventListener("click", () => {
    void activity?.requestHint(question.id);
  });
}

async function joinActivity() {
  const name = (document.querySelector("#participant-name") as HTMLInputElement).value.trim();
  if (!name) return;
  const existing = (document.querySelector("#session-id") as HTMLInputElement).value.trim();
  const session = existing
    ? await api.joinSession(existing, name).then(() => existing)
    : (await api.createSession([name])).session_id;
  (document.querySelector("#session-id") as HTMLInputElement).value = session;
  activity = new ActivityController(api, session, name, activityEvents());
  await activity.loadQuestions();
  renderQuestion();
  $("#next-question").addEventListener("click", () => {
    activity?.nextQuestion();
    $("#verdict").innerHTML = "";
    $("#hint-overlay").innerHTML = "";
    renderQuestion();
  });
  activity.startPolling(2000);
  $("#activity-pane").classList.add("joined");
}

// -- boot --------------------------------------------------------------------------------

async function boot() {
  catalog = await api.getCards();
  const palette = $("#palette");
  palette.innerHTML = paletteHtml(catalog);
  palette.querySelectorAll<HTMLElement>(".palette-card").forEach((el) => {
    el.addEventListener("dragstart", (ev) => {
      ev.dataTransfer?.setData("text/plain", el.dataset.cardId ?? "");
    });
    el.addEventListener("dblclick", () => {
      const spec = catalog.cards.find((c) => c.id === el.dataset.cardId);
      if (!spec) return;
      canvas = insertCard(canvas, newCanvasCard(spec), canvas.length);
      scheduleValidate();
      renderCanvas();
    });
  });
  wireCanvasDropZone();
  renderCanvas();
  $("#run").addEventListener("click", () => void runPipeline());
  $("#join").addEventListener("click", () => void joinActivity());
}

if (typeof document !== "undefined") {
  void boot();
}
