// HTML fragments as strings, so the view layer is testable without a DOM.
// Colors always come from the fetched catalog, never from this file.

import type { CanvasCard } from "./state.js";
import { missingInputs } from "./state.js";
import type {
  CardSpec,
  CatalogDoc,
  GradeResult,
  HintResponse,
  Question,
  StepDoc,
  ValidationReport,
} from "./types.js";

export function esc(text: unknown): string {
  return String(text)
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

function categoryColor(catalog: CatalogDoc, categoryId: string): string {
  const category = catalog.categories.find((c) => c.id === categoryId);
  return category ? category.color : "#000000";
}

export function paletteHtml(catalog: CatalogDoc): string {
  const groups = catalog.categories.map((category) => {
    const cards = catalog.cards
      .filter((card) => card.category === category.id)
      .map((card) => paletteCardHtml(catalog, card))
      .join("");
    return `<section class="palette-group">
      <h3 style="color:${esc(category.color)}">${esc(category.display_name)}</h3>
      <div class="palette-cards">${cards}</div>
    </section>`;
  });
  return groups.join("");
}

export function paletteCardHtml(catalog: CatalogDoc, card: CardSpec): string {
  const color = categoryColor(catalog, card.category);
  return `<div class="palette-card" draggable="true" data-card-id="${esc(card.id)}"
    style="border-color:${esc(color)};--card-color:${esc(color)}"
    title="${esc(card.definition)}\n\nExample: ${esc(card.example_usage)}">
    <span class="card-title">${esc(card.title)}</span>
    <span class="card-example">${esc(card.example_usage)}</span>
  </div>`;
}

const COMPARATORS = ["==", "!=", ">", "<", ">=", "<=", "contains"];

function widgetHtml(card: CanvasCard, index: number, field: string, kind: string): string {
  const value = card.inputs[field] ?? "";
  const missing = missingInputs(card).includes(field);
  const cls = missing ? "input missing-input" : "input";
  if (kind === "COMPARATOR") {
    const options = COMPARATORS.map(
      (c) =>
        `<option value="${esc(c)}"${c === value ? " selected" : ""}>${esc(c)}</option>`,
    ).join("");
    return `<select class="${cls}" data-step="${index}" data-field="${esc(field)}">
      <option value=""${value === "" ? " selected" : ""}>choose</option>${options}</select>`;
  }
  const placeholder = kind === "COLUMN_LIST" ? "col1, col2" : kind.toLowerCase();
  return `<input class="${cls}" data-step="${index}" data-field="${esc(field)}"
    value="${esc(value)}" placeholder="${esc(placeholder)}">`;
}

export function canvasCardHtml(
  catalog: CatalogDoc,
  card: CanvasCard,
  index: number,
  issues: ValidationReport | null,
): string {
  const color = categoryColor(catalog, card.spec.category);
  const badge = issues
    ? issues.errors
        .filter((e) => e.step_index === index)
        .map((e) => `<span class="issue-badge" title="${esc(e.message)}">${esc(e.code)}</span>`)
        .join("")
    : "";
  const widgets = card.spec.input_fields
    .map(
      (f) =>
        `<label>${esc(f.name)} ${widgetHtml(card, index, f.name, f.kind)}</label>`,
    )
    .join("");
  return `<div class="canvas-card" draggable="true" data-step="${index}"
    style="border-color:${esc(color)};--card-color:${esc(color)}">
    <header><span class="card-title">${esc(card.spec.title)}</span>${badge}
      <button class="remove" data-step="${index}" title="remove">×</button></header>
    <div class="card-inputs">${widgets}</div>
  </div>`;
}

export function stepOutputHtml(step: StepDoc): string {
  if (step.kind === "scalar" && step.scalar) {
    return `<div class="scalar-output">${esc(step.scalar.value)}</div>
      <p class="step-summary">${esc(step.summary)}</p>`;
  }
  if (step.kind === "table" && step.table) {
    const header = step.table.columns.map((c) => `<th>${esc(c.name)}</th>`).join("");
    const rows = [];
    for (let i = 0; i < step.table.row_count; i++) {
      const cells = step.table.columns
        .map((c) => `<td>${c.cells[i] === null ? "" : esc(c.cells[i])}</td>`)
        .join("");
      rows.push(`<tr>${cells}</tr>`);
    }
    const total = step.table.total_rows ?? step.table.row_count;
    const note =
      total > step.table.row_count
        ? `<p class="truncated">showing ${step.table.row_count} of ${total} rows</p>`
        : "";
    return `<table class="table-output"><thead><tr>${header}</tr></thead>
      <tbody>${rows.join("")}</tbody></table>${note}
      <p class="step-summary">${esc(step.summary)}</p>`;
  }
  // charts get their SVG injected by the caller (fetched from the render endpoint)
  return `<div class="chart-output" data-chart-step="${step.step_index}"></div>
    <p class="step-summary">${esc(step.summary)}</p>`;
}

export function stepListHtml(steps: StepDoc[], selected: number | null): string {
  return steps
    .map(
      (s) =>
        `<li class="step${s.step_index === selected ? " selected" : ""}"
          data-step="${s.step_index}">[${s.step_index}] ${esc(s.card)}: ${esc(s.summary)}</li>`,
    )
    .join("");
}

export function questionHtml(question: Question): string {
  const kindNote: Record<string, string> = {
    M: "Build a pipeline on the canvas, then submit it.",
    MC: "Pick one answer.",
    OE: "Write your answer; a moderator reviews it.",
    CNV: "Draw your answer on paper or canvas, then describe it; a moderator reviews it.",
  };
  let controls = "";
  if (question.kind === "MC" && question.options) {
    controls = question.options
      .map(
        (option, i) =>
          `<button class="mc-option" data-choice="${i}">${esc(option)}</button>`,
      )
      .join("");
  } else if (question.kind === "M") {
    controls = `<button class="submit-pipeline">Submit my pipeline</button>`;
  } else {
    controls = `<textarea class="free-answer" rows="3"></textarea>
      <button class="submit-text">Send for review</button>`;
  }
  return `<div class="question" data-question-id="${esc(question.id)}">
    <h4>Day ${question.day}, Q${question.number} (${esc(question.kind)})</h4>
    <p class="prompt">${esc(question.prompt)}</p>
    <p class="kind-note">${esc(kindNote[question.kind])}</p>
    <div class="controls">${controls}</div>
    <button class="hint-button">Request a hint (−1 point)</button>
  </div>`;
}

export function verdictHtml(grade: GradeResult, score: number): string {
  const cls = grade.verdict.toLowerCase().replace("_", "-");
  return `<div class="verdict ${cls}">
    <strong>${esc(grade.verdict)}</strong>
    <span class="points">${grade.points_awarded >= 0 ? "+" : ""}${grade.points_awarded}</span>
    <p>${esc(grade.explanation)}</p>
    <p class="score">score: ${score}</p>
  </div>`;
}

/** The hint overlay: a chart-element card image with its printed tip. */
export function hintHtml(hint: HintResponse): string {
  if (!hint.hint) {
    return `<div class="hint-card empty">Nothing is missing - no hint needed,
      no point deducted.</div>`;
  }
  const name = hint.hint.element ? hint.hint.element.replace("_", " ") : "Tip";
  const delta =
    hint.score_delta < 0
      ? `<span class="delta">${hint.score_delta} point</span>`
      : `<span class="delta free">already given - free</span>`;
  return `<div class="hint-card element-card">
    <header>${esc(name)}</header>
    <p class="tip">${esc(hint.hint.tip)}</p>
    ${delta}
    <p class="score">score: ${hint.score}</p>
  </div>`;
}

export function scoreboardHtml(scoreboard: Record<string, number>): string {
  const rows = Object.entries(scoreboard)
    .sort((a, b) => b[1] - a[1] || a[0].localeCompare(b[0]))
    .map(([name, score]) => `<tr><td>${esc(name)}</td><td>${score}</td></tr>`)
    .join("");
  return `<table class="scoreboard"><thead><tr><th>who</th><th>points</th></tr></thead>
    <tbody>${rows}</tbody></table>`;
}

export function fallacyCardHtml(catalog: CatalogDoc, fallacyId: string): string {
  const card = catalog.fallacies.find((f) => f.id === fallacyId);
  if (!card) return "";
  const samples = card.samples.map((s) => `<li>${esc(s)}</li>`).join("");
  return `<div class="fallacy-card"><header>${esc(card.name)}</header>
    <p>${esc(card.description)}</p><ul>${samples}</ul></div>`;
}
