// Workspace state transitions. All pure: the DOM layer calls these and
// re-renders. The canvas order IS the pipeline order sent to the API.

import type { CardSpec, PipelineDoc } from "./types.js";

export interface CanvasCard {
  spec: CardSpec;
  // raw widget values; conversion to typed inputs happens in toPipelineDocument
  inputs: Record<string, string>;
}

export function newCanvasCard(spec: CardSpec): CanvasCard {
  const inputs: Record<string, string> = {};
  for (const field of spec.input_fields) {
    inputs[field.name] = "";
  }
  return { spec, inputs };
}

export function insertCard(canvas: CanvasCard[], card: CanvasCard, position: number): CanvasCard[] {
  const clamped = Math.max(0, Math.min(position, canvas.length));
  return [...canvas.slice(0, clamped), card, ...canvas.slice(clamped)];
}

export function removeCard(canvas: CanvasCard[], index: number): CanvasCard[] {
  return canvas.filter((_, i) => i !== index);
}

export function moveCard(canvas: CanvasCard[], from: number, to: number): CanvasCard[] {
  if (from === to || from < 0 || from >= canvas.length) return canvas;
  const next = canvas.slice();
  const [card] = next.splice(from, 1);
  next.splice(Math.max(0, Math.min(to, next.length)), 0, card);
  return next;
}

export function setInput(
  canvas: CanvasCard[],
  index: number,
  field: string,
  value: string,
): CanvasCard[] {
  return canvas.map((card, i) =>
    i === index ? { ...card, inputs: { ...card.inputs, [field]: value } } : card,
  );
}

/** Required fields the student has not filled in yet (highlighted in the UI). */
export function missingInputs(card: CanvasCard): string[] {
  return card.spec.input_fields
    .filter((f) => f.required && card.inputs[f.name].trim() === "")
    .map((f) => f.name);
}

const INT_RE = /^[+-]?[0-9]+$/;
const REAL_RE = /^[+-]?([0-9]+\.[0-9]*|\.[0-9]+)([eE][+-]?[0-9]+)?$/;

function convertLiteral(raw: string): unknown {
  const text = raw.trim();
  if (INT_RE.test(text)) return parseInt(text, 10);
  if (REAL_RE.test(text)) return parseFloat(text);
  return raw;
}

/** The exact pipeline document the engine accepts. */
export function toPipelineDocument(canvas: CanvasCard[]): PipelineDoc {
  return {
    cards: canvas.map((card) => {
      const inputs: Record<string, unknown> = {};
      for (const field of card.spec.input_fields) {
        const raw = card.inputs[field.name] ?? "";
        if (raw.trim() === "" && !field.required) continue;
        if (field.kind === "COLUMN_LIST") {
          inputs[field.name] = raw
            .split(",")
            .map((part) => part.trim())
            .filter((part) => part !== "");
        } else if (field.kind === "LITERAL") {
          inputs[field.name] = convertLiteral(raw);
        } else {
          inputs[field.name] = raw;
        }
      }
      return { card: card.spec.id, inputs };
    }),
  };
}
