import { describe, expect, it } from "vitest";

import {
  insertCard,
  missingInputs,
  moveCard,
  newCanvasCard,
  removeCard,
  setInput,
  toPipelineDocument,
} from "../src/state.js";
import { cardSpec } from "./fixtures.js";

const FOREST_URL = "https://data.cardpipe.example/datasets/forest_area.csv";

function dragFigFourSequence() {
  // the four-card line-chart program, dropped one card at a time
  let canvas = insertCard([], newCanvasCard(cardSpec("open_csv_url")), 0);
  canvas = insertCard(canvas, newCanvasCard(cardSpec("filter")), 1);
  canvas = insertCard(canvas, newCanvasCard(cardSpec("select_columns")), 2);
  canvas = insertCard(canvas, newCanvasCard(cardSpec("line_chart")), 3);
  canvas = setInput(canvas, 0, "url", FOREST_URL);
  canvas = setInput(canvas, 1, "column", "country");
  canvas = setInput(canvas, 1, "comparator", "==");
  canvas = setInput(canvas, 1, "value", "Brazil");
  canvas = setInput(canvas, 2, "columns", "year, forest_area");
  canvas = setInput(canvas, 3, "x", "year");
  canvas = setInput(canvas, 3, "y", "forest_area");
  return canvas;
}

describe("canvas to pipeline document", () => {
  it("dragging the four-card sequence produces the exact engine JSON", () => {
    const doc = toPipelineDocument(dragFigFourSequence());
    expect(doc).toEqual({
      cards: [
        { card: "open_csv_url", inputs: { url: FOREST_URL } },
        {
          card: "filter",
          inputs: { column: "country", comparator: "==", value: "Brazil" },
        },
        { card: "select_columns", inputs: { columns: ["year", "forest_area"] } },
        { card: "line_chart", inputs: { x: "year", y: "forest_area" } },
      ],
    });
  });

  it("canvas order equals pipeline order after a reorder", () => {
    let canvas = dragFigFourSequence();
    canvas = moveCard(canvas, 2, 1);
    const ids = toPipelineDocument(canvas).cards.map((c) => c.card);
    expect(ids).toEqual(["open_csv_url", "select_columns", "filter", "line_chart"]);
  });

  it("dropping at a position inserts there", () => {
    let canvas = insertCard([], newCanvasCard(cardSpec("filter")), 0);
    canvas = insertCard(canvas, newCanvasCard(cardSpec("open_csv_url")), 0);
    expect(toPipelineDocument(canvas).cards.map((c) => c.card)).toEqual([
      "open_csv_url",
      "filter",
    ]);
  });

  it("numeric literals become numbers, words stay strings", () => {
    let canvas = insertCard([], newCanvasCard(cardSpec("filter")), 0);
    canvas = setInput(canvas, 0, "column", "age");
    canvas = setInput(canvas, 0, "comparator", ">");
    canvas = setInput(canvas, 0, "value", "29");
    expect(toPipelineDocument(canvas).cards[0].inputs.value).toBe(29);
    canvas = setInput(canvas, 0, "value", "29.5");
    expect(toPipelineDocument(canvas).cards[0].inputs.value).toBe(29.5);
    canvas = setInput(canvas, 0, "value", "Brazil");
    expect(toPipelineDocument(canvas).cards[0].inputs.value).toBe("Brazil");
  });

  it("column lists split on commas and drop blanks", () => {
    let canvas = insertCard([], newCanvasCard(cardSpec("select_columns")), 0);
    canvas = setInput(canvas, 0, "columns", " year ,, forest_area ");
    expect(toPipelineDocument(canvas).cards[0].inputs.columns).toEqual([
      "year",
      "forest_area",
    ]);
  });

  it("empty required inputs are reported for highlighting", () => {
    const card = newCanvasCard(cardSpec("filter"));
    expect(missingInputs(card)).toEqual(["column", "comparator", "value"]);
    const canvas = setInput([card], 0, "column", "country");
    expect(missingInputs(canvas[0])).toEqual(["comparator", "value"]);
  });

  it("removeCard drops exactly one card", () => {
    const canvas = dragFigFourSequence();
    const next = removeCard(canvas, 1);
    expect(next.map((c) => c.spec.id)).toEqual([
      "open_csv_url",
      "select_columns",
      "line_chart",
    ]);
  });

  it("state transitions never mutate their inputs", () => {
    const canvas = dragFigFourSequence();
    const snapshot = JSON.stringify(toPipelineDocument(canvas));
    moveCard(canvas, 0, 3);
    removeCard(canvas, 0);
    setInput(canvas, 0, "url", "changed");
    expect(JSON.stringify(toPipelineDocument(canvas))).toBe(snapshot);
  });
});
