// A catalog fixture shaped exactly like GET /api/v1/cards serves it
// (same ids, categories, colors, and input fields as the built-in catalog).

import type { CardSpec, CatalogDoc } from "../src/types.js";

export const CATALOG: CatalogDoc = {
  categories: [
    { id: "SOURCE", display_name: "Data", color: "#2e9e4f", io_signature: "none->table" },
    { id: "TRANSFORM", display_name: "Transform", color: "#2d7ff9", io_signature: "table->table" },
    { id: "AGGREGATE", display_name: "Aggregate", color: "#f59e0b", io_signature: "table->scalar" },
    { id: "VARIABLE", display_name: "Variable", color: "#8b5cf6", io_signature: "table->table" },
    { id: "VISUALIZATION", display_name: "Visualization", color: "#ef4444", io_signature: "table->chart" },
    { id: "CHART_ELEMENT", display_name: "Chart Element", color: "#6b7280", io_signature: "chart->chart" },
  ],
  cards: [
    {
      id: "open_csv_url",
      category: "SOURCE",
      title: "Open CSV with a Web Link",
      definition: "Downloads a CSV file from a web link and loads it as a table.",
      example_usage: "Open CSV with a Web Link: https://example.org/data.csv",
      input_fields: [{ name: "url", kind: "URL", required: true }],
    },
    {
      id: "filter",
      category: "TRANSFORM",
      title: "Filter",
      definition: "Keeps only the rows where a column passes a comparison.",
      example_usage: "Filter: country == Brazil",
      input_fields: [
        { name: "column", kind: "COLUMN_NAME", required: true },
        { name: "comparator", kind: "COMPARATOR", required: true },
        { name: "value", kind: "LITERAL", required: true },
      ],
    },
    {
      id: "select_columns",
      category: "TRANSFORM",
      title: "Select Columns",
      definition: "Keeps only the listed columns, in the order you list them.",
      example_usage: "Select Columns: year, forest_area",
      input_fields: [{ name: "columns", kind: "COLUMN_LIST", required: true }],
    },
    {
      id: "line_chart",
      category: "VISUALIZATION",
      title: "Line Chart",
      definition: "Draws one point per row and connects them with a line.",
      example_usage: "Line Chart: x = year, y = forest_area",
      input_fields: [
        { name: "x", kind: "COLUMN_NAME", required: true },
        { name: "y", kind: "COLUMN_NAME", required: true },
      ],
      tips: "Lines show change over time.",
    },
    {
      id: "set_title",
      category: "CHART_ELEMENT",
      title: "Title",
      definition: "Gives the chart a title.",
      example_usage: "Title: Brazil Forest Area",
      input_fields: [{ name: "text", kind: "TEXT", required: true }],
      tips: "A good title answers: what, where, when.",
    },
  ],
  fallacies: [
    {
      id: "cherry_picking",
      name: "cherry-picking",
      description: "Choosing only the data points that support your claim.",
      samples: ["s1", "s2", "s3"],
    },
  ],
};

export function cardSpec(id: string): CardSpec {
  const spec = CATALOG.cards.find((c) => c.id === id);
  if (!spec) throw new Error(`fixture has no card ${id}`);
  return spec;
}
