// Wire types mirroring the JSON the API serves (docs/api/*.schema.json).

export interface CardCategory {
  id: string;
  display_name: string;
  color: string;
  io_signature: string;
}

export interface InputFieldSpec {
  name: string;
  kind:
    | "COLUMN_NAME"
    | "COMPARATOR"
    | "LITERAL"
    | "COLUMN_LIST"
    | "VARIABLE_NAME"
    | "URL"
    | "FILE"
    | "TEXT";
  required: boolean;
}

export interface CardSpec {
  id: string;
  category: string;
  title: string;
  definition: string;
  example_usage: string;
  input_fields: InputFieldSpec[];
  tips?: string;
}

export interface FallacyCard {
  id: string;
  name: string;
  description: string;
  samples: string[];
}

export interface CatalogDoc {
  categories: CardCategory[];
  cards: CardSpec[];
  fallacies: FallacyCard[];
}

export interface PipelineCard {
  card: string;
  inputs: Record<string, unknown>;
}

export interface PipelineDoc {
  cards: PipelineCard[];
}

export interface ValidationIssue {
  step_index: number;
  code: string;
  message: string;
}

export interface ValidationReport {
  ok: boolean;
  errors: ValidationIssue[];
}

export interface TableDoc {
  columns: { name: string; dtype: string; cells: (string | number | null)[] }[];
  row_count: number;
  total_rows?: number;
}

export interface ChartSpecDoc {
  spec_version: number;
  kind: "TABLE_VIEW" | "LINE" | "BAR" | "PIE" | "MAP";
  data: Record<string, unknown>;
  title: string | null;
  x_label: string | null;
  y_label: string | null;
  legend: string[] | null;
}

export interface StepDoc {
  step_index: number;
  card: string;
  kind: "table" | "scalar" | "chart";
  summary: string;
  table?: TableDoc;
  scalar?: { dtype: string; value: string | number | null };
  chart?: ChartSpecDoc;
}

export interface TraceDoc {
  steps: StepDoc[];
  variables_after: string[];
  error: { step_index: number; code: string; message: string } | null;
}

export interface DatasetManifest {
  id: string;
  title: string;
  description: string;
  schema: { column: string; dtype: string }[];
  source_note: string;
  sdg_tags?: number[];
}

export interface Question {
  id: string;
  day: number;
  number: number;
  kind: "OE" | "MC" | "CNV" | "M";
  prompt: string;
  options?: string[];
  expected_chart_kind?: string;
}

export interface GradeResult {
  verdict: "CORRECT" | "INCORRECT" | "NEEDS_REVIEW";
  points_awarded: number;
  explanation: string;
}

export interface AnswerResponse {
  grade: GradeResult;
  score: number;
}

export interface HintResponse {
  hint: { element?: string; tip: string } | null;
  score_delta: number;
  score: number;
}

export interface SessionParticipant {
  id: string;
  score: number;
  answered: string[];
  hints_taken: Record<string, string[]>;
}

export interface SessionState {
  session_id: string;
  participants: SessionParticipant[];
  submissions: number;
  scoreboard: Record<string, number>;
}
