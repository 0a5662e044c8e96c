// Thin typed client over the /api/v1 endpoints. The fetch implementation is
// injectable so tests can run against a scripted fake.

import type {
  AnswerResponse,
  CatalogDoc,
  DatasetManifest,
  HintResponse,
  PipelineDoc,
  Question,
  SessionState,
  TraceDoc,
  ValidationReport,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public stepIndex?: number,
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private baseUrl = "",
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const resp = await this.fetchImpl(this.baseUrl + path, init);
    if (!resp.ok) {
      let code = "HTTP_" + resp.status;
      let message = resp.statusText;
      let stepIndex: number | undefined;
      try {
        const body = await resp.json();
        if (body && body.error) {
          code = body.error.code ?? code;
          message = body.error.message ?? message;
          stepIndex = body.error.step_index;
        }
      } catch {
        // non-JSON error body; keep the defaults
      }
      throw new ApiError(resp.status, code, message, stepIndex);
    }
    return resp;
  }

  private async getJson<T>(path: string): Promise<T> {
    return (await this.request(path)).json() as Promise<T>;
  }

  private async postJson<T>(path: string, body: unknown): Promise<T> {
    const resp = await this.request(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    return resp.json() as Promise<T>;
  }

  getCards(): Promise<CatalogDoc> {
    return this.getJson("/api/v1/cards");
  }

  getDatasets(): Promise<DatasetManifest[]> {
    return this.getJson("/api/v1/datasets");
  }

  getQuestions(): Promise<{ questions: Question[] }> {
    return this.getJson("/api/v1/questions");
  }

  validate(pipeline: PipelineDoc): Promise<ValidationReport> {
    return this.postJson("/api/v1/pipelines/validate", pipeline);
  }

  execute(pipeline: PipelineDoc): Promise<TraceDoc> {
    return this.postJson("/api/v1/pipelines/execute", pipeline);
  }

  async renderSvg(pipeline: PipelineDoc, width = 640, height = 400): Promise<string> {
    const resp = await this.request("/api/v1/render", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ pipeline, width, height }),
    });
    return resp.text();
  }

  createSession(roster: string[]): Promise<SessionState> {
    return this.postJson("/api/v1/sessions", { roster });
  }

  joinSession(sessionId: string, participant: string): Promise<SessionState> {
    return this.postJson(`/api/v1/sessions/${sessionId}/join`, { participant });
  }

  getSession(sessionId: string): Promise<SessionState> {
    return this.getJson(`/api/v1/sessions/${sessionId}`);
  }

  submitAnswer(
    sessionId: string,
    participant: string,
    questionId: string,
    payload: unknown,
  ): Promise<AnswerResponse> {
    return this.postJson(`/api/v1/sessions/${sessionId}/answer`, {
      participant,
      question_id: questionId,
      payload,
    });
  }

  requestHint(sessionId: string, participant: string, questionId: string): Promise<HintResponse> {
    return this.postJson(`/api/v1/sessions/${sessionId}/hint`, {
      participant,
      question_id: questionId,
    });
  }
}
