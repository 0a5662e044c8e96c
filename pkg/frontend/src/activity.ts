// Activity-mode controller. Server-authoritative by contract: every verdict,
// point value, and score shown to the student is taken verbatim from an API
// response. Nothing in here can compute a grade.

import type { ApiClient } from "./api.js";
import type { AnswerResponse, HintResponse, Question, SessionState } from "./types.js";

export interface ActivityEvents {
  onVerdict(result: AnswerResponse): void;
  onHint(result: HintResponse): void;
  onScoreboard(state: SessionState): void;
  onError(message: string): void;
}

export class ActivityController {
  score = 0;
  questions: Question[] = [];
  current = 0;
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private api: ApiClient,
    private sessionId: string,
    private participant: string,
    private events: ActivityEvents,
  ) {}

  async loadQuestions(): Promise<Question[]> {
    this.questions = (await this.api.getQuestions()).questions;
    return this.questions;
  }

  currentQuestion(): Question | null {
    return this.questions[this.current] ?? null;
  }

  nextQuestion(): Question | null {
    if (this.current < this.questions.length - 1) this.current += 1;
    return this.currentQuestion();
  }

  private async submit(questionId: string, payload: unknown): Promise<AnswerResponse | null> {
    try {
      const result = await this.api.submitAnswer(
        this.sessionId,
        this.participant,
        questionId,
        payload,
      );
      this.score = result.score; // the server's number, never a local sum
      this.events.onVerdict(result);
      return result;
    } catch (err) {
      this.events.onError(err instanceof Error ? err.message : String(err));
      return null;
    }
  }

  submitPipeline(questionId: string, pipeline: unknown) {
    return this.submit(questionId, pipeline);
  }

  submitChoice(questionId: string, choice: number) {
    return this.submit(questionId, choice);
  }

  submitText(questionId: string, text: string) {
    return this.submit(questionId, text);
  }

  async requestHint(questionId: string): Promise<HintResponse | null> {
    try {
      const result = await this.api.requestHint(this.sessionId, this.participant, questionId);
      this.score = result.score; // server applied the -1; we only display it
      this.events.onHint(result);
      return result;
    } catch (err) {
      this.events.onError(err instanceof Error ? err.message : String(err));
      return null;
    }
  }

  async refreshScoreboard(): Promise<void> {
    try {
      const state = await this.api.getSession(this.sessionId);
      const me = state.participants.find((p) => p.id === this.participant);
      if (me) this.score = me.score;
      this.events.onScoreboard(state);
    } catch (err) {
      this.events.onError(err instanceof Error ? err.message : String(err));
    }
  }

  startPolling(intervalMs = 2000): void {
    this.stopPolling();
    this.timer = setInterval(() => void this.refreshScoreboard(), intervalMs);
  }

  stopPolling(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }
}
