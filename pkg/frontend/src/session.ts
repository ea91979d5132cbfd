/** Capture-session state machine: fetch schedule, collect pointer
 * samples during the task, convert + validate + submit, and expose a
 * renderable view of the outcome.
 *
 * Time is injected (seconds since capture start) so the machine is fully
 * testable without a DOM or real clocks.  One session = one submission;
 * aborting discards the trace without any network call.
 */

import { ApiClient, ApiError } from "./api.js";
import { averageRateHz, toRecording, type PointerSample } from "./capture.js";
import type { UiConfig } from "./config.js";
import type { Recording, StimulusSchedule } from "./schema.js";

export type SessionMode = "enroll" | "verify";

export type SessionState =
  | "idle"
  | "ready"
  | "capturing"
  | "submitting"
  | "done"
  | "aborted"
  | "error";

export interface VerdictView {
  kind: "verdict";
  similarity: number;
  threshold: number;
  decision: "accept" | "reject";
}

export interface EnrolledView {
  kind: "enrolled";
  name: string;
  embeddingCount: number;
}

export interface ErrorView {
  kind: "error";
  message: string;
  /** "user not found" gets its own state so the UI can suggest enrolling. */
  notFound: boolean;
  report?: Record<string, unknown>;
}

export type SessionResult = VerdictView | EnrolledView | ErrorView;

const MIN_AVG_RATE_HZ = 60;

export class CaptureSession {
  state: SessionState = "idle";
  schedule: StimulusSchedule | null = null;
  result: SessionResult | null = null;
  /** The exact payload last submitted (exposed for inspection/tests). */
  submitted: Recording | null = null;
  private samples: PointerSample[] = [];

  constructor(
    public readonly name: string,
    public readonly mode: SessionMode,
    private readonly api: ApiClient,
    private readonly config: UiConfig,
  ) {}

  async fetchSchedule(seed: number): Promise<StimulusSchedule> {
    if (this.state !== "idle") throw new Error(`cannot fetch in state ${this.state}`);
    try {
      this.schedule = await this.api.getStimulus(seed);
    } catch (err) {
      this.state = "error";
      this.result = toErrorView(err);
      throw err;
    }
    this.state = "ready";
    return this.schedule;
  }

  /** Begin collecting pointer samples (t = 0 is first-target onset). */
  beginCapture(): void {
    if (this.state !== "ready") throw new Error(`cannot capture in state ${this.state}`);
    this.samples = [];
    this.state = "capturing";
  }

  /** Record one pointer position at task-time t seconds. */
  recordPointer(t: number, xPx: number, yPx: number): void {
    if (this.state !== "capturing") return;
    const last = this.samples[this.samples.length - 1];
    if (last && t <= last.t) return; // keep the trace strictly monotone
    this.samples.push({ t, xPx, yPx });
  }

  /** Discard the capture; nothing is submitted. */
  abort(): void {
    if (this.state === "capturing" || this.state === "ready") {
      this.samples = [];
      this.state = "aborted";
    }
  }

  get sampleCount(): number {
    return this.samples.length;
  }

  /** Finish the capture, submit, and resolve to a renderable result. */
  async complete(): Promise<SessionResult> {
    if (this.state !== "capturing") {
      throw new Error(`cannot complete in state ${this.state}`);
    }
    if (!this.schedule) throw new Error("no schedule");
    this.state = "submitting";
    try {
      if (averageRateHz(this.samples) < MIN_AVG_RATE_HZ) {
        throw new Error(
          `pointer sampling too sparse (< ${MIN_AVG_RATE_HZ} samples/s)`,
        );
      }
      const recording = toRecording(this.samples, this.schedule.total_s, this.config);
      this.submitted = recording;
      if (this.mode === "enroll") {
        const resp = await this.api.enroll(this.name, recording);
        this.result = {
          kind: "enrolled",
          name: resp.name,
          embeddingCount: resp.embedding_count,
        };
      } else {
        const resp = await this.api.verify(this.name, recording);
        this.result = {
          kind: "verdict",
          similarity: resp.similarity,
          threshold: resp.threshold,
          decision: resp.decision,
        };
      }
      this.state = "done";
    } catch (err) {
      this.state = "error";
      this.result = toErrorView(err);
    }
    return this.result;
  }
}

function toErrorView(err: unknown): ErrorView {
  if (err instanceof ApiError) {
    return {
      kind: "error",
      message: err.isNotFound ? `user not found: try enrolling first` : err.message,
      notFound: err.isNotFound,
      report: err.report,
    };
  }
  return { kind: "error", message: String(err), notFound: false };
}

/** One-line human-readable rendering of a session result. */
export function renderResult(result: SessionResult): string {
  switch (result.kind) {
    case "verdict":
      return (
        `similarity ${result.similarity.toFixed(4)} vs threshold ` +
        `${result.threshold.toFixed(2)} - ${result.decision.toUpperCase()}`
      );
    case "enrolled":
      return `enrolled "${result.name}" (${result.embeddingCount} template${
        result.embeddingCount === 1 ? "" : "s"
      })`;
    case "error":
      return `error: ${result.message}`;
  }
}
