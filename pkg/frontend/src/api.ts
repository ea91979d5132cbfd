/** Typed client for the verification service's HTTP API. */

import {
  enrollResponseSchema,
  healthSchema,
  scheduleSchema,
  verifyResponseSchema,
  type EnrollResponse,
  type Health,
  type Recording,
  type StimulusSchedule,
  type VerifyResponse,
} from "./schema.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
    /** Validation report attached to rejected-recording errors. */
    public readonly report?: Record<string, unknown>,
  ) {
    super(message);
    this.name = "ApiError";
  }

  get isNotFound(): boolean {
    return this.status === 404;
  }
}

type FetchLike = typeof fetch;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    let resp: Response;
    try {
      resp = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    } catch (err) {
      throw new ApiError(0, `service unreachable: ${String(err)}`);
    }
    const body = (await resp.json().catch(() => ({}))) as Record<string, unknown>;
    if (!resp.ok) {
      throw new ApiError(
        resp.status,
        typeof body.error === "string" ? body.error : `HTTP ${resp.status}`,
        body.report as Record<string, unknown> | undefined,
      );
    }
    return body;
  }

  private post(path: string, payload: unknown): Promise<unknown> {
    return this.request(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  async health(): Promise<Health> {
    return healthSchema.parse(await this.request("/api/health"));
  }

  async getStimulus(seed: number): Promise<StimulusSchedule> {
    return scheduleSchema.parse(await this.request(`/api/stimulus?seed=${seed}`));
  }

  async enroll(name: string, recording: Recording): Promise<EnrollResponse> {
    return enrollResponseSchema.parse(
      await this.post("/api/enroll", { name, recording }),
    );
  }

  async verify(name: string, recording: Recording): Promise<VerifyResponse> {
    return verifyResponseSchema.parse(
      await this.post("/api/verify", { name, recording }),
    );
  }

  async users(): Promise<{ name: string; embedding_count: number }[]> {
    const body = (await this.request("/api/users")) as {
      users: { name: string; embedding_count: number }[];
    };
    return body.users;
  }
}
