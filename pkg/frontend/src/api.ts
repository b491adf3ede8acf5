// Thin client over the rating service. The fetch implementation is
// injectable so the controller can be exercised outside a browser.

import type { Outcome, PairPayload, StatsPayload } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** The server no longer accepts this judgment (stale or duplicate pair). */
export class ConflictError extends Error {
  constructor(detail: string) {
    super(detail);
    this.name = "ConflictError";
  }
}

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function errorDetail(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: string };
    return body.detail ?? response.statusText;
  } catch {
    return response.statusText;
  }
}

export class RatingApi {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  imageUrl(path: string): string {
    return this.baseUrl + path;
  }

  async fetchPair(operator: string): Promise<PairPayload> {
    const response = await this.fetchImpl(
      `${this.baseUrl}/api/pair?operator=${encodeURIComponent(operator)}`,
    );
    if (!response.ok) {
      throw new ApiError(await errorDetail(response), response.status);
    }
    return (await response.json()) as PairPayload;
  }

  async submitJudgment(comparisonId: string, outcome: Outcome): Promise<void> {
    const response = await this.fetchImpl(`${this.baseUrl}/api/judgment`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ comparison_id: comparisonId, outcome }),
    });
    if (response.status === 409) {
      throw new ConflictError(await errorDetail(response));
    }
    if (!response.ok) {
      throw new ApiError(await errorDetail(response), response.status);
    }
  }

  async fetchStats(): Promise<StatsPayload> {
    const response = await this.fetchImpl(`${this.baseUrl}/api/stats`);
    if (!response.ok) {
      throw new ApiError(await errorDetail(response), response.status);
    }
    return (await response.json()) as StatsPayload;
  }
}
