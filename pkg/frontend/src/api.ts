/**
 * Typed client for the inference service. In-flight requests are
 * deduplicated by body hash so repeated identical queries share one
 * round trip.
 */

import type { EvidenceBody, ModelInfo, PredictResponse, ScenarioInfo } from "./types.js";

export class ServiceError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private inflight = new Map<string, Promise<PredictResponse>>();

  constructor(
    private readonly base: string = "",
    private readonly fetchImpl: FetchLike = (...args) => fetch(...args)
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.base + path, init);
    if (!response.ok) {
      let detail = `${response.status}`;
      try {
        const body = await response.json();
        if (body && typeof body.detail === "string") detail = body.detail;
      } catch {
        /* non-JSON error body */
      }
      throw new ServiceError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  health(): Promise<{ status: string }> {
    return this.request("/v1/health");
  }

  model(): Promise<ModelInfo> {
    return this.request("/v1/model");
  }

  scenarios(): Promise<{ scenarios: ScenarioInfo[] }> {
    return this.request("/v1/scenarios");
  }

  predict(evidence: EvidenceBody, targets?: string[]): Promise<PredictResponse> {
    const payload = JSON.stringify({ evidence, targets: targets ?? null });
    const pending = this.inflight.get(payload);
    if (pending) return pending;
    const promise = this.request<PredictResponse>("/v1/predict", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: payload,
    }).finally(() => this.inflight.delete(payload));
    this.inflight.set(payload, promise);
    return promise;
  }
}
