import { ApiSummary, SynthesizeRequest, SynthesizeResponse } from "./types.js";

/** Minimal interface the conversation controller needs; the tests stub it. */
export interface SynthesisService {
  synthesize(request: SynthesizeRequest): Promise<SynthesizeResponse>;
  apiSummary(): Promise<ApiSummary>;
}

export class ServiceError extends Error {
  constructor(message: string, readonly status?: number) {
    super(message);
    this.name = "ServiceError";
  }
}

/** fetch-based client for the synthesis service. */
export class ServiceClient implements SynthesisService {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.url(path), init);
    } catch (cause) {
      throw new ServiceError(`cannot reach the service: ${String(cause)}`);
    }
    let payload: unknown = null;
    try {
      payload = await response.json();
    } catch {
      // non-JSON error bodies fall through to the status check below
    }
    if (!response.ok) {
      const detail =
        payload && typeof payload === "object" && "error" in payload
          ? String((payload as { error: unknown }).error)
          : `service responded with ${response.status}`;
      throw new ServiceError(detail, response.status);
    }
    return payload as T;
  }

  synthesize(request: SynthesizeRequest): Promise<SynthesizeResponse> {
    return this.request<SynthesizeResponse>("/synthesize", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(request),
    });
  }

  apiSummary(): Promise<ApiSummary> {
    return this.request<ApiSummary>("/apis");
  }
}
