/** Thin typed client for the /v1 planning service.
 *
 * Every number the UI displays comes out of these responses; the client
 * only unwraps the {status, result | error} envelope and never computes
 * statistics of its own.
 */

import type { PlanParamsMirror } from "./params.js";

export interface CompareSideBody {
  mode: "free";
  n_plus: number;
  n_phi: number;
}

export interface CompareRequest {
  a: CompareSideBody;
  b: CompareSideBody;
  gamma: number;
  system_ids: [string, string];
}

export interface CompareResultBody {
  system_ids: [string, string] | null;
  mode_1: number;
  mode_2: number;
  epsilon_hat: number;
  epsilon_hat_rounded: number;
  prob_greater: number;
  gamma: number;
  significant: boolean;
}

export interface PlanEpsilonBody {
  epsilon: number;
  disclaimer: string;
}

export interface PlanTableRequest {
  alpha: number;
  rho: number;
  eta: number;
  gamma: number;
  n_rho_eta: number | null;
  psi: number | null;
  rho_eta_mode: "provided" | "estimated";
  grid: PlanParamsMirror["grid"];
  phi_values: number[];
  m_values: number[];
}

export interface PlanTableBody {
  phi_values: number[];
  m_values: number[];
  epsilon: number[][];
  disclaimer: string;
}

export interface HealthBody {
  status: string;
  version: string;
}

export class ServiceError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(code: string, message: string, status: number) {
    super(message);
    this.name = "ServiceError";
    this.code = code;
    this.status = status;
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

interface Envelope {
  status?: unknown;
  result?: unknown;
  error?: { code?: unknown; message?: unknown };
}

export class ApiClient {
  readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    // Browser fetch must stay bound to its global; tests inject a stub.
    this.fetchImpl = fetchImpl ?? ((url, init) => fetch(url, init));
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.baseUrl + path, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(body),
      });
    } catch (err) {
      throw new ServiceError("network_error", `service unreachable: ${String(err)}`, 0);
    }
    let envelope: Envelope;
    try {
      envelope = (await response.json()) as Envelope;
    } catch {
      throw new ServiceError(
        "http_error",
        `service returned a non-JSON response (HTTP ${response.status})`,
        response.status,
      );
    }
    if (envelope.status === "ok") {
      return envelope.result as T;
    }
    const code = typeof envelope.error?.code === "string" ? envelope.error.code : "http_error";
    const message =
      typeof envelope.error?.message === "string"
        ? envelope.error.message
        : `service request failed (HTTP ${response.status})`;
    throw new ServiceError(code, message, response.status);
  }

  async health(): Promise<HealthBody> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.baseUrl + "/v1/health");
    } catch (err) {
      throw new ServiceError("network_error", `service unreachable: ${String(err)}`, 0);
    }
    return (await response.json()) as HealthBody;
  }

  /** Simulated measurable epsilon for one campaign configuration. */
  plan(params: PlanParamsMirror): Promise<PlanEpsilonBody> {
    return this.post<PlanEpsilonBody>("/v1/plan", params);
  }

  /** Epsilon over a small axis grid; used for the what-if curves. */
  planTable(request: PlanTableRequest): Promise<PlanTableBody> {
    return this.post<PlanTableBody>("/v1/plan/table", request);
  }

  compare(request: CompareRequest): Promise<CompareResultBody> {
    return this.post<CompareResultBody>("/v1/compare", request);
  }
}
