/** Wire types of the synthesis service (UTF-8 JSON over HTTP). */

export type SynthesisStatus = "ready" | "needs_input" | "no_match";

export interface ApiScorePayload {
  api_id: string;
  score: number;
  matched_evidence: { entity: string; term: string; similarity: number }[];
}

export interface DeclarationMatchPayload {
  declaration_id: string;
  best_sample_expression: string;
  similarity: number;
}

export interface MatrixRowPayload {
  param: string;
  entity: string;
  confidence: number;
}

export interface CoveragePayload {
  declaration_id: string;
  required_total: number;
  required_bound: number;
  coverage: number;
  missing_required: string[];
  bound_optional: { param: string; value: string }[];
}

export interface ApiCallPayload {
  method: string;
  url: string;
  bindings: Record<string, string>;
  body: Record<string, string>;
}

export interface LearnedValuePayload {
  param: string;
  literal: string;
  confidence: number;
  accepted: boolean;
}

export interface InvocationPayload {
  kind: "dry_run" | "ok" | "timeout" | "network_failure";
  url: string;
  http_status: number | null;
  response_body: string | null;
  error: string | null;
}

export interface SynthesizeResponse {
  status: SynthesisStatus;
  reason: string | null;
  api: ApiScorePayload | null;
  declaration: DeclarationMatchPayload | null;
  matrix: MatrixRowPayload[];
  coverage: CoveragePayload | null;
  call: ApiCallPayload | null;
  learned: LearnedValuePayload[];
  questions: string[];
  invocation?: InvocationPayload;
}

export interface SynthesizeRequest {
  expression: string;
  bindings: Record<string, string>;
}

export interface ApiSummary {
  apis: {
    id: string;
    name: string;
    description: string;
    tags: string[];
    base_uri: string;
    declarations: {
      id: string;
      method: string;
      path_template: string;
      sample_expressions: number;
      parameters: { name: string; required: boolean; values: number }[];
    }[];
  }[];
}
