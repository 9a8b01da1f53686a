/** Typed client for the tagging service; all state changes go through it. */

export interface SessionSummary {
  session_id: string;
  revision: number;
  doc_count: number;
  methods: string[];
  tag_names: string[];
  weighting: string;
}

export interface ProjectionPoint {
  doc_id: string;
  v1: number;
  v2: number;
  tag: string | null;
}

export type ClusterLabel = number | "TRIMMED";

export interface ClusterPayload {
  method: string;
  k: number;
  seed: number;
  objective: number;
  assignment: ClusterLabel[];
}

export interface DocumentDetail {
  doc_id: string;
  description: string;
  tokens: string[];
  tag: string | null;
}

export interface ValidationReport {
  accuracy?: number;
  misclassified?: number;
  alignment?: Record<string, string>;
  silhouette_index?: number;
  per_point_silhouette?: number[];
}

export interface TagEdit {
  doc_id: string;
  tag: string | null;
}

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;
  readonly currentRevision?: number;

  constructor(status: number, code: string, message: string,
              currentRevision?: number) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.code = code;
    this.currentRevision = currentRevision;
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class Api {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(base = "", fetchFn: FetchLike = (url, init) =>
      globalThis.fetch(url, init)) {
    this.base = base.replace(/\/$/, "");
    this.fetchFn = fetchFn;
  }

  private async request<T>(method: string, path: string,
                           body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.base + path, init);
    const payload = await response.json().catch(() => ({}));
    if (!response.ok) {
      const code = typeof payload.code === "string" ? payload.code : "error";
      const message =
        typeof payload.message === "string" ? payload.message : "request failed";
      throw new ApiError(response.status, code, message,
                         payload.current_revision);
    }
    return payload as T;
  }

  listSessions(): Promise<SessionSummary[]> {
    return this.request("GET", "/sessions");
  }

  createSession(artifactPath: string): Promise<SessionSummary> {
    return this.request("POST", "/sessions", { artifact_path: artifactPath });
  }

  getSession(sessionId: string): Promise<SessionSummary> {
    return this.request("GET", `/sessions/${sessionId}`);
  }

  getProjection(sessionId: string): Promise<ProjectionPoint[]> {
    return this.request("GET", `/sessions/${sessionId}/projection`);
  }

  getClusters(sessionId: string, method: string): Promise<ClusterPayload> {
    return this.request("GET", `/sessions/${sessionId}/clusters/${method}`);
  }

  getDocument(sessionId: string, docId: string): Promise<DocumentDetail> {
    return this.request("GET", `/sessions/${sessionId}/documents/${docId}`);
  }

  commitTags(sessionId: string, expectedRevision: number,
             edits: TagEdit[]): Promise<{ revision: number }> {
    return this.request("POST", `/sessions/${sessionId}/tags`, {
      expected_revision: expectedRevision,
      edits,
    });
  }

  validate(sessionId: string, method: string): Promise<ValidationReport> {
    return this.request("POST", `/sessions/${sessionId}/validate`, { method });
  }
}
