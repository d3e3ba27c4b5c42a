/** Typed client for the translation service.
 *
 * Every editor action goes through this module and nothing else; the
 * contract tests replay recorded server traffic against it. The HTTP
 * transport is injectable so tests can substitute a tape player for
 * the real network.
 */

export interface HttpRequest {
  method: string;
  url: string;
  bytes?: Uint8Array;
  json?: unknown;
}

export interface HttpResponse {
  status: number;
  contentType: string;
  json(): Promise<unknown>;
  bytes(): Promise<Uint8Array>;
}

export type HttpClient = (request: HttpRequest) => Promise<HttpResponse>;

/** Default transport on the browser's fetch. */
export const fetchClient: HttpClient = async (request) => {
  const headers: Record<string, string> = {};
  let body: BodyInit | undefined;
  if (request.bytes !== undefined) {
    headers["content-type"] = "application/octet-stream";
    body = request.bytes as unknown as BodyInit;
  } else if (request.json !== undefined) {
    headers["content-type"] = "application/json";
    body = JSON.stringify(request.json);
  }
  const response = await fetch(request.url, {
    method: request.method,
    headers,
    body,
  });
  return {
    status: response.status,
    contentType: response.headers.get("content-type") ?? "",
    json: () => response.json(),
    bytes: async () => new Uint8Array(await response.arrayBuffer()),
  };
};

export type SegmentState = "untouched" | "draft" | "confirmed";

export interface Suggestion {
  record_id: number;
  text: string;
  score: number;
}

export interface SegmentView {
  index: number;
  source_text: string;
  state: SegmentState;
  text: string;
  record_id: number | null;
  suggestions: Suggestion[];
}

export interface SessionHandle {
  uri: string;
  id: string;
  dossier: string;
  source: string;
  target: string;
  segments: number;
}

export interface SessionSnapshot {
  id: string;
  dossier: string;
  source: string;
  target: string;
  completed: boolean;
  segments: SegmentView[];
}

export interface AdjustResult {
  id: string;
  completed: boolean;
  segments: SegmentView[];
}

export interface PeerWork {
  session: string;
  completed: boolean;
  segments: { index: number; text: string }[];
}

export interface SegmentSave {
  state: "draft" | "confirmed";
  text: string;
  record_id?: number;
}

export type AdjustOp = { op: "split"; offset: number } | { op: "merge" };

/** A non-2xx answer, carrying the server's detail payload. */
export class ApiError extends Error {
  readonly status: number;
  readonly detail: unknown;

  constructor(status: number, detail: unknown) {
    super(ApiError.describe(detail) || `server answered ${status}`);
    this.name = "ApiError";
    this.status = status;
    this.detail = detail;
  }

  private static describe(detail: unknown): string {
    if (typeof detail === "string") return detail;
    if (detail && typeof detail === "object" && "message" in detail) {
      const message = (detail as { message: unknown }).message;
      if (typeof message === "string") return message;
    }
    return "";
  }

  /** Lint findings attached to a rejected dossier upload, if any. */
  get diagnostics(): string[] {
    if (this.detail && typeof this.detail === "object" && "diagnostics" in this.detail) {
      const listed = (this.detail as { diagnostics: unknown }).diagnostics;
      if (Array.isArray(listed)) {
        return listed.filter((item): item is string => typeof item === "string");
      }
    }
    return [];
  }
}

export class ApiClient {
  private readonly baseUrl: string;
  private readonly http: HttpClient;

  constructor(baseUrl: string, http: HttpClient = fetchClient) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.http = http;
  }

  private async request(
    method: string,
    path: string,
    options: { bytes?: Uint8Array; json?: unknown } = {},
  ): Promise<HttpResponse> {
    const response = await this.http({
      method,
      url: this.baseUrl + path,
      ...options,
    });
    if (response.status >= 400) {
      let detail: unknown = null;
      if (response.contentType.startsWith("application/json")) {
        const parsed = await response.json();
        detail =
          parsed && typeof parsed === "object" && "detail" in parsed
            ? (parsed as { detail: unknown }).detail
            : parsed;
      }
      throw new ApiError(response.status, detail);
    }
    return response;
  }

  private async requestJson<T>(
    method: string,
    path: string,
    options: { bytes?: Uint8Array; json?: unknown } = {},
  ): Promise<T> {
    const response = await this.request(method, path, options);
    return (await response.json()) as T;
  }

  openSession(med: Uint8Array, source: string, target: string): Promise<SessionHandle> {
    const query = `source=${encodeURIComponent(source)}&target=${encodeURIComponent(target)}`;
    return this.requestJson("POST", `/sessions?${query}`, { bytes: med });
  }

  segments(sessionId: string): Promise<SessionSnapshot> {
    return this.requestJson("GET", `/sessions/${encodeURIComponent(sessionId)}/segments`);
  }

  saveSegment(sessionId: string, index: number, save: SegmentSave): Promise<SegmentView> {
    return this.requestJson(
      "PUT",
      `/sessions/${encodeURIComponent(sessionId)}/segments/${index}`,
      { json: save },
    );
  }

  adjustSegment(sessionId: string, index: number, op: AdjustOp): Promise<AdjustResult> {
    return this.requestJson(
      "POST",
      `/sessions/${encodeURIComponent(sessionId)}/segments/${index}/adjust`,
      { json: op },
    );
  }

  peerWork(sessionId: string, lang: string): Promise<{ peers: PeerWork[] }> {
    return this.requestJson(
      "GET",
      `/sessions/${encodeURIComponent(sessionId)}/peer/${encodeURIComponent(lang)}`,
    );
  }

  async complete(sessionId: string): Promise<Uint8Array> {
    const response = await this.request(
      "POST",
      `/sessions/${encodeURIComponent(sessionId)}/complete`,
    );
    return response.bytes();
  }
}
