import type { ExportFormat, GraphDoc, Lang, SearchResponse } from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

export interface ExportDownload {
  bytes: Uint8Array;
  filename: string;
}

/**
 * Thin client over the read-only search API. The fetch implementation is
 * injectable so tests can run without a server.
 */
export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  async graph(): Promise<GraphDoc> {
    return this.getJson<GraphDoc>("/api/graph");
  }

  async query(q: string, lang: Lang, limit?: number): Promise<SearchResponse> {
    const params = new URLSearchParams({ q, lang });
    if (limit !== undefined) {
      params.set("limit", String(limit));
    }
    return this.getJson<SearchResponse>(`/api/query?${params}`);
  }

  async node(id: string, lang: Lang, limit?: number): Promise<SearchResponse> {
    const params = new URLSearchParams({ lang });
    if (limit !== undefined) {
      params.set("limit", String(limit));
    }
    return this.getJson<SearchResponse>(
      `/api/node/${encodeURIComponent(id)}?${params}`,
    );
  }

  async exportRecords(ids: string[], format: ExportFormat): Promise<ExportDownload> {
    const params = new URLSearchParams({ ids: ids.join(","), format });
    const response = await this.fetchFn(`${this.baseUrl}/api/export?${params}`);
    if (!response.ok) {
      throw new ApiError(response.status, await safeErrorMessage(response));
    }
    const buffer = await response.arrayBuffer();
    return {
      bytes: new Uint8Array(buffer),
      filename: format === "bibtex" ? "export.bib" : "export.ris",
    };
  }

  async stats(): Promise<Record<string, number>> {
    return this.getJson<Record<string, number>>("/api/stats");
  }

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path);
    if (!response.ok) {
      throw new ApiError(response.status, await safeErrorMessage(response));
    }
    return (await response.json()) as T;
  }
}

async function safeErrorMessage(response: Response): Promise<string> {
  try {
    const payload = (await response.json()) as { error?: string };
    if (payload && typeof payload.error === "string") {
      return payload.error;
    }
  } catch {
    // not JSON: fall through to the status line
  }
  return `HTTP ${response.status}`;
}
