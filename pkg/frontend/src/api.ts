// Typed client for the catalog API. All reads go through here — the UI
// never filters results itself, the server response is the single source
// of truth.

import type {
  ApiErrorBody,
  ExampleDetail,
  PackageConfig,
  SearchResult,
  TagInfo,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) {
      let body: ApiErrorBody | null = null;
      try {
        body = (await response.json()) as ApiErrorBody;
      } catch {
        // non-JSON error body; fall through to a generic error
      }
      throw new ApiError(
        response.status,
        body?.code ?? "internal",
        body?.message ?? `request failed with status ${response.status}`,
      );
    }
    return response;
  }

  async health(): Promise<{ status: string; examples: number }> {
    const response = await this.request("/api/health");
    return response.json();
  }

  async searchExamples(params: URLSearchParams, signal?: AbortSignal): Promise<SearchResult> {
    const response = await this.request(`/api/examples?${params.toString()}`, { signal });
    return response.json();
  }

  async getExample(slug: string): Promise<ExampleDetail> {
    const response = await this.request(`/api/examples/${encodeURIComponent(slug)}`);
    return response.json();
  }

  async getTags(): Promise<TagInfo[]> {
    const response = await this.request("/api/tags");
    return response.json();
  }

  async suggest(prefix: string, limit = 8, signal?: AbortSignal): Promise<string[]> {
    if (!prefix) return [];
    const params = new URLSearchParams({ prefix, limit: String(limit) });
    const response = await this.request(`/api/suggest?${params.toString()}`, { signal });
    return response.json();
  }

  async downloadPackage(slug: string, config: PackageConfig): Promise<ArrayBuffer> {
    const response = await this.request("/api/package", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ slug, config }),
    });
    return response.arrayBuffer();
  }

  async getGuide(name: string): Promise<string> {
    const response = await this.request(`/guides/${encodeURIComponent(name)}.md`);
    return response.text();
  }

  imageUrl(slug: string, name: string): string {
    return `${this.baseUrl}/api/examples/${encodeURIComponent(slug)}/images/${name}`;
  }
}
