/**
 * Typed client for the clipsearch HTTP service.
 * All UI network traffic goes through this module.
 */

export interface QueryRowRequest {
  text?: string;
  image_payload?: number[] | string;
  use_frame_emb?: boolean;
  use_text_emb?: boolean;
  use_text_raw?: boolean;
}

export interface SearchRequest {
  queries: QueryRowRequest[];
  T_ms?: number;
  K?: number;
}

export interface RetrievedFrame {
  video_id: string;
  timestamp_ms: number;
  query_id: number;
  score: number;
  source: string;
}

export interface Suggestion {
  video_id: string;
  start_ms: number;
  end_ms: number;
  frames: RetrievedFrame[];
}

export interface SearchResponse {
  suggestions: Suggestion[];
  warnings: string[];
}

export interface VideoMeta {
  fps: number;
  [key: string]: unknown;
}

export interface MetaResponse {
  generation: string;
  videos: Record<string, VideoMeta>;
  defaults: { T_ms: number; K: number };
}

export interface Answer {
  video_id: string;
  frame_indices: number[];
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

type FetchLike = typeof fetch;

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike = fetch,
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const resp = await this.fetchFn(this.baseUrl + path, init);
    if (!resp.ok) {
      throw new ApiError(resp.status, await resp.text());
    }
    return resp;
  }

  async search(req: SearchRequest): Promise<SearchResponse> {
    const resp = await this.request('/search', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(req),
    });
    return resp.json();
  }

  async meta(): Promise<MetaResponse> {
    const resp = await this.request('/meta');
    return resp.json();
  }

  /** Returns the CSV body for the given answers. */
  async exportCsv(answers: Answer[]): Promise<string> {
    const resp = await this.request('/export', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ answers }),
    });
    return resp.text();
  }
}

/** Parses an exported CSV body back into answers (for round-trip checks). */
export function parseCsv(body: string): Answer[] {
  return body
    .split('\r\n')
    .filter((line) => line.length > 0)
    .map((line) => {
      const cells = line.split(',');
      return {
        video_id: cells[0],
        frame_indices: cells.slice(1).map((c) => parseInt(c, 10)),
      };
    });
}
