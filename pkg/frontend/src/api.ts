/** Typed REST client for the explorer backend. All calls after the initial
 * dataset upload are plain GETs so responses stay cacheable. */

import type { ControlState, DatasetInfo, DatasetSchema, Diagram, MapperGraph } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  readonly status: number;
  readonly param?: string;

  constructor(status: number, message: string, param?: string) {
    super(message);
    this.status = status;
    this.param = param;
  }
}

async function readJson<T>(resp: Response): Promise<T> {
  const body = await resp.json();
  if (!resp.ok) {
    const err = body?.error ?? {};
    throw new ApiError(resp.status, err.message ?? `request failed with ${resp.status}`, err.param);
  }
  return body as T;
}

export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(base = "", fetchFn: FetchLike = (...args) => fetch(...args)) {
    this.base = base.replace(/\/$/, "");
    this.fetchFn = fetchFn;
  }

  /** The one non-GET call: upload a CSV point cloud. */
  async uploadDataset(csv: string): Promise<DatasetInfo> {
    const resp = await this.fetchFn(`${this.base}/api/datasets`, {
      method: "POST",
      headers: { "Content-Type": "text/csv" },
      body: csv,
    });
    return readJson<DatasetInfo>(resp);
  }

  async getSchema(datasetId: string): Promise<DatasetSchema> {
    const resp = await this.fetchFn(`${this.base}/api/datasets/${encodeURIComponent(datasetId)}/schema`);
    return readJson<DatasetSchema>(resp);
  }

  mapperUrl(state: ControlState): string {
    const q = new URLSearchParams({
      dataset: state.dataset,
      filter: state.filter,
      intervals: String(state.intervals),
      overlap: String(state.overlap),
      clusterer: state.clusterer,
      min_intersection: String(state.min_intersection),
    });
    return `${this.base}/api/mapper?${q.toString()}`;
  }

  async getMapper(state: ControlState): Promise<MapperGraph> {
    const resp = await this.fetchFn(this.mapperUrl(state));
    return readJson<MapperGraph>(resp);
  }

  async getDiagram(datasetId: string, maxDim = 1, maxEdge: number | "auto" = "auto"): Promise<Diagram> {
    const q = new URLSearchParams({
      dataset: datasetId,
      max_dim: String(maxDim),
      max_edge: String(maxEdge),
    });
    const resp = await this.fetchFn(`${this.base}/api/diagram?${q.toString()}`);
    return readJson<Diagram>(resp);
  }
}
