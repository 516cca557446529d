/** Explorer state machine: debounces control changes into requests,
 * tags each request with a sequence number, and only applies a response
 * if nothing newer has rendered — so slow responses can never clobber
 * fresh ones. */

import { ApiClient, ApiError } from "./api.js";
import { debounce } from "./debounce.js";
import { buildView, type GraphView } from "./render.js";
import type { ControlState, MapperGraph } from "./types.js";

export const DEBOUNCE_MS = 250;

export interface ExplorerEvents {
  onRender?: (view: GraphView, state: ControlState) => void;
  onCacheBadge?: (cache: "hit" | "miss") => void;
  /** 400: highlight the offending control so the user can fix it. */
  onParamError?: (param: string | undefined, message: string) => void;
  /** 404: the dataset is gone; reset the dataset picker. */
  onDatasetMissing?: (message: string) => void;
  onNetworkError?: (message: string) => void;
}

export const DEFAULT_STATE: ControlState = {
  dataset: "",
  filter: "proj:0",
  intervals: 10,
  overlap: 0.3,
  clusterer: "sl:0.5",
  min_intersection: 1,
  color_by: "size",
};

export class ExplorerController {
  private readonly api: ApiClient;
  private readonly events: ExplorerEvents;
  private state: ControlState;
  private nextSeq = 0;
  private renderedSeq = -1;
  private requestCount = 0;
  private lastGraph: MapperGraph | null = null;
  private readonly scheduleRequest: { (): void; cancel(): void };
  view: GraphView | null = null;

  constructor(api: ApiClient, events: ExplorerEvents = {}, initial: Partial<ControlState> = {}) {
    this.api = api;
    this.events = events;
    this.state = { ...DEFAULT_STATE, ...initial };
    this.scheduleRequest = debounce(() => void this.fire(), DEBOUNCE_MS);
  }

  get controls(): ControlState {
    return { ...this.state };
  }

  /** Total requests actually sent (after debouncing). */
  get requestsSent(): number {
    return this.requestCount;
  }

  /** A control moved; the request goes out once the hand settles. */
  setControl<K extends keyof ControlState>(name: K, value: ControlState[K]): void {
    this.state = { ...this.state, [name]: value };
    if (name === "color_by") {
      // recolor locally — no server round trip needed
      if (this.lastGraph) this.emitRender(this.lastGraph);
      return;
    }
    this.scheduleRequest();
  }

  /** Immediate fetch, bypassing the debounce (initial load, dataset pick). */
  refresh(): Promise<void> {
    this.scheduleRequest.cancel();
    return this.fire();
  }

  private async fire(): Promise<void> {
    const seq = this.nextSeq++;
    const state = { ...this.state };
    this.requestCount++;
    try {
      const graph = await this.api.getMapper(state);
      if (seq <= this.renderedSeq) return; // a newer response already rendered
      this.renderedSeq = seq;
      this.emitRender(graph);
      this.events.onCacheBadge?.(graph.cache);
    } catch (err) {
      if (seq <= this.renderedSeq) return;
      if (err instanceof ApiError && err.status === 404) {
        this.state = { ...this.state, dataset: "" };
        this.events.onDatasetMissing?.(err.message);
      } else if (err instanceof ApiError) {
        this.events.onParamError?.(err.param, err.message);
      } else {
        this.events.onNetworkError?.(err instanceof Error ? err.message : String(err));
      }
    }
  }

  private emitRender(graph: MapperGraph): void {
    this.lastGraph = graph;
    this.view = buildView(graph, this.state.color_by);
    this.events.onRender?.(this.view, { ...this.state });
  }
}
