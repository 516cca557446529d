export { ApiClient, ApiError } from "./api.js";
export { ExplorerController, DEBOUNCE_MS, DEFAULT_STATE } from "./controller.js";
export { debounce } from "./debounce.js";
export { forceLayout, graphSeed, stableHash } from "./layout.js";
export { buildView, gradientColor, toSvg } from "./render.js";
export type { ControlState, DatasetSchema, MapperGraph } from "./types.js";
