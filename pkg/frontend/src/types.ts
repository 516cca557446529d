/** Wire types for the toposcope explorer HTTP API. */

export interface MapperNode {
  id: number;
  cover_id: number;
  members: number[];
  size: number;
  mean_filter: number;
}

export interface MapperEdge {
  source: number;
  target: number;
  weight: number;
}

export interface MapperGraph {
  nodes: MapperNode[];
  edges: MapperEdge[];
  cache: "hit" | "miss";
}

export interface DatasetInfo {
  id: string;
  n: number;
  d: number;
}

export interface SchemaParam {
  name: string;
  type: "int" | "float" | "choice";
  min?: number;
  max?: number;
  choices?: string[];
  default: number | string;
}

export interface DatasetSchema {
  dataset: DatasetInfo;
  params: SchemaParam[];
}

export interface DiagramPair {
  dim: number;
  birth: number;
  death: number | null;
}

export interface Diagram {
  pairs: DiagramPair[];
}

export type ColorBy = "size" | "mean_filter";

/** Everything the user can tune; mirrors the /schema parameter list. */
export interface ControlState {
  dataset: string;
  filter: string;
  intervals: number;
  overlap: number;
  clusterer: string;
  min_intersection: number;
  color_by: ColorBy;
}
