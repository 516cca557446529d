/** Turns a Mapper graph into a renderable view: node positions, radii,
 * colors over a fixed gradient, edge widths — plus the SVG markup. */

import { forceLayout, type LayoutOptions } from "./layout.js";
import type { ColorBy, MapperEdge, MapperGraph, MapperNode } from "./types.js";

export interface ViewNode {
  id: number;
  x: number;
  y: number;
  radius: number;
  color: string;
  size: number;
  meanFilter: number;
}

export interface ViewEdge {
  source: number;
  target: number;
  width: number;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

export interface GraphView {
  nodes: ViewNode[];
  edges: ViewEdge[];
  cache: "hit" | "miss";
  empty: boolean;
}

const MIN_RADIUS = 4;
const MAX_RADIUS = 18;
const MIN_EDGE_WIDTH = 1;
const MAX_EDGE_WIDTH = 6;

/** Fixed cold-to-warm gradient; t in [0, 1]. */
export function gradientColor(t: number): string {
  const clamped = Math.min(1, Math.max(0, t));
  const r = Math.round(40 + 215 * clamped);
  const g = Math.round(80 + 60 * (1 - Math.abs(clamped - 0.5) * 2));
  const b = Math.round(255 - 215 * clamped);
  return `rgb(${r},${g},${b})`;
}

function normalizer(values: number[]): (v: number) => number {
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  // constant statistic: everyone sits at the middle of the gradient
  if (hi - lo < 1e-12) return () => 0.5;
  return (v) => (v - lo) / (hi - lo);
}

function scale(values: number[], outLo: number, outHi: number): (v: number) => number {
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  if (hi - lo < 1e-12) return () => (outLo + outHi) / 2;
  return (v) => outLo + ((v - lo) / (hi - lo)) * (outHi - outLo);
}

export function buildView(
  graph: Pick<MapperGraph, "nodes" | "edges"> & { cache?: "hit" | "miss" },
  colorBy: ColorBy = "size",
  layoutOpts: LayoutOptions = {},
): GraphView {
  const nodes: MapperNode[] = graph.nodes;
  const edges: MapperEdge[] = graph.edges;
  const positions = new Map(forceLayout(nodes, edges, layoutOpts).map((p) => [p.id, p]));

  const stat = (n: MapperNode) => (colorBy === "size" ? n.size : n.mean_filter);
  const colorOf = nodes.length ? normalizer(nodes.map(stat)) : () => 0.5;
  const radiusOf = nodes.length
    ? scale(nodes.map((n) => n.size), MIN_RADIUS, MAX_RADIUS)
    : () => MIN_RADIUS;
  const widthOf = edges.length
    ? scale(edges.map((e) => e.weight), MIN_EDGE_WIDTH, MAX_EDGE_WIDTH)
    : () => MIN_EDGE_WIDTH;

  const viewNodes: ViewNode[] = nodes.map((n) => {
    const pos = positions.get(n.id)!;
    return {
      id: n.id,
      x: pos.x,
      y: pos.y,
      radius: radiusOf(n.size),
      color: gradientColor(colorOf(stat(n))),
      size: n.size,
      meanFilter: n.mean_filter,
    };
  });
  const byId = new Map(viewNodes.map((n) => [n.id, n]));
  const viewEdges: ViewEdge[] = edges.map((e) => {
    const a = byId.get(e.source)!;
    const b = byId.get(e.target)!;
    return {
      source: e.source,
      target: e.target,
      width: widthOf(e.weight),
      x1: a.x,
      y1: a.y,
      x2: b.x,
      y2: b.y,
    };
  });

  return {
    nodes: viewNodes,
    edges: viewEdges,
    cache: graph.cache ?? "miss",
    empty: viewNodes.length === 0,
  };
}

export function toSvg(view: GraphView, width = 600, height = 400): string {
  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
  ];
  if (view.empty) {
    parts.push(
      `<text class="placeholder" x="${width / 2}" y="${height / 2}" text-anchor="middle">no nodes</text>`,
    );
  } else {
    for (const e of view.edges) {
      parts.push(
        `<line class="edge" x1="${e.x1.toFixed(2)}" y1="${e.y1.toFixed(2)}" ` +
          `x2="${e.x2.toFixed(2)}" y2="${e.y2.toFixed(2)}" ` +
          `stroke="#888" stroke-width="${e.width.toFixed(2)}"/>`,
      );
    }
    for (const n of view.nodes) {
      parts.push(
        `<circle class="node" data-id="${n.id}" cx="${n.x.toFixed(2)}" cy="${n.y.toFixed(2)}" ` +
          `r="${n.radius.toFixed(2)}" fill="${n.color}"/>`,
      );
    }
  }
  parts.push("</svg>");
  return parts.join("");
}
