/** Deterministic force-directed layout.
 *
 * Positions are seeded from a stable hash of the graph structure, so the
 * same graph always lands in the same place and small parameter tweaks
 * produce visually comparable frames.
 */

import type { MapperEdge, MapperNode } from "./types.js";

export interface NodePosition {
  id: number;
  x: number;
  y: number;
}

/** FNV-1a over a string; stable across sessions and platforms. */
export function stableHash(text: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    h ^= text.charCodeAt(i);
    h = Math.imul(h, 0x01000193);
  }
  return h >>> 0;
}

export function graphSeed(nodes: MapperNode[], edges: MapperEdge[]): number {
  const key =
    nodes.map((n) => n.id).join(",") +
    "|" +
    edges.map((e) => `${e.source}-${e.target}`).join(",");
  return stableHash(key);
}

/** mulberry32 — small seeded PRNG, plenty for layout jitter. */
function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export interface LayoutOptions {
  width?: number;
  height?: number;
  iterations?: number;
}

/** Fruchterman–Reingold style spring layout with a fixed iteration budget. */
export function forceLayout(
  nodes: MapperNode[],
  edges: MapperEdge[],
  opts: LayoutOptions = {},
): NodePosition[] {
  const width = opts.width ?? 600;
  const height = opts.height ?? 400;
  const iterations = opts.iterations ?? 80;
  const n = nodes.length;
  if (n === 0) return [];

  const rand = mulberry32(graphSeed(nodes, edges));
  const xs = new Float64Array(n);
  const ys = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    xs[i] = rand() * width;
    ys[i] = rand() * height;
  }

  const index = new Map<number, number>();
  nodes.forEach((node, i) => index.set(node.id, i));
  const springs = edges
    .filter((e) => index.has(e.source) && index.has(e.target))
    .map((e) => [index.get(e.source)!, index.get(e.target)!] as const);

  const area = width * height;
  const k = Math.sqrt(area / n);
  let temperature = width / 10;
  const cool = temperature / (iterations + 1);

  const dx = new Float64Array(n);
  const dy = new Float64Array(n);
  for (let iter = 0; iter < iterations; iter++) {
    dx.fill(0);
    dy.fill(0);
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        let vx = xs[i] - xs[j];
        let vy = ys[i] - ys[j];
        let dist = Math.hypot(vx, vy);
        if (dist < 1e-9) {
          // coincident nodes: push apart along a deterministic direction
          vx = 1e-3 * (1 + i);
          vy = 1e-3 * (1 + j);
          dist = Math.hypot(vx, vy);
        }
        const force = (k * k) / dist;
        dx[i] += (vx / dist) * force;
        dy[i] += (vy / dist) * force;
        dx[j] -= (vx / dist) * force;
        dy[j] -= (vy / dist) * force;
      }
    }
    for (const [a, b] of springs) {
      const vx = xs[a] - xs[b];
      const vy = ys[a] - ys[b];
      const dist = Math.max(Math.hypot(vx, vy), 1e-9);
      const force = (dist * dist) / k;
      dx[a] -= (vx / dist) * force;
      dy[a] -= (vy / dist) * force;
      dx[b] += (vx / dist) * force;
      dy[b] += (vy / dist) * force;
    }
    for (let i = 0; i < n; i++) {
      const disp = Math.max(Math.hypot(dx[i], dy[i]), 1e-9);
      const step = Math.min(disp, temperature);
      xs[i] += (dx[i] / disp) * step;
      ys[i] += (dy[i] / disp) * step;
      xs[i] = Math.min(width, Math.max(0, xs[i]));
      ys[i] = Math.min(height, Math.max(0, ys[i]));
    }
    temperature -= cool;
  }

  return nodes.map((node, i) => ({ id: node.id, x: xs[i], y: ys[i] }));
}
