import type { MapperGraph } from "../src/types.js";

/** Circle dataset covered by 4 overlapping intervals: 6 clusters joined in
 * a single cycle — the canonical Mapper picture of a loop. */
export function cycleGraph(cache: "hit" | "miss" = "miss"): MapperGraph {
  const nodes = [0, 1, 2, 3, 4, 5].map((id) => ({
    id,
    cover_id: id >> 1,
    members: [id * 3, id * 3 + 1, id * 3 + 2],
    size: 3 + (id % 3),
    mean_filter: Math.cos((2 * Math.PI * id) / 6),
  }));
  const edges = [0, 1, 2, 3, 4, 5].map((i) => ({
    source: i,
    target: (i + 1) % 6,
    weight: 1 + (i % 2),
  }));
  return { nodes, edges, cache };
}

export function singletonGraph(cache: "hit" | "miss" = "miss"): MapperGraph {
  return {
    nodes: [{ id: 0, cover_id: 0, members: [0, 1], size: 2, mean_filter: 0.5 }],
    edges: [],
    cache,
  };
}

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}
