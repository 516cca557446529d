"""Config-driven composition of preprocess -> homology -> diagram stages
over batches of samples, with per-sample failure isolation."""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import diagram as dg
from . import homology, preprocess
from .core import (
    DistanceMatrix,
    GrayImage,
    InvalidInput,
    PointCloud,
    WeightedGraph,
    diagram_to_dict,
    image_from_csv,
    pairwise_distances,
    parse_numeric_csv,
    point_cloud_from_csv,
    time_series_from_csv,
)

INPUT_KINDS = ("point_cloud", "time_series", "image", "graph")
OUTPUT_FORMATS = ("json", "csv", "svg")


class SchemaError(ValueError):
    """Config validation failure; carries all collected errors."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(f"{path}: {msg}" for path, msg in self.errors))


@dataclass(frozen=True)
class StageDef:
    in_kinds: tuple
    out_kind: str
    required: tuple
    fn: object  # (sample, params) -> output


def _takens(sample, p):
    return preprocess.takens_embedding(
        sample, p["dimension"], p["delay"], p.get("stride", 1)
    )


def _vr(sample, p):
    return homology.vr_persistence(
        sample,
        metric=p.get("metric", "euclidean"),
        max_dim=p.get("max_dim", 1),
        max_edge=p.get("max_edge"),
    )


REGISTRY: dict[str, StageDef] = {
    "takens_embedding": StageDef(("time_series",), "point_cloud", ("dimension", "delay"), _takens),
    "pearson_dissimilarity": StageDef(
        ("time_series",), "distance_matrix", (), lambda s, p: preprocess.pearson_dissimilarity(s)
    ),
    "transition_graph": StageDef(
        ("time_series",), "graph", ("n_states",), lambda s, p: preprocess.transition_graph(s, p["n_states"])
    ),
    "graph_geodesic": StageDef(
        ("graph",), "distance_matrix", (), lambda s, p: preprocess.graph_geodesic(s)
    ),
    "binarize_image": StageDef(
        ("image",), "image", ("threshold",), lambda s, p: preprocess.binarize_image(s, p["threshold"])
    ),
    "height_filtration": StageDef(
        ("image",), "image", ("direction",), lambda s, p: preprocess.height_filtration(s, p["direction"])
    ),
    "image_to_point_cloud": StageDef(
        ("image",), "point_cloud", (), lambda s, p: preprocess.image_to_point_cloud(s)
    ),
    "pairwise_distances": StageDef(
        ("point_cloud",), "distance_matrix", (),
        lambda s, p: pairwise_distances(s, p.get("metric", "euclidean")),
    ),
    "vr_persistence": StageDef(("point_cloud", "distance_matrix"), "diagram", (), _vr),
    "cubical_persistence": StageDef(
        ("image",), "diagram", (), lambda s, p: homology.cubical_persistence(s, p.get("max_dim", 1))
    ),
    "betti_curve": StageDef(
        ("diagram",), "curve", (), lambda s, p: dg.betti_curve(s, p.get("k", 1))
    ),
    "persistence_landscape": StageDef(
        ("diagram",), "curve", (),
        lambda s, p: dg.persistence_landscape(s, p.get("k", 1), p.get("n_layers", 1)),
    ),
    "silhouette": StageDef(
        ("diagram",), "curve", (), lambda s, p: dg.silhouette(s, p.get("k", 1), p.get("power", 1.0))
    ),
    "heat_surface": StageDef(
        ("diagram",), "diagram_image", (),
        lambda s, p: dg.heat_surface(s, p.get("k", 1), p.get("sigma", 0.1)),
    ),
    "persistence_image": StageDef(
        ("diagram",), "diagram_image", (),
        lambda s, p: dg.persistence_image(s, p.get("k", 1), p.get("sigma", 0.1)),
    ),
    "curve_features": StageDef(
        ("curve",), "features", (), lambda s, p: dg.curve_features(s)
    ),
    "persistence_entropy": StageDef(
        ("diagram",), "features", (),
        lambda s, p: {"entropy": dg.persistence_entropy(s, p.get("k", 1))},
    ),
    "count_points": StageDef(
        ("diagram",), "features", (),
        lambda s, p: {"count": dg.count_points(s, p.get("k", 1))},
    ),
    "amplitude": StageDef(
        ("diagram",), "features", (),
        lambda s, p: {
            "amplitude": dg.amplitude(
                s, p.get("k", 1), p.get("metric", "bottleneck"),
                **{k: v for k, v in p.items() if k in ("q", "p", "sigma", "n_layers")},
            )
        },
    ),
}


@dataclass(frozen=True)
class PipelineConfig:
    input_path: str
    input_kind: str
    stages: tuple  # ((op, params dict), ...)
    output_path: str
    output_formats: tuple


def parse_config(text: str) -> PipelineConfig:
    """Validate a JSON pipeline config, collecting every schema error."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError([("$", f"invalid JSON: {exc}")]) from None
    errors = []
    inp = obj.get("input")
    kind = None
    path = ""
    if not isinstance(inp, dict):
        errors.append(("input", "missing or not an object"))
    else:
        path = inp.get("path", "")
        kind = inp.get("kind")
        if kind not in INPUT_KINDS:
            errors.append(("input.kind", f"expected one of {INPUT_KINDS}, got {kind!r}"))
            kind = None
    stages = obj.get("stages")
    parsed_stages = []
    if not isinstance(stages, list) or not stages:
        errors.append(("stages", "must be a nonempty list"))
    else:
        current = kind
        for i, st in enumerate(stages):
            loc = f"stages[{i}]"
            if not isinstance(st, dict) or "op" not in st:
                errors.append((loc, "stage must be an object with an 'op' field"))
                current = None
                continue
            op = st["op"]
            params = st.get("params", {})
            spec = REGISTRY.get(op)
            if spec is None:
                errors.append((loc, f"unknown op {op!r}"))
                current = None
                continue
            if current is not None and current not in spec.in_kinds:
                errors.append(
                    (loc, f"op {op!r} expects {' or '.join(spec.in_kinds)} input, got {current}")
                )
            for req in spec.required:
                if req not in params:
                    errors.append((f"{loc}.params", f"missing required param {req!r}"))
            parsed_stages.append((op, dict(params)))
            current = spec.out_kind
    out = obj.get("output", {})
    formats = tuple(out.get("formats", ["json"])) if isinstance(out, dict) else ("json",)
    for f in formats:
        if f not in OUTPUT_FORMATS:
            errors.append(("output.formats", f"unknown format {f!r}"))
    if errors:
        raise SchemaError(errors)
    return PipelineConfig(
        input_path=path,
        input_kind=kind,
        stages=tuple(parsed_stages),
        output_path=out.get("path", "out") if isinstance(out, dict) else "out",
        output_formats=formats,
    )


def load_sample(text: str, kind: str):
    """Parse one CSV sample of the given input kind."""
    if kind == "point_cloud":
        return point_cloud_from_csv(text)
    if kind == "time_series":
        return time_series_from_csv(text)
    if kind == "image":
        return image_from_csv(text)
    if kind == "graph":
        adj = parse_numeric_csv(text)
        if adj.shape[0] != adj.shape[1]:
            raise InvalidInput("graph input must be a square weighted adjacency matrix")
        n = adj.shape[0]
        edges = [
            (i, j, float(adj[i, j]))
            for i in range(n)
            for j in range(n)
            if i != j and adj[i, j] != 0
        ]
        return WeightedGraph(n=n, edges=tuple(edges), directed=True)
    raise InvalidInput(f"unknown input kind {kind!r}")


def serialize_output(value) -> dict:
    """JSON-safe representation of any stage output."""
    if hasattr(value, "to_dict"):
        return value.to_dict()
    if isinstance(value, PointCloud):
        return {"points": value.points.tolist()}
    if isinstance(value, DistanceMatrix):
        return {"entries": value.entries.tolist()}
    if isinstance(value, GrayImage):
        return {"pixels": value.pixels.tolist()}
    if isinstance(value, WeightedGraph):
        return {"n": value.n, "edges": [list(e) for e in value.edges], "directed": value.directed}
    if hasattr(value, "pairs"):  # PersistenceDiagram
        return diagram_to_dict(value)
    if isinstance(value, dict):
        return {
            k: (str(v) if isinstance(v, (complex, np.complexfloating)) else v)
            for k, v in value.items()
        }
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return {"values": [[z.real, z.imag] for z in value]}
        return {"values": value.tolist()}
    return {"value": value}


def _run_one(cfg: PipelineConfig, sample):
    out = sample
    for op, params in cfg.stages:
        out = REGISTRY[op].fn(out, params)
    return {"ok": serialize_output(out)}


def run_pipeline(cfg: PipelineConfig, batch, parallel: bool = False) -> list:
    """Apply the configured stages to every sample.

    Order is preserved and failures are isolated: a failing sample yields
    an error record while the rest of the batch completes.
    """

    def guarded(sample):
        try:
            return _run_one(cfg, sample)
        except Exception as exc:  # per-sample isolation
            return {"error": f"{type(exc).__name__}: {exc}"}

    if parallel:
        with ThreadPoolExecutor(max_workers=4) as pool:
            return list(pool.map(guarded, batch))
    return [guarded(s) for s in batch]
