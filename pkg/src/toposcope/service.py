"""HTTP service backing the Mapper explorer.

Datasets are held in memory, keyed by content fingerprint; Mapper requests
run through the stage memo cache so repeated parameter tweaks only
recompute what changed. All responses are deterministic JSON built with a
fixed serialization so identical requests return identical graph bytes.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

from fastapi import FastAPI, Request
from fastapi.responses import HTMLResponse, Response

from . import homology
from .core import InvalidInput, PointCloud, diagram_to_dict, fingerprint, point_cloud_from_csv
from .mapper import (
    ClusterSpec,
    CoverSpec,
    MapperMemo,
    parse_clusterer,
    parse_filter,
)


@dataclass
class Dataset:
    id: str
    pc: PointCloud


class DatasetStore:
    def __init__(self):
        self.datasets: dict[str, Dataset] = {}
        self.memo = MapperMemo()

    def add(self, pc: PointCloud) -> Dataset:
        ds = Dataset(id=fingerprint(pc.points), pc=pc)
        self.datasets[ds.id] = ds
        return ds


class ParamError(ValueError):
    def __init__(self, message: str, param: str | None = None):
        super().__init__(message)
        self.param = param


def _json_response(obj, status: int = 200) -> Response:
    return Response(
        json.dumps(obj, separators=(",", ":"), sort_keys=True),
        status_code=status,
        media_type="application/json",
    )


def _error(message: str, param: str | None = None, status: int = 400) -> Response:
    body = {"message": message}
    if param is not None:
        body["param"] = param
    return _json_response({"error": body}, status)


def _parse(raw: str | None, param: str, convert, check=None, default=None):
    if raw is None:
        if default is None:
            raise ParamError(f"missing required parameter {param!r}", param)
        return default
    try:
        value = convert(raw)
    except (ValueError, InvalidInput) as exc:
        raise ParamError(f"bad value for {param!r}: {exc}", param) from None
    if check is not None and not check(value):
        raise ParamError(f"value {raw!r} out of range for {param!r}", param)
    return value


def parameter_schema(ds: Dataset) -> dict:
    """Ranges and defaults the UI uses to build its controls."""
    filters = [f"proj:{a}" for a in range(ds.pc.d)] + ["norm", "ecc:max", "ecc:mean"]
    return {
        "dataset": {"id": ds.id, "n": ds.pc.n, "d": ds.pc.d},
        "params": [
            {"name": "filter", "type": "choice", "choices": filters, "default": "proj:0"},
            {"name": "intervals", "type": "int", "min": 1, "max": 50, "default": 10},
            {"name": "overlap", "type": "float", "min": 0.0, "max": 0.99, "default": 0.3},
            {"name": "clusterer", "type": "choice",
             "choices": ["sl:0.1", "sl:0.5", "sl:1.0", "dbscan:0.5:5"], "default": "sl:0.5"},
            {"name": "min_intersection", "type": "int", "min": 1, "max": 10, "default": 1},
            {"name": "color_by", "type": "choice",
             "choices": ["size", "mean_filter"], "default": "size"},
        ],
    }


def create_app(store: DatasetStore | None = None) -> FastAPI:
    app = FastAPI(title="toposcope explorer")
    store = store if store is not None else DatasetStore()
    app.state.store = store

    @app.exception_handler(ParamError)
    async def param_error_handler(request, exc: ParamError):
        return _error(str(exc), exc.param)

    @app.post("/api/datasets")
    async def upload_dataset(request: Request):
        body = (await request.body()).decode("utf-8", errors="replace")
        try:
            pc = point_cloud_from_csv(body)
        except InvalidInput as exc:
            return _error(f"invalid CSV: {exc}")
        ds = store.add(pc)
        return _json_response({"id": ds.id, "n": pc.n, "d": pc.d})

    def _dataset(dataset_id: str | None) -> Dataset:
        if dataset_id is None:
            raise ParamError("missing required parameter 'dataset'", "dataset")
        ds = store.datasets.get(dataset_id)
        if ds is None:
            raise ParamError(f"unknown dataset {dataset_id!r}", "dataset")
        return ds

    @app.get("/api/datasets/{dataset_id}/schema")
    async def dataset_schema(dataset_id: str):
        ds = store.datasets.get(dataset_id)
        if ds is None:
            return _error(f"unknown dataset {dataset_id!r}", "dataset", 404)
        return _json_response(parameter_schema(ds))

    @app.get("/api/mapper")
    async def mapper_endpoint(request: Request):
        q = request.query_params
        ds = store.datasets.get(q.get("dataset") or "")
        if ds is None:
            return _error(f"unknown dataset {q.get('dataset')!r}", "dataset", 404)
        filt = _parse(q.get("filter"), "filter", parse_filter, default=parse_filter("proj:0"))
        intervals = _parse(q.get("intervals"), "intervals", int, lambda v: v >= 1, 10)
        overlap = _parse(q.get("overlap"), "overlap", float, lambda v: 0 <= v < 1, 0.3)
        clusterer = _parse(
            q.get("clusterer"), "clusterer", parse_clusterer, default=ClusterSpec()
        )
        min_int = _parse(
            q.get("min_intersection"), "min_intersection", int, lambda v: v >= 1, 1
        )
        try:
            graph, hit = store.memo.run(
                ds.pc,
                filt,
                CoverSpec(intervals, overlap),
                clusterer,
                min_int,
                dataset_fp=ds.id,
            )
        except InvalidInput as exc:
            return _error(str(exc))
        payload = graph.to_dict()
        payload["cache"] = "hit" if hit else "miss"
        return _json_response(payload)

    @app.get("/api/diagram")
    async def diagram_endpoint(request: Request):
        q = request.query_params
        ds = store.datasets.get(q.get("dataset") or "")
        if ds is None:
            return _error(f"unknown dataset {q.get('dataset')!r}", "dataset", 404)
        max_dim = _parse(q.get("max_dim"), "max_dim", int, lambda v: v >= 0, 1)
        raw_edge = q.get("max_edge")
        if raw_edge is None or raw_edge == "auto":
            max_edge = None
        else:
            max_edge = _parse(raw_edge, "max_edge", float, lambda v: v > 0)
        dgm = homology.vr_persistence(ds.pc, max_dim=max_dim, max_edge=max_edge)
        return _json_response(diagram_to_dict(dgm))

    @app.get("/", response_class=HTMLResponse)
    async def index():
        return (
            "<html><body><h1>toposcope explorer</h1>"
            "<p>API: POST /api/datasets, GET /api/datasets/{id}/schema, "
            "GET /api/mapper, GET /api/diagram</p></body></html>"
        )

    return app


def serve(bind: str = "127.0.0.1:8080", store: DatasetStore | None = None) -> None:
    """Run the explorer service on the given host:port."""
    import uvicorn

    host, _, port = bind.rpartition(":")
    if not host or not port.isdigit():
        raise InvalidInput(f"bad bind address {bind!r} (expected HOST:PORT)")
    uvicorn.run(create_app(store), host=host, port=int(port))
