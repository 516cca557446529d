"""toposcope: topological data analysis pipelines with a Mapper explorer."""

from .core import (
    DistanceMatrix,
    FilteredComplex,
    GrayImage,
    InvalidFiltration,
    InvalidInput,
    PersistenceDiagram,
    PointCloud,
    WeightedGraph,
    pairwise_distances,
    validate_diagram,
)
from .homology import (
    build_vr_filtration,
    cubical_persistence,
    reduce_filtration,
    vr_persistence,
)
from .mapper import CoverSpec, ClusterSpec, FilterSpec, MapperGraph, MapperMemo, run_mapper

__version__ = "0.1.0"

__all__ = [
    "DistanceMatrix",
    "FilteredComplex",
    "GrayImage",
    "InvalidFiltration",
    "InvalidInput",
    "PersistenceDiagram",
    "PointCloud",
    "WeightedGraph",
    "pairwise_distances",
    "validate_diagram",
    "build_vr_filtration",
    "cubical_persistence",
    "reduce_filtration",
    "vr_persistence",
    "CoverSpec",
    "ClusterSpec",
    "FilterSpec",
    "MapperGraph",
    "MapperMemo",
    "run_mapper",
    "__version__",
]
