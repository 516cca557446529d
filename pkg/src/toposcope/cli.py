"""toposcope command line interface."""
from __future__ import annotations

import json
import pathlib
import sys

import click

from . import homology
from .core import InvalidInput, diagram_to_dict, point_cloud_from_csv
from .diagram import diagram_to_svg
from .mapper import CoverSpec, parse_clusterer, parse_filter, run_mapper
from .pipeline import SchemaError, load_sample, parse_config, run_pipeline


@click.group()
def main():
    """Topological data analysis pipelines and the Mapper explorer."""


@main.command("run")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--input", "input_path", type=click.Path(exists=True), default=None,
              help="Override the input path from the config.")
@click.option("--out", "out_dir", type=click.Path(), default=None,
              help="Override the output directory from the config.")
def run_cmd(config_path, input_path, out_dir):
    """Run a configured pipeline over the input file."""
    try:
        cfg = parse_config(pathlib.Path(config_path).read_text())
    except SchemaError as exc:
        for path, msg in exc.errors:
            click.echo(f"config error at {path}: {msg}", err=True)
        sys.exit(1)
    src = input_path or cfg.input_path
    if not src:
        click.echo("no input path given (config input.path or --input)", err=True)
        sys.exit(1)
    sample = load_sample(pathlib.Path(src).read_text(), cfg.input_kind)
    results = run_pipeline(cfg, [sample])
    dest = pathlib.Path(out_dir or cfg.output_path)
    dest.mkdir(parents=True, exist_ok=True)
    for i, result in enumerate(results):
        path = dest / f"sample_{i:03d}.json"
        path.write_text(json.dumps(result, indent=2, sort_keys=True))
        click.echo(f"wrote {path}")
    if any("error" in r for r in results):
        sys.exit(2)


@main.command("diagram")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--max-dim", default=1, show_default=True)
@click.option("--max-edge", default="auto", show_default=True,
              help="Filtration scale cap, or 'auto' for the max distance.")
@click.option("--metric", default="euclidean", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "svg"]), default="json",
              show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Write to a file instead of stdout.")
def diagram_cmd(input_path, max_dim, max_edge, metric, fmt, out_path):
    """Vietoris-Rips persistence diagram of a point cloud CSV."""
    pc = point_cloud_from_csv(pathlib.Path(input_path).read_text())
    edge = None if max_edge == "auto" else float(max_edge)
    dgm = homology.vr_persistence(pc, metric=metric, max_dim=max_dim, max_edge=edge)
    text = (
        json.dumps(diagram_to_dict(dgm), indent=2)
        if fmt == "json"
        else diagram_to_svg(dgm)
    )
    if out_path:
        pathlib.Path(out_path).write_text(text)
        click.echo(f"wrote {out_path}")
    else:
        click.echo(text)


@main.command("mapper")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--filter", "filter_spec", default="proj:0", show_default=True,
              help="proj:N, height:D0,D1,..., norm, or ecc:max|mean.")
@click.option("--intervals", default=10, show_default=True)
@click.option("--overlap", default=0.3, show_default=True)
@click.option("--clusterer", default="sl:0.5", show_default=True,
              help="sl:CUTOFF or dbscan:EPS:MIN_SAMPLES.")
@click.option("--min-intersection", default=1, show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None)
def mapper_cmd(input_path, filter_spec, intervals, overlap, clusterer, min_intersection, out_path):
    """Mapper graph of a point cloud CSV."""
    pc = point_cloud_from_csv(pathlib.Path(input_path).read_text())
    try:
        graph = run_mapper(
            pc,
            parse_filter(filter_spec),
            CoverSpec(intervals, overlap),
            parse_clusterer(clusterer),
            min_intersection,
        )
    except InvalidInput as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    text = json.dumps(graph.to_dict(), indent=2)
    if out_path:
        pathlib.Path(out_path).write_text(text)
        click.echo(f"wrote {out_path}")
    else:
        click.echo(text)


@main.command("serve")
@click.option("--bind", default="127.0.0.1:8080", show_default=True)
def serve_cmd(bind):
    """Serve the Mapper explorer HTTP API."""
    from .service import serve

    serve(bind)


if __name__ == "__main__":
    main()
