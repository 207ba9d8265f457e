"""Command-line front end.

Exit codes: 0 success, 2 config error, 3 missing artifact, 4 inapplicable
engine, 5 verdict failure.
"""

from __future__ import annotations

import json
import sys
from fractions import Fraction
from pathlib import Path

import click
import numpy as np

from . import schema
from .alpha import (InexactMapError, LayerCapExceeded, af_survey, alpha_enclosure, alpha_exact, check_facts,
                    facts_text, landmark_cells)
from .graph import transition_graph
from .maps import build_named_map, map_from_dict
from .render import render_svg
from .spaces import Pt, build_named_space

EXIT_CONFIG, EXIT_MISSING, EXIT_ENGINE, EXIT_VERDICT = 2, 3, 4, 5


def _fail(code: int, msg: str):
    click.echo(f"error: {msg}", err=True)
    sys.exit(code)


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _basepoint(space, name: str) -> Pt:
    if name in space.points:
        return space.points[name]
    piece, _, t = name.rpartition(":")
    if piece in space.index:
        return Pt(piece, Fraction(t))
    _fail(EXIT_CONFIG, f"unknown basepoint {name!r}; named points: {sorted(space.points)[:12]}")


def _load_artifacts(art: Path):
    sp_file, map_file = art / "space.json", art / "map.json"
    for f in (sp_file, map_file):
        if not f.exists():
            _fail(EXIT_MISSING, f"missing artifact {f}")
    space = schema.space_from_dict(json.loads(sp_file.read_text()))
    fmap = map_from_dict(json.loads(map_file.read_text()), space)
    return space, fmap


@click.group()
def main():
    """Alpha-limit sets on finite-resolution model spaces."""


@main.command()
@click.argument("config", type=click.Path())
@click.option("--out", "out", type=click.Path(), required=True, help="Artifact directory.")
def build(config, out):
    """Build the space (and map, if configured) described by CONFIG."""
    try:
        cfg = schema.load_config(config)
        space = schema.build_space(cfg)
    except FileNotFoundError:
        _fail(EXIT_MISSING, f"config {config} not found")
    except schema.ConfigError as e:
        _fail(EXIT_CONFIG, str(e))
    out = Path(out)
    if cfg.space["kind"] == "cantor":
        _write(out / "space.json", schema.dumps(space.description))
        click.echo(f"cantor space depth {space.depth}")
        return
    _write(out / "space.json", schema.dumps(schema.space_to_dict(space)))
    _write(out / "space.svg", render_svg(space, title=f"{space.kind} h={space.h}"))
    if cfg.map:
        try:
            fmap = build_named_map(space, cfg.map["name"], **cfg.map.get("params", {}))
        except ValueError as e:
            _fail(EXIT_CONFIG, f"map: {e}")
        _write(out / "map.json", schema.dumps(fmap.to_dict()))
        try:
            g = transition_graph(space, fmap, cfg.graph.get("k", 8), cfg.graph.get("rho"))
            _write(out / "graph.csv", g.edges_csv())
        except ValueError as e:
            click.echo(f"no transition graph: {e}", err=True)
    click.echo(f"{space.kind}: {space.n_cells} cells, {len(space.landmarks)} landmarks -> {out}")


@main.command()
@click.option("--artifacts", type=click.Path(), required=True)
@click.option("--basepoint", required=True, help="Named point or piece:t.")
@click.option("--engine", type=click.Choice(["graph", "exact"]), default="graph")
@click.option("--K", "K", type=int, default=12, help="Exact engine depth.")
@click.option("--eps", type=float, default=None, help="Exact engine ball radius (default 2h).")
@click.option("--expect", default=None, help="Landmark union (a+b) the members should match within one cell.")
@click.option("--out", type=click.Path(), default=None)
def alpha(artifacts, basepoint, engine, K, eps, expect, out):
    """Compute an alpha-limit estimate and write report, CSV and SVG overlay."""
    art = Path(artifacts)
    space, fmap = _load_artifacts(art)
    x = _basepoint(space, basepoint)
    try:
        if engine == "graph":
            rep = alpha_enclosure(transition_graph(space, fmap), x)
        else:
            rep = alpha_exact(fmap, x, K, eps)
            f4 = next(r for r in check_facts(fmap, None, [x], "exact", K, eps) if r.fact == "F4")
            rep.verdicts["forward_invariance"] = f4.verdict
            rep.verdicts["forward_invariant"] = f4.verdict != "violated"
    except (InexactMapError, LayerCapExceeded) as e:
        _fail(EXIT_ENGINE, str(e))
    except ValueError as e:
        _fail(EXIT_ENGINE, str(e))
    if expect:
        try:
            rep.compare(landmark_cells(space, expect))
        except KeyError as e:
            _fail(EXIT_CONFIG, str(e))
    out = Path(out) if out else art / f"alpha_{engine}"
    _write(out / "report.txt", rep.text_block())
    _write(out / "members.csv", rep.cells_csv())
    _write(out / "overlay.svg", render_svg(space, {"members": rep.cells}, title=f"alpha({basepoint})"))
    click.echo(rep.text_block(), nl=False)
    if not all(v for v in rep.verdicts.values() if isinstance(v, bool)):
        sys.exit(EXIT_VERDICT)


@main.command()
@click.option("--artifacts", type=click.Path(), required=True)
@click.option("--basepoint", "basepoints", multiple=True, required=True)
@click.option("--engine", type=click.Choice(["graph", "exact"]), default="graph")
@click.option("--K", "K", type=int, default=12)
@click.option("--eps", type=float, default=None)
def facts(artifacts, basepoints, engine, K, eps):
    """Verdict table for the six basic facts."""
    space, fmap = _load_artifacts(Path(artifacts))
    xs = [_basepoint(space, b) for b in basepoints]
    try:
        g = transition_graph(space, fmap) if engine == "graph" else None
        rows = check_facts(fmap, g, xs, engine, K, eps)
    except (InexactMapError, LayerCapExceeded, ValueError) as e:
        _fail(EXIT_ENGINE, str(e))
    text = facts_text(rows)
    _write(Path(artifacts) / f"facts_{engine}.tsv", text)
    click.echo(text, nl=False)
    if any(r.verdict in ("fail", "violated") for r in rows):
        sys.exit(EXIT_VERDICT)


@main.command()
@click.option("--space", "kind", required=True)
@click.option("--h", default="1/64")
@click.option("--landmark", "landmarks", multiple=True, help="Landmark union to survey (repeatable).")
@click.option("--random", "n_random", type=int, default=0, help="Extra random closed sets.")
@click.option("--seed", type=int, default=0)
@click.option("--param", "params", multiple=True, help="Space parameter key=value.")
def survey(kind, h, landmarks, n_random, seed, params):
    """Try to realize closed sets as alpha-limit sets."""
    from .constructors import random_closed_cells

    try:
        space = build_named_space(kind, h, **dict(p.split("=", 1) for p in params))
    except ValueError as e:
        _fail(EXIT_CONFIG, str(e))
    try:
        family = {name: landmark_cells(space, name) for name in landmarks}
    except KeyError as e:
        _fail(EXIT_CONFIG, str(e))
    rng = np.random.default_rng(seed)
    for i in range(n_random):
        family[f"random{i}"] = random_closed_cells(space, rng)
    rows = af_survey(space, family)
    click.echo(f"seed: {seed}")
    for r in rows:
        click.echo(f"{r.name}\t{r.method}\t{'realized' if r.realized else 'unrealized'}")
    if not all(r.realized for r in rows):
        sys.exit(EXIT_VERDICT)


@main.command("product-line")
@click.option("--factors", default="interval,interval", help="Comma-separated space kinds.")
@click.option("--h", default="1/8")
@click.option("--sets", "n_sets", type=int, default=100)
@click.option("--seed", type=int, default=0)
def product_line(factors, h, n_sets, seed):
    """Check the line walk against brute force on random closed sets of a product."""
    from .combinators import ProductSpace
    from .gallery import _line_agreement

    try:
        prod = ProductSpace(tuple(build_named_space(f, h) for f in factors.split(",")))
    except ValueError as e:
        _fail(EXIT_CONFIG, str(e))
    bad = _line_agreement(prod, np.random.default_rng(seed), n_sets)
    click.echo(f"cells: {prod.n_cells}; sets: {n_sets}; seed: {seed}; disagreements: {bad}")
    if bad:
        sys.exit(EXIT_VERDICT)


@main.command()
@click.option("--space", "kind", default="W")
@click.option("--h", default="1/32")
@click.option("--collapse", "landmark", default="S_inf")
@click.option("--name", "new_name", default="s_inf")
@click.option("--out", type=click.Path(), default=None)
def quotient(kind, h, landmark, new_name, out):
    """Collapse a landmark to a point and run the chain-of-sine-curves checker."""
    from .combinators import check_chain_of_sines, quotient_collapse

    try:
        space = build_named_space(kind, h)
        q = quotient_collapse(space, space.landmark(landmark), new_name)
    except (ValueError, KeyError) as e:
        _fail(EXIT_CONFIG, str(e))
    if out:
        _write(Path(out) / "space.json", schema.dumps(schema.space_to_dict(q)))
        _write(Path(out) / "space.svg", render_svg(q, title=f"{kind}/{landmark}"))
    try:
        res = check_chain_of_sines(q)
    except ValueError as e:
        _fail(EXIT_ENGINE, str(e))
    for k, v in res.items():
        click.echo(f"{k}: {v}")
    if not all(v for k, v in res.items() if k != "distances"):
        sys.exit(EXIT_VERDICT)


@main.command()
@click.option("--out", type=click.Path(), default="gallery_out")
@click.option("--only", "only", multiple=True, help="Row key, e.g. af-survey:Z (repeatable).")
@click.option("--render", is_flag=True, help="Also write SVG figures.")
@click.option("--jobs", type=int, default=1, help="Worker processes for rows.")
def gallery(out, only, render, jobs):
    """Run the reproduction rows and write a summary table."""
    from .gallery import render_figures, run_gallery, summary_table

    try:
        rows = run_gallery(list(only) or None, jobs)
    except KeyError as e:
        _fail(EXIT_CONFIG, str(e))
    out = Path(out)
    _write(out / "summary.tsv", summary_table(rows))
    for r in rows:
        _write(out / "rows" / r.key.replace(":", "_") / "row.txt", r.line() + "\n")
        click.echo(r.line())
    if render:
        for name, svg in render_figures().items():
            _write(out / f"{name}.svg", svg)
    if not all(r.passed for r in rows):
        sys.exit(EXIT_VERDICT)


if __name__ == "__main__":
    main()
