"""Plain SVG drawings of cell spaces with highlighted cell sets."""

from __future__ import annotations

import numpy as np

from .spaces import Space

_PALETTE = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e")


def _polylines(space: Space) -> list[np.ndarray]:
    out = []
    for c in range(space.n_cells):
        p = space.pieces[int(space.cell_piece[c])]
        if p.kind == "sine":
            out.append(p.xy_array(space.cell_params(c, 9)))
        else:
            out.append(space.cell_polyline(c))
    return out


def render_svg(space: Space, layers: dict | None = None, width: int = 800, title: str = "") -> str:
    """SVG with every cell in grey and each named cell set of ``layers`` in colour."""
    layers = layers or {}
    pls = _polylines(space)
    # summands are laid out side by side
    shift = {}
    x_off = 0.0
    for s in sorted({p.summand for p in space.pieces}):
        cs = [c for c in range(space.n_cells) if space.pieces[int(space.cell_piece[c])].summand == s]
        pts = np.concatenate([pls[c] for c in cs])
        shift[s] = x_off - pts[:, 0].min()
        x_off += pts[:, 0].max() - pts[:, 0].min() + 0.5
    moved = []
    for c, pl in enumerate(pls):
        s = space.pieces[int(space.cell_piece[c])].summand
        moved.append(pl + np.array([shift[s], 0.0]))
    allp = np.concatenate(moved)
    lo, hi = allp.min(axis=0), allp.max(axis=0)
    span = np.maximum(hi - lo, 1e-9)
    scale = (width - 40) / max(span[0], span[1] * 1.0)
    height = int(span[1] * scale + 40 + (20 if title else 0))

    def xy(p):
        return 20 + (p[0] - lo[0]) * scale, height - 20 - (p[1] - lo[1]) * scale

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">']
    if title:
        out.append(f'<text x="20" y="16" font-family="monospace" font-size="12">{title}</text>')

    def draw(c, colour, w):
        pl = moved[c]
        if len(pl) == 1:
            x, y = xy(pl[0])
            out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{w:.1f}" fill="{colour}"/>')
        else:
            pts = " ".join("{:.2f},{:.2f}".format(*xy(p)) for p in pl)
            out.append(f'<polyline points="{pts}" fill="none" stroke="{colour}" stroke-width="{w:.1f}"/>')

    for c in range(space.n_cells):
        draw(c, "#bbbbbb", 1.0)
    for i, (name, cells) in enumerate(layers.items()):
        colour = _PALETTE[i % len(_PALETTE)]
        out.append(f'<g id="{name}">')
        for c in sorted(cells):
            draw(c, colour, 2.5)
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
