"""JSON and SVG export of graphs, faces and estimator reports."""
from __future__ import annotations

import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np

from .faces import Face, partition
from .geometry import Window
from .graph import GeometricGraph, build_graph, pi_angle_counts


def _num(x: float) -> str:
    # 17 significant digits round-trip any double exactly
    s = format(float(x), ".17g")
    if s in ("nan", "inf", "-inf"):
        raise ValueError("graph coordinates must be finite")
    return s


def graph_to_json(g: GeometricGraph) -> str:
    """Serialize as ``{"nodes": [[x, y], ...], "links": [[i, j], ...]}``."""
    nodes = ",".join(f"[{_num(x)},{_num(y)}]" for x, y in g.nodes)
    links = ",".join(f"[{int(i)},{int(j)}]" for i, j in g.links)
    return '{"nodes":[' + nodes + '],"links":[' + links + "]}"


def graph_from_json(text: str, validate: bool = True) -> GeometricGraph:
    data = json.loads(text)
    if not isinstance(data, dict) or "nodes" not in data or "links" not in data:
        raise ValueError("graph JSON needs 'nodes' and 'links'")
    nodes = np.asarray(data["nodes"], dtype=float).reshape(-1, 2)
    links = np.asarray(data["links"], dtype=np.int64).reshape(-1, 2)
    return build_graph(nodes, links, validate=validate)


def write_graph(g: GeometricGraph, path) -> None:
    Path(path).write_text(graph_to_json(g) + "\n")


def read_graph(path, validate: bool = True) -> GeometricGraph:
    return graph_from_json(Path(path).read_text(), validate=validate)


def to_jsonable(obj):
    """Convert fractions, numpy scalars and containers into plain JSON types."""
    if isinstance(obj, Fraction):
        return float(obj)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return to_jsonable(float(obj))
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def dump_json(obj, path=None) -> str:
    text = json.dumps(to_jsonable(obj), indent=2, sort_keys=False)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


def face_report(faces: list[Face]) -> list[dict]:
    """Per-face records in outer-circuit order."""
    return [
        {
            "chi": f.chi,
            "E": f.edge_count,
            "V": f.vertex_count,
            "S": f.side_count,
            "C": f.corner_count,
            "area": f.area,
            "perimeter": f.perimeter,
            "n_holes": len(f.holes),
            "n_isolated": len(f.isolated_nodes),
        }
        for f in faces
    ]


# fill colour by Euler Entity: <= -2, -1, 0, 1, >= 2
CHI_COLORS = {-2: "#7b3294", -1: "#c2a5cf", 0: "#f7f7f7", 1: "#a6dba0", 2: "#008837"}
SVG_SCALE = 100.0


def _chi_color(chi: int) -> str:
    return CHI_COLORS[max(-2, min(2, chi))]


def graph_to_svg(g: GeometricGraph, window: Window | None = None, faces: list[Face] | None = None) -> str:
    """SVG drawing: faces shaded by Euler Entity, links, and marked special nodes.

    Double-pi nodes get a red diamond, since a straight 2-valent node is
    otherwise invisible. Isolated nodes are drawn as dots. One length unit
    maps to 100 SVG units; y points up.
    """
    part = partition(g)
    faces = part.faces if faces is None else faces
    s = SVG_SCALE
    if window is not None:
        cx, cy = window.center
        r = window.radius
        lo = np.array([cx - r, cy - r])
        hi = np.array([cx + r, cy + r])
    elif g.n_nodes:
        lo, hi = g.nodes.min(axis=0), g.nodes.max(axis=0)
    else:
        lo, hi = np.zeros(2), np.ones(2)
    pad = 0.05 * max(float(np.max(hi - lo)), 1.0)
    lo, hi = lo - pad, hi + pad

    def pt(p):
        return f"{(p[0] - lo[0]) * s:.3f},{(hi[1] - p[1]) * s:.3f}"

    W, H = (hi - lo) * s
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W:.0f}" height="{H:.0f}" '
        f'viewBox="0 0 {W:.3f} {H:.3f}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    wg = part.walk
    for f in faces:
        rings = []
        for c in f.circuits:
            pts = wg.points[c.nodes]
            if len(pts) >= 2:
                rings.append("M " + " L ".join(pt(p) for p in pts) + " Z")
        if rings:
            out.append(
                f'<path d="{" ".join(rings)}" fill="{_chi_color(f.chi)}" fill-rule="evenodd" '
                f'stroke="none"><title>chi={f.chi} E={f.edge_count} S={f.side_count}</title></path>'
            )
    for a, b in g.links:
        p, q = g.nodes[a], g.nodes[b]
        x1, y1 = pt(p).split(",")
        x2, y2 = pt(q).split(",")
        out.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="black" stroke-width="2"/>')
    deg = g.valency
    pic = pi_angle_counts(g)
    for i in np.flatnonzero((deg == 2) & (pic == 2)):
        x, y = (float(v) for v in pt(g.nodes[i]).split(","))
        d = 7
        out.append(
            f'<polygon points="{x:.3f},{y - d:.3f} {x + d:.3f},{y:.3f} {x:.3f},{y + d:.3f} {x - d:.3f},{y:.3f}" '
            'fill="red" stroke="black" stroke-width="1"><title>double-pi</title></polygon>'
        )
    for i in np.flatnonzero(deg == 0):
        x, y = pt(g.nodes[i]).split(",")
        out.append(f'<circle cx="{x}" cy="{y}" r="4" fill="black"><title>isolated</title></circle>')
    if window is not None:
        x, y = pt(window.center).split(",")
        out.append(
            f'<circle cx="{x}" cy="{y}" r="{window.radius * s:.3f}" fill="none" '
            'stroke="#2166ac" stroke-width="2" stroke-dasharray="8,6"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
