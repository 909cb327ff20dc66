"""Random and periodic graph generators.

Random models are deterministic given their seed. Independent sub-streams
come from ``numpy.random.SeedSequence.spawn``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import shapely

from .errors import CoverageTimeout
from .geometry import Window
from .graph import GeometricGraph, build_graph, empty_graph
from .planarize import planarize

MODELS = ("poisson_deleted", "falling_leaves", "hexagon", "fig4a")


@dataclass
class GeneratorConfig:
    """Model name, seed, analysis radius and model parameters.

    Parameters per model:

    - ``poisson_deleted``: ``L_A`` (length intensity, default 1), ``q``
      (deletion probability, default 0), ``margin`` (default ``5 / L_A``).
    - ``falling_leaves``: ``width`` and ``height`` (number or ``[lo, hi]``
      for a uniform draw), ``orientation`` (``"uniform"`` or a fixed angle
      in radians), ``max_leaves`` (budget), ``margin`` (default: the
      largest leaf diagonal).
    - ``hexagon``: ``variant`` (``"point"`` or ``"segment"``), ``copies``,
      ``origin_offset``.
    - ``fig4a``: ``copies``, ``origin_offset``.
    """

    model: str
    seed: int = 0
    r: float = 10.0
    params: dict = field(default_factory=dict)
    center: tuple = (0.0, 0.0)

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; expected one of {MODELS}")
        if not (self.r > 0):
            raise ValueError("r must be positive")
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError("seed must be an unsigned 64-bit integer")
        q = self.params.get("q", 0.0)
        if not 0 <= q <= 1:
            raise ValueError("q must lie in [0, 1]")
        if self.params.get("L_A", 1.0) < 0:
            raise ValueError("L_A must be non-negative")

    @property
    def window(self) -> Window:
        return Window(self.center, self.r)

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratorConfig":
        known = {"model", "seed", "r", "params", "center"}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown config keys {sorted(extra)}")
        if "model" not in d:
            raise ValueError("config needs a 'model'")
        return cls(
            model=d["model"],
            seed=int(d.get("seed", 0)),
            r=float(d.get("r", 10.0)),
            params=dict(d.get("params", {})),
            center=tuple(d.get("center", (0.0, 0.0))),
        )

    def to_dict(self) -> dict:
        return {"model": self.model, "seed": self.seed, "r": self.r,
                "params": self.params, "center": list(self.center)}


def _streams(seed, n: int):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(int(seed)).spawn(n)]


# ---------------------------------------------------------------- Poisson lines


def poisson_lines(L_A: float, window: Window, seed, margin: float | None = None) -> GeometricGraph:
    """Isotropic Poisson lines of length intensity ``L_A``, planarized in a disc.

    Lines are ``x cos(phi) + y sin(phi) = p`` relative to the window centre,
    with ``phi`` uniform on ``[0, pi)``. The pairs ``(p, phi)`` form a
    Poisson process of density ``L_A / pi`` on ``[-R, R] x [0, pi)``, so
    the number of lines meeting the disc of radius ``R`` is
    Poisson(``2 R L_A``) and the mean length per unit area is ``L_A``.
    ``R`` is the window radius plus ``margin``.
    """
    if L_A < 0:
        raise ValueError("L_A must be non-negative")
    if L_A == 0:
        return empty_graph()
    if margin is None:
        margin = 5.0 / L_A
    (rng,) = _streams(seed, 1)
    R = window.radius + margin
    k = rng.poisson(2.0 * R * L_A)
    p = rng.uniform(-R, R, k)
    phi = rng.uniform(0.0, math.pi, k)
    half = np.sqrt(R * R - p * p)
    c = np.asarray(window.center, dtype=float)
    foot = c + p[:, None] * np.stack([np.cos(phi), np.sin(phi)], axis=1)
    direc = np.stack([-np.sin(phi), np.cos(phi)], axis=1)
    seg = np.stack([foot - half[:, None] * direc, foot + half[:, None] * direc], axis=1)
    return planarize(seg)


def delete_edge_interiors(g: GeometricGraph, q: float, seed) -> GeometricGraph:
    """Keep each link independently with probability ``1 - q``; keep all nodes."""
    if not 0 <= q <= 1:
        raise ValueError("q must lie in [0, 1]")
    (rng,) = _streams(seed, 1)
    keep = rng.random(g.n_links) >= q
    return build_graph(g.nodes.copy(), g.links[keep].copy(), validate=False)


# ---------------------------------------------------------------- falling leaves


def _draw(rng, spec, k):
    if isinstance(spec, (list, tuple)):
        lo, hi = float(spec[0]), float(spec[1])
        return rng.uniform(lo, hi, k) if hi > lo else np.full(k, lo)
    return np.full(k, float(spec))


def _max_of(spec) -> float:
    return float(max(spec)) if isinstance(spec, (list, tuple)) else float(spec)


def _rectangles(center, w, h, ang):
    """Corners (anticlockwise) of rotated rectangles, shape (k, 4, 2)."""
    ca, sa = np.cos(ang), np.sin(ang)
    ux = np.stack([ca, sa], axis=1) * (w / 2)[:, None]
    uy = np.stack([-sa, ca], axis=1) * (h / 2)[:, None]
    return np.stack([center - ux - uy, center + ux - uy, center + ux + uy, center - ux + uy], axis=1)


def _outward_normals(polys):
    e = np.roll(polys, -1, axis=-2) - polys
    return np.stack([e[..., 1], -e[..., 0]], axis=-1)


def _covered_intervals(p0, p1, polys, normals):
    """Parameter intervals of segments ``p0 -> p1`` inside convex polygons.

    Cyrus-Beck clipping of ``s`` segments against ``k`` anticlockwise
    polygons with outward edge ``normals``. Returns ``(t_enter, t_leave)``
    of shape ``(s, k)``; an interval is empty where ``t_enter >= t_leave``.
    """
    d = p1 - p0  # (s, 2)
    rel = polys[None, :, :, :] - p0[:, None, None, :]  # (s, k, 4, 2)
    num = np.einsum("kei,skei->ske", normals, rel)
    den = np.einsum("kei,si->ske", normals, d)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = num / den
    t_enter = np.where(den < 0, t, -np.inf).max(axis=2)
    t_leave = np.where(den > 0, t, np.inf).min(axis=2)
    outside = np.any((den == 0) & (num <= 0), axis=2)
    t_enter = np.maximum(t_enter, 0.0)
    t_leave = np.where(outside, t_enter, np.minimum(t_leave, 1.0))
    return t_enter, t_leave


def _visible_pieces(p0, p1, te, tl, min_len):
    keep = te < tl
    iv = sorted(zip(te[keep].tolist(), tl[keep].tolist()))
    pieces = []
    cur = 0.0
    for a, b in iv:
        if a > cur:
            pieces.append((cur, a))
        cur = max(cur, b)
        if cur >= 1.0:
            break
    if cur < 1.0:
        pieces.append((cur, 1.0))
    d = p1 - p0
    L = float(np.hypot(*d))
    return [(p0 + a * d, p0 + b * d) for a, b in pieces if (b - a) * L > min_len]


def falling_leaves(config: GeneratorConfig | dict, window: Window, seed) -> GeometricGraph:
    """Frame of a dead-leaves tessellation built by time reversal.

    Leaves are opaque rectangles placed from the top down: each new leaf
    lies beneath all earlier ones, so only its boundary outside earlier
    leaves is visible. Placement stops once the disc of radius
    ``r + margin`` is covered, after which no cell meeting the window can
    change. Centres are uniform in that disc grown by half the largest leaf
    diagonal, which reaches every leaf able to touch it. Outside the
    coverage disc the frame is partial.

    Raises
    ------
    CoverageTimeout
        The leaf budget ran out before coverage.
    """
    params = config.params if isinstance(config, GeneratorConfig) else dict(config)
    wspec = params.get("width", [0.5, 1.5])
    hspec = params.get("height", [0.5, 1.5])
    orient = params.get("orientation", "uniform")
    budget = int(params.get("max_leaves", 200_000))
    batch = int(params.get("batch", 64))
    diag = math.hypot(_max_of(wspec), _max_of(hspec))
    margin = float(params.get("margin", diag))
    rng_pos, rng_size, rng_ang = _streams(seed, 3)
    c = np.asarray(window.center, dtype=float)
    r_cover = window.radius + margin
    r_place = r_cover + 0.5 * diag
    n_side = 256
    ring = np.linspace(0, 2 * math.pi, n_side, endpoint=False)
    circ = r_cover / math.cos(math.pi / n_side)
    remaining = shapely.Polygon(c + circ * np.stack([np.cos(ring), np.sin(ring)], axis=1))
    target_left = 1e-9 * max(window.radius, 1.0) ** 2

    cap = 1024
    polys = np.empty((cap, 4, 2))
    normals = np.empty((cap, 4, 2))
    boxes = np.empty((cap, 4))
    n_poly = 0
    segments = []
    placed = 0
    while True:
        if placed >= budget:
            raise CoverageTimeout(f"window not covered after {budget} leaves")
        k = min(batch, budget - placed)
        rad = r_place * np.sqrt(rng_pos.random(k))
        th = 2 * math.pi * rng_pos.random(k)
        centers = c + np.stack([rad * np.cos(th), rad * np.sin(th)], axis=1)
        w = _draw(rng_size, wspec, k)
        h = _draw(rng_size, hspec, k)
        ang = rng_ang.uniform(0, math.pi, k) if orient == "uniform" else np.full(k, float(orient))
        rects = _rectangles(centers, w, h, ang)
        leaf_polys = shapely.polygons(rects)
        # a leaf missing the uncovered region can only show outside the
        # coverage disc, where the frame is partial anyway
        shapely.prepare(remaining)
        live = shapely.intersects(remaining, leaf_polys)
        placed += k
        if live.any():
            remaining = remaining.difference(shapely.union_all(leaf_polys[live]))
        rects = rects[live]
        k = len(rects)
        rect_normals = _outward_normals(rects)
        rect_boxes = np.concatenate([rects.min(axis=1), rects.max(axis=1)], axis=1)
        if n_poly + k > cap:
            cap = 2 * (n_poly + k)
            polys = np.resize(polys, (cap, 4, 2))
            normals = np.resize(normals, (cap, 4, 2))
            boxes = np.resize(boxes, (cap, 4))
        for leaf, nrm, box in zip(rects, rect_normals, rect_boxes):
            bx = boxes[:n_poly]
            near = np.flatnonzero(
                (bx[:, 0] < box[2]) & (bx[:, 2] > box[0]) & (bx[:, 1] < box[3]) & (bx[:, 3] > box[1])
            )
            p0, p1 = leaf, np.roll(leaf, -1, axis=0)
            if len(near) == 0:
                segments.extend(zip(p0, p1))
            else:
                te, tl = _covered_intervals(p0, p1, polys[near], normals[near])
                for s in range(4):
                    segments.extend(_visible_pieces(p0[s], p1[s], te[s], tl[s], 1e-9))
            polys[n_poly], normals[n_poly], boxes[n_poly] = leaf, nrm, box
            n_poly += 1
        if remaining.area <= target_left:
            break
    if not segments:
        return empty_graph()
    return planarize(np.array(segments, dtype=float))


# ---------------------------------------------------------------- periodic fixtures


HEX_PERIOD = (3.0, math.sqrt(3.0))
_HEX_CORNERS = ((2, 0), (1, 1), (-1, 1), (-2, 0), (-1, -1), (1, -1))


def hexagon_fixture(variant: str = "point", copies: int = 3, origin_offset=(0.0, 0.0)) -> GeometricGraph:
    """Patch of the regular flat-top hexagon lattice (side 1) with a hole per cell.

    ``variant`` is ``"point"`` (a 0-valent node at each centre) or
    ``"segment"`` (a horizontal segment of length 1/2 through each centre).
    Hexagon centres are ``(1.5 i, sqrt(3) (j + (i mod 2) / 2))`` for
    ``|i|, |j| <= copies``, shifted by ``origin_offset``. The lattice repeats
    over the rectangle ``HEX_PERIOD``, which holds two hexagons.
    """
    if variant not in ("point", "segment"):
        raise ValueError("variant must be 'point' or 'segment'")
    # lattice points are (a/2, b*sqrt(3)/2) with integer (a, b)
    key_of: dict = {}
    nodes, links = [], set()
    half_root3 = math.sqrt(3.0) / 2
    off = np.asarray(origin_offset, dtype=float)

    def node(a, b):
        if (a, b) not in key_of:
            key_of[(a, b)] = len(nodes)
            nodes.append((0.5 * a + off[0], half_root3 * b + off[1]))
        return key_of[(a, b)]

    extra_nodes, extra_links = [], []
    rng = range(-copies, copies + 1)
    for i in rng:
        for j in rng:
            ca, cb = 3 * i, 2 * j + (i % 2)
            ids = [node(ca + da, cb + db) for da, db in _HEX_CORNERS]
            for k in range(6):
                a, b = ids[k], ids[(k + 1) % 6]
                links.add((min(a, b), max(a, b)))
            cx, cy = 0.5 * ca + off[0], half_root3 * cb + off[1]
            if variant == "point":
                extra_nodes.append((cx, cy))
            else:
                extra_nodes.extend([(cx - 0.25, cy), (cx + 0.25, cy)])
                extra_links.append((len(extra_nodes) - 2, len(extra_nodes) - 1))
    base = len(nodes)
    all_nodes = np.array(nodes + extra_nodes)
    all_links = sorted(links) + [(a + base, b + base) for a, b in extra_links]
    return build_graph(all_nodes, np.array(all_links, dtype=np.int64))


FIG4A_PERIOD = (2.0, 1.0)

# one fundamental block, in block coordinates
_F4_NODES = {
    "X1": (0.0, 0.0), "T3": (0.5, 0.0), "T1": (1.0, 0.0), "T2": (1.5, 0.0),
    "Y": (0.0, 0.5), "L1": (1.0, 0.5), "L2": (-0.3, 0.75), "L3": (1.5, 0.75),
    "A1": (0.1, 0.1), "A2": (0.4, 0.1), "A3": (0.25, 0.4),
    "B1": (0.6, 0.1), "B2": (0.9, 0.1), "B3": (0.75, 0.4),
    "Q1": (1.6, 0.1), "Q2": (1.9, 0.1), "Q3": (1.9, 0.4), "Q4": (1.6, 0.4),
}
# (node, node, block offset of the second node)
_F4_LINKS = [
    ("X1", "T3", (0, 0)), ("T3", "T1", (0, 0)), ("T1", "T2", (0, 0)), ("T2", "X1", (1, 0)),
    ("X1", "Y", (0, 0)), ("T1", "L1", (0, 0)), ("L1", "Y", (0, 0)),
    ("Y", "L2", (0, 0)), ("L2", "X1", (0, 1)),
    ("T2", "L3", (0, 0)), ("L3", "T3", (0, 1)),
    ("A1", "A2", (0, 0)), ("A2", "A3", (0, 0)), ("A3", "A1", (0, 0)),
    ("B1", "B2", (0, 0)), ("B2", "B3", (0, 0)), ("B3", "B1", (0, 0)),
    ("Q1", "Q2", (0, 0)), ("Q2", "Q3", (0, 0)), ("Q3", "Q4", (0, 0)), ("Q4", "Q1", (0, 0)),
]
# (chi, E, S) of each cell type in the block
FIG4A_CELLS = {
    "rectangle": (1, 4, 4),
    "heptagon": (0, 13, 11),
    "triangle": (1, 3, 3),
    "holed_rectangle": (-1, 11, 10),
    "octagon": (1, 8, 8),
}


@dataclass
class Fig4aFixture:
    """Periodic tiling with six cells per 2 x 1 block.

    The block ``[origin, origin + period)`` holds one copy of each cell's
    reference point. Groupings return ``(block index, group label)``.
    """

    graph: GeometricGraph
    origin: tuple
    period: tuple = FIG4A_PERIOD

    def label(self, face) -> str:
        key = (face.chi, face.edge_count, face.side_count)
        for name, val in FIG4A_CELLS.items():
            if val == key:
                return name
        raise ValueError(f"face with (chi, E, S) = {key} is not a fixture cell")

    def block(self, ref) -> tuple:
        rel = (np.asarray(ref, dtype=float) - np.asarray(self.origin)) / np.asarray(self.period)
        return (int(math.floor(rel[0])), int(math.floor(rel[1])))

    def grouping_a(self, face, ref) -> tuple:
        """Triangles together, the two rectangular outlines together, others alone."""
        lab = self.label(face)
        grp = {"triangle": "triangles", "rectangle": "rectangles",
               "holed_rectangle": "rectangles"}.get(lab, lab)
        return (self.block(ref), grp)

    def grouping_b(self, face, ref) -> tuple:
        """Cells grouped by Euler Entity."""
        return (self.block(ref), face.chi)


def fig4a_fixture(copies: int = 2, origin_offset=(0.0, 0.0)) -> Fig4aFixture:
    """Patch of ``(2 copies + 1)^2`` blocks of the six-cell periodic tiling.

    Per block: 18 vertices (13 of valency 2, 4 of valency 3, one of
    valency 4), 21 edges, three pi-vertices, and cells with
    ``(S, E, chi)`` = (4,4,1), (11,13,0), (3,3,1), (3,3,1), (10,11,-1),
    (8,8,1).
    """
    names = list(_F4_NODES)
    rng = range(-copies, copies + 1)
    off = np.asarray(origin_offset, dtype=float)
    index, nodes = {}, []
    for i in rng:
        for j in rng:
            for nm in names:
                index[(i, j, nm)] = len(nodes)
                x, y = _F4_NODES[nm]
                nodes.append((x + 2.0 * i + off[0], y + 1.0 * j + off[1]))
    links = []
    for i in rng:
        for j in rng:
            for a, b, (di, dj) in _F4_LINKS:
                kb = (i + di, j + dj, b)
                if kb in index:
                    links.append((index[(i, j, a)], index[kb]))
    g = build_graph(np.array(nodes), np.array(links, dtype=np.int64))
    return Fig4aFixture(graph=g, origin=(float(off[0]), float(off[1])))


# ---------------------------------------------------------------- dispatch


def generate(config: GeneratorConfig) -> GeometricGraph:
    """Graph for a generator configuration."""
    p = config.params
    if config.model == "poisson_deleted":
        s_lines, s_del = np.random.SeedSequence(int(config.seed)).spawn(2)
        L_A = float(p.get("L_A", 1.0))
        g = poisson_lines(L_A, config.window, s_lines.generate_state(2, np.uint64)[0], p.get("margin"))
        q = float(p.get("q", 0.0))
        if q > 0:
            g = delete_edge_interiors(g, q, s_del.generate_state(2, np.uint64)[0])
        return g
    if config.model == "falling_leaves":
        return falling_leaves(config, config.window, config.seed)
    if config.model == "hexagon":
        return hexagon_fixture(p.get("variant", "point"), int(p.get("copies", 3)),
                               tuple(p.get("origin_offset", (0.0, 0.0))))
    if config.model == "fig4a":
        return fig4a_fixture(int(p.get("copies", 2)), tuple(p.get("origin_offset", (0.0, 0.0)))).graph
    raise ValueError(f"unknown model {config.model!r}")
