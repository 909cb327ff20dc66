"""Clipping a graph to a disc, with the circle split into arcs."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateTangency
from .faces import Partition, WalkGraph, _build_walk_graph, partition_walk
from .geometry import SNAP_TOL, TWO_PI, Window
from .graph import GeometricGraph, build_graph


@dataclass(frozen=True)
class Arc:
    """Anticlockwise arc of the window circle.

    ``start`` and ``end`` index boundary nodes in ``WindowGraph.interior``;
    both are -1 for the single arc of a circle that no link crosses.
    """

    start: int
    end: int
    start_angle: float
    extent: float


@dataclass(frozen=True, eq=False)
class WindowGraph:
    """A graph restricted to a closed disc.

    ``interior`` holds the source nodes strictly inside the disc followed
    by the boundary nodes in angular order. Its links are the edge-parts.
    """

    window: Window
    source: GeometricGraph
    interior: GeometricGraph
    boundary_nodes: np.ndarray
    boundary_angles: np.ndarray
    arcs: tuple
    crossing_multiplicity: np.ndarray  # per source link
    node_source: np.ndarray  # source node of each interior node, -1 on the circle
    link_source: np.ndarray  # source link of each edge-part
    _partition: list = field(default_factory=list, repr=False, compare=False)

    @property
    def M(self) -> int:
        return self.interior.n_links

    @property
    def M_prime(self) -> int:
        return int(np.count_nonzero(self.crossing_multiplicity[self.link_source] == 0))

    @property
    def M_boundary(self) -> int:
        return int(self.crossing_multiplicity.sum())

    @property
    def M_boundary_1(self) -> int:
        return int(np.count_nonzero(self.crossing_multiplicity == 1))

    @property
    def M_boundary_2(self) -> int:
        return int(np.count_nonzero(self.crossing_multiplicity == 2))


def clip_to_window(g: GeometricGraph, w: Window) -> WindowGraph:
    """Restrict ``g`` to the closed disc ``w``.

    Links are split where they cross the circle; pieces outside are
    dropped. The circle is cut into arcs at the crossing points.

    Raises
    ------
    DegenerateTangency
        A node lies on the circle, a link touches it tangentially, or two
        crossings coincide (all within tolerance).
    """
    c = np.array(w.center, dtype=float)
    r = float(w.radius)
    tol = SNAP_TOL * max(1.0, r)
    rho = np.hypot(*(g.nodes - c).T) if g.n_nodes else np.zeros(0)
    on = np.flatnonzero(np.abs(rho - r) <= tol)
    if len(on):
        raise DegenerateTangency(f"node {on[0]} lies on the window circle")
    inside = rho < r

    m = g.n_links
    mult = np.zeros(m, dtype=np.int64)
    a = g.nodes[g.links[:, 0]] if m else np.zeros((0, 2))
    b = g.nodes[g.links[:, 1]] if m else np.zeros((0, 2))
    d = b - a
    f = a - c
    A = np.einsum("ij,ij->i", d, d)
    B = 2 * np.einsum("ij,ij->i", f, d)
    C = np.einsum("ij,ij->i", f, f) - r * r

    # closest approach of each link to the centre
    ts = np.clip(-0.5 * B / np.where(A > 0, A, 1), 0, 1)
    closest = np.hypot(*(f + ts[:, None] * d).T) if m else np.zeros(0)
    tang = np.flatnonzero((ts > 0) & (ts < 1) & (np.abs(closest - r) <= tol))
    if len(tang):
        raise DegenerateTangency(f"link {tang[0]} is tangent to the window circle")

    disc = B * B - 4 * A * C
    hits = disc > 0
    sq = np.sqrt(np.where(hits, disc, 0))
    t1 = (-B - sq) / (2 * np.where(A > 0, A, 1))
    t2 = (-B + sq) / (2 * np.where(A > 0, A, 1))
    h1 = hits & (t1 > 0) & (t1 < 1)
    h2 = hits & (t2 > 0) & (t2 < 1)
    mult = h1.astype(np.int64) + h2.astype(np.int64)
    lo = np.maximum(t1, 0.0)
    hi = np.minimum(t2, 1.0)
    has_piece = hits & (lo < hi)

    keep_nodes = np.flatnonzero(inside)
    new_of = np.full(g.n_nodes, -1, dtype=np.int64)
    new_of[keep_nodes] = np.arange(len(keep_nodes))

    # boundary points: (link, param)
    bl = np.concatenate([np.flatnonzero(h1), np.flatnonzero(h2)])
    bt = np.concatenate([t1[h1], t2[h2]])
    bpts = a[bl] + bt[:, None] * d[bl]
    bang = np.mod(np.arctan2(bpts[:, 1] - c[1], bpts[:, 0] - c[0]), TWO_PI)
    order = np.argsort(bang, kind="stable")
    bl, bt, bpts, bang = bl[order], bt[order], bpts[order], bang[order]
    if len(bang) >= 2:
        gaps = np.diff(np.append(bang, bang[0] + TWO_PI))
        if np.any(gaps * r <= tol):
            raise DegenerateTangency("two links cross the window circle at the same point")
    nb = len(bl)
    n0 = len(keep_nodes)
    bnode = n0 + np.arange(nb)

    # node index at each end of every kept piece
    start_node = np.where(lo[has_piece] <= 0, new_of[g.links[has_piece, 0]], -1)
    end_node = np.where(hi[has_piece] >= 1, new_of[g.links[has_piece, 1]], -1)
    piece_links = np.flatnonzero(has_piece)
    slot = np.full(m, -1, dtype=np.int64)
    slot[piece_links] = np.arange(len(piece_links))
    for k in range(nb):
        li, t = bl[k], bt[k]
        if t1[li] == t and h1[li]:
            start_node[slot[li]] = bnode[k]
        else:
            end_node[slot[li]] = bnode[k]

    nodes = np.concatenate([g.nodes[keep_nodes], bpts]) if nb else g.nodes[keep_nodes]
    links = np.stack([start_node, end_node], axis=1) if len(piece_links) else np.zeros((0, 2), np.int64)
    interior = build_graph(nodes.reshape(-1, 2), links, validate=False)

    if nb == 0:
        arcs = (Arc(-1, -1, 0.0, TWO_PI),)
    elif nb == 1:
        arcs = (Arc(int(bnode[0]), int(bnode[0]), float(bang[0]), TWO_PI),)
    else:
        ext = np.diff(np.append(bang, bang[0] + TWO_PI))
        arcs = tuple(
            Arc(int(bnode[k]), int(bnode[(k + 1) % nb]), float(bang[k]), float(ext[k]))
            for k in range(nb)
        )
    node_source = np.concatenate([keep_nodes, np.full(nb, -1, dtype=np.int64)])
    return WindowGraph(
        window=w, source=g, interior=interior, boundary_nodes=bnode,
        boundary_angles=bang, arcs=arcs, crossing_multiplicity=mult,
        node_source=node_source, link_source=piece_links,
    )


def window_walk_graph(wg: WindowGraph) -> WalkGraph:
    """Walk tables of the edge-parts plus the circle arcs."""
    base = _build_walk_graph(wg.interior)
    cx, cy = wg.window.center
    r = float(wg.window.radius)
    real = [a for a in wg.arcs if a.start >= 0]
    k = len(real)
    th0 = np.array([a.start_angle for a in real])
    beta = np.array([a.extent for a in real])
    th1 = th0 + beta
    t0 = np.stack([-np.sin(th0), np.cos(th0)], axis=1).reshape(-1, 2)
    t1 = np.stack([-np.sin(th1), np.cos(th1)], axis=1).reshape(-1, 2)
    area2 = r * cx * (np.sin(th1) - np.sin(th0)) + r * cy * (np.cos(th0) - np.cos(th1)) + r * r * beta

    def inter(fw, bw):
        out = np.empty((2 * k,) + np.shape(fw)[1:], dtype=np.result_type(fw, bw))
        out[0::2], out[1::2] = fw, bw
        return out

    s = np.array([a.start for a in real], dtype=np.int64)
    e = np.array([a.end for a in real], dtype=np.int64)
    return WalkGraph(
        points=wg.interior.nodes,
        tail=np.concatenate([base.tail, inter(s, e)]),
        head=np.concatenate([base.head, inter(e, s)]),
        out_vec=np.concatenate([base.out_vec, inter(t0, -t1)]),
        in_vec=np.concatenate([base.in_vec, inter(t1, -t0)]),
        turn=np.concatenate([base.turn, inter(beta, -beta)]),
        length=np.concatenate([base.length, inter(r * beta, r * beta)]),
        area2=np.concatenate([base.area2, inter(area2, -area2)]),
        arc_dir=np.concatenate([base.arc_dir, inter(np.ones(k, np.int8), -np.ones(k, np.int8))]),
        circle=(float(cx), float(cy), r),
        full_circle=(k == 0),
    )


def window_partition(wg: WindowGraph) -> Partition:
    """Cell-parts of the window graph (cached on ``wg``)."""
    if not wg._partition:
        walk = window_walk_graph(wg)
        deg = wg.interior.valency
        iso = np.flatnonzero(deg == 0)
        iso = iso[wg.node_source[iso] >= 0]
        wg._partition.append(partition_walk(walk, iso))
    return wg._partition[0]


def window_cells(wg: WindowGraph) -> list:
    """Cell-parts of the disc: entire cells and cells truncated by the circle."""
    return window_partition(wg).faces


def is_truncated(wg: WindowGraph, face) -> bool:
    """True when a cell-part has part of the circle on its boundary."""
    n_straight = 2 * wg.interior.n_links
    return len(face.outer.dlinks) == 0 or bool(np.any(face.outer.dlinks >= n_straight))
