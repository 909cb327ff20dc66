"""Validated planar geometric graphs with angle-sorted incidence."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import (
    CrossingLinkInteriors,
    DuplicateLink,
    DuplicateNode,
    LoopLink,
    NodeOnLinkInterior,
)
from .geometry import ANGLE_TOL, SNAP_TOL, TWO_PI, Point2, candidate_pairs, points_in_boxes


@dataclass(frozen=True, eq=False)
class GeometricGraph:
    """Finite planar graph whose links are straight segments.

    Directed links are numbered ``2*link`` (first endpoint to second) and
    ``2*link + 1`` (reverse), so ``d ^ 1`` reverses ``d``.

    Attributes
    ----------
    nodes : ndarray, shape (n, 2)
    links : ndarray, shape (m, 2), int
    inc_ptr : ndarray, shape (n + 1,)
        CSR offsets into ``inc_dlink``.
    inc_dlink : ndarray, shape (2m,)
        Outgoing directed links of each node, sorted anticlockwise by angle.
    inc_angle : ndarray, shape (2m,)
        Direction angle in ``[0, 2*pi)`` matching ``inc_dlink``.
    dpos : ndarray, shape (2m,)
        Position of each directed link inside its tail's incidence block.
    """

    nodes: np.ndarray
    links: np.ndarray
    inc_ptr: np.ndarray = field(repr=False)
    inc_dlink: np.ndarray = field(repr=False)
    inc_angle: np.ndarray = field(repr=False)
    dpos: np.ndarray = field(repr=False)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_links(self) -> int:
        return len(self.links)

    @property
    def valency(self) -> np.ndarray:
        return np.diff(self.inc_ptr)

    @property
    def incidence(self) -> list[list[int]]:
        """Per node, incident link indices sorted by outgoing angle."""
        return [
            [int(d) >> 1 for d in self.inc_dlink[self.inc_ptr[i] : self.inc_ptr[i + 1]]]
            for i in range(self.n_nodes)
        ]

    def point(self, i: int) -> Point2:
        return Point2(float(self.nodes[i, 0]), float(self.nodes[i, 1]))

    def tails(self) -> np.ndarray:
        """Tail node of every directed link."""
        out = np.empty(2 * self.n_links, dtype=np.int64)
        out[0::2] = self.links[:, 0]
        out[1::2] = self.links[:, 1]
        return out

    def heads(self) -> np.ndarray:
        out = np.empty(2 * self.n_links, dtype=np.int64)
        out[0::2] = self.links[:, 1]
        out[1::2] = self.links[:, 0]
        return out

    def link_lengths(self) -> np.ndarray:
        if self.n_links == 0:
            return np.zeros(0)
        d = self.nodes[self.links[:, 1]] - self.nodes[self.links[:, 0]]
        return np.hypot(d[:, 0], d[:, 1])

    def segments(self) -> np.ndarray:
        """Links as an ``(m, 2, 2)`` array of endpoint coordinates."""
        return self.nodes[self.links]

    def total_length(self) -> float:
        return float(self.link_lengths().sum())


def _as_arrays(nodes, links):
    nodes = np.asarray(nodes, dtype=float).reshape(-1, 2)
    links = np.asarray(links, dtype=np.int64).reshape(-1, 2)
    if not np.all(np.isfinite(nodes)):
        raise ValueError("node coordinates must be finite")
    if len(links) and (links.min() < 0 or links.max() >= len(nodes)):
        raise IndexError("link refers to a missing node")
    return nodes, links


def _sorted_incidence(nodes, links):
    m = len(links)
    dl = np.arange(2 * m, dtype=np.int64)
    tail = np.empty(2 * m, dtype=np.int64)
    head = np.empty(2 * m, dtype=np.int64)
    tail[0::2], tail[1::2] = links[:, 0], links[:, 1]
    head[0::2], head[1::2] = links[:, 1], links[:, 0]
    vec = nodes[head] - nodes[tail]
    ang = np.mod(np.arctan2(vec[:, 1], vec[:, 0]), TWO_PI)
    ang[ang >= TWO_PI] = 0.0
    order = np.lexsort((ang, tail))
    inc_dlink = dl[order]
    inc_angle = ang[order]
    counts = np.bincount(tail, minlength=len(nodes))
    inc_ptr = np.zeros(len(nodes) + 1, dtype=np.int64)
    np.cumsum(counts, out=inc_ptr[1:])
    dpos = np.empty(2 * m, dtype=np.int64)
    dpos[inc_dlink] = np.arange(2 * m) - inc_ptr[tail[inc_dlink]]
    return inc_ptr, inc_dlink, inc_angle, dpos


def _check_nodes_and_links(nodes, links):
    if len(nodes) > 1:
        pairs = cKDTree(nodes).query_pairs(SNAP_TOL, output_type="ndarray")
        if len(pairs):
            pairs = np.sort(pairs, axis=1)
            i, j = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))[0]]
            raise DuplicateNode(f"nodes {i} and {j} coincide", element=(int(i), int(j)))
    loops = np.flatnonzero(links[:, 0] == links[:, 1])
    if len(loops):
        raise LoopLink(f"link {loops[0]} joins node {links[loops[0], 0]} to itself", element=int(loops[0]))
    if len(links) > 1:
        key = np.sort(links, axis=1)
        order = np.lexsort((np.arange(len(links)), key[:, 1], key[:, 0]))
        sk = key[order]
        same = np.all(sk[1:] == sk[:-1], axis=1)
        if same.any():
            # report the earliest link that repeats an earlier one
            dup_later = order[1:][same]
            dup_first = order[:-1][same]
            k = int(np.argmin(dup_later))
            a, b = int(dup_first[k]), int(dup_later[k])
            raise DuplicateLink(f"links {a} and {b} join the same nodes", element=(a, b))


def _check_node_on_link(nodes, links):
    if len(links) == 0 or len(nodes) < 3:
        return
    seg = nodes[links]
    boxes = np.concatenate([seg.min(axis=1), seg.max(axis=1)], axis=1)
    cand = points_in_boxes(nodes, boxes, pad=SNAP_TOL)
    if len(cand) == 0:
        return
    p, k = cand[:, 0], cand[:, 1]
    keep = (links[k, 0] != p) & (links[k, 1] != p)
    p, k = p[keep], k[keep]
    a, b = nodes[links[k, 0]], nodes[links[k, 1]]
    d = b - a
    dd = np.einsum("ij,ij->i", d, d)
    t = np.einsum("ij,ij->i", nodes[p] - a, d) / dd
    proj = a + np.clip(t, 0, 1)[:, None] * d
    dist = np.linalg.norm(nodes[p] - proj, axis=1)
    bad = np.flatnonzero(dist <= SNAP_TOL)
    if len(bad):
        order = np.lexsort((k[bad], p[bad]))
        i = bad[order[0]]
        raise NodeOnLinkInterior(
            f"node {p[i]} lies on the interior of link {k[i]}", element=(int(p[i]), int(k[i]))
        )


def _check_crossings(nodes, links):
    if len(links) < 2:
        return
    seg = nodes[links]
    boxes = np.concatenate([seg.min(axis=1), seg.max(axis=1)], axis=1)
    pairs = candidate_pairs(boxes)
    if len(pairs) == 0:
        return
    i, j = pairs[:, 0], pairs[:, 1]
    shared = (
        (links[i, 0] == links[j, 0]) | (links[i, 0] == links[j, 1])
        | (links[i, 1] == links[j, 0]) | (links[i, 1] == links[j, 1])
    )
    i, j = i[~shared], j[~shared]
    a, b = nodes[links[i, 0]], nodes[links[i, 1]]
    c, d = nodes[links[j, 0]], nodes[links[j, 1]]

    def orient(p, q, r):
        return (q[:, 0] - p[:, 0]) * (r[:, 1] - p[:, 1]) - (q[:, 1] - p[:, 1]) * (r[:, 0] - p[:, 0])

    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    # touching and collinear cases put a node on a link interior and are
    # reported by the node check, so only proper crossings remain here
    hit = np.flatnonzero((o1 * o2 < 0) & (o3 * o4 < 0))
    if len(hit):
        order = np.lexsort((j[hit], i[hit]))
        h = hit[order[0]]
        raise CrossingLinkInteriors(
            f"links {i[h]} and {j[h]} cross", element=(int(i[h]), int(j[h]))
        )


def _check_overlapping_directions(inc_ptr, inc_dlink, inc_angle):
    # two links leaving a node in the same direction overlap along a segment
    deg = np.diff(inc_ptr)
    if len(inc_angle) < 2:
        return
    node_of = np.repeat(np.arange(len(deg)), deg)
    nxt = np.arange(len(inc_angle)) + 1
    last = inc_ptr[1:][node_of] - 1
    nxt = np.where(np.arange(len(inc_angle)) == last, inc_ptr[:-1][node_of], nxt)
    gap = np.mod(inc_angle[nxt] - inc_angle, TWO_PI)
    gap = np.minimum(gap, TWO_PI - gap)
    bad = np.flatnonzero((gap < ANGLE_TOL) & (deg[node_of] >= 2))
    if len(bad):
        pairs = np.sort(np.stack([inc_dlink[bad] >> 1, inc_dlink[nxt[bad]] >> 1], axis=1), axis=1)
        k = np.lexsort((pairs[:, 1], pairs[:, 0]))[0]
        a, b = int(pairs[k, 0]), int(pairs[k, 1])
        raise CrossingLinkInteriors(f"links {a} and {b} overlap", element=(a, b))


def build_graph(nodes, links, validate: bool = True) -> GeometricGraph:
    """Build a graph from node coordinates and link index pairs.

    Parameters
    ----------
    nodes : array_like, shape (n, 2)
    links : array_like, shape (m, 2)
    validate : bool
        Run every invariant check. Internal callers that construct graphs
        known to be valid pass ``False``.

    Raises
    ------
    DuplicateNode, LoopLink, DuplicateLink, NodeOnLinkInterior, CrossingLinkInteriors
        With ``element`` set to the first offender.
    """
    nodes, links = _as_arrays(nodes, links)
    if validate:
        _check_nodes_and_links(nodes, links)
    inc_ptr, inc_dlink, inc_angle, dpos = _sorted_incidence(nodes, links)
    if validate:
        _check_node_on_link(nodes, links)
        _check_overlapping_directions(inc_ptr, inc_dlink, inc_angle)
        _check_crossings(nodes, links)
    nodes.setflags(write=False)
    links.setflags(write=False)
    return GeometricGraph(nodes, links, inc_ptr, inc_dlink, inc_angle, dpos)


def empty_graph() -> GeometricGraph:
    return build_graph(np.zeros((0, 2)), np.zeros((0, 2), dtype=np.int64))


@dataclass(frozen=True)
class VertexClass:
    valency: int
    pi_angle_count: int
    is_pi: bool
    is_double_pi: bool


def pi_angle_counts(g: GeometricGraph) -> np.ndarray:
    """Number of angular gaps equal to pi at every node."""
    deg = g.valency
    out = np.zeros(g.n_nodes, dtype=np.int64)
    if g.n_links == 0:
        return out
    node_of = np.repeat(np.arange(g.n_nodes), deg)
    idx = np.arange(len(g.inc_angle))
    last = g.inc_ptr[1:][node_of] - 1
    nxt = np.where(idx == last, g.inc_ptr[:-1][node_of], idx + 1)
    gap = np.mod(g.inc_angle[nxt] - g.inc_angle, TWO_PI)
    is_pi = (np.abs(gap - math.pi) < ANGLE_TOL) & (deg[node_of] >= 2)
    np.add.at(out, node_of[is_pi], 1)
    return out


def classify_vertex(g: GeometricGraph, node: int) -> VertexClass:
    """Valency and pi-angle classification of one node."""
    lo, hi = g.inc_ptr[node], g.inc_ptr[node + 1]
    k = int(hi - lo)
    count = 0
    if k >= 2:
        ang = g.inc_angle[lo:hi]
        gaps = np.diff(np.append(ang, ang[0] + TWO_PI))
        count = int(np.sum(np.abs(gaps - math.pi) < ANGLE_TOL))
    return VertexClass(k, count, count >= 1, k == 2 and count == 2)
