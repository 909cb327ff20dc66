"""First-exit walks, face circuits and open faces of a planar graph.

The walker keeps the face on its left and, at every node, leaves along the
link giving the largest anticlockwise turn. Going straight back scores
``-pi``, so it is chosen only at a 1-valent node. The closed walks split
the directed links into circuits. A circuit turning through ``+2*pi``
bounds a face from outside. One turning through ``-2*pi`` is the outer
boundary of a connected component, seen from the face that contains it.

The same machinery runs on window graphs, whose circle arcs are links with
an intrinsic turn. That is why the walker works on an internal
``WalkGraph`` rather than on ``GeometricGraph`` directly.
"""
from __future__ import annotations

import math
import weakref
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import AmbiguousContainment, NonClosingWalk, TurningSumAnomaly
from .geometry import ANGLE_TOL, SNAP_TOL, TWO_PI, points_in_boxes
from .graph import GeometricGraph

# a circuit's turning sum must be within this of +-2*pi
TURN_SUM_TOL = 1e-6


@dataclass(frozen=True)
class DirectedLink:
    """One traversal direction of a link.

    ``forward`` runs from ``links[link][0]`` to ``links[link][1]``. On
    window graphs, link indices at or beyond the number of straight links
    refer to circle arcs, and ``forward`` is the anticlockwise direction.
    """

    link: int
    forward: bool

    @property
    def id(self) -> int:
        return 2 * self.link + (0 if self.forward else 1)

    @classmethod
    def from_id(cls, d: int) -> "DirectedLink":
        return cls(int(d) >> 1, (int(d) & 1) == 0)

    def reversed(self) -> "DirectedLink":
        return DirectedLink(self.link, not self.forward)


@dataclass(eq=False)
class WalkGraph:
    """Directed-link tables used by the walker.

    Arrays indexed by directed-link id ``d`` (reverse is ``d ^ 1``).
    """

    points: np.ndarray
    tail: np.ndarray
    head: np.ndarray
    out_vec: np.ndarray  # unit tangent leaving the tail
    in_vec: np.ndarray  # unit tangent arriving at the head
    turn: np.ndarray  # intrinsic turning along the link itself
    length: np.ndarray
    area2: np.ndarray  # twice the signed-area (Green) contribution
    arc_dir: np.ndarray  # 0 straight, +1 anticlockwise arc, -1 clockwise arc
    circle: tuple | None = None  # (cx, cy, r) when arcs are present
    full_circle: bool = False  # add a stepless circuit for an arc-free circle
    next: np.ndarray = field(init=False, repr=False)
    zeta: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.next, self.zeta = _first_exit_tables(self)

    @property
    def n_dlinks(self) -> int:
        return len(self.tail)


def _first_exit_tables(wg: WalkGraph):
    D = len(wg.tail)
    n = len(wg.points)
    if D == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0)
    ang = np.mod(np.arctan2(wg.out_vec[:, 1], wg.out_vec[:, 0]), TWO_PI)
    order = np.lexsort((ang, wg.tail))
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(wg.tail, minlength=n), out=ptr[1:])
    pos = np.empty(D, dtype=np.int64)
    pos[order] = np.arange(D) - ptr[wg.tail[order]]
    rev = np.arange(D) ^ 1
    h = wg.head
    deg = ptr[h + 1] - ptr[h]
    # the exit just clockwise of the way back gives the largest left turn
    nxt = order[ptr[h] + np.mod(pos[rev] - 1, deg)]
    a, b = wg.in_vec, wg.out_vec[nxt]
    zeta = np.arctan2(a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0], a[:, 0] * b[:, 0] + a[:, 1] * b[:, 1])
    zeta[np.abs(zeta) < ANGLE_TOL] = 0.0
    zeta[nxt == rev] = -math.pi
    return nxt, zeta


def walk_graph(g: GeometricGraph) -> WalkGraph:
    """Walk tables of a straight-line graph (cached per graph object)."""
    wg = _WALK_CACHE.get(g)
    if wg is None:
        wg = _build_walk_graph(g)
        _WALK_CACHE[g] = wg
    return wg


_WALK_CACHE: "weakref.WeakKeyDictionary[GeometricGraph, WalkGraph]" = weakref.WeakKeyDictionary()


def _build_walk_graph(g: GeometricGraph) -> WalkGraph:
    tail, head = g.tails(), g.heads()
    p, q = g.nodes[tail], g.nodes[head]
    vec = q - p
    length = np.hypot(vec[:, 0], vec[:, 1])
    unit = vec / np.where(length > 0, length, 1.0)[:, None]
    area2 = p[:, 0] * q[:, 1] - p[:, 1] * q[:, 0]
    D = len(tail)
    return WalkGraph(
        points=g.nodes, tail=tail, head=head, out_vec=unit, in_vec=unit,
        turn=np.zeros(D), length=length, area2=area2, arc_dir=np.zeros(D, dtype=np.int8),
    )


@dataclass(eq=False)
class FaceCircuit:
    """One closed first-exit walk.

    ``turning_angles[i]`` is the turn made at the head of step ``i``; the
    last entry is the closing turn back onto the first step. The turning
    sum also includes the intrinsic turn of any arc steps.
    """

    dlinks: np.ndarray
    nodes: np.ndarray  # tail node of every step
    turning_angles: np.ndarray
    turning_sum: float
    link_count: int
    node_count: int
    corner_count: int
    side_count: int
    orientation: str
    length: float
    signed_area: float

    @property
    def steps(self) -> tuple[DirectedLink, ...]:
        return tuple(DirectedLink.from_id(d) for d in self.dlinks)

    @property
    def key(self) -> int:
        """Smallest directed-link id; synthetic circuits sort last."""
        return int(self.dlinks[0]) if len(self.dlinks) else np.iinfo(np.int64).max


@dataclass(eq=False)
class Face:
    """An open cell: outer circuit, hole circuits and enclosed isolated nodes."""

    outer: FaceCircuit
    holes: list
    isolated_nodes: list
    chi: int
    edge_count: int
    vertex_count: int
    side_count: int
    corner_count: int
    area: float
    perimeter: float

    @property
    def circuits(self) -> list:
        return [self.outer, *self.holes]


def _circuit(wg: WalkGraph, steps: np.ndarray) -> FaceCircuit:
    zeta = wg.zeta[steps]
    total = float(zeta.sum() + wg.turn[steps].sum())
    if abs(abs(total) - TWO_PI) > TURN_SUM_TOL:
        raise TurningSumAnomaly(
            f"circuit starting at directed link {int(steps[0])} turns through {total!r}"
        )
    corners = int(np.count_nonzero(zeta))
    return FaceCircuit(
        dlinks=steps,
        nodes=wg.tail[steps],
        turning_angles=zeta,
        turning_sum=total,
        link_count=len(steps),
        node_count=len(steps),
        corner_count=corners,
        side_count=corners,
        orientation="anticlockwise" if total > 0 else "clockwise",
        length=float(wg.length[steps].sum()),
        signed_area=0.5 * float(wg.area2[steps].sum()),
    )


def _full_circle_circuit(wg: WalkGraph) -> FaceCircuit:
    r = wg.circle[2]
    return FaceCircuit(
        dlinks=np.zeros(0, dtype=np.int64), nodes=np.zeros(0, dtype=np.int64),
        turning_angles=np.zeros(0), turning_sum=TWO_PI, link_count=0, node_count=0,
        corner_count=0, side_count=0, orientation="anticlockwise",
        length=TWO_PI * r, signed_area=math.pi * r * r,
    )


def circuits_of(wg: WalkGraph) -> list[FaceCircuit]:
    """All circuits of a walk graph, each starting at its smallest id."""
    D = wg.n_dlinks
    nxt = wg.next.tolist()
    seen = bytearray(D)
    out = []
    for s in range(D):
        if seen[s]:
            continue
        cyc = []
        d = s
        while not seen[d]:
            seen[d] = 1
            cyc.append(d)
            d = nxt[d]
        if d != s:
            raise NonClosingWalk(f"walk from directed link {s} re-entered at {d}")
        out.append(_circuit(wg, np.asarray(cyc, dtype=np.int64)))
    if wg.full_circle:
        out.append(_full_circle_circuit(wg))
    return out


def first_exit_step(g: GeometricGraph, entering: DirectedLink) -> tuple[DirectedLink, float]:
    """Exit chosen by the walker arriving along ``entering`` and its turn."""
    wg = walk_graph(g)
    d = entering.id
    if not 0 <= d < wg.n_dlinks:
        raise IndexError(f"no directed link {entering}")
    return DirectedLink.from_id(int(wg.next[d])), float(wg.zeta[d])


def extract_circuits(g: GeometricGraph) -> list[FaceCircuit]:
    """Every first-exit circuit of ``g``; each directed link lies in exactly one."""
    return circuits_of(walk_graph(g))


# ---------------------------------------------------------------- containment


def _circuit_bbox(wg: WalkGraph, c: FaceCircuit) -> np.ndarray:
    if len(c.dlinks) == 0 or np.any(wg.arc_dir[c.dlinks] != 0):
        cx, cy, r = wg.circle
        return np.array([cx - r, cy - r, cx + r, cy + r])
    pts = wg.points[c.nodes]
    return np.concatenate([pts.min(axis=0), pts.max(axis=0)])


def winding(wg: WalkGraph, c: FaceCircuit, pts: np.ndarray) -> np.ndarray:
    """Winding number of circuit ``c`` about each point (arc-aware).

    Raises AmbiguousContainment if a point is within ``SNAP_TOL`` of ``c``.
    """
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    if len(c.dlinks) == 0:
        cx, cy, r = wg.circle
        inside = np.hypot(pts[:, 0] - cx, pts[:, 1] - cy) < r - SNAP_TOL
        return inside.astype(np.int64)
    d = c.dlinks
    a = wg.points[wg.tail[d]][None, :, :] - pts[:, None, :]
    b = wg.points[wg.head[d]][None, :, :] - pts[:, None, :]
    arc = wg.arc_dir[d]
    straight = arc == 0
    if straight.any():
        sa, sb = a[:, straight], b[:, straight]
        ab = sb - sa
        ll = np.einsum("pki,pki->pk", ab, ab)
        t = np.clip(-np.einsum("pki,pki->pk", sa, ab) / np.where(ll > 0, ll, 1), 0, 1)
        near = np.hypot(*(sa + t[..., None] * ab).transpose(2, 0, 1))
        if np.any(near <= SNAP_TOL):
            raise AmbiguousContainment("containment test point lies on a circuit")
    cross = a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]
    dot = a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1]
    sub = np.arctan2(cross, dot)
    if (~straight).any():
        cx, cy, r = wg.circle
        rad = np.hypot(pts[:, 0] - cx, pts[:, 1] - cy)
        if np.any(np.abs(rad - r) <= SNAP_TOL):
            raise AmbiguousContainment("containment test point lies on the window circle")
        ang_a = np.arctan2(a[..., 1], a[..., 0])
        ang_b = np.arctan2(b[..., 1], b[..., 0])
        ccw = np.mod(ang_b - ang_a, TWO_PI)
        cw = np.mod(ang_a - ang_b, TWO_PI)
        loop = wg.tail[d] == wg.head[d]
        ccw = np.where(loop[None, :], TWO_PI, ccw)
        cw = np.where(loop[None, :], TWO_PI, cw)
        sub = np.where(arc[None, :] > 0, ccw, sub)
        sub = np.where(arc[None, :] < 0, -cw, sub)
    return np.rint(sub.sum(axis=1) / TWO_PI).astype(np.int64)


def _innermost(wg: WalkGraph, pos: list, pos_comp: np.ndarray, pts: np.ndarray, pt_comp: np.ndarray):
    """For each point, index into ``pos`` of the smallest containing circuit, or -1.

    Circuits from the point's own component (``pt_comp``) are skipped;
    pass ``-1`` to test against every circuit.
    """
    best = np.full(len(pts), -1, dtype=np.int64)
    if len(pts) == 0 or not pos:
        return best
    boxes = np.array([_circuit_bbox(wg, c) for c in pos])
    cand = points_in_boxes(pts, boxes, pad=SNAP_TOL)
    if len(cand) == 0:
        return best
    cand = cand[pos_comp[cand[:, 1]] != pt_comp[cand[:, 0]]]
    best_area = np.full(len(pts), np.inf)
    order = np.argsort(cand[:, 1], kind="stable")
    cand = cand[order]
    splits = np.flatnonzero(np.diff(cand[:, 1])) + 1
    for grp in np.split(cand, splits):
        if len(grp) == 0:
            continue
        ci = int(grp[0, 1])
        c = pos[ci]
        w = winding(wg, c, pts[grp[:, 0]])
        for p, wn in zip(grp[:, 0], w):
            if wn != 0 and c.signed_area < best_area[p]:
                best_area[p] = c.signed_area
                best[p] = ci
    return best


@dataclass(eq=False)
class Partition:
    """Faces of a graph plus what belongs to the unbounded region."""

    walk: WalkGraph
    circuits: list
    faces: list
    unbounded_circuits: list
    unbounded_isolated: list
    component: np.ndarray  # component label per node
    _pos: list = field(default_factory=list, repr=False)
    _pos_face: np.ndarray = field(default=None, repr=False)

    def locate(self, pts) -> np.ndarray:
        """Face index containing each point, ``-1`` for the unbounded region.

        A point inside a hole that is itself subdivided lands in the inner
        face; points exactly on the frame are undefined.
        """
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        if not self._pos:
            return np.full(len(pts), -1, dtype=np.int64)
        comp = np.full(len(self._pos), -2, dtype=np.int64)
        idx = _innermost(self.walk, self._pos, comp, pts, np.full(len(pts), -1, dtype=np.int64))
        return np.where(idx >= 0, self._pos_face[np.maximum(idx, 0)], -1)

    def dlink_faces(self) -> np.ndarray:
        """Face index on the left of each directed link, ``-1`` for the unbounded region."""
        out = np.full(self.walk.n_dlinks, -1, dtype=np.int64)
        for fi, f in enumerate(self.faces):
            for c in f.circuits:
                out[c.dlinks] = fi
        return out


def _components(wg: WalkGraph) -> np.ndarray:
    n = len(wg.points)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    adj = coo_matrix((np.ones(len(wg.tail)), (wg.tail, wg.head)), shape=(n, n))
    return connected_components(adj, directed=False)[1]


def _make_face(outer: FaceCircuit, holes: list, iso: list) -> Face:
    chi = 1 - len(holes) - len(iso)
    turn_chi = (outer.turning_sum + sum(h.turning_sum for h in holes)) / TWO_PI - len(iso)
    if abs(turn_chi - chi) > 1e-6:
        raise TurningSumAnomaly(f"Euler Entity by turning angles {turn_chi} differs from {chi}")
    circ = [outer, *holes]
    return Face(
        outer=outer,
        holes=holes,
        isolated_nodes=iso,
        chi=chi,
        edge_count=sum(c.link_count for c in circ),
        vertex_count=sum(c.node_count for c in circ) + len(iso),
        side_count=sum(c.side_count for c in circ),
        corner_count=sum(c.corner_count for c in circ),
        area=outer.signed_area + sum(h.signed_area for h in holes),
        perimeter=sum(c.length for c in circ),
    )


def partition_walk(wg: WalkGraph, isolated: np.ndarray | None = None) -> Partition:
    """Assemble the circuits of ``wg`` into faces.

    ``isolated`` lists the 0-valent nodes; by default every node without an
    outgoing directed link.
    """
    circuits = circuits_of(wg)
    comp = _components(wg)
    if isolated is None:
        has = np.zeros(len(wg.points), dtype=bool)
        has[wg.tail] = True
        isolated = np.flatnonzero(~has)
    isolated = np.asarray(isolated, dtype=np.int64)

    pos = [c for c in circuits if c.turning_sum > 0]
    neg = [c for c in circuits if c.turning_sum < 0]
    # the synthetic circle circuit gets its own component label
    pos_comp = np.array([comp[c.nodes[0]] if len(c.nodes) else -3 for c in pos], dtype=np.int64)

    q_pts = np.concatenate(
        [wg.points[[c.nodes[0] for c in neg]].reshape(-1, 2), wg.points[isolated].reshape(-1, 2)]
    )
    q_comp = np.concatenate(
        [np.array([comp[c.nodes[0]] for c in neg], dtype=np.int64), comp[isolated]]
    ) if len(q_pts) else np.zeros(0, dtype=np.int64)
    owner = _innermost(wg, pos, pos_comp, q_pts, q_comp)

    holes = [[] for _ in pos]
    isos = [[] for _ in pos]
    unb_c, unb_i = [], []
    for k, c in enumerate(neg):
        (holes[owner[k]] if owner[k] >= 0 else unb_c).append(c)
    for k, v in enumerate(isolated.tolist()):
        o = owner[len(neg) + k]
        (isos[o] if o >= 0 else unb_i).append(v)

    order = sorted(range(len(pos)), key=lambda i: pos[i].key)
    faces = []
    pos_face = np.empty(len(pos), dtype=np.int64)
    for fi, i in enumerate(order):
        holes[i].sort(key=lambda c: c.key)
        faces.append(_make_face(pos[i], holes[i], sorted(isos[i])))
        pos_face[i] = fi
    part = Partition(wg, circuits, faces, unb_c, unb_i, comp)
    part._pos = pos
    part._pos_face = pos_face
    return part


_PART_CACHE: "weakref.WeakKeyDictionary[GeometricGraph, Partition]" = weakref.WeakKeyDictionary()


def partition(g: GeometricGraph) -> Partition:
    """Faces of ``g`` together with the unbounded-region bookkeeping (cached)."""
    p = _PART_CACHE.get(g)
    if p is None:
        p = partition_walk(walk_graph(g))
        _PART_CACHE[g] = p
    return p


def assemble_faces(g: GeometricGraph, circuits: list | None = None) -> list[Face]:
    """Bounded open faces of ``g``, ordered by their outer circuit's smallest id.

    ``circuits`` may be passed for symmetry with :func:`extract_circuits`;
    the walk is deterministic, so the same circuits are rebuilt if omitted.
    """
    part = partition(g)
    if circuits is not None:
        keys = sorted(c.key for c in circuits)
        if keys != sorted(c.key for c in part.circuits):
            raise ValueError("circuits do not belong to this graph")
    return part.faces


def face_metrics(face: Face) -> dict:
    """Counts, area, perimeter and per-circuit breakdown of one face."""
    turn_chi = sum(c.turning_sum for c in face.circuits) / TWO_PI - len(face.isolated_nodes)
    if round(turn_chi) != face.chi or abs(turn_chi - face.chi) > 1e-6:
        raise TurningSumAnomaly(f"turning-angle Euler Entity {turn_chi} != {face.chi}")
    return {
        "chi": face.chi,
        "E": face.edge_count,
        "V": face.vertex_count,
        "S": face.side_count,
        "C": face.corner_count,
        "area": face.area,
        "perimeter": face.perimeter,
        "n_holes": len(face.holes),
        "n_isolated": len(face.isolated_nodes),
        "circuits": [
            {
                "links": c.link_count,
                "nodes": c.node_count,
                "corners": c.corner_count,
                "turning_sum": c.turning_sum,
                "orientation": c.orientation,
            }
            for c in face.circuits
        ],
    }


def side_membership_pi_check(g: GeometricGraph, faces: list | None = None) -> np.ndarray:
    """Per node, the number of face-side interiors passing through it.

    A visit with zero turn means the node sits inside a straight side of
    the face on the walker's left. The unbounded region's circuits are
    included, so a straight path's middle node counts twice.
    """
    part = partition(g)
    if faces is None:
        faces = part.faces
    circ = [c for f in faces for c in f.circuits] + list(part.unbounded_circuits)
    out = np.zeros(g.n_nodes, dtype=np.int64)
    wg = part.walk
    for c in circ:
        straight = c.turning_angles == 0
        np.add.at(out, wg.head[c.dlinks[straight]], 1)
    return out


def face_sides(wg: WalkGraph, c: FaceCircuit) -> list[tuple[float, np.ndarray]]:
    """Maximal straight runs of a straight-link circuit as ``(length, midpoint)``."""
    z = c.turning_angles
    k = len(z)
    if k == 0:
        return []
    corners = np.flatnonzero(z != 0)
    start = (corners[0] + 1) % k
    sides = []
    length = 0.0
    first = None
    for step in range(k):
        i = (start + step) % k
        d = c.dlinks[i]
        if first is None:
            first = wg.tail[d]
        length += wg.length[d]
        if z[i] != 0:
            mid = 0.5 * (wg.points[first] + wg.points[wg.head[d]])
            sides.append((length, mid))
            length, first = 0.0, None
    return sides


def reference_point(wg: WalkGraph, face: Face, rel_tol: float = 1e-9) -> np.ndarray:
    """Midpoint of the face's longest side.

    Near ties (relative ``rel_tol``) go to the lexicographically smallest
    midpoint.
    """
    sides = [s for c in face.circuits for s in face_sides(wg, c)]
    longest = max(s[0] for s in sides)
    tied = [s[1] for s in sides if s[0] >= longest * (1 - rel_tol)]
    return min(tied, key=lambda m: (m[0], m[1]))
