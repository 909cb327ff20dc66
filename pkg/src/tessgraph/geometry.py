"""Planar geometry primitives shared by the graph, window and face code."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import shapely

# Points closer than this are the same node.
SNAP_TOL = 1e-9
# Distinct candidate nodes closer than this (but farther than SNAP_TOL) are
# ambiguous geometry and rejected.
MERGE_TOL = 1e-7
# Angular tolerance for collinearity and pi-gap tests, in radians.
ANGLE_TOL = 1e-9

TWO_PI = 2.0 * math.pi


class Point2(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class Window:
    """Closed disc used as the observation window."""

    center: Point2
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", Point2(float(self.center[0]), float(self.center[1])))
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ValueError(f"window radius must be positive, got {self.radius!r}")

    @property
    def area(self) -> float:
        return math.pi * self.radius**2

    def contains(self, pts) -> np.ndarray:
        """Closed-disc membership for an (n, 2) array of points."""
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        d = np.hypot(pts[:, 0] - self.center.x, pts[:, 1] - self.center.y)
        return d <= self.radius


def cross2(ax, ay, bx, by):
    return ax * by - ay * bx


def wrap_angle(a):
    """Map angles into [0, 2*pi)."""
    out = np.mod(a, TWO_PI)
    return np.where(out >= TWO_PI, 0.0, out)


def point_segment_distance(p, a, b) -> np.ndarray:
    """Distance from points ``p`` to segments ``a``-``b`` (broadcasting)."""
    p = np.asarray(p, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = b - a
    dd = np.einsum("...i,...i->...", d, d)
    t = np.einsum("...i,...i->...", p - a, d) / np.where(dd > 0, dd, 1.0)
    t = np.clip(t, 0.0, 1.0)
    proj = a + t[..., None] * d
    return np.hypot(*(p - proj).T) if p.ndim == 1 and a.ndim == 1 else np.linalg.norm(p - proj, axis=-1)


def candidate_pairs(boxes: np.ndarray, pad: float = 0.0) -> np.ndarray:
    """Index pairs ``(i, j)``, ``i < j``, whose padded bounding boxes overlap.

    ``boxes`` is ``(n, 4)`` as ``xmin, ymin, xmax, ymax``.
    """
    boxes = np.asarray(boxes, dtype=float).reshape(-1, 4)
    n = len(boxes)
    if n < 2:
        return np.empty((0, 2), dtype=np.int64)
    if n <= 64:
        i, j = np.triu_indices(n, k=1)
        keep = (
            (boxes[i, 0] <= boxes[j, 2] + 2 * pad)
            & (boxes[j, 0] <= boxes[i, 2] + 2 * pad)
            & (boxes[i, 1] <= boxes[j, 3] + 2 * pad)
            & (boxes[j, 1] <= boxes[i, 3] + 2 * pad)
        )
        return np.stack([i[keep], j[keep]], axis=1).astype(np.int64)
    geoms = shapely.box(boxes[:, 0] - pad, boxes[:, 1] - pad, boxes[:, 2] + pad, boxes[:, 3] + pad)
    tree = shapely.STRtree(geoms)
    a, b = tree.query(geoms)
    keep = a < b
    pairs = np.stack([a[keep], b[keep]], axis=1).astype(np.int64)
    order = np.lexsort((pairs[:, 1], pairs[:, 0]))
    return pairs[order]


def points_in_boxes(points: np.ndarray, boxes: np.ndarray, pad: float = 0.0) -> np.ndarray:
    """Pairs ``(point index, box index)`` with the point inside the padded box."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    boxes = np.asarray(boxes, dtype=float).reshape(-1, 4)
    if len(points) == 0 or len(boxes) == 0:
        return np.empty((0, 2), dtype=np.int64)
    if len(points) * len(boxes) <= 4096:
        pi, bi = np.meshgrid(np.arange(len(points)), np.arange(len(boxes)), indexing="ij")
        pi, bi = pi.ravel(), bi.ravel()
        x, y = points[pi, 0], points[pi, 1]
        keep = (
            (x >= boxes[bi, 0] - pad) & (x <= boxes[bi, 2] + pad)
            & (y >= boxes[bi, 1] - pad) & (y <= boxes[bi, 3] + pad)
        )
        return np.stack([pi[keep], bi[keep]], axis=1).astype(np.int64)
    geoms = shapely.box(boxes[:, 0] - pad, boxes[:, 1] - pad, boxes[:, 2] + pad, boxes[:, 3] + pad)
    tree = shapely.STRtree(geoms)
    p, b = tree.query(shapely.points(points), predicate="intersects")
    return np.stack([p, b], axis=1).astype(np.int64)


def winding_numbers(ring: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Winding number of the closed polyline ``ring`` about each point.

    ``ring`` lists the vertices once (the closing edge is implicit) and may be
    non-simple, e.g. with doubly traversed dangling edges. Points on the
    ring get an arbitrary answer; callers screen them with a distance test.
    """
    ring = np.asarray(ring, dtype=float)
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    a = ring
    b = np.roll(ring, -1, axis=0)
    px = pts[:, 0][:, None]
    py = pts[:, 1][:, None]
    ax, ay = a[:, 0][None, :], a[:, 1][None, :]
    bx, by = b[:, 0][None, :], b[:, 1][None, :]
    is_left = (bx - ax) * (py - ay) - (px - ax) * (by - ay)
    up = (ay <= py) & (by > py) & (is_left > 0)
    down = (ay > py) & (by <= py) & (is_left < 0)
    return up.sum(axis=1) - down.sum(axis=1)


def shoelace(ring: np.ndarray) -> float:
    """Signed area of a closed polyline (anticlockwise positive)."""
    ring = np.asarray(ring, dtype=float)
    if len(ring) < 3:
        return 0.0
    x, y = ring[:, 0], ring[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))
