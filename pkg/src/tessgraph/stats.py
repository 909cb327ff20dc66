"""Counting functionals in a window, exact identities and mean-value estimators.

Two kinds of sample are supported. A disc window of a (random) graph gives
Monte Carlo estimates with truncated cells on the circle. A fundamental
block of a periodic graph gives exact per-period values. There every
vertex, edge midpoint and cell reference point is counted once over a
half-open block, and count ratios are kept as ``Fraction``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np
import shapely

from .errors import EmptyWindow
from .faces import partition, reference_point
from .geometry import SNAP_TOL, Window
from .graph import GeometricGraph, pi_angle_counts
from .window import WindowGraph, is_truncated, window_cells

# relative tolerance for the length and area identities
GEOM_REL_TOL = 1e-6
# |theta - 2| below which the linkage formulae are skipped
THETA2_TOL_EXACT = 1e-12
THETA2_TOL_MC = 0.05


@dataclass
class WindowCounts:
    """Every counting functional of one window (disc or periodic block).

    ``n_verts`` and ``n_pi_verts`` map valency to counts. For a periodic
    block ``r`` is ``None`` and there are no boundary hits. The constant in
    the Euler-sum identity becomes 0 there, because the block tiles a torus.
    """

    r: float | None
    area: float
    n_verts: dict
    n_pi_verts: dict
    n_edges: int
    n_edges_star: int
    n_cells: int
    ell: float
    M: int
    M_prime: int
    M_boundary: int
    M_boundary_1: int
    M_boundary_2: int
    N: int
    N_prime: int
    script_A: float
    script_L: float
    script_V: int
    script_E: int
    script_S: int
    script_C: int
    script_X: int
    periodic: bool = False

    @property
    def n_total(self) -> int:
        return sum(self.n_verts.values())

    @property
    def valency_sum(self) -> int:
        return sum(k * v for k, v in self.n_verts.items())


def _hist(values: np.ndarray) -> dict:
    if len(values) == 0:
        return {}
    c = np.bincount(values)
    return {int(k): int(v) for k, v in enumerate(c) if v}


def _vertex_tallies(g: GeometricGraph, mask: np.ndarray):
    deg = g.valency[mask]
    pic = pi_angle_counts(g)[mask]
    n_verts = _hist(deg)
    n_pi = _hist(deg[pic > 0])
    n_pi = {k: v for k, v in n_pi.items() if k >= 2}
    return n_verts, n_pi


def _sum_cells(cells):
    return dict(
        N=len(cells),
        script_A=float(sum(f.area for f in cells)),
        script_L=float(sum(f.perimeter for f in cells)),
        script_V=sum(f.vertex_count for f in cells),
        script_E=sum(f.edge_count for f in cells),
        script_S=sum(f.side_count for f in cells),
        script_C=sum(f.corner_count for f in cells),
        script_X=sum(f.chi for f in cells),
    )


def source_reference_points(g: GeometricGraph, faces: list | None = None) -> np.ndarray:
    """Longest-side midpoint of every bounded face of ``g``."""
    part = partition(g)
    faces = part.faces if faces is None else faces
    if not faces:
        return np.zeros((0, 2))
    return np.array([reference_point(part.walk, f) for f in faces])


def window_counts(wg: WindowGraph, faces: list | None = None, truncated_faces: list | None = None) -> WindowCounts:
    """All counting functionals of a disc window.

    Parameters
    ----------
    wg : WindowGraph
    faces : list of Face, optional
        Bounded faces of the source graph, used for cell reference points.
    truncated_faces : list of Face, optional
        Cell-parts of ``wg`` (entire and truncated).
    """
    g = wg.source
    w = wg.window
    r = float(w.radius)
    inside = w.contains(g.nodes) if g.n_nodes else np.zeros(0, dtype=bool)
    n_verts, n_pi = _vertex_tallies(g, inside)
    mids = 0.5 * (g.nodes[g.links[:, 0]] + g.nodes[g.links[:, 1]]) if g.n_links else np.zeros((0, 2))
    n_edges = int(np.count_nonzero(w.contains(mids))) if len(mids) else 0
    ends_in = inside[g.links].sum() if g.n_links else 0
    refs = source_reference_points(g, faces)
    n_cells = int(np.count_nonzero(w.contains(refs))) if len(refs) else 0
    cells = window_cells(wg) if truncated_faces is None else truncated_faces
    sums = _sum_cells(cells)
    return WindowCounts(
        r=r,
        area=w.area,
        n_verts=n_verts,
        n_pi_verts=n_pi,
        n_edges=n_edges,
        n_edges_star=int(ends_in),
        n_cells=n_cells,
        ell=wg.interior.total_length(),
        M=wg.M,
        M_prime=wg.M_prime,
        M_boundary=wg.M_boundary,
        M_boundary_1=wg.M_boundary_1,
        M_boundary_2=wg.M_boundary_2,
        N_prime=sum(1 for f in cells if not is_truncated(wg, f)),
        **sums,
    )


def _in_block(pts: np.ndarray, origin, period) -> np.ndarray:
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    rel = (pts - np.asarray(origin, dtype=float)) / np.asarray(period, dtype=float)
    return np.all((rel >= 0) & (rel < 1), axis=1)


def block_counts(g: GeometricGraph, origin, period, faces: list | None = None) -> WindowCounts:
    """Per-period counts of a periodic graph over a half-open block.

    The patch ``g`` must extend far enough around the block that every
    cell whose reference point lies in the block is complete.
    """
    inside = _in_block(g.nodes, origin, period)
    n_verts, n_pi = _vertex_tallies(g, inside)
    mids = 0.5 * (g.nodes[g.links[:, 0]] + g.nodes[g.links[:, 1]])
    edge_in = _in_block(mids, origin, period)
    part = partition(g)
    faces = part.faces if faces is None else faces
    refs = source_reference_points(g, faces)
    cell_in = _in_block(refs, origin, period)
    cells = [f for f, k in zip(faces, cell_in) if k]
    m = int(np.count_nonzero(edge_in))
    return WindowCounts(
        r=None,
        area=float(period[0]) * float(period[1]),
        n_verts=n_verts,
        n_pi_verts=n_pi,
        n_edges=m,
        n_edges_star=int(g.valency[inside].sum()),
        n_cells=len(cells),
        ell=float(g.link_lengths()[edge_in].sum()),
        M=m, M_prime=m, M_boundary=0, M_boundary_1=0, M_boundary_2=0,
        N_prime=len(cells),
        periodic=True,
        **_sum_cells(cells),
    )


def block_faces(g: GeometricGraph, origin, period) -> list:
    """Faces whose reference point lies in the half-open block."""
    part = partition(g)
    refs = source_reference_points(g)
    keep = _in_block(refs, origin, period)
    return [f for f, k in zip(part.faces, keep) if k]


@dataclass
class IdentityCheck:
    name: str
    lhs: float
    rhs: float
    ok: bool


def check_identities(wc: WindowCounts) -> list[IdentityCheck]:
    """Exact window identities: edge ends, cell-part sums, Euler sum, area, perimeter."""
    vsum = wc.valency_sum
    n = wc.n_total
    n0 = wc.n_verts.get(0, 0)
    pi2 = wc.n_pi_verts.get(2, 0)
    pi3 = sum(v for k, v in wc.n_pi_verts.items() if k >= 3)
    euler_const = 0 if wc.periodic else 1
    out = [
        ("edge_ends", wc.n_edges_star, vsum),
        ("boundary_hits", wc.M_boundary, wc.M_boundary_1 + 2 * wc.M_boundary_2),
        ("cut_edges", wc.M - wc.M_prime, wc.M_boundary_1 + wc.M_boundary_2),
        ("script_E", wc.script_E, 4 * wc.M - vsum),
        ("script_C", wc.script_C, wc.script_E - 2 * pi2 - pi3),
        ("script_V", wc.script_V, wc.script_E + n0),
        ("script_S", wc.script_S, wc.script_C),
        ("script_X", wc.script_X, wc.M - n + euler_const),
    ]
    checks = [IdentityCheck(a, b, c, b == c) for a, b, c in out]
    circle = 0.0 if wc.periodic else 2 * math.pi * wc.r
    for name, lhs, rhs in (
        ("script_A", wc.script_A, wc.area),
        ("script_L", wc.script_L, 2 * wc.ell + circle),
    ):
        ok = abs(lhs - rhs) <= GEOM_REL_TOL * max(abs(rhs), 1e-300)
        checks.append(IdentityCheck(name, lhs, rhs, ok))
    return checks


def identities_hold(wc: WindowCounts) -> bool:
    return all(c.ok for c in check_identities(wc))


@dataclass
class EstimatorReport:
    """Typical-vertex, typical-edge and typical-cell estimates from one window.

    Count ratios are ``Fraction`` for periodic blocks and ``float``
    otherwise. Starred values are ``None`` when every vertex is 2-valent.
    """

    alpha: float
    lambda_verts: float
    lambda_verts_k: dict
    lambda_pi_verts_k: dict
    lambda_edges: float
    lambda_cells: float
    theta: float
    phi: float
    xi: float
    nu: float
    mu_A: float
    mu_L: float
    mu_chi: float
    mu_V: float
    mu_E: float
    mu_S: float
    theta_star: float | None
    xi_star: float | None
    phi_star: float | None
    mu_V_star: float | None
    mu_C_star: float | None
    recip_area: float | None = None
    r: float | None = None
    seed: int | None = None
    exact: bool = False

    def to_dict(self) -> dict:
        def conv(v):
            if isinstance(v, Fraction):
                return float(v)
            if isinstance(v, dict):
                return {str(k): conv(x) for k, x in v.items()}
            return v

        d = {k: conv(v) for k, v in asdict(self).items()}
        d.pop("exact")
        return d


def estimate(wc: WindowCounts, recip_area: float | None = None, seed: int | None = None) -> EstimatorReport:
    """Ratio estimators of all typical-object means.

    Raises
    ------
    EmptyWindow
        No cell-parts, no vertices or no edge-parts in the window.
    """
    n = wc.n_total
    if wc.N == 0 or n == 0 or wc.M == 0:
        raise EmptyWindow(f"window has N={wc.N}, vertices={n}, edge-parts={wc.M}")
    exact = wc.periodic
    ratio = Fraction if exact else (lambda a, b: a / b)
    area = wc.area
    vsum = wc.valency_sum
    n0 = wc.n_verts.get(0, 0)
    n2 = wc.n_verts.get(2, 0)
    pi2 = wc.n_pi_verts.get(2, 0)
    pi3 = sum(v for k, v in wc.n_pi_verts.items() if k >= 3)
    N = wc.N
    den = n - n2
    return EstimatorReport(
        alpha=wc.ell / area,
        lambda_verts=n / area,
        lambda_verts_k={k: v / area for k, v in sorted(wc.n_verts.items())},
        lambda_pi_verts_k={k: v / area for k, v in sorted(wc.n_pi_verts.items())},
        lambda_edges=wc.n_edges / area,
        lambda_cells=wc.n_cells / area,
        theta=ratio(vsum, n),
        phi=ratio(pi3 + 2 * pi2, n),
        xi=ratio(n0, n),
        nu=wc.ell / wc.M,
        mu_A=wc.script_A / N,
        mu_L=wc.script_L / N,
        mu_chi=ratio(wc.script_X, N),
        mu_V=ratio(wc.script_V, N),
        mu_E=ratio(wc.script_E, N),
        mu_S=ratio(wc.script_S, N),
        theta_star=ratio(vsum - 2 * n2, den) if den else None,
        xi_star=ratio(n0, den) if den else None,
        phi_star=ratio(pi3, den) if den else None,
        mu_V_star=ratio(wc.script_V - 2 * n2, N),
        mu_C_star=ratio(wc.script_C + 2 * pi2 - 2 * n2, N),
        recip_area=recip_area,
        r=wc.r,
        seed=seed,
        exact=exact,
    )


def _rel(lhs, rhs) -> float:
    scale = max(abs(float(lhs)), abs(float(rhs)))
    if scale == 0:
        return 0.0
    diff = lhs - rhs
    return abs(float(diff)) / scale


def validate_formulas(er: EstimatorReport) -> dict:
    """Relative residuals of the mean-value relations, keyed by relation tag.

    Each entry holds ``lhs``, ``rhs``, ``residual`` and ``status`` (``ok``
    or ``skipped``). Near ``theta == 2`` the linkage formulae are skipped
    and ``theta2`` records whether ``theta == 2`` and ``mu_chi == 0``
    agree.
    """
    tol = THETA2_TOL_EXACT if er.exact else THETA2_TOL_MC
    out = {}

    def put(tag, lhs, rhs):
        out[tag] = {"lhs": lhs, "rhs": rhs, "residual": _rel(lhs, rhs), "status": "ok"}

    def skip(tag, why):
        out[tag] = {"lhs": None, "rhs": None, "residual": None, "status": "skipped", "reason": why}

    th, chi = er.theta, er.mu_chi
    if abs(float(th) - 2) < tol:
        for tag in ("eq29", "eq30", "eq31"):
            skip(tag, "theta == 2")
        chi_tol = 1e-12 if er.exact else 0.05
        out["theta2"] = {
            "theta": th,
            "mu_chi": chi,
            "status": "ok" if abs(float(chi)) < chi_tol else "failed",
        }
    else:
        put("eq29", er.mu_E, 2 * th * chi / (th - 2))
        put("eq30", er.mu_S, 2 * (th - er.phi) * chi / (th - 2))
        put("eq31", er.mu_V, 2 * (th + er.xi) * chi / (th - 2))
    put("eq18", er.lambda_edges, er.alpha / er.nu)
    put("edges_valency", 2 * er.lambda_edges, er.lambda_verts * float(th))
    put("sec13", er.lambda_edges, er.lambda_cells * float(chi) + er.lambda_verts)
    if er.recip_area is None or not er.lambda_cells:
        skip("eq26", "no reciprocal-area estimate")
    else:
        # mean cell area from reference-point counting; the cell-part ratio
        # mu_A is biased low on a finite disc and is reported alongside
        put("eq26", er.recip_area / er.lambda_cells, 1.0)
        out["eq26"]["product_with_mu_A"] = er.mu_A * er.recip_area
    ts = er.theta_star
    if ts is None or abs(float(ts) - 2) < tol:
        skip("eq35", "theta* undefined or equal to 2")
        skip("muCstar", "theta* undefined or equal to 2")
    else:
        put("eq35", er.mu_V_star, 2 * (ts + er.xi_star) * chi / (ts - 2))
        put("muCstar", er.mu_C_star, 2 * (ts - er.phi_star) * chi / (ts - 2))
    return out


def reciprocal_area_estimate(faces, window: Window, sample_count: int, seed, graph: GeometricGraph | None = None) -> float:
    """Mean of ``1/A`` over uniform points of the window.

    ``A`` is the area of the face containing the point. Points within
    snap tolerance of a link are resampled. Points in the unbounded region
    contribute 0 (an unbounded cell has infinite area).

    ``faces`` may be a ``GeometricGraph`` (its faces are used) or the face
    list of ``graph``.
    """
    if isinstance(faces, GeometricGraph):
        graph, faces = faces, None
    if graph is None:
        raise ValueError("graph is required to locate points")
    part = partition(graph)
    areas = np.array([f.area for f in part.faces])
    rng = np.random.default_rng(seed)
    cx, cy = window.center
    r = window.radius
    seg = graph.segments()
    tree = shapely.STRtree(shapely.linestrings(seg)) if len(seg) else None
    got = np.zeros(0)
    while len(got) < sample_count:
        k = sample_count - len(got)
        rad = r * np.sqrt(rng.random(k))
        ang = 2 * math.pi * rng.random(k)
        pts = np.stack([cx + rad * np.cos(ang), cy + rad * np.sin(ang)], axis=1)
        if tree is not None:
            hit, _ = tree.query(shapely.points(pts), predicate="dwithin", distance=SNAP_TOL)
            pts = np.delete(pts, np.unique(hit), axis=0)
        idx = part.locate(pts)
        inv = np.where(idx >= 0, 1.0 / areas[np.maximum(idx, 0)] if len(areas) else 0.0, 0.0)
        got = np.concatenate([got, inv])
    return float(got.mean())


def reciprocal_area_integral(wg: WindowGraph) -> float:
    """Exact mean of ``1/A`` over the window disc.

    Each cell-part contributes its area divided by the area of the whole
    source cell it belongs to, so no sampling is involved. Cell-parts in
    the unbounded region contribute 0.
    """
    src = partition(wg.source)
    left = src.dlink_faces()
    areas = np.array([f.area for f in src.faces])
    n_straight = 2 * wg.interior.n_links
    total = 0.0
    for f in window_cells(wg):
        d = next((int(x) for c in f.circuits for x in c.dlinks if x < n_straight), None)
        if d is None:
            # no edge-part bounds this cell-part: it is the whole disc
            fi = int(src.locate(np.asarray(wg.window.center, dtype=float))[0])
        else:
            fi = int(left[2 * wg.link_source[d >> 1] + (d & 1)])
        if fi >= 0:
            total += f.area / areas[fi]
    return total / wg.window.area


def cell_union_stats(faces, grouping) -> dict:
    """Mean Euler Entity, edge- and side-count of cell-unions.

    ``grouping`` maps each face to a hashable group id. It can be a
    callable, a mapping keyed by face position, or a sequence aligned with
    ``faces``. Union counts are sums over member cells.
    """
    faces = list(faces)
    if callable(grouping):
        gid = [grouping(f) for f in faces]
    elif isinstance(grouping, Mapping):
        gid = [grouping[i] for i in range(len(faces))]
    else:
        gid = list(grouping)
    groups: dict = {}
    for f, k in zip(faces, gid):
        s = groups.setdefault(k, [0, 0, 0])
        s[0] += f.chi
        s[1] += f.edge_count
        s[2] += f.side_count
    ng = len(groups)
    if ng == 0:
        raise EmptyWindow("no cells to group")
    tot = np.array(list(groups.values())).sum(axis=0)
    return {
        "bold_mu_chi": Fraction(int(tot[0]), ng),
        "bold_mu_E": Fraction(int(tot[1]), ng),
        "bold_mu_S": Fraction(int(tot[2]), ng),
        "n_groups": ng,
        "groups": {k: {"chi": v[0], "E": v[1], "S": v[2]} for k, v in groups.items()},
    }


def edge_parts_in_disc(g: GeometricGraph, centers: np.ndarray, y: float) -> np.ndarray:
    """Number of links meeting each closed disc of radius ``y``."""
    centers = np.asarray(centers, dtype=float).reshape(-1, 2)
    if g.n_links == 0:
        return np.zeros(len(centers), dtype=np.int64)
    tree = shapely.STRtree(shapely.linestrings(g.segments()))
    pi, _ = tree.query(shapely.points(centers), predicate="dwithin", distance=y)
    return np.bincount(pi, minlength=len(centers))


def small_disc_edge_check(g: GeometricGraph, window: Window, er: EstimatorReport, y: float = 1.0,
               n_centers: int = 100, seed=None) -> tuple[float, float]:
    """Mean edge-part count in small discs versus its intensity prediction.

    Centres are uniform in the disc of radius ``r - y`` so every small
    disc lies inside the window. Returns ``(empirical mean, predicted)``.
    """
    rng = np.random.default_rng(seed)
    rr = window.radius - y
    rad = rr * np.sqrt(rng.random(n_centers))
    ang = 2 * math.pi * rng.random(n_centers)
    cx, cy = window.center
    centers = np.stack([cx + rad * np.cos(ang), cy + rad * np.sin(ang)], axis=1)
    counts = edge_parts_in_disc(g, centers, y)
    vsum_int = sum(k * v for k, v in er.lambda_verts_k.items())
    predicted = 2 * y * er.alpha + 0.5 * math.pi * y * y * float(vsum_int)
    return float(counts.mean()), float(predicted)


def euler_terms(g: GeometricGraph) -> dict:
    """Node, link and Euler-sum counts of a finite graph.

    ``outer_components`` counts components lying in the unbounded region
    (isolated nodes included). The identity ``n - l + X`` equals it in
    general, and equals 1 when a single component is outermost.
    """
    part = partition(g)
    X = sum(f.chi for f in part.faces)
    outer = len(part.unbounded_circuits) + len(part.unbounded_isolated)
    return {"n": g.n_nodes, "l": g.n_links, "X": X, "outer_components": outer,
            "euler": g.n_nodes - g.n_links + X}


def window_euler_terms(wg: WindowGraph) -> dict:
    """Euler-sum terms of the finite window graph: edge-parts plus circle arcs."""
    cells = window_cells(wg)
    arcs = [a for a in wg.arcs if a.start >= 0]
    n = wg.interior.n_nodes
    l = wg.interior.n_links + len(arcs)
    X = sum(f.chi for f in cells)
    return {"n": n, "l": l, "X": X, "euler": n - l + X}
