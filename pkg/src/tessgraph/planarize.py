"""Turn a soup of straight segments into a valid planar graph."""
from __future__ import annotations

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .errors import ToleranceFailure
from .geometry import MERGE_TOL, SNAP_TOL, candidate_pairs
from .graph import GeometricGraph, build_graph


def _pair_events(seg: np.ndarray, pairs: np.ndarray):
    """Split events ``(segment, param, x, y)`` produced by candidate pairs."""
    i, j = pairs[:, 0], pairs[:, 1]
    p, r = seg[i, 0], seg[i, 1] - seg[i, 0]
    q, s = seg[j, 0], seg[j, 1] - seg[j, 0]
    rl = np.hypot(r[:, 0], r[:, 1])
    sl = np.hypot(s[:, 0], s[:, 1])
    den = r[:, 0] * s[:, 1] - r[:, 1] * s[:, 0]
    qp = q - p
    seg_ids, params = [], []

    # non-parallel pairs: one candidate point each
    npar = np.abs(den) > 1e-12 * rl * sl
    if npar.any():
        d = den[npar]
        t = (qp[npar, 0] * s[npar, 1] - qp[npar, 1] * s[npar, 0]) / d
        u = (qp[npar, 0] * r[npar, 1] - qp[npar, 1] * r[npar, 0]) / d
        tt, ut = MERGE_TOL / rl[npar], MERGE_TOL / sl[npar]
        ok = (t >= -tt) & (t <= 1 + tt) & (u >= -ut) & (u <= 1 + ut)
        seg_ids += [i[npar][ok], j[npar][ok]]
        params += [np.clip(t[ok], 0, 1), np.clip(u[ok], 0, 1)]

    # parallel pairs on a common line: endpoints of each inside the other
    par = ~npar
    if par.any():
        ip, jp = i[par], j[par]
        pp, rp, qq, sp = p[par], r[par], q[par], s[par]
        rlp, slp = rl[par], sl[par]
        off = np.abs((qq[:, 0] - pp[:, 0]) * rp[:, 1] - (qq[:, 1] - pp[:, 1]) * rp[:, 0]) / rlp
        col = off <= MERGE_TOL
        for a_idx, b_idx, a0, av, al, b0, bv in (
            (ip, jp, pp, rp, rlp, qq, sp),
            (jp, ip, qq, sp, slp, pp, rp),
        ):
            for end in (b0, b0 + bv):
                t = np.einsum("ij,ij->i", end - a0, av) / al**2
                tol = MERGE_TOL / al
                ok = col & (t > -tol) & (t < 1 + tol)
                seg_ids.append(a_idx[ok])
                params.append(np.clip(t[ok], 0, 1))
    if not seg_ids:
        return np.zeros(0, dtype=np.int64), np.zeros(0)
    return np.concatenate(seg_ids).astype(np.int64), np.concatenate(params)


def planarize(segments) -> GeometricGraph:
    """Planar graph whose link union equals the union of ``segments``.

    Nodes are placed at every segment endpoint, every crossing, every
    T-junction and every endpoint lying inside a collinear overlap.
    Candidate nodes within ``SNAP_TOL`` are merged, original endpoints
    winning as representatives.

    Raises
    ------
    ToleranceFailure
        Two candidate nodes are closer than ``MERGE_TOL`` but farther than
        ``SNAP_TOL``.
    ValueError
        A segment has (near) zero length.
    """
    seg = np.asarray(segments, dtype=float).reshape(-1, 2, 2)
    k = len(seg)
    if k == 0:
        return build_graph(np.zeros((0, 2)), np.zeros((0, 2), dtype=np.int64))
    if not np.all(np.isfinite(seg)):
        raise ValueError("segment coordinates must be finite")
    lengths = np.hypot(*(seg[:, 1] - seg[:, 0]).T)
    if np.any(lengths <= SNAP_TOL):
        raise ValueError(f"segment {int(np.argmax(lengths <= SNAP_TOL))} has zero length")

    boxes = np.concatenate([seg.min(axis=1), seg.max(axis=1)], axis=1)
    pairs = candidate_pairs(boxes, pad=MERGE_TOL)
    ev_seg, ev_t = _pair_events(seg, pairs) if len(pairs) else (np.zeros(0, np.int64), np.zeros(0))

    # candidate points: endpoints first so they win as representatives
    all_seg = np.concatenate([np.arange(k), np.arange(k), ev_seg])
    all_t = np.concatenate([np.zeros(k), np.ones(k), ev_t])
    pts = seg[all_seg, 0] + all_t[:, None] * (seg[all_seg, 1] - seg[all_seg, 0])
    exact_end = np.concatenate([seg[:, 0], seg[:, 1]])
    pts[: 2 * k] = exact_end

    tree = cKDTree(pts)
    close = tree.query_pairs(MERGE_TOL, output_type="ndarray")
    if len(close):
        dist = np.linalg.norm(pts[close[:, 0]] - pts[close[:, 1]], axis=1)
        bad = (dist > SNAP_TOL)
        if bad.any():
            a, b = close[bad][0]
            raise ToleranceFailure(
                f"candidate nodes {pts[a].tolist()} and {pts[b].tolist()} are "
                f"{dist[bad][0]:.3g} apart: too close to be distinct, too far to merge"
            )
        adj = coo_matrix((np.ones(len(close)), (close[:, 0], close[:, 1])), shape=(len(pts),) * 2)
        _, label = connected_components(adj, directed=False)
    else:
        label = np.arange(len(pts))

    # representative = lowest-index member (an endpoint whenever one exists)
    n_lab = label.max() + 1
    rep = np.full(n_lab, len(pts), dtype=np.int64)
    np.minimum.at(rep, label, np.arange(len(pts)))
    rep_xy = pts[rep]
    # canonical node order: lexicographic by coordinates
    order = np.lexsort((rep_xy[:, 1], rep_xy[:, 0]))
    new_id = np.empty(n_lab, dtype=np.int64)
    new_id[order] = np.arange(n_lab)
    nodes = rep_xy[order]
    node_of = new_id[label]

    # split each segment at its nodes in parameter order
    srt = np.lexsort((all_t, all_seg))
    s_sorted, n_sorted = all_seg[srt], node_of[srt]
    same_seg = s_sorted[1:] == s_sorted[:-1]
    differ = n_sorted[1:] != n_sorted[:-1]
    keep = same_seg & differ
    links = np.stack([n_sorted[:-1][keep], n_sorted[1:][keep]], axis=1)
    links = np.sort(links, axis=1)
    links = np.unique(links, axis=0)
    return build_graph(nodes, links)
