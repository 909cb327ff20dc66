import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import planar_graphs
from oracles import clipped_membership
from tessgraph import (
    DegenerateTangency,
    Window,
    build_graph,
    check_identities,
    clip_to_window,
    empty_graph,
    poisson_lines,
    window_cells,
    window_counts,
    window_euler_terms,
)
from tessgraph.geometry import point_segment_distance
from tessgraph.window import is_truncated


def test_diameter_chord():
    g = build_graph([(-2, 0), (2, 0)], [(0, 1)])
    wg = clip_to_window(g, Window((0, 0), 1.0))
    assert (wg.M, wg.M_prime, wg.M_boundary, wg.M_boundary_2) == (1, 0, 2, 1)
    assert len(wg.arcs) == 2
    cells = window_cells(wg)
    assert sorted(f.chi for f in cells) == [1, 1]
    assert [f.area for f in cells] == pytest.approx([math.pi / 2] * 2)
    # each half disc has the chord and one arc: 2 edges, 2 vertices, 2 sides
    assert sorted((f.edge_count, f.vertex_count, f.side_count) for f in cells) == [(2, 2, 2)] * 2
    t = window_euler_terms(wg)
    assert (t["n"], t["l"], t["X"], t["euler"]) == (2, 3, 2, 1)


def test_graph_inside_disc():
    g = build_graph([(0, 0), (1, 0), (0, 1)], [(0, 1), (1, 2), (2, 0)])
    wg = clip_to_window(g, Window((0.2, 0.2), 5.0))
    assert wg.M_boundary == 0 and wg.M == wg.M_prime == 3
    assert len(wg.arcs) == 1 and wg.arcs[0].start == -1
    cells = window_cells(wg)
    assert sorted((f.chi, len(f.holes)) for f in cells) == [(0, 1), (1, 0)]
    assert sum(f.area for f in cells) == pytest.approx(25 * math.pi)
    assert sum(not is_truncated(wg, f) for f in cells) == 1
    assert window_euler_terms(wg)["euler"] == 1


def test_empty_graph():
    wg = clip_to_window(empty_graph(), Window((0, 0), 2.0))
    (f,) = window_cells(wg)
    assert f.chi == 1 and f.area == pytest.approx(4 * math.pi)
    assert window_euler_terms(wg) == {"n": 0, "l": 0, "X": 1, "euler": 1}


def test_isolated_node_inside():
    wg = clip_to_window(build_graph([(0.5, 0)], []), Window((0, 0), 2.0))
    (f,) = window_cells(wg)
    assert f.chi == 0
    assert window_euler_terms(wg)["euler"] == 1


def test_single_crossing():
    # a dangling link poking into the disc
    g = build_graph([(0, 0), (3, 0)], [(0, 1)])
    wg = clip_to_window(g, Window((0, 0), 1.0))
    assert wg.M_boundary_1 == 1 and len(wg.arcs) == 1
    (f,) = window_cells(wg)
    assert f.chi == 1
    assert window_euler_terms(wg)["euler"] == 1


def test_triangle_straddling_circle():
    nodes = np.array([(0.0, 0.0), (3.0, 0.0), (0.0, 3.0)])
    links = np.array([(0, 1), (1, 2), (2, 0)])
    w = Window((0.3, 0.2), 1.5)
    wg = clip_to_window(build_graph(nodes, links), w)
    # (3,0)-(0,3) misses the disc; the other two links cross once each
    assert wg.M_boundary == 2 and wg.M == 2
    inside, outside = clipped_membership(nodes, links, w.center, w.radius, 200)
    seg = wg.interior.segments()
    d_in = point_segment_distance(inside[:, None, :], seg[None, :, 0], seg[None, :, 1]).min(axis=1)
    d_out = point_segment_distance(outside[:, None, :], seg[None, :, 0], seg[None, :, 1]).min(axis=1)
    assert d_in.max() < 1e-9
    assert d_out.min() > 1e-7
    assert np.allclose(np.hypot(*(wg.interior.nodes[wg.boundary_nodes] - w.center).T), w.radius)
    t = window_euler_terms(wg)
    assert t["euler"] == 1
    assert sorted(f.chi for f in window_cells(wg)) == [1, 1]


def test_node_on_circle():
    g = build_graph([(1, 0), (3, 0)], [(0, 1)])
    with pytest.raises(DegenerateTangency):
        clip_to_window(g, Window((0, 0), 1.0))


def test_tangent_link():
    g = build_graph([(-2, 1), (2, 1)], [(0, 1)])
    with pytest.raises(DegenerateTangency):
        clip_to_window(g, Window((0, 0), 1.0))


def test_coincident_crossings():
    g = build_graph([(0, 0), (2, 0), (0, 0.5)], [(0, 1), (2, 1)])
    with pytest.raises(DegenerateTangency):
        clip_to_window(g, Window((0, 0), 2.0 - 1e-12))


@given(planar_graphs(), st.floats(0.5, 5.0), st.floats(0, 8), st.floats(0, 8))
def test_window_identities_and_euler(g, r, cx, cy):
    w = Window((cx, cy), r)
    try:
        wg = clip_to_window(g, w)
    except DegenerateTangency:
        return
    wc = window_counts(wg)
    assert all(c.ok for c in check_identities(wc)), [c for c in check_identities(wc) if not c.ok]
    assert window_euler_terms(wg)["euler"] == 1


@pytest.mark.parametrize("seed", range(3))
def test_poisson_window_identities(seed):
    w = Window((0, 0), 20.0)
    wg = clip_to_window(poisson_lines(1.0, w, seed), w)
    wc = window_counts(wg)
    assert all(c.ok for c in check_identities(wc))
    assert window_euler_terms(wg)["euler"] == 1
    # every line enters and leaves the disc, usually on different links
    assert wc.M_boundary % 2 == 0
