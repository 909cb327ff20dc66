import math

import numpy as np
import pytest
from hypothesis import given

from conftest import planar_graphs
from oracles import brute_force_circuits
from tessgraph import (
    DirectedLink,
    assemble_faces,
    build_graph,
    classify_vertex,
    euler_terms,
    extract_circuits,
    face_metrics,
    first_exit_step,
    partition,
    pi_angle_counts,
    side_membership_pi_check,
)
from tessgraph.faces import reference_point, walk_graph
from tessgraph.geometry import shoelace

TWO_PI = 2 * math.pi


def square(x0=0.0, y0=0.0, s=1.0, start=0):
    nodes = [(x0, y0), (x0 + s, y0), (x0 + s, y0 + s), (x0, y0 + s)]
    links = [(start + i, start + (i + 1) % 4) for i in range(4)]
    return nodes, links


class TestFirstExit:
    def test_one_valent_head_reverses(self):
        g = build_graph([(0, 0), (1, 0)], [(0, 1)])
        nxt, z = first_exit_step(g, DirectedLink(0, True))
        assert nxt == DirectedLink(0, False)
        assert z == -math.pi

    def test_double_pi_goes_straight(self):
        g = build_graph([(0, 0), (1, 0), (2, 0)], [(0, 1), (1, 2)])
        nxt, z = first_exit_step(g, DirectedLink(0, True))
        assert nxt == DirectedLink(1, True)
        assert z == 0.0

    def test_square_corner_turns_left(self):
        nodes, links = square()
        g = build_graph(nodes, links)
        # arriving at (1, 0) from (0, 0) with the interior on the left
        nxt, z = first_exit_step(g, DirectedLink(0, True))
        assert nxt == DirectedLink(1, True)
        assert z == pytest.approx(math.pi / 2)


class TestCircuits:
    def test_lone_triangle(self, triangle):
        cs = extract_circuits(triangle)
        assert sorted((round(c.turning_sum / TWO_PI), c.link_count) for c in cs) == [(-1, 3), (1, 3)]

    def test_lone_segment(self):
        g = build_graph([(0, 0), (1, 0)], [(0, 1)])
        (c,) = extract_circuits(g)
        assert c.link_count == 2
        assert list(c.turning_angles) == [-math.pi, -math.pi]
        assert c.turning_sum == pytest.approx(-TWO_PI)

    def test_square_with_dangling_chord(self):
        nodes, links = square(s=2.0)
        nodes.append((1.0, 1.0))
        links.append((0, 4))
        g = build_graph(nodes, links)
        inner = [c for c in extract_circuits(g) if c.turning_sum > 0]
        assert len(inner) == 1
        # the chord is walked out and back: 4 sides plus 2 chord traversals
        assert inner[0].link_count == 6
        assert inner[0].node_count == 6

    @given(planar_graphs())
    def test_partition_of_directed_links(self, g):
        cs = extract_circuits(g)
        ids = np.concatenate([c.dlinks for c in cs]) if cs else np.zeros(0)
        assert sorted(ids.tolist()) == list(range(2 * g.n_links))
        assert sum(c.link_count for c in cs) == 2 * g.n_links

    @given(planar_graphs())
    def test_circuit_invariants(self, g):
        for c in extract_circuits(g):
            assert abs(abs(c.turning_sum) - TWO_PI) < 1e-6
            assert (c.orientation == "anticlockwise") == (c.turning_sum > 0)
            assert c.node_count == c.link_count
            assert c.side_count == c.corner_count
            assert c.corner_count == np.count_nonzero(c.turning_angles) >= 1

    @given(planar_graphs(isolated=False))
    def test_matches_brute_force_walk(self, g):
        got = {tuple(int(d) for d in c.dlinks) for c in extract_circuits(g)}
        assert got == brute_force_circuits(g.nodes, g.links)

    @given(planar_graphs())
    def test_orientation_balance(self, g):
        part = partition(g)
        cs = extract_circuits(g)
        ccw = sum(c.turning_sum > 0 for c in cs)
        cw = len(cs) - ccw
        assert ccw - cw == round(sum(c.turning_sum for c in cs) / TWO_PI)
        holes = sum(len(f.holes) for f in part.faces)
        assert ccw == len(part.faces)
        assert cw == holes + len(part.unbounded_circuits)


class TestFaces:
    def test_square_with_isolated_node(self):
        nodes, links = square(s=2.0)
        nodes.append((1.0, 1.0))
        (f,) = assemble_faces(build_graph(nodes, links))
        assert f.isolated_nodes == [4]
        assert f.chi == 0

    def test_nested_squares(self):
        n1, l1 = square(s=4.0)
        n2, l2 = square(1.0, 1.0, 1.0, start=4)
        faces = assemble_faces(build_graph(n1 + n2, l1 + l2))
        assert sorted((f.chi, len(f.holes)) for f in faces) == [(0, 1), (1, 0)]
        outer = [f for f in faces if f.holes][0]
        assert outer.area == pytest.approx(15.0)

    def test_lone_triangle(self, triangle):
        (f,) = assemble_faces(triangle)
        m = face_metrics(f)
        assert (m["chi"], m["E"], m["V"], m["S"]) == (1, 3, 3, 3)
        assert m["area"] == pytest.approx(0.5)

    def test_square_with_isolated_segment(self):
        nodes, links = square(s=3.0)
        nodes += [(1.0, 1.5), (2.0, 1.5)]
        links.append((4, 5))
        (f,) = assemble_faces(build_graph(nodes, links))
        m = face_metrics(f)
        assert (m["E"], m["V"], m["S"], m["chi"]) == (6, 6, 6, 0)
        assert m["perimeter"] == pytest.approx(12.0 + 2.0)

    def test_heptagon_with_rectangular_hole(self):
        # a heptagon whose boundary carries collinear extra nodes, around a rectangle
        hept = [(0, 0), (2, 0), (4, 0), (5, 2), (4, 4), (2, 5), (0, 4), (-1, 2), (0, 0.5)]
        # nodes (2,0) and (0,0.5) sit on straight runs, so E exceeds S by 2
        nodes = hept + [(1, 1.5), (3, 1.5), (3, 3), (1, 3)]
        links = [(i, (i + 1) % 9) for i in range(9)] + [(9, 10), (10, 11), (11, 12), (12, 9)]
        faces = assemble_faces(build_graph(nodes, links))
        f = [f for f in faces if f.holes][0]
        # (0,0)-(0,0.5) and (0,0.5)-(-1,2) turn, so only (2,0) is straight
        m = face_metrics(f)
        assert m["chi"] == 0
        assert m["E"] == 13
        assert m["S"] == 12

    def test_area_matches_shoelace(self):
        n1, l1 = square(s=4.0)
        n2, l2 = square(1.0, 1.0, 1.0, start=4)
        g = build_graph(n1 + n2, l1 + l2)
        outer = [f for f in assemble_faces(g) if f.holes][0]
        ring = np.array(n1)
        hole = np.array(n2)
        assert outer.area == pytest.approx(abs(shoelace(ring)) - abs(shoelace(hole)))

    @given(planar_graphs())
    def test_face_invariants(self, g):
        for f in assemble_faces(g):
            assert f.chi == 1 - len(f.holes) - len(f.isolated_nodes)
            assert f.edge_count == sum(c.link_count for c in f.circuits)
            assert f.side_count == f.corner_count == sum(c.corner_count for c in f.circuits)
            assert f.vertex_count == sum(c.node_count for c in f.circuits) + len(f.isolated_nodes)
            assert f.area > 0
            assert f.outer.turning_sum > 0 and all(h.turning_sum < 0 for h in f.holes)
            face_metrics(f)

    @given(planar_graphs())
    def test_euler_identity_general_form(self, g):
        t = euler_terms(g)
        assert t["euler"] == t["outer_components"]

    @given(planar_graphs())
    def test_area_partition(self, g):
        part = partition(g)
        enclosed = sum(c.signed_area for c in part.circuits if c.turning_sum > 0)
        enclosed += sum(c.signed_area for c in part.circuits if c.turning_sum < 0
                        and any(c is h for f in part.faces for h in f.holes))
        total = sum(f.area for f in part.faces)
        assert total == pytest.approx(enclosed, rel=1e-6, abs=1e-9)

    def test_euler_two_components(self, triangle):
        n1, l1 = square(5.0, 5.0)
        nodes = [(0, 0), (1, 0), (0, 1)] + n1
        links = [(0, 1), (1, 2), (2, 0)] + [(a + 3, b + 3) for a, b in l1]
        t = euler_terms(build_graph(nodes, links))
        assert t["outer_components"] == 2 and t["euler"] == 2

    def test_euler_single(self, triangle):
        assert euler_terms(triangle)["euler"] == 1
        assert euler_terms(build_graph([(0, 0)], []))["euler"] == 1


class TestSideMembership:
    def test_double_pi(self):
        g = build_graph([(0, 0), (1, 0), (2, 0)], [(0, 1), (1, 2)])
        assert side_membership_pi_check(g)[1] == 2

    def test_t_junction(self):
        g = build_graph([(0, 0), (-1, 0), (1, 0), (0, 1)], [(0, 1), (0, 2), (0, 3)])
        assert side_membership_pi_check(g)[0] == 1

    def test_square_corner(self):
        nodes, links = square()
        assert side_membership_pi_check(build_graph(nodes, links)).tolist() == [0, 0, 0, 0]

    @given(planar_graphs())
    def test_agrees_with_angles(self, g):
        assert side_membership_pi_check(g).tolist() == pi_angle_counts(g).tolist()
        for v in range(g.n_nodes):
            assert classify_vertex(g, v).pi_angle_count == pi_angle_counts(g)[v]


def test_reference_point_longest_side():
    nodes = [(0, 0), (3, 0), (3, 1), (0, 1)]
    (f,) = assemble_faces(build_graph(nodes, [(0, 1), (1, 2), (2, 3), (3, 0)]))
    ref = reference_point(walk_graph(build_graph(nodes, [(0, 1), (1, 2), (2, 3), (3, 0)])), f)
    # both long sides tie; the lexicographically smaller midpoint wins
    assert tuple(ref) == (1.5, 0.0)
