import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tessgraph import (
    EmptyWindow,
    Window,
    build_graph,
    cell_union_stats,
    clip_to_window,
    estimate,
    fig4a_fixture,
    generate,
    GeneratorConfig,
    planarize,
    poisson_lines,
    reciprocal_area_estimate,
    small_disc_edge_check,
    validate_formulas,
    window_counts,
)
from tessgraph.experiment import analyze_graph
from tessgraph.stats import (
    WindowCounts,
    block_counts,
    block_faces,
    reciprocal_area_integral,
)


def counts(**kw):
    base = dict(
        r=1.0, area=10.0, n_verts={2: 2, 3: 4, 4: 2}, n_pi_verts={2: 1, 3: 2}, n_edges=9,
        n_edges_star=0, n_cells=3, ell=20.0, M=10, M_prime=8, M_boundary=2, M_boundary_1=2,
        M_boundary_2=0, N=4, N_prime=2, script_A=10.0, script_L=50.0, script_V=26,
        script_E=24, script_S=20, script_C=20, script_X=2,
    )
    base.update(kw)
    return WindowCounts(**base)


class TestEstimate:
    def test_ratios(self):
        er = estimate(counts())
        # 8 vertices with valency sum 24
        assert er.theta == pytest.approx(3.0)
        assert er.lambda_verts == pytest.approx(0.8)
        assert er.alpha == pytest.approx(2.0)
        assert er.nu == pytest.approx(2.0)
        assert er.phi == pytest.approx((2 + 2 * 1) / 8)
        assert er.xi == 0
        assert er.mu_E == pytest.approx(6.0) and er.mu_chi == pytest.approx(0.5)
        # starred values drop the two 2-valent vertices
        assert er.theta_star == pytest.approx((24 - 4) / 6)
        assert er.phi_star == pytest.approx(2 / 6)
        assert er.mu_V_star == pytest.approx((26 - 4) / 4)
        assert er.mu_C_star == pytest.approx((20 + 2 - 4) / 4)

    def test_periodic_gives_fractions(self):
        er = estimate(counts(periodic=True, r=None))
        assert er.theta == Fraction(3) and isinstance(er.mu_chi, Fraction)

    @pytest.mark.parametrize("kw", [{"N": 0}, {"n_verts": {}}, {"M": 0}])
    def test_empty_window(self, kw):
        with pytest.raises(EmptyWindow):
            estimate(counts(**kw))

    def test_starred_none_when_all_two_valent(self):
        er = estimate(counts(n_verts={2: 5}, n_pi_verts={}))
        assert er.theta_star is er.xi_star is er.phi_star is None
        res = validate_formulas(er)
        assert res["eq35"]["status"] == res["muCstar"]["status"] == "skipped"

    def test_theta_two_path(self):
        res = validate_formulas(estimate(counts(n_verts={2: 8}, n_pi_verts={}, script_X=0)))
        assert res["eq29"]["status"] == "skipped"
        assert res["theta2"]["status"] == "ok"

    def test_residual_zero_when_relation_holds(self):
        # theta = 3, chi = 1/2 gives mu_E = 2*3*0.5/1 = 3
        er = estimate(counts(script_E=12, N=4, script_X=2))
        assert validate_formulas(er)["eq29"]["residual"] == pytest.approx(0.0)


class TestFixtureStats:
    def test_fig4a_block(self):
        fx = fig4a_fixture(2)
        wc = block_counts(fx.graph, fx.origin, fx.period)
        assert wc.n_total == 18 and wc.n_edges == 21 and wc.N == 6
        er = estimate(wc)
        assert (er.theta, er.phi, er.mu_E, er.mu_S, er.mu_chi) == (
            Fraction(7, 3), Fraction(1, 6), Fraction(7), Fraction(13, 2), Fraction(1, 2))
        res = validate_formulas(er)
        assert all(res[t]["residual"] == 0 for t in ("eq29", "eq30", "eq31", "eq35", "muCstar"))

    @given(st.lists(st.integers(0, 3), min_size=6, max_size=6))
    def test_any_grouping_keeps_union_relations(self, labels):
        fx = fig4a_fixture(1)
        faces = block_faces(fx.graph, fx.origin, fx.period)
        er = estimate(block_counts(fx.graph, fx.origin, fx.period, faces))
        u = cell_union_stats(faces, labels)
        th = er.theta
        assert u["bold_mu_E"] * (th - 2) == 2 * th * u["bold_mu_chi"]
        assert u["bold_mu_S"] * (th - 2) == 2 * (th - er.phi) * u["bold_mu_chi"]
        assert u["n_groups"] == len(set(labels))

    def test_grouping_forms(self):
        fx = fig4a_fixture(1)
        faces = block_faces(fx.graph, fx.origin, fx.period)
        a = cell_union_stats(faces, lambda f: f.chi)
        b = cell_union_stats(faces, {i: f.chi for i, f in enumerate(faces)})
        c = cell_union_stats(faces, [f.chi for f in faces])
        assert a["bold_mu_E"] == b["bold_mu_E"] == c["bold_mu_E"] == Fraction(14)
        with pytest.raises(EmptyWindow):
            cell_union_stats([], [])


class TestReciprocalArea:
    def grid(self, n=10):
        segs = [((0, i), (n, i)) for i in range(n + 1)] + [((i, 0), (i, n)) for i in range(n + 1)]
        return planarize(np.array(segs, dtype=float))

    def test_unit_squares(self):
        g = self.grid()
        w = Window((5.3, 5.1), 3.65)
        assert reciprocal_area_estimate(g, w, 2000, 0) == pytest.approx(1.0)
        assert reciprocal_area_integral(clip_to_window(g, w)) == pytest.approx(1.0)

    def test_unbounded_contributes_zero(self):
        g = self.grid(2)
        w = Window((1, 1), 10.0)
        # only the 2 x 2 block of unit squares has finite area
        assert reciprocal_area_integral(clip_to_window(g, w)) == pytest.approx(4 / w.area)

    def test_requires_graph(self):
        with pytest.raises(ValueError):
            reciprocal_area_estimate([], Window((0, 0), 1.0), 10, 0)

    def test_fig4a_density(self):
        fx = fig4a_fixture(4)
        w = Window((0.31, 0.27), 3.9)
        # six cells per block of area two
        assert reciprocal_area_integral(clip_to_window(fx.graph, w)) == pytest.approx(3.0, rel=0.05)
        assert reciprocal_area_estimate(fx.graph, w, 10_000, 0) == pytest.approx(3.0, rel=0.05)

    def test_monte_carlo_matches_integral(self):
        w = Window((0, 0), 10.0)
        g = poisson_lines(1.0, Window((0, 0), 12.0), 0)
        exact = reciprocal_area_integral(clip_to_window(g, w))
        runs = np.array([reciprocal_area_estimate(g, w, 20_000, s) for s in range(20)])
        se = runs.std(ddof=1) / math.sqrt(len(runs))
        assert abs(runs.mean() - exact) < 3 * se


def test_small_disc_edge_count_poisson():
    w = Window((0, 0), 30.0)
    g = poisson_lines(1.0, Window((0, 0), 31.0), 3)
    er = estimate(window_counts(clip_to_window(g, w)))
    got, want = small_disc_edge_check(g, w, er, 1.0, 2000, seed=0)
    # the prediction uses this graph's own alpha and vertex intensities
    assert got == pytest.approx(want, rel=0.05)


def test_small_disc_requires_discs_inside():
    g = build_graph([(0, 0), (1, 0)], [(0, 1)])
    er = estimate(window_counts(clip_to_window(g, Window((0.5, 0.1), 3.0))))
    got, _ = small_disc_edge_check(g, Window((0.5, 0.1), 3.0), er, 1.0, 500, seed=1)
    assert 0 < got < 1


def test_residual_shrinks_with_radius():
    better = 0
    seeds = range(10)
    for s in seeds:
        res = {}
        for r in (10.0, 40.0):
            cfg = GeneratorConfig("poisson_deleted", s, r, {"L_A": 1.0, "q": 0.3})
            a = analyze_graph(generate(cfg), cfg.window, checks=("formulas",), seed=s)
            res[r] = a.residuals["eq29"]["residual"]
        better += res[40.0] < res[10.0]
    assert better >= 8
