"""The nine acceptance criteria, each at its stated tolerance and time budget.

Every test records one PASS/FAIL line, printed in the terminal summary.
"""
import math
import time

import numpy as np
import pytest

from oracles import random_small_graph, raster_faces
from tessgraph import (
    GeneratorConfig,
    build_graph,
    check_identities,
    clip_to_window,
    euler_terms,
    generate,
    partition,
    pi_angle_counts,
    side_membership_pi_check,
    window_counts,
    window_euler_terms,
)
from tessgraph.experiment import ExperimentSpec, aggregate, analyze_config, run_replications
from tessgraph.verify import fig4a_checks, hexagon_checks, window_checks

pytestmark = pytest.mark.acceptance

RESULTS: list[str] = []

CORPUS_SEEDS = range(50)
CORPUS_CONFIGS = [
    ("poisson lines", lambda s: GeneratorConfig("poisson_deleted", s, 6.0, {"q": 0.0})),
    ("edge deletion", lambda s: GeneratorConfig("poisson_deleted", s, 6.0, {"q": 0.3})),
    ("falling leaves", lambda s: GeneratorConfig("falling_leaves", s, 2.0 + 0.5 * (s % 2))),
]
FIXTURE_CONFIGS = [
    GeneratorConfig("fig4a", 0, 2.9, {"copies": 3}, (0.31, 0.27)),
    GeneratorConfig("hexagon", 0, 3.3, {"variant": "point", "copies": 4}, (0.17, 0.11)),
    GeneratorConfig("hexagon", 0, 3.3, {"variant": "segment", "copies": 4}, (0.17, 0.11)),
]


def record(num: int, title: str, ok: bool, elapsed: float, budget: float, detail: str = "") -> None:
    ok = ok and elapsed < budget
    line = f"{'PASS' if ok else 'FAIL'}  criterion {num}: {title} ({elapsed:.1f}s of {budget:.0f}s)"
    RESULTS.append(line + (f"  {detail}" if detail else ""))
    assert ok, line + "  " + detail


@pytest.fixture(scope="module")
def corpus():
    """Graphs and their window graphs for criteria 1, 2 and 9; build time is kept."""
    t0 = time.perf_counter()
    items = []
    for name, make in CORPUS_CONFIGS:
        for s in CORPUS_SEEDS:
            cfg = make(s)
            g = generate(cfg)
            items.append((f"{name} seed {s}", g, clip_to_window(g, cfg.window)))
    for cfg in FIXTURE_CONFIGS:
        g = generate(cfg)
        items.append((f"{cfg.model} fixture", g, clip_to_window(g, cfg.window)))
    return items, time.perf_counter() - t0


def test_criterion_1_euler_identity(corpus):
    items, build = corpus
    t0 = time.perf_counter()
    bad = []
    for name, g, wg in items:
        if window_euler_terms(wg)["euler"] != 1:
            bad.append(name)
        t = euler_terms(g)
        if t["euler"] != t["outer_components"]:
            bad.append(name + " (whole graph)")
    elapsed = build + time.perf_counter() - t0
    record(1, f"n - l + X = 1 on {len(items)} window graphs", not bad, elapsed, 30,
           f"failures: {bad[:5]}" if bad else "")


def test_criterion_2_window_identities(corpus):
    items, _ = corpus
    t0 = time.perf_counter()
    bad = []
    for name, _, wg in items:
        for c in check_identities(window_counts(wg)):
            if not c.ok:
                bad.append(f"{name}: {c.name} {c.lhs} != {c.rhs}")
    record(2, f"window identities on {len(items)} windows", not bad, time.perf_counter() - t0, 60,
           "; ".join(bad[:3]))


def test_criterion_3_fig4a_fixture():
    t0 = time.perf_counter()
    checks = [c for c in fig4a_checks() if not c.name.startswith("grouping")]
    bad = [f"{c.name}: {c.detail}" for c in checks if not c.ok]
    record(3, "six-cell tiling counts, theta, phi and cell means", not bad, time.perf_counter() - t0, 1,
           "; ".join(bad))


def test_criterion_4_cell_unions():
    t0 = time.perf_counter()
    checks = [c for c in fig4a_checks() if c.name.startswith("grouping")]
    bad = [f"{c.name}: {c.detail}" for c in checks if not c.ok]
    record(4, "cell-union means for groupings A and B", len(checks) == 6 and not bad,
           time.perf_counter() - t0, 1, "; ".join(bad))


def test_criterion_5_hexagons():
    t0 = time.perf_counter()
    checks = hexagon_checks("point") + hexagon_checks("segment")
    bad = [f"{c.name}: {c.detail}" for c in checks if not c.ok]
    # the equivalence path must be taken, with the edge relation skipped
    from tessgraph.experiment import HEX_BLOCK_ORIGIN, analyze_graph
    from tessgraph.generators import HEX_PERIOD, hexagon_fixture

    for variant in ("point", "segment"):
        a = analyze_graph(hexagon_fixture(variant, 3), block=(HEX_BLOCK_ORIGIN, HEX_PERIOD),
                          checks=("identities", "formulas"))
        if a.report.theta != 2 or a.report.mu_chi != 0:
            bad.append(f"{variant}: theta {a.report.theta}, mu_chi {a.report.mu_chi}")
        if a.residuals["eq29"]["status"] != "skipped" or a.residuals["theta2"]["status"] != "ok":
            bad.append(f"{variant}: theta = 2 path not exercised")
    record(5, "hexagon lattices: theta = 2, mu_chi = 0, eq29 skipped", not bad,
           time.perf_counter() - t0, 1, "; ".join(bad))


def test_criterion_6_poisson_lines():
    t0 = time.perf_counter()
    analyses = [analyze_config(GeneratorConfig("poisson_deleted", s, 30.0, {"q": 0.0}))
                for s in range(20)]
    rep = [a.report for a in analyses]
    theta_exact = all(r.theta == 4 for r in rep)
    mu_chi = np.mean([r.mu_chi for r in rep])
    mu_E = np.mean([r.mu_E for r in rep])
    alpha = np.mean([r.alpha for r in rep])
    sec13 = np.mean([a.residuals["sec13"]["residual"] for a in analyses])
    eq26 = np.mean([a.residuals["eq26"]["lhs"] for a in analyses])
    ok = (theta_exact and abs(mu_chi - 1) <= 0.02 and abs(mu_E - 4) <= 0.05
          and abs(alpha - 1) <= 0.05 and sec13 <= 0.02 and abs(eq26 - 1) <= 0.05)
    detail = (f"theta=4 every seed: {theta_exact}; mu_chi {mu_chi:.4f}; mu_E {mu_E:.4f}; alpha {alpha:.4f}; "
              f"cell relation residual {sec13:.4f}; mean 1/A over mean cell area {eq26:.4f}")
    record(6, "Poisson lines, r = 30, 20 seeds", ok, time.perf_counter() - t0, 300, detail)


def test_criterion_7_deletion_model():
    t0 = time.perf_counter()
    cfg = GeneratorConfig("poisson_deleted", 0, 115.0, {"q": 0.3})
    recs = run_replications(ExperimentSpec(cfg, reps=20, checks=("identities", "formulas", "eq13")))
    agg = aggregate(recs)
    min_verts = min(r["report"]["lambda_verts"] * math.pi * cfg.r ** 2 for r in recs if r["error"] is None)
    res = agg["mean_residuals"]
    tags = ("eq29", "eq30", "eq31", "eq35", "muCstar")
    ok = (agg["succeeded"] == 20 and min_verts >= 1e4 and agg["identities_ok"]
          and all(res[t]["mean"] < 0.03 for t in tags) and res["eq13"]["mean"] < 0.05)
    detail = f"min vertices {min_verts:.0f}; " + ", ".join(f"{t} {res[t]['mean']:.4f}" for t in (*tags, "eq13"))
    record(7, "edge deletion q = 0.3, r = 115, 20 seeds", ok, time.perf_counter() - t0, 600, detail)


def test_criterion_8_raster_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    done, bad = 0, []
    while done < 200:
        drawn = random_small_graph(rng)
        if drawn is None:
            continue
        nodes, links = drawn
        part = partition(build_graph(nodes, links))
        ras = raster_faces(nodes, links)["regions"]
        where = [int(part.locate(np.array([reg["sample"]]))[0]) for reg in ras]
        ok = len(ras) == len(part.faces) and sorted(where) == list(range(len(part.faces)))
        if ok:
            for reg, fi in zip(ras, where):
                f = part.faces[fi]
                ok &= reg["holes"] == len(f.holes)
                ok &= f.chi == 1 - reg["holes"] - reg["isolated"]
        if not ok:
            bad.append(done)
        done += 1
    record(8, "faces match the flood-fill oracle on 200 small graphs", not bad,
           time.perf_counter() - t0, 120, f"mismatching graphs: {bad[:10]}" if bad else "")


def test_criterion_9_pi_classification(corpus):
    items, _ = corpus
    t0 = time.perf_counter()
    bad, n_nodes = [], 0
    for name, g, wg in items:
        for graph in (g, wg.interior):
            n_nodes += graph.n_nodes
            if not np.array_equal(side_membership_pi_check(graph), pi_angle_counts(graph)):
                bad.append(name)
    record(9, f"side-membership and angle pi counts agree on {n_nodes} nodes", not bad,
           time.perf_counter() - t0, 60, f"disagreement in {bad[:5]}" if bad else "")


def test_fixture_windows():
    # Euler and identity checks on disc windows over the periodic fixtures
    assert all(c.ok for c in window_checks())
