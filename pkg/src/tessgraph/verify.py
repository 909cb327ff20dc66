"""Exact checks on the periodic fixtures, used by ``tessgraph verify``."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .experiment import HEX_BLOCK_ORIGIN, analyze_graph
from .generators import FIG4A_PERIOD, HEX_PERIOD, fig4a_fixture, hexagon_fixture
from .geometry import Window
from .stats import (
    block_faces,
    cell_union_stats,
    check_identities,
    euler_terms,
    source_reference_points,
    window_counts,
    window_euler_terms,
)
from .window import clip_to_window

FIG4A_EXPECTED_CELLS = sorted([(4, 4, 1), (11, 13, 0), (3, 3, 1), (3, 3, 1), (10, 11, -1), (8, 8, 1)])


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str = ""


def _eq(name, got, want) -> CheckResult:
    return CheckResult(name, got == want, f"got {got}, expected {want}")


def fig4a_checks(origin_offset=(0.0, 0.0)) -> list[CheckResult]:
    """Per-cell counts, vertex statistics, cell means and cell-union means."""
    fx = fig4a_fixture(2, origin_offset)
    g = fx.graph
    block = (fx.origin, fx.period)
    a = analyze_graph(g, block=block, checks=("identities", "formulas"))
    er = a.report
    cells = sorted((f.side_count, f.edge_count, f.chi) for f in a.faces)
    out = [
        _eq("fig4a cells (S,E,chi)", cells, FIG4A_EXPECTED_CELLS),
        _eq("fig4a theta", er.theta, Fraction(7, 3)),
        _eq("fig4a phi", er.phi, Fraction(1, 6)),
        _eq("fig4a mu_E", er.mu_E, Fraction(7)),
        _eq("fig4a mu_S", er.mu_S, Fraction(13, 2)),
        _eq("fig4a mu_chi", er.mu_chi, Fraction(1, 2)),
        _eq("fig4a block identities", a.identities_ok, True),
    ]
    for tag in ("eq29", "eq30", "eq31", "eq35", "muCstar"):
        out.append(_eq(f"fig4a {tag} residual", a.residuals[tag]["residual"], 0.0))

    faces = block_faces(g, *block)
    refs = source_reference_points(g, faces)
    ga = cell_union_stats(faces, [fx.grouping_a(f, p) for f, p in zip(faces, refs)])
    gb = cell_union_stats(faces, [fx.grouping_b(f, p) for f, p in zip(faces, refs)])
    out += [
        _eq("grouping A (mu_E, mu_S, mu_chi)", (ga["bold_mu_E"], ga["bold_mu_S"], ga["bold_mu_chi"]),
            (Fraction(42, 4), Fraction(39, 4), Fraction(3, 4))),
        _eq("grouping B (mu_E, mu_S, mu_chi)", (gb["bold_mu_E"], gb["bold_mu_S"], gb["bold_mu_chi"]),
            (Fraction(14), Fraction(13), Fraction(1))),
    ]
    th = er.theta
    for name, gs in (("A", ga), ("B", gb)):
        out.append(_eq(f"grouping {name} edge relation",
                       gs["bold_mu_E"] * (th - 2), 2 * th * gs["bold_mu_chi"]))
        out.append(_eq(f"grouping {name} side relation",
                       gs["bold_mu_S"] * (th - 2), 2 * (th - er.phi) * gs["bold_mu_chi"]))
    return out


def hexagon_checks(variant: str) -> list[CheckResult]:
    g = hexagon_fixture(variant, 3)
    a = analyze_graph(g, block=(HEX_BLOCK_ORIGIN, HEX_PERIOD), checks=("identities", "formulas"))
    er = a.report
    return [
        _eq(f"hexagon-{variant} theta", er.theta, Fraction(2)),
        _eq(f"hexagon-{variant} mu_chi", er.mu_chi, Fraction(0)),
        _eq(f"hexagon-{variant} eq29 skipped", a.residuals["eq29"]["status"], "skipped"),
        _eq(f"hexagon-{variant} theta2 equivalence", a.residuals["theta2"]["status"], "ok"),
        _eq(f"hexagon-{variant} block identities", a.identities_ok, True),
    ]


def window_checks() -> list[CheckResult]:
    """Window identities and the Euler identity on discs over the fixtures."""
    out = []
    cases = [
        ("fig4a", fig4a_fixture(3).graph, Window((0.31, 0.27), 2.9)),
        ("hexagon-point", hexagon_fixture("point", 3), Window((0.17, 0.11), 3.3)),
        ("hexagon-segment", hexagon_fixture("segment", 3), Window((0.17, 0.11), 3.3)),
    ]
    for name, g, w in cases:
        wg = clip_to_window(g, w)
        wc = window_counts(wg)
        bad = [c.name for c in check_identities(wc) if not c.ok]
        out.append(CheckResult(f"{name} window identities", not bad, f"failed: {bad}"))
        et = window_euler_terms(wg)
        out.append(_eq(f"{name} window Euler sum", et["euler"], 1))
        gt = euler_terms(g)
        out.append(_eq(f"{name} patch Euler sum", gt["euler"], gt["outer_components"]))
    return out


def shift_checks() -> list[CheckResult]:
    """Estimates do not move when the block is translated by one period."""
    base = analyze_graph(fig4a_fixture(2).graph, block=((0.0, 0.0), FIG4A_PERIOD), checks=()).report
    moved = analyze_graph(fig4a_fixture(2).graph, block=(FIG4A_PERIOD, FIG4A_PERIOD), checks=()).report
    keys = ("theta", "phi", "mu_E", "mu_S", "mu_chi", "mu_V")
    return [_eq("fig4a period shift", [getattr(moved, k) for k in keys], [getattr(base, k) for k in keys])]


def run_fixture_suite() -> list[CheckResult]:
    return (fig4a_checks() + hexagon_checks("point") + hexagon_checks("segment")
            + window_checks() + shift_checks())
