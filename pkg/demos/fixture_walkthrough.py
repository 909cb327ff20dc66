"""Walk through the periodic fixtures: per-cell counts, vertex statistics and cell means.

Run with ``python demos/fixture_walkthrough.py``.
"""
from fractions import Fraction

from tessgraph import block_counts, cell_union_stats, estimate, face_metrics, fig4a_fixture, hexagon_fixture
from tessgraph.experiment import HEX_BLOCK_ORIGIN
from tessgraph.generators import HEX_PERIOD
from tessgraph.stats import block_faces, source_reference_points


def show_block(name, g, origin, period):
    faces = block_faces(g, origin, period)
    print(f"\n{name}: {len(faces)} cells per block")
    for f in faces:
        m = face_metrics(f)
        print(f"  chi={m['chi']:>2}  E={m['E']:>2}  V={m['V']:>2}  S={m['S']:>2}  "
              f"area={m['area']:.4f}  holes={m['n_holes']}  isolated={m['n_isolated']}")
    er = estimate(block_counts(g, origin, period, faces))
    print(f"  theta={er.theta}  phi={er.phi}  mu_E={er.mu_E}  mu_S={er.mu_S}  mu_chi={er.mu_chi}")
    if er.theta != 2:
        # mean edge count predicted from vertex statistics alone
        print(f"  2 theta mu_chi / (theta - 2) = {2 * er.theta * er.mu_chi / (er.theta - 2)}")
    return faces


def main():
    fx = fig4a_fixture(2)
    faces = show_block("six-cell tiling", fx.graph, fx.origin, fx.period)
    refs = source_reference_points(fx.graph, faces)
    for label, rule in (("A", fx.grouping_a), ("B", fx.grouping_b)):
        u = cell_union_stats(faces, [rule(f, p) for f, p in zip(faces, refs)])
        print(f"  grouping {label}: {u['n_groups']} unions, mu_E={u['bold_mu_E']}, "
              f"mu_S={u['bold_mu_S']}, mu_chi={u['bold_mu_chi']}")
    for variant in ("point", "segment"):
        er_faces = show_block(f"hexagons with a {variant} hole", hexagon_fixture(variant, 3),
                              HEX_BLOCK_ORIGIN, HEX_PERIOD)
        assert all(f.chi == 0 for f in er_faces)
    print("\nmu_chi is", Fraction(0), "whenever theta is 2")


if __name__ == "__main__":
    main()
