import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("default")


@st.composite
def segment_soups(draw, max_segments: int = 6, grid: int = 8):
    """A few segments with endpoints on a half-integer grid."""
    k = draw(st.integers(1, max_segments))
    coord = st.integers(0, 2 * grid).map(lambda v: v / 2)
    segs = []
    for _ in range(k):
        a = (draw(coord), draw(coord))
        b = (draw(coord), draw(coord))
        if a != b:
            segs.append((a, b))
    if not segs:
        segs.append(((0.0, 0.0), (1.0, 0.0)))
    return np.array(segs, dtype=float)


@st.composite
def planar_graphs(draw, max_segments: int = 6, isolated: bool = True):
    """Planarized segment soups, optionally with a few isolated nodes."""
    from tessgraph import build_graph, planarize

    g = planarize(draw(segment_soups(max_segments)))
    if not isolated:
        return g
    extra = draw(st.lists(st.tuples(st.integers(0, 15), st.integers(0, 15)), max_size=3, unique=True))
    if not extra:
        return g
    pts = np.array(extra, dtype=float) / 2 + 0.25
    # quarter offsets keep isolated nodes off half-integer links of direction 0, 90 and 45 degrees
    from tessgraph.geometry import point_segment_distance

    keep = []
    for p in pts:
        if g.n_links == 0 or np.min(point_segment_distance(p, g.segments()[:, 0], g.segments()[:, 1])) > 1e-3:
            if not any(np.allclose(p, q) for q in g.nodes):
                keep.append(p)
    if not keep:
        return g
    return build_graph(np.concatenate([g.nodes, np.array(keep)]), g.links)


@pytest.fixture
def triangle():
    from tessgraph import build_graph

    return build_graph([(0, 0), (1, 0), (0, 1)], [(0, 1), (1, 2), (2, 0)])


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
