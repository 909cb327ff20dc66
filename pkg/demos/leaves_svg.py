"""Draw a falling-leaves tessellation with faces shaded by Euler Entity.

Run with ``python demos/leaves_svg.py [out.svg]``.
"""
import sys
from collections import Counter

from tessgraph import GeneratorConfig, clip_to_window, generate, window_cells
from tessgraph.io import graph_to_svg
from tessgraph.window import is_truncated


def main(out: str = "leaves.svg"):
    cfg = GeneratorConfig("falling_leaves", 3, 3.0, {"width": [0.4, 1.6], "height": [0.4, 1.2]})
    g = generate(cfg)
    wg = clip_to_window(g, cfg.window)
    cells = window_cells(wg)
    entire = [f for f in cells if not is_truncated(wg, f)]
    print(f"{g.n_links} links, {len(cells)} cell-parts in the window, {len(entire)} entire")
    print("Euler Entity of entire cells:", dict(sorted(Counter(f.chi for f in entire).items())))
    with open(out, "w") as fh:
        fh.write(graph_to_svg(wg.interior, cfg.window, cells))
    print(f"wrote {out}")


if __name__ == "__main__":
    main(*sys.argv[1:2])
