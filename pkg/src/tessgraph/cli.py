"""Command-line interface: ``tessgraph generate|analyze|sweep|verify``.

Exit codes: 0 ok, 2 bad config or input, 3 generator failure, 4 identity
check failure, 5 empty window. Outputs go to ``--out`` or, when it is not
given, into the directory named by ``TESSGRAPH_OUTDIR`` (else stdout or the
current directory).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

from .errors import CoverageTimeout, EmptyWindow, GeometryError
from .experiment import (
    CHECKS,
    ExperimentSpec,
    aggregate,
    analyze_graph,
    periodic_block,
    run_replications,
    sweep_rows,
    parse_sweep,
    write_sweep_csv,
)
from .generators import GeneratorConfig, generate
from .geometry import Window
from .io import dump_json, face_report, graph_to_svg, read_graph, write_graph

EXIT_OK, EXIT_CONFIG, EXIT_GENERATOR, EXIT_IDENTITY, EXIT_EMPTY = 0, 2, 3, 4, 5
OUTDIR_ENV = "TESSGRAPH_OUTDIR"


class ConfigError(Exception):
    pass


def _outdir() -> Path | None:
    d = os.environ.get(OUTDIR_ENV)
    if not d:
        return None
    p = Path(d)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _default_path(name: str) -> Path | None:
    d = _outdir()
    return None if d is None else d / name


def load_config(path, seed=None, r=None) -> GeneratorConfig:
    try:
        data = json.loads(Path(path).read_text())
        if not isinstance(data, dict):
            raise ValueError("config must be a JSON object")
        cfg = GeneratorConfig.from_dict(data)
        if seed is not None:
            cfg = replace(cfg, seed=seed)
        if r is not None:
            cfg = replace(cfg, r=r)
        GeneratorConfig.__post_init__(cfg)
        return cfg
    except (OSError, ValueError, TypeError) as exc:
        raise ConfigError(f"bad config {path}: {exc}") from exc


def _parse_checks(text: str | None) -> tuple:
    if not text:
        return CHECKS
    checks = tuple(c.strip() for c in text.split(",") if c.strip())
    bad = set(checks) - set(CHECKS)
    if bad:
        raise ConfigError(f"unknown checks {sorted(bad)}; choose from {', '.join(CHECKS)}")
    return checks


def _emit(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text + "\n")
    else:
        Path(path).write_text(text + "\n")
        print(f"wrote {path}", file=sys.stderr)


def cmd_generate(args) -> int:
    cfg = load_config(args.config, args.seed, args.r)
    g = generate(cfg)
    out = Path(args.out) if args.out else _default_path(f"{cfg.model}-{cfg.seed}.json")
    if out is None:
        out = Path(f"{cfg.model}-{cfg.seed}.json")
    write_graph(g, out)
    print(f"wrote {out} ({g.n_nodes} nodes, {g.n_links} links)", file=sys.stderr)
    if args.svg:
        Path(args.svg).write_text(graph_to_svg(g, None if periodic_block(cfg) else cfg.window))
    return EXIT_OK


def cmd_analyze(args) -> int:
    checks = _parse_checks(args.checks)
    cfg = load_config(args.config, args.seed, args.r) if args.config else None
    out = Path(args.out) if args.out else _default_path("report.json")

    if args.graph is None:
        if cfg is None:
            raise ConfigError("analyze needs a graph file or --config")
        spec = ExperimentSpec(cfg, reps=args.reps, jobs=args.jobs, checks=checks)
        recs = run_replications(spec)
        agg = aggregate(recs)
        for rec in recs:
            rec.pop("faces", None)
        _emit(dump_json({"config": cfg.to_dict(), "aggregate": agg, "replications": recs}), out)
        errs = [r for r in recs if r["error"] is not None]
        if errs and len(errs) == len(recs):
            return EXIT_EMPTY if all(r["error_type"] == "EmptyWindow" for r in errs) else EXIT_GENERATOR
        return EXIT_OK if agg["identities_ok"] else EXIT_IDENTITY

    try:
        g = read_graph(args.graph)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"bad graph file {args.graph}: {exc}") from exc
    block = None
    window = None
    if args.period:
        block = (tuple(args.origin or (0.0, 0.0)), tuple(args.period))
    elif cfg is not None and args.r is None and periodic_block(cfg):
        block = periodic_block(cfg)
    else:
        r = args.r if args.r is not None else (cfg.r if cfg else None)
        if r is None:
            raise ConfigError("analyze needs --r, --period or --config")
        center = tuple(args.center) if args.center else (cfg.center if cfg else (0.0, 0.0))
        window = Window(center, r)
    seed = args.seed if args.seed is not None else (cfg.seed if cfg else 0)
    a = analyze_graph(g, window, block=block, checks=checks, seed=seed)
    payload = a.to_dict()
    payload["faces"] = face_report(a.faces)
    _emit(dump_json(payload), out)
    if args.svg:
        Path(args.svg).write_text(graph_to_svg(g, window))
    if not a.identities_ok:
        bad = [c.name for c in a.identities if not c.ok]
        print(f"identity check failed: {', '.join(bad)}", file=sys.stderr)
        return EXIT_IDENTITY
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = load_config(args.config, args.seed, args.r)
    try:
        name, values = parse_sweep(args.sweep)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    spec = ExperimentSpec(cfg, reps=args.reps, jobs=args.jobs, checks=_parse_checks(args.checks))
    rows = sweep_rows(spec, name, values)
    out = Path(args.out) if args.out else (_default_path("sweep.csv") or Path("sweep.csv"))
    write_sweep_csv(rows, out)
    print(f"wrote {out} ({len(rows)} rows)", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_fixture_suite

    results = run_fixture_suite()
    for c in results:
        print(f"{'PASS' if c.ok else 'FAIL'}  {c.name}" + ("" if c.ok else f"  ({c.detail})"))
    failed = sum(not c.ok for c in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_IDENTITY


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tessgraph", description="Faces and typical-cell statistics of planar geometric graphs.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config_required=False):
        sp.add_argument("--config", required=config_required, help="generator config JSON")
        sp.add_argument("--out", help="output path")
        sp.add_argument("--r", type=float, help="window radius (overrides the config)")
        sp.add_argument("--seed", type=int, help="seed (overrides the config)")

    g = sub.add_parser("generate", help="write a generated graph as JSON")
    common(g, config_required=True)
    g.add_argument("--svg", help="also write an SVG drawing")
    g.set_defaults(func=cmd_generate)

    a = sub.add_parser("analyze", help="estimate typical-cell statistics")
    a.add_argument("graph", nargs="?", help="graph JSON (omit to generate from --config)")
    common(a)
    a.add_argument("--center", type=float, nargs=2, metavar=("X", "Y"))
    a.add_argument("--period", type=float, nargs=2, metavar=("PX", "PY"), help="count one periodic block instead of a disc")
    a.add_argument("--origin", type=float, nargs=2, metavar=("OX", "OY"), help="block origin")
    a.add_argument("--reps", type=int, default=1)
    a.add_argument("--jobs", type=int, default=1)
    a.add_argument("--svg", help="SVG drawing of the graph")
    a.add_argument("--checks", help=f"comma list from {','.join(CHECKS)}")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("sweep", help="CSV of estimates over a parameter")
    common(s, config_required=True)
    s.add_argument("--sweep", required=True, help="NAME=v1,v2,... with NAME one of r, q, L_A, ...")
    s.add_argument("--reps", type=int, default=1)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--checks", help=f"comma list from {','.join(CHECKS)}")
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", help="run the exact fixture suite")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "reps", 1) < 1 or getattr(args, "jobs", 1) < 1:
            raise ConfigError("--reps and --jobs must be at least 1")
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EmptyWindow as exc:
        print(f"empty window: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except (CoverageTimeout, GeometryError) as exc:
        print(f"generator error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_GENERATOR


if __name__ == "__main__":
    sys.exit(main())
