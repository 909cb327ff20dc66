"""Analysis pipeline, seeded replications and parameter sweeps."""
from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .generators import FIG4A_PERIOD, HEX_PERIOD, GeneratorConfig, generate
from .geometry import Window
from .graph import GeometricGraph
from .io import face_report
from .stats import (
    block_counts,
    block_faces,
    check_identities,
    estimate,
    reciprocal_area_estimate,
    reciprocal_area_integral,
    small_disc_edge_check,
    validate_formulas,
    window_counts,
    window_euler_terms,
)
from .window import clip_to_window, window_cells

CHECKS = ("identities", "formulas", "eq13", "recip-area")

# generic block origin for the hexagon lattice so no vertex sits on a block side
HEX_BLOCK_ORIGIN = (0.123, 0.0456)


@dataclass
class ExperimentSpec:
    """What to generate, how often, and which checks to run."""

    config: GeneratorConfig
    reps: int = 1
    jobs: int = 1
    out_dir: Path | None = None
    checks: tuple = CHECKS
    recip_samples: int | None = None

    def __post_init__(self):
        if self.reps < 1:
            raise ValueError("reps must be at least 1")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")
        bad = set(self.checks) - set(CHECKS)
        if bad:
            raise ValueError(f"unknown checks {sorted(bad)}; expected a subset of {CHECKS}")

    @property
    def r(self) -> float:
        return self.config.r

    def seeds(self) -> list[int]:
        return [self.config.seed + i for i in range(self.reps)]


@dataclass
class Analysis:
    """Everything computed for one graph and one observation region."""

    counts: object
    report: object
    identities: list
    residuals: dict
    faces: list
    euler: dict | None = None
    extras: dict = field(default_factory=dict)

    @property
    def identities_ok(self) -> bool:
        return all(c.ok for c in self.identities)

    def to_dict(self) -> dict:
        return {
            "report": self.report.to_dict(),
            "residuals": self.residuals,
            "identities": [
                {"name": c.name, "lhs": c.lhs, "rhs": c.rhs, "ok": c.ok} for c in self.identities
            ],
            "euler": self.euler,
            **self.extras,
        }


def periodic_block(config: GeneratorConfig):
    """``(origin, period)`` of the counting block for the periodic fixtures, else None."""
    off = np.asarray(config.params.get("origin_offset", (0.0, 0.0)), dtype=float)
    if config.model == "fig4a":
        return tuple(off), FIG4A_PERIOD
    if config.model == "hexagon":
        return tuple(off + HEX_BLOCK_ORIGIN), HEX_PERIOD
    return None


def analyze_graph(
    g: GeometricGraph,
    window: Window | None = None,
    *,
    block=None,
    checks=CHECKS,
    seed: int | None = None,
    recip_samples: int | None = None,
) -> Analysis:
    """Counts, estimators, identity checks and formula residuals.

    Give either a disc ``window`` or a periodic ``block = (origin, period)``.
    Small-disc and reciprocal-area checks need a window and are skipped for
    blocks. The mean of ``1/A`` is integrated exactly unless
    ``recip_samples`` asks for a Monte Carlo estimate with that many points.
    """
    checks = tuple(checks)
    if block is not None:
        origin, period = block
        counts = block_counts(g, origin, period)
        faces = block_faces(g, origin, period)
        euler = None
    else:
        if window is None:
            raise ValueError("a window or a block is required")
        wg = clip_to_window(g, window)
        counts = window_counts(wg)
        faces = window_cells(wg)
        euler = window_euler_terms(wg)
    idents = check_identities(counts) if "identities" in checks else []
    report = estimate(counts, None, seed)
    if block is None and "recip-area" in checks:
        if recip_samples:
            report.recip_area = reciprocal_area_estimate(g, window, recip_samples, seed)
        else:
            report.recip_area = reciprocal_area_integral(wg)
    residuals = validate_formulas(report) if "formulas" in checks else {}
    if block is None and "eq13" in checks and window.radius > 1.0:
        emp, pred = small_disc_edge_check(g, window, report, y=1.0, n_centers=20_000, seed=seed)
        residuals["eq13"] = {
            "lhs": emp, "rhs": pred,
            "residual": abs(emp - pred) / max(abs(emp), abs(pred), 1e-300),
            "status": "ok",
        }
    return Analysis(counts, report, idents, residuals, faces, euler)


def analyze_config(config: GeneratorConfig, checks=CHECKS, recip_samples: int | None = None,
                   graph: GeometricGraph | None = None) -> Analysis:
    """Generate (unless ``graph`` is given) and analyze one configuration."""
    g = generate(config) if graph is None else graph
    block = periodic_block(config)
    return analyze_graph(
        g, None if block else config.window, block=block, checks=checks,
        seed=config.seed, recip_samples=recip_samples,
    )


def run_one(config: GeneratorConfig, checks=CHECKS, recip_samples: int | None = None) -> dict:
    """One replication as a plain record; failures are captured, not raised."""
    rec = {"seed": config.seed, "error": None}
    try:
        a = analyze_config(config, checks, recip_samples)
    except Exception as exc:  # recorded per row, the run continues
        rec["error"] = f"{type(exc).__name__}: {exc}"
        rec["error_type"] = type(exc).__name__
        return rec
    rec.update(a.to_dict())
    rec["identities_ok"] = a.identities_ok
    rec["faces"] = face_report(a.faces)
    return rec


def _run_star(args):
    return run_one(*args)


def run_replications(spec: ExperimentSpec) -> list[dict]:
    """Records for every seed, sorted by seed whatever the worker count."""
    tasks = [(replace(spec.config, seed=s), spec.checks, spec.recip_samples) for s in spec.seeds()]
    if spec.jobs == 1 or len(tasks) == 1:
        recs = [_run_star(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=spec.jobs) as ex:
            recs = list(ex.map(_run_star, tasks))
    return sorted(recs, key=lambda r: r["seed"])


def _mean_std(values: list[float]) -> dict:
    v = np.asarray(values, dtype=float)
    return {
        "mean": float(v.mean()) if len(v) else None,
        "std": float(v.std(ddof=1)) if len(v) > 1 else None,
        "n": int(len(v)),
    }


def aggregate(records: list[dict]) -> dict:
    """Plain mean and sample standard deviation of every scalar estimate and residual."""
    records = sorted(records, key=lambda r: r["seed"])
    ok = [r for r in records if r["error"] is None]
    est: dict = {}
    for rec in ok:
        for k, v in rec["report"].items():
            if k in ("seed", "r") or isinstance(v, dict) or v is None:
                continue
            est.setdefault(k, []).append(float(v))
    res: dict = {}
    for rec in ok:
        for tag, entry in rec["residuals"].items():
            if entry.get("status") == "ok" and entry.get("residual") is not None:
                res.setdefault(tag, []).append(float(entry["residual"]))
    return {
        "replications": len(records),
        "succeeded": len(ok),
        "seeds": [r["seed"] for r in records],
        "errors": {r["seed"]: r["error"] for r in records if r["error"] is not None},
        "identities_ok": all(r.get("identities_ok", True) for r in ok),
        "estimates": {k: _mean_std(v) for k, v in est.items()},
        "mean_residuals": {k: _mean_std(v) for k, v in res.items()},
    }


# fixed sweep CSV layout
SWEEP_ESTIMATES = ("theta", "phi", "xi", "nu", "alpha", "lambda_verts", "lambda_edges",
                   "lambda_cells", "mu_A", "mu_L", "mu_chi", "mu_V", "mu_E", "mu_S",
                   "theta_star", "mu_V_star", "mu_C_star", "recip_area")
SWEEP_RESIDUALS = ("eq29", "eq30", "eq31", "eq18", "sec13", "eq26", "eq35", "muCstar", "eq13")
SWEEP_COLUMNS = ("param", "value", "seed", *SWEEP_ESTIMATES,
                 *(f"res_{t}" for t in SWEEP_RESIDUALS), "identities_ok", "error")


def _with_param(config: GeneratorConfig, name: str, value) -> GeneratorConfig:
    if name == "r":
        return replace(config, r=float(value))
    if name == "seed":
        return replace(config, seed=int(value))
    return replace(config, params={**config.params, name: value})


def sweep_rows(spec: ExperimentSpec, name: str, values) -> list[dict]:
    """One row per (parameter value, seed) with estimates and residuals."""
    rows = []
    for v in values:
        sub = replace(spec, config=_with_param(spec.config, name, v))
        for rec in run_replications(sub):
            row = {c: "" for c in SWEEP_COLUMNS}
            row.update(param=name, value=v, seed=rec["seed"])
            if rec["error"] is not None:
                row["error"] = rec["error"]
            else:
                rep = rec["report"]
                for k in SWEEP_ESTIMATES:
                    x = rep.get(k)
                    row[k] = "" if x is None else repr(float(x))
                for t in SWEEP_RESIDUALS:
                    e = rec["residuals"].get(t)
                    if e and e.get("residual") is not None:
                        row[f"res_{t}"] = repr(float(e["residual"]))
                row["identities_ok"] = rec["identities_ok"]
            rows.append(row)
    return rows


def write_sweep_csv(rows: list[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(SWEEP_COLUMNS))
        w.writeheader()
        w.writerows(rows)


def parse_sweep(text: str) -> tuple[str, list]:
    """``"q=0,0.2,0.4"`` becomes ``("q", [0.0, 0.2, 0.4])``."""
    if "=" not in text:
        raise ValueError("sweep must look like NAME=v1,v2,...")
    name, vals = text.split("=", 1)
    out = []
    for s in vals.split(","):
        s = s.strip()
        if not s:
            continue
        x = float(s)
        out.append(int(x) if name in ("seed", "copies") else x)
    if not out or not all(math.isfinite(float(x)) for x in out):
        raise ValueError("sweep needs at least one finite value")
    return name.strip(), out


__all__ = [
    "CHECKS", "ExperimentSpec", "Analysis", "analyze_graph", "analyze_config", "run_one",
    "run_replications", "aggregate", "sweep_rows", "write_sweep_csv", "parse_sweep",
    "periodic_block", "SWEEP_COLUMNS",
]
