"""Command line experiment runner.

Usage::

    fermiwalk --config config.json [--out DIR] [--jobs N] [--verbose]

The configuration is a JSON document; see :class:`ExperimentConfig`.  Outputs
are ``series.csv`` (time series), ``summary.json`` and, for the sweep and
oracle modes, ``table.csv``.  Numbers in CSV files use the shortest decimal
string that round-trips.

Exit codes: ``0`` success, ``1`` a checked invariant failed, ``2`` invalid
configuration, ``3`` numeric failure, ``4`` resource limit.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import fock, onebody, ris, shift_exact, twobody, walks
from .core import opnorm, spectral_report, wedge_basis
from .errors import (
    FermiWalkError,
    InvalidArgument,
    NumericFailure,
    PreconditionViolation,
    ResourceLimit,
)
from .model import ReservoirSymbol, SampleUnitary, build_effective, matrix_from_json, matrix_to_json, shift_matrix

__all__ = ["MODES", "ExperimentConfig", "RunSummary", "load_config", "run", "sweep", "main"]

log = logging.getLogger("fermiwalk")

MODES = ("evolve1", "evolve2", "shift-exact", "ris-stats", "oracle-check", "spectral", "sweep")
WALK_KINDS = ("shift", "periodic", "dirichlet", "matrix")
EXIT_OK, EXIT_INVARIANT, EXIT_CONFIG, EXIT_NUMERIC, EXIT_RESOURCE = 0, 1, 2, 3, 4

# identity residuals above this fail the run
IDENTITY_TOL = 1e-12
DEFAULT_OUTPUTS = {"series": "series.csv", "summary": "summary.json", "table": "table.csv"}


@dataclass
class ExperimentConfig:
    """Parsed experiment description.

    Attributes
    ----------
    mode : str
        One of :data:`MODES`.
    walk : dict
        ``{"kind": "shift", "d": 4}``;
        ``{"kind": "periodic" | "dirichlet", "n" or "d": ..., "seed": 7}``
        (optionally ``"margin"``) or ``{"kind": ..., "coins": {...}}``;
        ``{"kind": "matrix", "matrix": [[[re, im], ...], ...]}`` or
        ``{"kind": "matrix", "path": "W.json"}``.
    alpha : float
    reservoir : dict
        ``{"uniform": sigma}`` or ``{"band": [[re, im], ...]}``.
    steps, record_every : int
    periods : int
        Number of periods ``m`` for the shift-sample modes.
    R : int or None
        Reservoir modes for the oracle (default: smallest exact size).
    sweep : dict or None
        ``{"alpha": [...], "sigma": [...], "seeds": [...]}``.
    tolerance : float
        Pass threshold for oracle residuals.
    outputs : dict
        File names for ``series``, ``summary`` and ``table``.
    """

    mode: str
    walk: dict
    alpha: float
    reservoir: dict = field(default_factory=lambda: {"uniform": 0.5})
    steps: int = 0
    record_every: int = 1
    periods: int = 1
    R: int | None = None
    sweep: dict | None = None
    tolerance: float = 1e-10
    outputs: dict = field(default_factory=lambda: dict(DEFAULT_OUTPUTS))
    base_dir: str = field(default=".", compare=False, repr=False)

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidArgument(f"mode must be one of {MODES}, got {self.mode!r}")
        if not isinstance(self.walk, dict) or self.walk.get("kind") not in WALK_KINDS:
            raise InvalidArgument(f"walk.kind must be one of {WALK_KINDS}")
        self.alpha = float(self.alpha)
        if not math.isfinite(self.alpha):
            raise InvalidArgument("alpha must be finite")
        for name in ("steps", "record_every", "periods"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool):
                raise InvalidArgument(f"{name} must be an integer, got {v!r}")
        if self.steps < 0 or self.periods < 0:
            raise InvalidArgument("steps and periods must be >= 0")
        if self.record_every < 1:
            raise InvalidArgument("record_every must be >= 1")
        self.tolerance = float(self.tolerance)
        if not self.tolerance >= 0.0:
            raise InvalidArgument(f"tolerance must be >= 0, got {self.tolerance}")
        if self.R is not None and (not isinstance(self.R, int) or self.R < 2):
            raise InvalidArgument(f"R must be an integer >= 2, got {self.R!r}")
        if self.mode == "sweep":
            grids = self.sweep or {}
            for key in ("alpha", "sigma"):
                if not grids.get(key):
                    raise InvalidArgument(f"sweep mode needs a nonempty sweep.{key} grid")
            if "seeds" in grids and not grids["seeds"]:
                raise InvalidArgument("sweep.seeds must be nonempty when given")
        self.outputs = {**DEFAULT_OUTPUTS, **(self.outputs or {})}
        if self.walk["kind"] == "matrix" and "path" in self.walk:
            path = Path(self.base_dir, self.walk["path"])
            if not path.is_file():
                raise InvalidArgument(f"walk matrix file not found: {path}")
        # parse eagerly so bad symbols fail as configuration errors
        self.symbol()

    def symbol(self) -> ReservoirSymbol:
        return ReservoirSymbol.from_dict(self.reservoir)

    def to_dict(self) -> dict:
        out = asdict(self)
        out.pop("base_dir")
        return out

    @classmethod
    def from_dict(cls, data: dict, base_dir: str = ".") -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__ if f != "base_dir"}
        unknown = set(data) - known
        if unknown:
            raise InvalidArgument(f"unknown configuration keys: {sorted(unknown)}")
        for key in ("mode", "walk", "alpha"):
            if key not in data:
                raise InvalidArgument(f"configuration needs '{key}'")
        return cls(**data, base_dir=base_dir)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise InvalidArgument(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidArgument(f"config is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InvalidArgument("config must be a JSON object")
    return ExperimentConfig.from_dict(data, base_dir=str(path.parent))


@dataclass
class RunSummary:
    config: dict
    mode: str
    results: dict
    checks: dict
    passed: bool
    wall_time: float = 0.0

    def to_dict(self) -> dict:
        return _clean(asdict(self))


def _clean(x):
    """JSON-safe copy: NaN/inf become null, numpy scalars become Python ones."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _write_csv(path: Path, header, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    path.write_text(buf.getvalue())


# -- walk resolution ----------------------------------------------------------


def resolve_walk(walk_cfg: dict, base_dir: str = ".", seed=None):
    """``(SampleUnitary, CoinConfig or None)`` for a walk description.

    ``seed`` overrides ``walk_cfg["seed"]`` for seeded coined walks.
    """
    kind = walk_cfg["kind"]
    if kind == "shift":
        if "d" not in walk_cfg:
            raise InvalidArgument("shift walk needs 'd'")
        return SampleUnitary.shift(int(walk_cfg["d"])), None
    if kind == "matrix":
        if "matrix" in walk_cfg:
            data = walk_cfg["matrix"]
        elif "path" in walk_cfg:
            data = json.loads(Path(base_dir, walk_cfg["path"]).read_text())
            data = data.get("matrix", data) if isinstance(data, dict) else data
        else:
            raise InvalidArgument("matrix walk needs 'matrix' or 'path'")
        return SampleUnitary(matrix_from_json(data)), None
    boundary = walks.PERIODIC if kind == "periodic" else walks.DIRICHLET
    if "coins" in walk_cfg:
        coins = walks.CoinConfig.from_dict({**walk_cfg["coins"], "boundary": boundary})
    else:
        if "n" in walk_cfg:
            n = int(walk_cfg["n"])
        elif "d" in walk_cfg:
            d = int(walk_cfg["d"])
            if d % 2:
                raise InvalidArgument(f"coined walks have even d, got {d}")
            n = d // 2 if boundary == walks.PERIODIC else d // 2 + 1
        else:
            raise InvalidArgument("coined walk needs 'n', 'd' or 'coins'")
        s = walk_cfg.get("seed", 0) if seed is None else seed
        coins = walks.random_coins(n, s, boundary, float(walk_cfg.get("margin", 0.05)))
    return walks.build_walk(coins), coins


def _sigma(cfg: ExperimentConfig) -> float:
    sym = cfg.symbol()
    if not sym.is_uniform:
        raise InvalidArgument(f"mode {cfg.mode} needs an uncorrelated (uniform) reservoir")
    return sym.sigma0


def _spectral_dict(W, alpha) -> dict:
    return walks.thermalization_certificate(W, alpha).to_dict()


# -- modes --------------------------------------------------------------------


def _run_evolve1(cfg, out: Path) -> tuple[dict, dict]:
    W, _ = resolve_walk(cfg.walk, cfg.base_dir)
    sigma = _sigma(cfg)
    eff = build_effective(W, cfg.alpha, sigma)
    tr = onebody.evolve(onebody.OneBodyDensity.vacuum(eff.d), eff, cfg.steps, cfg.record_every)
    rows = [(t, dist, float(s.density().mean())) for t, dist, s in zip(tr.times, tr.distances_to_limit, tr.snapshots)]
    _write_csv(out / cfg.outputs["series"], ["t", "distance_rho1", "mean_density"], rows)
    rep = spectral_report(eff.M)
    rate = onebody.fit_decay_rate(tr.times, tr.distances_to_limit) if rep.condition_ok else float("nan")
    results = {
        "d": eff.d,
        "final_distance_rho1": tr.distances_to_limit[-1],
        "spectral": rep.to_dict(),
        "fitted_decay_rate": rate,
        "spectral_radius_squared": rep.spectral_radius**2,
    }
    checks = {"identity_residual": (eff.identity_residual(), IDENTITY_TOL)}
    return results, checks


def _run_evolve2(cfg, out: Path):
    W, _ = resolve_walk(cfg.walk, cfg.base_dir)
    sigma = _sigma(cfg)
    eff = build_effective(W, cfg.alpha, sigma)
    d = eff.d
    if d < 2:
        raise InvalidArgument("two-body evolution needs d >= 2")
    tr = twobody.evolve_pair(
        onebody.OneBodyDensity.vacuum(d), twobody.TwoBodyDensity.vacuum(d), eff, cfg.steps, cfg.record_every
    )
    I1, I2 = sigma * np.eye(d), sigma**2 * np.eye(wedge_basis(d, 2).dim)
    d1 = [opnorm(r.rho - I1) for r in tr.rho1]
    d2 = [opnorm(r.rho2 - I2) for r in tr.rho2]
    _write_csv(out / cfg.outputs["series"], ["t", "distance_rho1", "distance_rho2"], zip(tr.times, d1, d2))
    rep = spectral_report(eff.M)
    results = {
        "d": d,
        "final_distance_rho1": d1[-1],
        "final_distance_rho2": d2[-1],
        "spectral": rep.to_dict(),
        "fitted_decay_rate": onebody.fit_decay_rate(tr.times, d1) if rep.condition_ok else float("nan"),
        "spectral_radius_squared": rep.spectral_radius**2,
    }
    checks = {
        "identity_residual": (eff.identity_residual(), IDENTITY_TOL),
        "identity_residual_2body": (twobody.check_identity_2body(eff), IDENTITY_TOL),
    }
    if rep.condition_ok:
        checks["fixed_point_rho1"] = (opnorm(onebody.fixed_point(eff).rho - I1), 1e-10)
        if d <= twobody.MAX_DIRECT_D:
            checks["fixed_point_rho2"] = (opnorm(twobody.fixed_point2(eff).rho2 - I2), 1e-9)
    return results, checks


def _require_shift_walk(cfg) -> int:
    if cfg.walk["kind"] != "shift":
        raise InvalidArgument(f"mode {cfg.mode} needs the shift sample (walk.kind = 'shift')")
    return int(cfg.walk["d"])


def _run_shift_exact(cfg, out: Path):
    d = _require_shift_walk(cfg)
    sym = cfg.symbol()
    a = cfg.alpha
    c2 = math.cos(a) ** 2
    zero1 = np.zeros((d, d))
    zero2 = np.zeros((wedge_basis(d, 2).dim,) * 2) if d >= 2 else None
    has_limit = abs(math.cos(a)) < 1.0
    lim = shift_exact.one_body_limit(sym, a, d).rho if has_limit else None
    rows, rec = [], 0.0
    prev = None
    for m in range(cfg.periods + 1):
        r1 = shift_exact.one_body_at(sym, zero1, a, m).rho
        if prev is not None:
            pred = c2 * prev + (1 - c2) * shift_exact.b_of_m(sym, a, d, m - 1)
            rec = max(rec, float(np.abs(r1 - pred).max()))
        prev = r1
        dist = opnorm(r1 - lim) if has_limit else float("nan")
        rows.append((m, m * d, dist, float(r1[0, 0].real)))
    _write_csv(out / cfg.outputs["series"], ["m", "t", "distance_to_limit", "density_site0"], rows)
    results = {"d": d, "periods": cfg.periods}
    if has_limit:
        prof = shift_exact.asymptotic_density_and_correlations(sym, a, d)
        results["limit_rho1"] = matrix_to_json(lim)
        results["asymptotic"] = prof.to_dict()
    if zero2 is not None:
        r2 = shift_exact.two_body_at(sym, zero1, zero2, a, cfg.periods).rho2
        results["final_rho2"] = matrix_to_json(r2)
    checks = {"one_period_recursion": (rec, 1e-12)}
    return results, checks


def _run_ris_stats(cfg, out: Path):
    d = _require_shift_walk(cfg)
    sigma = _sigma(cfg)
    a = cfg.alpha
    dist = ris.number_distribution(cfg.periods, sigma, a, d)
    t_max = cfg.steps if cfg.steps else cfg.periods * d
    n0 = np.zeros(d)
    recs = ris.flux_series(t_max, sigma, a, d, n0)
    _write_csv(
        out / cfg.outputs["series"],
        ["t", "flux_expectation", "cumulative", "balance"],
        [(r.t, r.expectation, r.cumulative, r.balance) for r in recs],
    )
    _write_csv(out / cfg.outputs["table"], ["p", "pmf"], enumerate(dist.pmf))
    gap = max(abs(r.cumulative - r.balance) for r in recs)
    closed = [abs(r.cumulative - r.closed_form) for r in recs if r.closed_form is not None]
    results = {"d": d, "m": cfg.periods, "q": dist.q, "pmf": list(dist.pmf), "mean": dist.mean}
    checks = {
        "flux_balance": (gap, 1e-12),
        "flux_closed_form": (max(closed) if closed else 0.0, 1e-12),
        "pmf_normalisation": (abs(sum(dist.pmf) - 1.0), 1e-12),
    }
    return results, checks


def _run_oracle_check(cfg, out: Path):
    W, _ = resolve_walk(cfg.walk, cfg.base_dir)
    sym = cfg.symbol()
    a, t, d = cfg.alpha, cfg.steps, W.d
    sim = fock.simulate(sym, None, W, a, t, R=cfg.R)
    is_shift = np.array_equal(W.W, shift_matrix(d))
    rows = []

    def add(name, time, value):
        rows.append((name, time, float(value), cfg.tolerance, bool(value <= cfg.tolerance)))

    if sym.is_uniform:
        eff = build_effective(W, a, sym.sigma0)
        tr = twobody.evolve_pair(onebody.OneBodyDensity.vacuum(d), twobody.TwoBodyDensity.vacuum(d), eff, t)
        for n in range(t + 1):
            add("rho1_vs_recursion", n, np.abs(sim.rho1[n] - tr.rho1[n].rho).max())
            if d >= 2:
                add("rho2_vs_recursion", n, np.abs(sim.rho2[n] - tr.rho2[n].rho2).max())
    elif not is_shift:
        raise InvalidArgument("correlated reservoirs are only checked against the shift sample")
    if is_shift:
        n0 = np.zeros(d)
        for m in range(t // d + 1):
            n = m * d
            r1 = shift_exact.one_body_at(sym, np.zeros((d, d)), a, m).rho
            add("rho1_vs_shift_closed_form", n, np.abs(sim.rho1[n] - r1).max())
            if d >= 2:
                r2 = shift_exact.two_body_at(sym, np.zeros((d, d)), np.zeros((wedge_basis(d, 2).dim,) * 2), a, m)
                add("rho2_vs_shift_closed_form", n, np.abs(sim.rho2[n] - r2.rho2).max())
            if sym.is_uniform:
                pmf = ris.number_distribution(m, sym.sigma0, a, d).pmf
                add("pmf_vs_binomial", n, np.abs(sim.number_pmf[n] - np.array(pmf)).max())
        if sym.is_uniform:
            for n in range(t + 1):
                f = ris.flux_expectation(n, sym.sigma0, a, d, n0).expectation
                add("flux_vs_formula", n, abs(sim.flux[n] - f))
    for n in range(t + 1):
        add("odd_correlators", n, sim.odd_correlators[n])
    if d <= 5:
        ident = fock.heisenberg_identity_check(fock.FockRep(min(sim.R, 3), d), a, W)
        for name, v in ident.items():
            rows.append(("identity:" + name, 0, v, IDENTITY_TOL, bool(v <= IDENTITY_TOL)))
    _write_csv(out / cfg.outputs["table"], ["check", "t", "residual", "tolerance", "pass"], rows)
    worst = {}
    for name, _, v, tol, _ in rows:
        worst[name] = (max(worst.get(name, (0.0, tol))[0], v), tol)
    results = {"d": d, "R": sim.R, "steps": t, "rows": len(rows)}
    return results, worst


def _run_spectral(cfg, out: Path):
    W, coins = resolve_walk(cfg.walk, cfg.base_dir)
    results = {
        "d": W.d,
        "spectral": _spectral_dict(W, cfg.alpha),
        "cyclic": walks.is_cyclic(W),
        "krylov_min_singular_value": float(walks.krylov_singular_values(W).min()),
    }
    if coins is not None:
        g = walks.is_generic(coins)
        results["generic"] = g.generic
        results["genericity_margins"] = {str(k): v for k, v in g.margins.items()}
    checks = {}
    cos = math.cos(cfg.alpha)
    if results["cyclic"] and abs(abs(cos) - 1.0) > 1e-15:
        # a cyclic coupled site with a nontrivial coupling must give a contraction
        rad = results["spectral"]["spectral_radius"]
        checks["cyclic_implies_contraction"] = (max(0.0, rad - (1.0 - 1e-10)), 0.0)
    sym = cfg.symbol()
    if sym.is_uniform:
        eff = build_effective(W, cfg.alpha, sym.sigma0)
        checks["identity_residual"] = (eff.identity_residual(), IDENTITY_TOL)
        checks["identity_residual_2body"] = (twobody.check_identity_2body(eff), IDENTITY_TOL)
    return results, checks


def _sweep_row(args):
    cfg_dict, base_dir, alpha, sigma, seed = args
    cfg = ExperimentConfig.from_dict(cfg_dict, base_dir)
    W, _ = resolve_walk(cfg.walk, base_dir, seed=seed)
    eff = build_effective(W, alpha, sigma)
    d = eff.d
    rep = spectral_report(eff.M)
    tr = twobody.evolve_pair(onebody.OneBodyDensity.vacuum(d), twobody.TwoBodyDensity.vacuum(d), eff, cfg.steps)
    d1 = [opnorm(r.rho - sigma * np.eye(d)) for r in tr.rho1]
    d2 = opnorm(tr.rho2[-1].rho2 - sigma**2 * np.eye(wedge_basis(d, 2).dim))
    rate = onebody.fit_decay_rate(tr.times, d1) if rep.condition_ok else None
    return (
        alpha,
        sigma,
        seed,
        rep.spectral_radius,
        rep.spectral_radius**2,
        rep.condition_ok,
        rate,
        d1[-1],
        d2,
    )


SWEEP_HEADER = [
    "alpha",
    "sigma",
    "seed",
    "spectral_radius",
    "spectral_radius_squared",
    "condition_ok",
    "fitted_rate",
    "final_distance_rho1",
    "final_distance_rho2",
]


def sweep(cfg: ExperimentConfig, jobs: int | None = None) -> list[tuple]:
    """Rows for every ``(alpha, sigma, seed)`` in grid order.

    Rows are independent; with ``jobs > 1`` they run in a process pool and
    are collected in grid order, so the table does not depend on ``jobs``.
    """
    grids = cfg.sweep or {}
    seeds = grids.get("seeds") or [cfg.walk.get("seed")]
    cfg_dict = cfg.to_dict()
    tasks = [
        (cfg_dict, cfg.base_dir, float(a), float(s), sd)
        for a in grids["alpha"]
        for s in grids["sigma"]
        for sd in seeds
    ]
    jobs = jobs or os.cpu_count() or 1
    if jobs <= 1 or len(tasks) <= 1:
        return [_sweep_row(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
        return list(pool.map(_sweep_row, tasks))


def _run_sweep(cfg, out: Path, jobs=None):
    rows = sweep(cfg, jobs)
    _write_csv(out / cfg.outputs["table"], SWEEP_HEADER, rows)
    flagged = sum(1 for r in rows if not r[5])
    ratios = [r[6] / r[4] for r in rows if r[5] and r[6] is not None and r[4] > 0 and math.isfinite(r[6])]
    results = {
        "rows": len(rows),
        "condition_failures": flagged,
        "max_rate_ratio_deviation": max((abs(x - 1) for x in ratios), default=None),
    }
    return results, {}


_RUNNERS = {
    "evolve1": _run_evolve1,
    "evolve2": _run_evolve2,
    "shift-exact": _run_shift_exact,
    "ris-stats": _run_ris_stats,
    "oracle-check": _run_oracle_check,
    "spectral": _run_spectral,
}


def run(cfg: ExperimentConfig, out_dir=".", jobs: int | None = None) -> RunSummary:
    """Run one experiment, write its files into ``out_dir`` and return the summary."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    if cfg.mode == "sweep":
        results, checks = _run_sweep(cfg, out, jobs)
    else:
        results, checks = _RUNNERS[cfg.mode](cfg, out)
    check_out = {
        name: {"value": float(v), "tolerance": float(tol), "pass": bool(v <= tol)}
        for name, (v, tol) in checks.items()
    }
    summary = RunSummary(
        config=cfg.to_dict(),
        mode=cfg.mode,
        results=results,
        checks=check_out,
        passed=all(c["pass"] for c in check_out.values()),
        wall_time=time.perf_counter() - start,
    )
    text = json.dumps(summary.to_dict(), indent=2, sort_keys=True) + "\n"
    (out / cfg.outputs["summary"]).write_text(text)
    return summary


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fermiwalk", description="Fermionic quantum walks coupled to a reservoir.")
    p.add_argument("--config", required=True, help="experiment configuration (JSON)")
    p.add_argument("--out", default=".", help="output directory (default: current directory)")
    p.add_argument("--jobs", type=int, default=None, help="worker processes for sweeps (default: all cores)")
    p.add_argument("--verbose", action="store_true", help="log progress to stderr")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.jobs is not None and args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(args.config)
        log.info("running %s", cfg.mode)
        summary = run(cfg, args.out, args.jobs)
    except (InvalidArgument, PreconditionViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericFailure as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ResourceLimit as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except FermiWalkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    log.info("finished in %.3f s", summary.wall_time)
    for name, c in summary.checks.items():
        log.info("%-40s %.3e  %s", name, c["value"], "ok" if c["pass"] else "FAIL")
    if not summary.passed:
        failed = [n for n, c in summary.checks.items() if not c["pass"]]
        print(f"invariant check failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
