"""Seeded Monte Carlo experiments checked against the analytic limits.

Each trial draws from its own generator ``trial_rng(master_seed, trial, j)``
(``j`` indexes the time), so trials are independent of execution order and
aggregation only sums or counts. Targets are recomputed at run time.
"""
from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import hypergraph as hg
from .errors import ConfigError
from .limits import BorelLaw
from .mixing import MixingDistribution
from .rng import trial_rng
from .sampler import sample_process, sample_static
from .stats import Comparison, compare_distributions
from .structure import analyze, fluid_prediction, graph_envelope, nonidentifiable_mean

SCHEMA_VERSION = "1.0"

KINDS = ("static-limit", "process-path", "jump-coinflip",
         "domain-microscopic", "domain-macroscopic", "core-check")

DEFAULT_TOLERANCES = {
    "static-limit": {"vertex_tol": 0.01, "edge_tol": 0.01, "min_fraction": 0.9,
                     "cluster_tol": 0.05, "coin_low": 0.35, "coin_high": 0.65,
                     "max_abs_z": 4.0},
    "process-path": {"vertex_tol": 0.01, "edge_tol": 0.01, "min_fraction": 0.9,
                     "cluster_tol": 0.05, "coin_low": 0.35, "coin_high": 0.65},
    "jump-coinflip": {"cluster_tol": 0.05, "coin_low": 0.35, "coin_high": 0.65},
    "domain-microscopic": {"tv": 0.03, "window": 30, "min_tree_fraction": 0.95},
    "domain-macroscopic": {"frequency_tol": 0.05, "vertex_tol": 0.02, "edge_tol": 0.02,
                           "large_exponent": 2.0 / 3.0},
    "core-check": {},
}

RECORD_COLUMNS = {
    "static-limit": ["trial", "t", "vertices", "edges", "total_edges"],
    "jump-coinflip": ["trial", "t", "vertices", "edges", "total_edges"],
    "process-path": ["trial", "t", "vertices", "edges"],
    "domain-microscopic": ["trial", "t", "v0", "size", "edges"],
    "domain-macroscopic": ["trial", "t", "v0", "size", "edges"],
    "core-check": ["trial", "n", "m", "core_size", "agree"],
}


@dataclass
class ExperimentConfig:
    kind: str
    rho: tuple = ()
    n: int = 1000
    times: tuple = ()
    trials: int = 10
    master_seed: int = 0
    tolerances: dict = field(default_factory=dict)
    output: Optional[str] = None
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}; expected one of {KINDS}")
        if int(self.trials) < 1:
            raise ConfigError("trials must be at least 1")
        if int(self.n) < 1:
            raise ConfigError("n must be at least 1")
        self.trials, self.n, self.master_seed = int(self.trials), int(self.n), int(self.master_seed)
        self.times = tuple(float(t) for t in self.times)
        if any(not math.isfinite(t) or t < 0 for t in self.times):
            raise ConfigError("times must be finite and non-negative")
        if self.kind != "core-check":
            if not self.rho:
                raise ConfigError("rho coefficients are required")
            try:
                self.mixing
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES[self.kind])
        if unknown:
            raise ConfigError(f"unknown tolerances {sorted(unknown)} for {self.kind}")

    @property
    def mixing(self) -> MixingDistribution:
        return MixingDistribution(tuple(self.rho))

    def tol(self, key):
        return self.tolerances.get(key, DEFAULT_TOLERANCES[self.kind][key])

    def effective_tolerances(self):
        return {**DEFAULT_TOLERANCES[self.kind], **self.tolerances}

    def to_dict(self):
        return {"kind": self.kind, "rho": list(self.rho), "n": self.n, "times": list(self.times),
                "trials": self.trials, "master_seed": self.master_seed,
                "tolerances": self.effective_tolerances(), "output": self.output,
                "options": dict(self.options)}

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if not isinstance(d, dict) or "kind" not in d:
            raise ConfigError("config must be an object with a 'kind'")
        known = {"kind", "rho", "n", "times", "trials", "master_seed", "tolerances", "output", "options"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys {sorted(extra)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            try:
                return cls.from_dict(json.load(fh))
            except json.JSONDecodeError as exc:
                raise ConfigError(f"invalid JSON: {exc}") from exc


@dataclass
class Report:
    kind: str
    config: dict
    records: list
    summaries: dict
    comparisons: list
    timing: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.comparisons if c.passed is not None)

    def to_dict(self):
        """Deterministic content; wall-clock data lives in ``timing`` only."""
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": self.kind,
            "config": self.config,
            "summaries": self.summaries,
            "comparisons": [c.to_dict() for c in self.comparisons],
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def records_csv(self, fh):
        cols = RECORD_COLUMNS[self.kind]
        w = csv.writer(fh)
        w.writerow(["schema_version"] + cols)
        for r in self.records:
            w.writerow([SCHEMA_VERSION] + [_fmt(r[c]) for c in cols])

    def write(self, outdir, fmt="json"):
        os.makedirs(outdir, exist_ok=True)
        with open(os.path.join(outdir, "report.json"), "w") as fh:
            fh.write(self.to_json() + "\n")
        if fmt == "csv":
            with open(os.path.join(outdir, "records.csv"), "w", newline="") as fh:
                self.records_csv(fh)
        with open(os.path.join(outdir, "timing.json"), "w") as fh:
            json.dump(self.timing, fh, indent=2)


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


# static snapshots


def _static_trials(cfg, t, j):
    beta = cfg.mixing.scaled(t)
    out = []
    for trial in range(cfg.trials):
        h = sample_static(beta, cfg.n, trial_rng(cfg.master_seed, trial, j))
        v, e = hg.collapse_counts(h)
        out.append({"trial": trial, "t": t, "vertices": v, "edges": e, "total_edges": h.num_edges})
    return out


def _fluid_comparisons(cfg, t, frac_v, frac_e, pred, label, provenance):
    """Gate trials on closeness to the single atom, or on the two-cluster law at a jump."""
    comps = []
    n_trials = len(frac_v)
    if not pred.is_jump:
        a = pred.atoms[0]
        ok = (np.abs(frac_v - a.vertices) < cfg.tol("vertex_tol")) & (np.abs(frac_e - a.edges) < cfg.tol("edge_tol"))
        frac = float(ok.mean())
        comps.append(Comparison(
            f"{label}-fluid@t={t!r}", "fraction_within_tolerance", frac, n_trials,
            f"(g(t), t*rho(g) - (1-g)log(1-g)) = ({a.vertices!r}, {a.edges!r})", provenance,
            cfg.tol("min_fraction"), frac >= cfg.tol("min_fraction")))
        return comps
    lo, hi = pred.atoms
    mid = 0.5 * (lo.vertices + hi.vertices)
    left = frac_v < mid
    centre = np.where(left, lo.vertices, hi.vertices)
    within = float((np.abs(frac_v - centre) <= cfg.tol("cluster_tol")).mean())
    comps.append(Comparison(
        f"{label}-clusters@t={t!r}", "fraction_within_cluster", within, n_trials,
        f"g(t-) = {lo.vertices!r} or g(t) = {hi.vertices!r}, midpoint separator",
        "two-point limit law at a jump time", 1.0, within >= 1.0))
    p_left = float(left.mean())
    band = (cfg.tol("coin_low"), cfg.tol("coin_high"))
    comps.append(Comparison(
        f"{label}-coin@t={t!r}", "left_cluster_frequency", p_left, n_trials,
        "1/2 (fair coin between g(t-) and g(t))", "two-point limit law at a jump time; band is heuristic",
        band[1] - 0.5, band[0] <= p_left <= band[1]))
    zc = compare_distributions(left, 0.5, name=f"{label}-coin-z@t={t!r}", target_name="p = 1/2",
                               provenance="binomial calibration")
    comps.append(zc)
    return comps


def _conditional_mean_comparison(cfg, t, recs):
    """Non-identifiable edges binned by identifiable vertex count vs the exact conditional mean."""
    by_m = {}
    for r in recs:
        by_m.setdefault(r["vertices"], []).append(r["total_edges"] - r["edges"])
    bins, worst = [], 0.0
    for m_id in sorted(by_m):
        if m_id >= cfg.n:
            continue
        vals = by_m[m_id]
        exact = nonidentifiable_mean(cfg.mixing, cfg.n, t, m_id)
        se = math.sqrt(exact / len(vals)) if exact > 0 else 0.0
        emp = float(np.mean(vals))
        z = (emp - exact) / se if se > 0 else (0.0 if emp == exact else math.inf)
        worst = max(worst, abs(z))
        bins.append({"m": m_id, "count": len(vals), "mean": emp, "exact": exact, "z": z})
    thr = cfg.tol("max_abs_z")
    comp = Comparison(
        f"conditional-mean@t={t!r}", "max_abs_z", worst, len(recs),
        "N t sum_k rho_k P(k-subset has >= 2 vertices outside the identifiable set)",
        "conditional Poisson law of non-identifiable edges", thr, worst <= thr)
    return comp, bins


def run_static_limit(cfg: ExperimentConfig) -> Report:
    m = cfg.mixing
    if cfg.kind == "static-limit" and m.rho1 <= 0:
        raise ConfigError("static-limit needs rho_1 > 0")
    prof = analyze(m)
    times = cfg.times
    if cfg.kind == "jump-coinflip" and not times:
        times = tuple(j.s for j in prof.xi)
        if not times:
            raise ConfigError("rho has no discontinuity; nothing to flip")
    records, comps, summaries = [], [], {}
    for j, t in enumerate(times):
        recs = _static_trials(cfg, t, j)
        records += recs
        fv = np.array([r["vertices"] for r in recs], float) / cfg.n
        fe = np.array([r["edges"] for r in recs], float) / cfg.n
        pred = fluid_prediction(m, t, prof)
        if cfg.kind == "jump-coinflip" and not pred.is_jump:
            raise ConfigError(f"t={t!r} is not a jump time of g")
        summaries[repr(t)] = {
            "mean_vertices": float(fv.mean()), "mean_edges": float(fe.mean()),
            "atoms": [{"p": a.probability, "vertices": a.vertices, "edges": a.edges} for a in pred.atoms],
        }
        if cfg.kind == "jump-coinflip":
            comps += [c for c in _fluid_comparisons(cfg, t, fv, fe, pred, "static", "fixed-time limit law")
                      if not c.statistic == "fraction_within_tolerance"]
        else:
            comps += _fluid_comparisons(cfg, t, fv, fe, pred, "static", "fixed-time limit law")
            if cfg.options.get("conditional_mean") and t > 0:
                c, bins = _conditional_mean_comparison(cfg, t, recs)
                comps.append(c)
                summaries[repr(t)]["conditional_mean_bins"] = bins
    return Report(cfg.kind, cfg.to_dict(), records, summaries, comps)


def run_process_path(cfg: ExperimentConfig) -> Report:
    m = cfg.mixing
    if m.rho1 <= 0:
        raise ConfigError("process-path needs rho_1 > 0")
    if not cfg.times or any(t <= 0 for t in cfg.times):
        raise ConfigError("process-path needs positive times")
    grid = np.array(sorted(cfg.times))
    prof = analyze(m)
    records = []
    paths_v = np.empty((cfg.trials, len(grid)))
    paths_e = np.empty_like(paths_v)
    for trial in range(cfg.trials):
        stream = sample_process(m, cfg.n, float(grid[-1]), trial_rng(cfg.master_seed, trial, 0))
        path = stream.identifiability_path(grid)
        for k, (t, v, e) in enumerate(path):
            paths_v[trial, k], paths_e[trial, k] = v, e
            records.append({"trial": trial, "t": t, "vertices": v, "edges": e})
    comps, summaries = [], {}
    monotone = bool(np.all(np.diff(paths_v, axis=1) >= 0) and np.all(np.diff(paths_e, axis=1) >= 0))
    comps.append(Comparison("path-monotone", "all_trials_monotone", float(monotone), cfg.trials,
                            "non-decreasing identifiable counts", "arrivals only add edges",
                            1.0, monotone))
    off_jump = []
    for k, t in enumerate(grid):
        pred = fluid_prediction(m, float(t), prof)
        comps += _fluid_comparisons(cfg, float(t), paths_v[:, k], paths_e[:, k], pred, "path",
                                    "fluid limit of the identifiability path")
        if not pred.is_jump:
            off_jump.append((k, pred.atoms[0]))
        summaries[repr(float(t))] = {"mean_vertices": float(paths_v[:, k].mean()),
                                     "mean_edges": float(paths_e[:, k].mean())}
    if off_jump:
        dev = np.max([np.maximum(np.abs(paths_v[:, k] - a.vertices), np.abs(paths_e[:, k] - a.edges))
                      for k, a in off_jump], axis=0)
        summaries["sup_deviation_quantiles"] = {q: float(np.quantile(dev, float(q))) for q in ("0.5", "0.9", "1.0")}
    return Report(cfg.kind, cfg.to_dict(), records, summaries, comps)


def run_domain_experiments(cfg: ExperimentConfig) -> Report:
    m = cfg.mixing
    if not (m.rho1 == 0 < m.rho2):
        raise ConfigError("domain experiments need rho_1 = 0 < rho_2")
    if not cfg.times or any(t <= 0 for t in cfg.times):
        raise ConfigError("domain experiments need positive times")
    prof = analyze(m)
    records, comps, summaries = [], [], {}
    for j, t in enumerate(cfg.times):
        beta = m.scaled(t)
        sizes, edges = [], []
        for trial in range(cfg.trials):
            rng = trial_rng(cfg.master_seed, trial, j)
            v0 = int(rng.integers(cfg.n))
            h = sample_static(beta, cfg.n, rng)
            s, e = hg.domain_counts(h, v0)
            sizes.append(s)
            edges.append(e)
            records.append({"trial": trial, "t": t, "v0": v0, "size": s, "edges": e})
        sizes = np.array(sizes)
        edges = np.array(edges)
        mu = 2.0 * t * m.rho2
        if cfg.kind == "domain-microscopic":
            w = int(cfg.tol("window"))
            law = BorelLaw(mu)
            comps.append(compare_distributions(
                sizes, law.window(w), support=np.arange(1, w + 1), name=f"borel@t={t!r}",
                target_name=f"Borel({mu!r}) on 1..{w}", provenance="total progeny of a Poisson branching process",
                threshold=cfg.tol("tv")))
            small = sizes <= w
            tree = float((edges[small] + 1 == sizes[small]).mean()) if small.any() else 1.0
            comps.append(Comparison(
                f"micro-degeneracy@t={t!r}", "fraction_edges_equal_size", tree, int(small.sum()),
                "(M, M): identifiable edges plus the added patch equal the domain size",
                "microscopic limit of (T, Z)", cfg.tol("min_tree_fraction"), tree >= cfg.tol("min_tree_fraction")))
            summaries[repr(t)] = {"mean_size": float(sizes.mean()),
                                  "fraction_outside_window": float((~small).mean())}
        else:
            cut = cfg.n ** cfg.tol("large_exponent")
            large = sizes > cut
            p_target = graph_envelope(m.rho2, t)
            freq = float(large.mean())
            comps.append(Comparison(
                f"large-frequency@t={t!r}", "abs_difference", abs(freq - p_target), cfg.trials,
                f"g2(t) = {p_target!r}", "escape probability of the branching walk",
                cfg.tol("frequency_tol"), abs(freq - p_target) <= cfg.tol("frequency_tol")))
            pred = fluid_prediction(m, t, prof)
            big = pred.macro_atoms[-1]
            summ = {"large_frequency": freq, "cutoff": cut}
            if large.any():
                tv = float(sizes[large].mean()) / cfg.n
                ze = float(edges[large].mean()) / cfg.n
                comps.append(Comparison(
                    f"large-vertices@t={t!r}", "abs_difference", abs(tv - big.vertices), int(large.sum()),
                    f"g(t) = {big.vertices!r}", "macroscopic domain limit",
                    cfg.tol("vertex_tol"), abs(tv - big.vertices) <= cfg.tol("vertex_tol")))
                comps.append(Comparison(
                    f"large-edges@t={t!r}", "abs_difference", abs(ze - big.edges), int(large.sum()),
                    f"t*rho(g) - (1-g)log(1-g) = {big.edges!r}", "macroscopic domain limit",
                    cfg.tol("edge_tol"), abs(ze - big.edges) <= cfg.tol("edge_tol")))
                summ.update(conditional_vertices=tv, conditional_edges=ze)
            summaries[repr(t)] = summ
    return Report(cfg.kind, cfg.to_dict(), records, summaries, comps)


def run_core_check(cfg: ExperimentConfig) -> Report:
    max_n = int(cfg.options.get("max_n", 50))
    records, agree_all = [], True
    densities = np.linspace(0.2, 2.5, 12)
    for trial in range(cfg.trials):
        rng = trial_rng(cfg.master_seed, trial, 0)
        n = int(rng.integers(2, max_n + 1))
        e = int(round(densities[trial % len(densities)] * n))
        g = hg.random_multigraph(n, e, rng)
        a, b = hg.two_core_peel(g), hg.two_core_dual(g)
        agree_all &= a == b
        records.append({"trial": trial, "n": n, "m": e, "core_size": len(a), "agree": int(a == b)})
    comps = [Comparison("core-duality", "all_agree", float(agree_all), cfg.trials,
                        "degree-one peeling oracle", "2-core equals the complement of dual identifiability",
                        1.0, agree_all)]
    return Report(cfg.kind, cfg.to_dict(), records, {}, comps)


RUNNERS = {
    "static-limit": run_static_limit,
    "jump-coinflip": run_static_limit,
    "process-path": run_process_path,
    "domain-microscopic": run_domain_experiments,
    "domain-macroscopic": run_domain_experiments,
    "core-check": run_core_check,
}


def run_experiment(cfg: ExperimentConfig) -> Report:
    import time
    start = time.perf_counter()
    report = RUNNERS[cfg.kind](cfg)
    report.timing = {"seconds": time.perf_counter() - start}
    return report
