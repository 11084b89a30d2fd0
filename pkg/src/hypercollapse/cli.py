"""Command-line entry point: ``hypercollapse <subcommand> ...``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import hypergraph as hg
from .errors import ConfigError
from .experiments import SCHEMA_VERSION, ExperimentConfig, run_experiment
from .limits import BorelLaw, chain_paths, coupled_families, first_passage_times, initial_patches
from .mixing import MixingDistribution
from .rng import make_rng
from .sampler import sample_process, sample_static
from .stats import tv_window
from .structure import analyze, phi


def _floats(text):
    """Comma-separated numbers or a JSON array."""
    text = text.strip()
    if text.startswith("["):
        return [float(x) for x in json.loads(text)]
    return [float(x) for x in text.replace(";", ",").split(",") if x.strip()]


def _mixing(text, probability=True):
    return MixingDistribution(tuple(_floats(text)), is_probability=probability)


def _jsonable(v):
    if isinstance(v, np.generic):
        v = v.item()
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return v


def _cell(v):
    v = _jsonable(v)
    if isinstance(v, float):
        return repr(v)
    return v


class Output:
    """Collects named tables/documents and writes them to --out or stdout."""

    def __init__(self, args):
        self.outdir = args.out
        self.fmt = args.format

    def _emit(self, name, text):
        if self.outdir:
            os.makedirs(self.outdir, exist_ok=True)
            with open(os.path.join(self.outdir, name), "w", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)

    def document(self, name, obj):
        self._emit(name + ".json", json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n")

    def table(self, name, header, rows):
        if self.fmt == "json":
            self.document(name, {"schema_version": SCHEMA_VERSION,
                                 "rows": [dict(zip(header, map(_jsonable, r))) for r in rows]})
            return
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(header)
        for r in rows:
            w.writerow([_cell(x) for x in r])
        self._emit(name + ".csv", buf.getvalue())


def cmd_analyze(args, out):
    m = _mixing(args.rho)
    prof = analyze(m, args.resolution)
    out.document("profile", prof.to_dict())
    if args.s_max:
        s = np.linspace(0.0, args.s_max, args.points)
        out.table("envelopes", ["s", "g", "g_star"], prof.envelope_table(s).tolist())


def cmd_sample(args, out):
    beta = _mixing(args.rho, probability=False) if args.beta else _mixing(args.rho).scaled(args.t)
    h = sample_static(beta, args.n, args.seed)
    text = h.to_json() + "\n" if args.format == "json" else h.to_text()
    out._emit("hypergraph." + ("json" if args.format == "json" else "txt"), text)


def cmd_process(args, out):
    m = _mixing(args.rho)
    stream = sample_process(m, args.n, args.horizon, args.seed)
    grid = _floats(args.grid) if args.grid else np.linspace(0, args.horizon, 21)[1:].tolist()
    path = stream.identifiability_path(grid)
    out.table("path", ["t", "vertices", "edges"], path)
    if args.events and out.outdir:
        stream.to_csv(os.path.join(out.outdir, "events.csv"))


def _load(path):
    return hg.load(path)


def cmd_collapse(args, out):
    h = _load(args.file)
    res = hg.collapse(h, args.seed if args.randomized else None)
    out.document("collapse", {
        "identifiable_vertices": sorted(res.identifiable_vertices),
        "identifiable_edge_count": res.identifiable_edge_count,
        "residual": json.loads(res.residual.to_json()),
        "residual_labels": list(res.residual_labels),
    })
    tr = res.trace
    rows = [(0, -1, tr.initial_patches, tr.initial_debris)]
    rows += [(i + 1, v, y, z) for i, (v, y, z) in enumerate(tr.steps)]
    out.table("trace", ["n", "vertex", "Y", "Z"], rows)


def cmd_domain(args, out):
    h = _load(args.file)
    dom, edges = hg.domain_of(h, args.v0)
    out.document("domain", {"v0": args.v0, "domain": sorted(dom), "edges": edges})


def cmd_core(args, out):
    g = _load(args.file)
    out.document("core", {"core": sorted(hg.two_core(g))})


def cmd_walk(args, out):
    rng = make_rng(args.seed)
    if args.mu is not None:
        times, ms = [None], first_passage_times(args.mu, args.trials, args.n_cap, rng)[:, None]
        mus = [args.mu]
    else:
        times = _floats(args.grid)
        ms = coupled_families(times, args.rho2, args.trials, args.n_cap, rng)
        mus = [2.0 * args.rho2 * t for t in times]
    rows = [(i, times[j] if times[j] is not None else "", "inf" if math.isinf(ms[i, j]) else int(ms[i, j]))
            for i in range(ms.shape[0]) for j in range(ms.shape[1])]
    out.table("walks", ["trial", "t", "M"], rows)
    summary = []
    for j, mu in enumerate(mus):
        col = ms[:, j]
        w = args.window
        law = BorelLaw(mu)
        tv, out_e, out_t = tv_window(col, np.arange(1, w + 1), law.window(w))
        summary.append({"t": times[j], "mu": mu, "escape_frequency": float(np.isinf(col).mean()),
                        "escape_target": phi(mu), "tv_borel_window": tv, "window": [1, w],
                        "outside_empirical": out_e, "outside_target": out_t,
                        "empirical_pmf": [float(x) for x in np.bincount(col[np.isfinite(col)].astype(int), minlength=w + 1)[1:w + 1] / len(col)]})
    if times[0] is not None:
        mono = bool(np.all(ms[:, 1:] >= ms[:, :-1]))
        out.document("walk_summary", {"schema_version": SCHEMA_VERSION, "times": summary, "monotone": mono})
    else:
        out.document("walk_summary", {"schema_version": SCHEMA_VERSION, "times": summary})


def cmd_chain(args, out):
    m = _mixing(args.rho)
    rng = make_rng(args.seed)
    y0 = initial_patches(m, args.n, args.t, args.trials, rng) if args.with_patches else None
    ys, zs = chain_paths(m, args.n, args.t, args.steps, args.trials, rng, y0=y0)
    rows = [(i, n, int(ys[i, n]), int(zs[i, n])) for i in range(args.trials) for n in range(args.steps + 1)]
    out.table("chain", ["trial", "n", "Y", "Z"], rows)
    out.document("chain_summary", {
        "schema_version": SCHEMA_VERSION,
        "mean_Y": ys.mean(axis=0).tolist(), "mean_Z": zs.mean(axis=0).tolist(),
        "stopped_fraction": (ys == 0).mean(axis=0).tolist(),
    })


def cmd_experiment(args, out):
    cfg = ExperimentConfig.from_json(args.config)
    if args.seed is not None:
        cfg.master_seed = args.seed
    if args.trials is not None:
        cfg.trials = args.trials
    if args.n is not None:
        cfg.n = args.n
    report = run_experiment(cfg)
    outdir = args.out or cfg.output
    if outdir:
        report.write(outdir, args.format)
    else:
        sys.stdout.write(report.to_json() + "\n")
    for c in report.comparisons:
        flag = "PASS" if c.passed else ("FAIL" if c.passed is not None else "INFO")
        print(f"{flag} {c.name}: {c.statistic}={c.value:.6g}", file=sys.stderr)
    return 0 if report.passed else 1


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", default=None, help="output directory (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    p = argparse.ArgumentParser(prog="hypercollapse", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="structure profile of rho")
    a.add_argument("--rho", required=True, help="comma-separated rho_1,rho_2,...")
    a.add_argument("--resolution", type=float, default=1e-4)
    a.add_argument("--s-max", type=float, default=0.0, help="also emit (s, g, g*) on [0, s_max]")
    a.add_argument("--points", type=int, default=201)
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("sample", parents=[common], help="static Poisson hypergraph")
    s.add_argument("--rho", required=True)
    s.add_argument("--t", type=float, default=1.0)
    s.add_argument("--beta", action="store_true", help="treat --rho as intensities beta_k")
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_sample)

    pr = sub.add_parser("process", parents=[common], help="event stream and identifiability path")
    pr.add_argument("--rho", required=True)
    pr.add_argument("--n", type=int, required=True)
    pr.add_argument("--horizon", type=float, required=True)
    pr.add_argument("--grid", default=None)
    pr.add_argument("--events", action="store_true", help="also write events.csv (needs --out)")
    pr.set_defaults(func=cmd_process)

    c = sub.add_parser("collapse", parents=[common], help="collapse a hypergraph file")
    c.add_argument("file")
    c.add_argument("--randomized", action="store_true", help="uniform patch tokens, seeded by --seed")
    c.set_defaults(func=cmd_collapse)

    d = sub.add_parser("domain", parents=[common], help="domain of a vertex")
    d.add_argument("file")
    d.add_argument("--v0", type=int, required=True)
    d.set_defaults(func=cmd_domain)

    k = sub.add_parser("core", parents=[common], help="2-core of a multigraph")
    k.add_argument("file")
    k.set_defaults(func=cmd_core)

    w = sub.add_parser("walk", parents=[common], help="first-passage walks")
    g = w.add_mutually_exclusive_group(required=True)
    g.add_argument("--mu", type=float)
    g.add_argument("--grid", help="comma-separated times for coupled families")
    w.add_argument("--rho2", type=float, default=1.0)
    w.add_argument("--trials", type=int, default=1000)
    w.add_argument("--n-cap", type=int, default=None)
    w.add_argument("--window", type=int, default=30)
    w.set_defaults(func=cmd_walk)

    ch = sub.add_parser("chain", parents=[common], help="patch/debris Markov chain")
    ch.add_argument("--rho", required=True)
    ch.add_argument("--n", type=int, required=True)
    ch.add_argument("--t", type=float, required=True)
    ch.add_argument("--steps", type=int, default=10)
    ch.add_argument("--trials", type=int, default=1000)
    ch.add_argument("--with-patches", action="store_true",
                    help="start from 1 + Poisson(N t rho_1) patches instead of one")
    ch.set_defaults(func=cmd_chain)

    e = sub.add_parser("experiment", parents=[common], help="run a JSON experiment config")
    e.add_argument("config")
    e.add_argument("--trials", type=int, default=None)
    e.add_argument("--n", type=int, default=None)
    e.set_defaults(func=cmd_experiment)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, Output(args)) or 0
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
