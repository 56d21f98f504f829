"""Command-line interface.

Exit codes: 0 success, 2 input or validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .admm import FULL_LAMBDAS, AdmmState, FitConfig, fit, select_lambda
from .clustering import kmeans, select_k
from .graph import graph_from_edges
from .inference import LangevinConfig
from .io import (digest, read_edges, read_json, read_labels, read_series, write_edges, write_json,
                 write_labels, write_series)
from .metrics import METRIC_NAMES, evaluate
from .pipeline import batch, format_table, summarize
from .simgen import ScenarioSpec, run_scenario

log = logging.getLogger("latentgfl")


class UsageError(Exception):
    pass


def _manifest(args, config: dict, inputs=(), timing=None) -> dict:
    return {
        "tool": "latentgfl",
        "version": __version__,
        "command": args.command,
        "config": config,
        "seed": getattr(args, "seed", None),
        "inputs": {str(p): digest(p) for p in inputs},
        "timing": timing or {},
    }


def _outdir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _parse_grid(text):
    try:
        r, c = text.lower().split("x")
        return int(r), int(c)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 12x12, got {text!r}") from None


def _parse_floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _fit_config(args) -> FitConfig:
    base = FitConfig.full if args.profile == "paper" else FitConfig.desk
    cfg = base(seed=args.seed)
    lang = cfg.langevin
    lang = LangevinConfig(
        delta=args.delta if args.delta is not None else lang.delta,
        mcmc_steps=args.mcmc_steps if args.mcmc_steps is not None else lang.mcmc_steps,
        n_samples=args.samples if args.samples is not None else lang.n_samples,
        init_mode=args.init_mode,
    )
    overrides = {k: v for k, v in dict(
        latent_dim=args.latent_dim, admm_iters=args.admm_iters, adam_iters=args.adam_iters,
        adam_lr=args.adam_lr, bcd_iters=args.bcd_iters, gamma=args.gamma,
        lam=getattr(args, "lam", None)).items() if v is not None}
    if args.hidden is not None:
        overrides["hidden"] = tuple(args.hidden)
    return replace(cfg, langevin=lang, mu_sweep=args.mu_sweep, **overrides)


def _load_inputs(args):
    series = read_series(args.series, header=args.header)
    graph = graph_from_edges(series.n_nodes, read_edges(args.edges))
    return graph, series


def cmd_simulate(args) -> int:
    if args.spec_file:
        doc = read_json(args.spec_file)
        if not isinstance(doc, dict):
            raise UsageError("spec file must hold a JSON object")
        for key in ("cluster_sizes", "means", "grid"):
            if doc.get(key) is not None:
                doc[key] = tuple(doc[key])
        try:
            spec = ScenarioSpec(**doc)
        except TypeError as exc:
            raise UsageError(f"bad spec file: {exc}") from None
    else:
        n_nodes = args.n_nodes
        if args.grid is not None:
            if args.scenario != 2:
                raise UsageError("--grid only applies to scenario 2")
            n_nodes = args.grid[0] * args.grid[1]
        spec = ScenarioSpec.default(args.scenario, n_nodes, seed=args.seed)
    graph, series, labels = run_scenario(spec)
    out = _outdir(args.out)
    write_edges(out / "edges.tsv", graph)
    write_series(out / "series.csv", series)
    write_labels(out / "labels.csv", labels)
    write_json(out / "manifest.json", _manifest(args, spec.to_dict()))
    print(f"wrote {graph.n_nodes} nodes, {graph.n_edges} edges to {out}")
    return 0


def cmd_fit(args) -> int:
    graph, series = _load_inputs(args)
    cfg = _fit_config(args)
    state = None
    if args.resume:
        state = AdmmState.from_dict(read_json(args.resume)["state"])
        if state.mu.shape != (graph.n_nodes, cfg.latent_dim):
            raise UsageError("checkpoint does not match the data dimensions")
    t0 = time.perf_counter()
    res = fit(graph, series, cfg, state=state)
    elapsed = time.perf_counter() - t0
    out = _outdir(args.out)
    write_json(out / "mu.json", res.to_dict())
    with open(out / "residuals.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iteration", "primal_residual", "objective", "dual_max_abs"])
        for a, row in enumerate(zip(res.residuals, res.objectives, res.dual_norms), 1):
            w.writerow([a, *row])
    man = _manifest(args, cfg.to_dict(), [args.edges, args.series], {"fit": elapsed})
    man["dual_max_abs_history"] = res.dual_norms
    write_json(out / "manifest.json", man)
    print(f"fit done in {elapsed:.1f}s, final primal residual {res.residuals[-1]:.4g}")
    return 0


def cmd_select_lambda(args) -> int:
    if not 0 < args.holdout < 1:
        raise UsageError("--holdout must lie strictly between 0 and 1")
    graph, series = _load_inputs(args)
    cfg = _fit_config(args)
    t0 = time.perf_counter()
    sel = select_lambda(graph, series, args.lambdas, args.holdout, cfg, mc_samples=args.mc_samples)
    elapsed = time.perf_counter() - t0
    out = _outdir(args.out)
    with open(out / "selection.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["lambda", "heldout_loglik", "selected"])
        for lam, score in sel.scores.items():
            w.writerow([lam, score, int(lam == sel.lam)])
    man = _manifest(args, cfg.to_dict(), [args.edges, args.series], {"select_lambda": elapsed})
    man["selected_lambda"] = sel.lam
    man["scores"] = {str(k): v for k, v in sel.scores.items()}
    write_json(out / "manifest.json", man)
    for lam, score in sel.scores.items():
        print(f"lambda={lam:g}\theldout_loglik={score:.4f}{'  <- selected' if lam == sel.lam else ''}")
    return 0


def cmd_cluster(args) -> int:
    doc = read_json(args.mu)
    mu = np.asarray(doc["mu"] if isinstance(doc, dict) else doc, dtype=np.float64)
    if mu.ndim != 2 or mu.shape[0] < 2:
        raise UsageError("need a prior-mean matrix with at least two rows")
    out = _outdir(args.out)
    if args.k is not None:
        res = kmeans(mu, args.k, args.restarts, args.seed)
        table = {args.k: res.silhouette}
    else:
        res = select_k(mu, min(args.k_max, mu.shape[0] - 1) if mu.shape[0] > 2 else 2,
                       args.restarts, args.seed)
        table = res.scores
    write_labels(out / "labels.csv", res.labels)
    with open(out / "silhouette.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "silhouette"])
        for k, s in table.items():
            w.writerow([k, s])
    write_json(out / "manifest.json", _manifest(args, {"k": args.k, "k_max": args.k_max,
                                                       "restarts": args.restarts}, [args.mu]))
    print(f"k={res.k} silhouette={res.silhouette:.4f}")
    return 0


def cmd_evaluate(args) -> int:
    truth = read_labels(args.true)
    pred = read_labels(args.pred)
    if truth.shape != pred.shape:
        raise UsageError(f"label files differ in length: {truth.size} vs {pred.size}")
    m = evaluate(truth, pred)
    header = ["seed", "scenario", "method", *METRIC_NAMES]
    row = [args.seed, args.scenario, args.method, *(m[n] for n in METRIC_NAMES)]
    if args.out:
        path = Path(args.out)
        new = not path.exists()
        with open(path, "a", newline="") as fh:
            w = csv.writer(fh)
            if new:
                w.writerow(header)
            w.writerow(row)
    w = csv.writer(sys.stdout)
    w.writerow(header)
    w.writerow(row)
    return 0


def cmd_batch(args) -> int:
    cfg = _fit_config(args)
    n_nodes = args.n_nodes
    if args.grid is not None:
        n_nodes = args.grid[0] * args.grid[1]
    rows = batch(args.scenario, n_nodes, args.reps, cfg, args.lambdas, first_seed=args.seed)
    out = _outdir(args.out)
    fields = ["seed", "scenario", "method", "lambda", "k", *METRIC_NAMES, "ARI_raw"]
    with open(out / "runs.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields)
        w.writeheader()
        w.writerows(rows)
    table = format_table(summarize(rows))
    (out / "summary.txt").write_text(table + "\n")
    write_json(out / "manifest.json", _manifest(args, {"fit": cfg.to_dict(), "reps": args.reps,
                                                       "scenario": args.scenario,
                                                       "n_nodes": n_nodes,
                                                       "lambdas": args.lambdas}))
    print(table)
    return 0


def _add_fit_flags(p, with_lambda=True):
    p.add_argument("--edges", required=True)
    p.add_argument("--series", required=True)
    p.add_argument("--header", action="store_true", help="series CSV has a header row")
    _add_model_flags(p, with_lambda)


def _add_model_flags(p, with_lambda=True):
    p.add_argument("--profile", choices=("desk", "paper"), default="desk")
    if with_lambda:
        p.add_argument("--lambda", dest="lam", type=float, default=0.5)
    p.add_argument("--gamma", type=float, default=None, help="defaults to lambda")
    p.add_argument("--latent-dim", type=int, default=None)
    p.add_argument("--hidden", type=int, nargs=2, default=None)
    p.add_argument("--admm-iters", type=int, default=None)
    p.add_argument("--adam-iters", type=int, default=None)
    p.add_argument("--adam-lr", type=float, default=None)
    p.add_argument("--bcd-iters", type=int, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--mcmc-steps", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--init-mode", choices=("prior_mean", "warm_start"), default="prior_mean")
    p.add_argument("--mu-sweep", choices=("gauss_seidel", "jacobi"), default="gauss_seidel")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="latentgfl", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a simulation scenario")
    p.add_argument("--scenario", type=int, choices=(1, 2, 3), default=1)
    p.add_argument("--n-nodes", type=int, default=None)
    p.add_argument("--grid", type=_parse_grid, default=None)
    p.add_argument("--spec-file", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="fit prior means with ADMM")
    _add_fit_flags(p)
    p.add_argument("--resume", default=None, help="mu.json from an earlier fit")
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("select-lambda", help="choose lambda on held-out nodes")
    _add_fit_flags(p, with_lambda=False)
    p.add_argument("--lambdas", type=_parse_floats, default=list(FULL_LAMBDAS))
    p.add_argument("--holdout", type=float, default=0.1)
    p.add_argument("--mc-samples", type=int, default=1000)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_select_lambda)

    p = sub.add_parser("cluster", help="k-means on learned prior means")
    p.add_argument("--mu", required=True)
    p.add_argument("--k-max", type=int, default=10)
    p.add_argument("--k", type=int, default=None, help="fixed number of clusters")
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("evaluate", help="score predicted labels against the truth")
    p.add_argument("--true", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--seed", default="")
    p.add_argument("--scenario", default="")
    p.add_argument("--method", default="GFL")
    p.add_argument("--out", default=None, help="append the row to this CSV")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("batch", help="replicate a scenario end to end")
    p.add_argument("--scenario", type=int, choices=(1, 2, 3), default=1)
    p.add_argument("--n-nodes", type=int, default=None)
    p.add_argument("--grid", type=_parse_grid, default=None)
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--lambdas", type=_parse_floats, default=[0.1, 0.5, 1.0])
    _add_model_flags(p, with_lambda=False)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_batch)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except FloatingPointError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (UsageError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
