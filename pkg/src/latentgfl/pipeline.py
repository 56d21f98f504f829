"""End-to-end runs: select lambda, refit, cluster, score; replicated batches."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, replace

import numpy as np

from .admm import FitConfig, FitResult, fit, select_lambda
from .clustering import ClusterResult, kmeans, select_k
from .graph import Graph, NodeSeries
from .metrics import METRIC_NAMES, evaluate
from .simgen import ScenarioSpec, run_scenario

log = logging.getLogger(__name__)

DESK_LAMBDAS = (0.1, 0.5, 1.0)


@dataclass
class GflRun:
    lam: float
    scores: dict
    fit: FitResult
    clusters: ClusterResult
    timing: dict


def run_gfl(graph: Graph, series: NodeSeries, cfg: FitConfig, lambdas=DESK_LAMBDAS,
            holdout_frac: float = 0.1, n_clusters: int | None = None, k_max: int = 10,
            restarts: int = 10) -> GflRun:
    """Choose lambda on held-out nodes, refit on all data and cluster the prior means.

    ``n_clusters=None`` picks the cluster count by silhouette over ``2..k_max``.
    """
    timing = {}
    t0 = time.perf_counter()
    if len(lambdas) > 1:
        sel = select_lambda(graph, series, lambdas, holdout_frac, cfg)
        lam, scores = sel.lam, sel.scores
    else:
        lam, scores = float(lambdas[0]), {}
    timing["select_lambda"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    res = fit(graph, series, replace(cfg, lam=lam, gamma=None))
    timing["fit"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    k_max = min(k_max, graph.n_nodes - 1)
    if n_clusters is None:
        clusters = select_k(res.mu, k_max, restarts, cfg.seed)
    else:
        clusters = kmeans(res.mu, n_clusters, restarts, cfg.seed)
    timing["cluster"] = time.perf_counter() - t0
    return GflRun(lam, scores, res, clusters, timing)


def kmeans_baseline(series: NodeSeries, k: int, seed: int = 0, restarts: int = 10) -> ClusterResult:
    """k-means straight on the raw series rows."""
    return kmeans(series.values, k, restarts, seed)


def replicate(spec: ScenarioSpec, cfg: FitConfig, lambdas=DESK_LAMBDAS, holdout_frac=0.1,
              k_max: int = 10, baseline: bool = True) -> list[dict]:
    """One simulated data set scored with GFL and, optionally, the k-means baseline."""
    graph, series, labels = run_scenario(spec)
    rows = []
    run = run_gfl(graph, series, replace(cfg, seed=spec.seed), lambdas, holdout_frac, k_max=k_max)
    m = evaluate(labels, run.clusters.labels)
    rows.append({"seed": spec.seed, "scenario": spec.scenario, "method": "GFL",
                 "lambda": run.lam, "k": run.clusters.k, **m})
    log.info("scenario %d seed %d GFL lambda=%g k=%d ACC=%.4f", spec.scenario, spec.seed,
             run.lam, run.clusters.k, m["ACC"])
    if baseline:
        k = len(spec.cluster_sizes)
        base = kmeans_baseline(series, k, spec.seed)
        rows.append({"seed": spec.seed, "scenario": spec.scenario, "method": "k-means",
                     "lambda": float("nan"), "k": k, **evaluate(labels, base.labels)})
    return rows


def summarize(rows: list[dict]) -> dict:
    """Per method: mean and sample sd of each metric."""
    out = {}
    for method in dict.fromkeys(r["method"] for r in rows):
        sub = [r for r in rows if r["method"] == method]
        stats = {}
        for name in METRIC_NAMES:
            vals = np.array([r[name] for r in sub])
            sd = float(vals.std(ddof=1)) if vals.size > 1 else 0.0
            stats[name] = (float(vals.mean()), sd)
        out[method] = stats
    return out


def format_table(summary: dict) -> str:
    """Percent mean (sd) layout with one row per method."""
    lines = ["Method | " + " | ".join(METRIC_NAMES)]
    for method, stats in summary.items():
        cells = [f"{100 * m:.2f}% ({s:.2f})" for m, s in (stats[n] for n in METRIC_NAMES)]
        lines.append(f"{method} | " + " | ".join(cells))
    return "\n".join(lines)


def batch(scenario: int, n_nodes: int | None, reps: int, cfg: FitConfig, lambdas=DESK_LAMBDAS,
          first_seed: int = 0, baseline: bool = True, **spec_kw) -> list[dict]:
    rows = []
    for r in range(reps):
        spec = ScenarioSpec.default(scenario, n_nodes, seed=first_seed + r, **spec_kw)
        rows.extend(replicate(spec, cfg, lambdas, baseline=baseline))
    return rows
