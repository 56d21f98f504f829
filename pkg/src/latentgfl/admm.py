"""ADMM fit loop for the latent graph-fused LASSO model and lambda selection.

Edge variables ``nu`` and ``w`` are stored once per canonical edge
``(i, j)`` with ``i < j`` and refer to the difference ``mu_i - mu_j``.
Seen from the larger endpoint they flip sign.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field, replace
from typing import NamedTuple, Sequence

import numpy as np

from .decoder import AdamState, DecoderParams, adam_step, gaussian_loglik, grad_params_nodes, init_decoder
from .graph import Graph, NodeSeries, graph_from_edges
from .inference import (HOLDOUT, INIT, LANGEVIN, MARGINAL, LangevinConfig, RngStream,
                        marginal_loglik_mc, sample_posterior)

log = logging.getLogger(__name__)

FULL_LAMBDAS = (0.1, 0.25, 0.5, 0.75, 1.0)


@dataclass(frozen=True)
class FitConfig:
    latent_dim: int = 3
    lam: float = 0.5
    gamma: float | None = None  # None couples gamma to lam
    admm_iters: int = 30
    adam_iters: int = 20
    adam_lr: float = 1e-4
    bcd_iters: int = 1
    hidden: tuple[int, int] = (32, 32)
    langevin: LangevinConfig = field(default_factory=LangevinConfig)
    mu_sweep: str = "gauss_seidel"  # or "jacobi"
    seed: int = 0

    def __post_init__(self):
        if self.latent_dim < 1:
            raise ValueError("latent_dim must be >= 1")
        if self.lam < 0:
            raise ValueError("lambda must be >= 0")
        if min(self.admm_iters, self.adam_iters, self.bcd_iters) < 1:
            raise ValueError("iteration counts must be >= 1")
        if not self.adam_lr > 0:
            raise ValueError("adam_lr must be positive")
        if self.mu_sweep not in ("gauss_seidel", "jacobi"):
            raise ValueError(f"unknown mu_sweep {self.mu_sweep!r}")
        if not self.effective_gamma > 0:
            raise ValueError("gamma must be positive")

    @property
    def effective_gamma(self) -> float:
        # gamma follows lambda by default; lambda = 0 would leave no augmentation
        if self.gamma is not None:
            return self.gamma
        return self.lam if self.lam > 0 else 1.0

    @classmethod
    def desk(cls, **kw) -> "FitConfig":
        base = dict(admm_iters=30, adam_iters=20, bcd_iters=1,
                    langevin=LangevinConfig(delta=0.4, mcmc_steps=30, n_samples=100))
        base.update(kw)
        return cls(**base)

    @classmethod
    def full(cls, **kw) -> "FitConfig":
        base = dict(admm_iters=50, adam_iters=20, bcd_iters=20,
                    langevin=LangevinConfig(delta=0.4, mcmc_steps=50, n_samples=500))
        base.update(kw)
        return cls(**base)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["hidden"] = list(self.hidden)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "FitConfig":
        d = dict(d)
        d["langevin"] = LangevinConfig(**d["langevin"])
        d["hidden"] = tuple(d["hidden"])
        return cls(**d)


@dataclass
class AdmmState:
    mu: np.ndarray  # (N, d)
    nu: np.ndarray  # (E, d), canonical edge order
    w: np.ndarray  # (E, d), scaled duals
    decoder: DecoderParams
    iteration: int = 0
    adam: AdamState | None = None
    chains: np.ndarray | None = None  # last Langevin states, for warm starts

    def copy(self) -> "AdmmState":
        return AdmmState(self.mu.copy(), self.nu.copy(), self.w.copy(), self.decoder,
                         self.iteration, self.adam,
                         None if self.chains is None else self.chains.copy())

    def to_dict(self) -> dict:
        doc = {
            "mu": self.mu.tolist(),
            "nu": self.nu.tolist(),
            "w": self.w.tolist(),
            "decoder": self.decoder.to_dict(),
            "iteration": self.iteration,
        }
        if self.adam is not None:
            doc["adam"] = {"m": self.adam.m.to_dict(), "v": self.adam.v.to_dict(),
                           "step": self.adam.step, "beta1": self.adam.beta1,
                           "beta2": self.adam.beta2, "eps": self.adam.eps}
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "AdmmState":
        d = len(doc["mu"][0]) if doc["mu"] else 0
        adam = None
        if "adam" in doc:
            a = doc["adam"]
            adam = AdamState(DecoderParams.from_dict(a["m"]), DecoderParams.from_dict(a["v"]),
                             a["step"], a["beta1"], a["beta2"], a["eps"])
        return cls(mu=np.asarray(doc["mu"], dtype=np.float64),
                   nu=np.asarray(doc["nu"], dtype=np.float64).reshape(-1, d),
                   w=np.asarray(doc["w"], dtype=np.float64).reshape(-1, d),
                   decoder=DecoderParams.from_dict(doc["decoder"]),
                   iteration=int(doc["iteration"]), adam=adam)


@dataclass
class FitResult:
    state: AdmmState
    residuals: list[float]
    objectives: list[float]
    config: FitConfig
    dual_norms: list[float] = field(default_factory=list)  # max |w| per iteration

    @property
    def mu(self) -> np.ndarray:
        return self.state.mu

    def to_dict(self) -> dict:
        return {"mu": self.state.mu.tolist(), "residual_history": self.residuals,
                "objective_history": self.objectives,
                "dual_max_abs_history": self.dual_norms, "config": self.config.to_dict(),
                "seed": self.config.seed, "state": self.state.to_dict()}


def init_state(graph: Graph, n: int, cfg: FitConfig) -> AdmmState:
    rng = RngStream(cfg.seed, (INIT,)).generator()
    dec = init_decoder(cfg.latent_dim, cfg.hidden, n, rng)
    d, E = cfg.latent_dim, graph.n_edges
    return AdmmState(mu=np.zeros((graph.n_nodes, d)), nu=np.zeros((E, d)), w=np.zeros((E, d)),
                     decoder=dec, adam=AdamState.fresh(dec))


def update_mu(i: int, post_mean, state: AdmmState, graph: Graph, gamma: float,
              incidence=None) -> np.ndarray:
    """Closed-form minimizer of the node-``i`` augmented Lagrangian.

    Returns ``(E[z_i|y_i] + gamma * sum_j (mu_j + nu_ij - w_ij)) / (1 + gamma |B(i)|)``
    with neighbor values read from ``state.mu``.
    """
    if incidence is None:
        incidence = graph.incidence()
    post_mean = np.asarray(post_mean, dtype=np.float64)
    acc = np.zeros_like(post_mean)
    edges = graph.edges
    for e, sign in incidence[i]:
        j = edges[e, 1] if sign > 0 else edges[e, 0]
        acc += state.mu[j] + sign * (state.nu[e] - state.w[e])
    return (post_mean + gamma * acc) / (1.0 + gamma * len(incidence[i]))


def update_mu_all(post_means: np.ndarray, state: AdmmState, graph: Graph, gamma: float,
                  sweep: str = "gauss_seidel", incidence=None) -> np.ndarray:
    """Update every prior mean; Gauss-Seidel sweeps in ascending node order."""
    if sweep == "jacobi":
        N, d = state.mu.shape
        i, j = graph.edges[:, 0], graph.edges[:, 1]
        diff = state.nu - state.w
        acc = np.zeros((N, d))
        np.add.at(acc, i, state.mu[j] + diff)
        np.add.at(acc, j, state.mu[i] - diff)
        deg = graph.degrees()[:, None]
        return (post_means + gamma * acc) / (1.0 + gamma * deg)
    if incidence is None:
        incidence = graph.incidence()
    mu = state.mu.copy()
    view = AdmmState(mu, state.nu, state.w, state.decoder, state.iteration)
    for i in range(graph.n_nodes):
        mu[i] = update_mu(i, post_means[i], view, graph, gamma, incidence)
    return mu


def prox_group_lasso(s, lam: float, gamma: float) -> np.ndarray:
    """Block soft-thresholding ``(1 - lam / (gamma ||s||))_+ s``.

    Solves ``min_v lam ||v|| + gamma/2 ||s - v||^2``. Works row-wise on
    2-D input.
    """
    if not gamma > 0 or lam < 0:
        raise ValueError("need gamma > 0 and lam >= 0")
    s = np.asarray(s, dtype=np.float64)
    norm = np.linalg.norm(s, axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        factor = np.where(gamma * norm > lam, 1.0 - lam / (gamma * norm), 0.0)
    return factor * s


def edge_differences(mu: np.ndarray, graph: Graph) -> np.ndarray:
    return mu[graph.edges[:, 0]] - mu[graph.edges[:, 1]]


def update_nu(state: AdmmState, graph: Graph, lam: float, gamma: float, passes: int = 1) -> np.ndarray:
    # edges decouple, so every pass after the first reproduces it
    nu = state.nu
    s = edge_differences(state.mu, graph) + state.w
    for _ in range(passes):
        nu = prox_group_lasso(s, lam, gamma)
    return nu


def update_duals(state: AdmmState, graph: Graph) -> AdmmState:
    """Scaled dual ascent ``w <- mu_i - mu_j - nu + w`` on every canonical edge."""
    new = state.copy()
    # grouped as (mu_i - mu_j + w) - nu: the same s the prox saw, so nu == s gives w == 0 exactly
    new.w = (edge_differences(state.mu, graph) + state.w) - state.nu
    return new


def primal_residual(state: AdmmState, graph: Graph) -> float:
    if graph.n_edges == 0:
        return 0.0
    r = edge_differences(state.mu, graph) - state.nu
    return float(np.linalg.norm(r, axis=1).sum())


def _objective(Y, Z, state: AdmmState, graph: Graph, lam: float) -> float:
    # complete-data surrogate averaged over posterior draws, plus the fused penalty
    from .decoder import decoder_forward
    N, s, d = Z.shape
    ll = gaussian_loglik(np.repeat(Y, s, axis=0), decoder_forward(state.decoder, Z.reshape(N * s, d)))
    prior = -0.5 * d * math.log(2 * math.pi) - 0.5 * np.sum((Z - state.mu[:, None, :]) ** 2, axis=2)
    data_term = -(ll.reshape(N, s) + prior).mean(axis=1).sum()
    pen = np.linalg.norm(edge_differences(state.mu, graph), axis=1).sum() if graph.n_edges else 0.0
    return float(data_term + lam * pen)


def fit(graph: Graph, data: NodeSeries, cfg: FitConfig, state: AdmmState | None = None) -> FitResult:
    """Run ``cfg.admm_iters`` ADMM iterations.

    Each iteration samples posteriors for all nodes, takes ``adam_iters``
    Adam steps on the decoder, updates the prior means in closed form,
    applies the group-LASSO prox to the edge slacks and finally the dual
    ascent step. Passing ``state`` resumes from a checkpoint.
    """
    if not isinstance(data, NodeSeries):
        data = NodeSeries(np.asarray(data))
    data.check_graph(graph)
    Y = data.values
    lam, gamma = cfg.lam, cfg.effective_gamma
    if state is None:
        state = init_state(graph, data.n, cfg)
    else:
        state = state.copy()
    if state.adam is None:
        state.adam = AdamState.fresh(state.decoder)
    incidence = graph.incidence()
    root = RngStream(cfg.seed)
    lcfg = cfg.langevin
    N, s = graph.n_nodes, lcfg.n_samples
    residuals, objectives, duals = [], [], []
    start = state.iteration
    for a in range(start, start + cfg.admm_iters):
        init = state.chains if (lcfg.init_mode == "warm_start" and state.chains is not None) else None
        Z = sample_posterior(state.decoder, Y, state.mu, lcfg, root.child(LANGEVIN, a), init=init)
        dec, adam = state.decoder, state.adam
        for _ in range(cfg.adam_iters):
            grad = grad_params_nodes(dec, Z, Y)
            dec, adam = adam_step(dec, adam, grad, cfg.adam_lr)
        state.decoder, state.adam = dec, adam
        post = Z.mean(axis=1)
        state.mu = update_mu_all(post, state, graph, gamma, cfg.mu_sweep, incidence)
        state.nu = update_nu(state, graph, lam, gamma, cfg.bcd_iters)
        state = update_duals(state, graph)
        state.chains = Z
        state.iteration = a + 1
        res = primal_residual(state, graph)
        obj = _objective(Y, Z, state, graph, lam)
        if not (math.isfinite(res) and math.isfinite(obj)):
            raise FloatingPointError(f"non-finite objective at ADMM iteration {a}")
        residuals.append(res)
        objectives.append(obj)
        duals.append(float(np.abs(state.w).max()) if state.w.size else 0.0)
        log.debug("iter %d residual %.4g objective %.6g", a, res, obj)
    return FitResult(state=state, residuals=residuals, objectives=objectives, config=cfg,
                     dual_norms=duals)


class LambdaSelection(NamedTuple):
    lam: float
    scores: dict


def holdout_nodes(n_nodes: int, frac: float, seed: int) -> np.ndarray:
    if not 0 < frac < 1:
        raise ValueError(f"holdout fraction must be in (0, 1), got {frac}")
    m = min(n_nodes - 1, max(1, int(round(frac * n_nodes))))
    if m < 1:
        raise ValueError("need at least two nodes to hold one out")
    rng = RngStream(seed, (HOLDOUT,)).generator()
    return np.sort(rng.choice(n_nodes, size=m, replace=False))


def masked_series(graph: Graph, Y: np.ndarray, test: np.ndarray) -> np.ndarray:
    """Replace held-out rows by the mean of their training neighbors.

    A held-out node without training neighbors gets the mean series of all
    training nodes.
    """
    is_test = np.zeros(graph.n_nodes, dtype=bool)
    is_test[test] = True
    out = Y.copy()
    global_mean = Y[~is_test].mean(axis=0)
    for i in test:
        nb = [j for j in graph.neighbors(int(i)) if not is_test[j]]
        out[i] = Y[nb].mean(axis=0) if nb else global_mean
    return out


def select_lambda(graph: Graph, data: NodeSeries, lambdas: Sequence[float], holdout_frac: float,
                  cfg: FitConfig, mc_samples: int = 1000, couple_gamma: bool = True) -> LambdaSelection:
    """Pick lambda by held-out Monte Carlo marginal log-likelihood.

    Held-out nodes keep their place in the graph but train on their
    neighbors' average series; each candidate is scored on the true held-out
    series. Ties go to the larger lambda; a candidate whose fit fails
    numerically scores ``-inf``.
    """
    lambdas = list(lambdas)
    if not lambdas:
        raise ValueError("no candidate lambdas")
    if not isinstance(data, NodeSeries):
        data = NodeSeries(np.asarray(data))
    data.check_graph(graph)
    Y = data.values
    test = holdout_nodes(graph.n_nodes, holdout_frac, cfg.seed)
    train = NodeSeries(masked_series(graph, Y, test))
    scores = {}
    for lam in lambdas:
        c = replace(cfg, lam=lam, gamma=None if couple_gamma else cfg.gamma)
        try:
            res = fit(graph, train, c)
            rng = RngStream(cfg.seed, (MARGINAL,))
            score = sum(marginal_loglik_mc(res.state.decoder, Y[i], res.mu[i], mc_samples, rng.child(int(i)))
                        for i in test)
        except (FloatingPointError, ValueError) as exc:
            log.warning("lambda %g failed: %s", lam, exc)
            score = -math.inf
        scores[lam] = float(score) if math.isfinite(score) else -math.inf
    finite = [l for l in lambdas if math.isfinite(scores[l])]
    if not finite:
        raise FloatingPointError("every candidate lambda produced a non-finite score")
    best = max(finite, key=lambda l: (scores[l], l))
    return LambdaSelection(best, scores)
