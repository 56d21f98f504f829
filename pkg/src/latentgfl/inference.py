"""Langevin posterior sampling and Monte Carlo marginal likelihood."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decoder import DecoderParams, decoder_forward, gaussian_loglik, grad_z_nodes

# stream purpose tags, first element of every RngStream key
LANGEVIN = 0
MARGINAL = 1
INIT = 2
HOLDOUT = 3

DIVERGENCE_BOUND = 1e6


class SamplerDivergence(FloatingPointError):
    """A Langevin chain left the finite region; usually the step size is too big."""

    def __init__(self, node, step):
        self.node = node
        self.step = step
        super().__init__(f"Langevin chain diverged at node {node}, step {step}")


@dataclass(frozen=True)
class LangevinConfig:
    delta: float = 0.4
    mcmc_steps: int = 30
    n_samples: int = 100
    init_mode: str = "prior_mean"  # or "warm_start"

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if self.mcmc_steps < 1 or self.n_samples < 1:
            raise ValueError("mcmc_steps and n_samples must be >= 1")
        if self.init_mode not in ("prior_mean", "warm_start"):
            raise ValueError(f"unknown init_mode {self.init_mode!r}")


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream addressed by ``(seed, key)``.

    The same pair always yields the same draws, independent of what other
    streams were consumed before.
    """

    seed: int
    key: tuple[int, ...] = ()

    def child(self, *key: int) -> "RngStream":
        return RngStream(self.seed, self.key + tuple(int(k) for k in key))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=int(self.seed), spawn_key=self.key)
        return np.random.Generator(np.random.PCG64(ss))


def _check_state(z: np.ndarray, nodes, step: int) -> None:
    ok = np.isfinite(z) & (np.abs(z) <= DIVERGENCE_BOUND)
    if not np.all(ok):
        bad = np.argwhere(~ok)[0]
        raise SamplerDivergence(nodes[bad[0]] if nodes is not None else None, step)


def langevin_chain(params: DecoderParams, y, mu, cfg: LangevinConfig, rng: RngStream,
                   init=None, node=None) -> np.ndarray:
    """Run ``cfg.n_samples`` independent unadjusted Langevin chains for one node.

    Each chain starts at ``mu`` (or at the matching row of ``init`` when
    given), advances ``cfg.mcmc_steps`` steps of

        z <- z + delta * (grad log p(y | z) - (z - mu)) + sqrt(2 delta) * eps

    and its final state is returned as one row of an ``(s, d)`` array.
    """
    y = np.asarray(y, dtype=np.float64)
    mu = np.asarray(mu, dtype=np.float64)
    if mu.shape != (params.latent_dim,) or y.shape != (params.out_dim,):
        raise ValueError("shape mismatch between decoder and (y, mu)")
    out = sample_posterior(params, y[None, :], mu[None, :], cfg, rng,
                           init=None if init is None else np.asarray(init)[None],
                           nodes=[node if node is not None else 0])
    return out[0]


def sample_posterior(params: DecoderParams, Y, mu, cfg: LangevinConfig, rng: RngStream,
                     init=None, nodes=None) -> np.ndarray:
    """Langevin samples for many nodes at once, shape ``(N, s, d)``.

    Node ``i`` draws its noise from ``rng.child(nodes[i])`` so a node's
    chains do not depend on which other nodes are sampled alongside it.
    """
    Y = np.asarray(Y, dtype=np.float64)
    mu = np.asarray(mu, dtype=np.float64)
    N, d = mu.shape
    s, k, delta = cfg.n_samples, cfg.mcmc_steps, cfg.delta
    if nodes is None:
        nodes = list(range(N))
    noise = np.stack([rng.child(node).generator().standard_normal((k, s, d)) for node in nodes],
                     axis=1)  # (k, N, s, d)
    if init is None:
        z = np.repeat(mu[:, None, :], s, axis=1)
    else:
        z = np.array(init, dtype=np.float64).reshape(N, s, d)
    scale = np.sqrt(2.0 * delta)
    for step in range(k):
        z = z + delta * (grad_z_nodes(params, z, Y) - (z - mu[:, None, :])) + scale * noise[step]
        _check_state(z.reshape(N, s * d), nodes, step)
    return z


def posterior_mean(samples) -> np.ndarray:
    samples = np.asarray(samples, dtype=np.float64)
    if samples.shape[0] == 0:
        raise ValueError("no samples")
    return samples.mean(axis=0)


def log_mean_exp(values, axis=-1) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    top = np.max(values, axis=axis, keepdims=True)
    top = np.where(np.isfinite(top), top, 0.0)
    out = np.log(np.mean(np.exp(values - top), axis=axis)) + np.squeeze(top, axis=axis)
    return out


def marginal_loglik_mc(params: DecoderParams, y, mu, s: int, rng: RngStream) -> float:
    """Monte Carlo ``log p(y)``: log-mean-exp of ``log p(y | z)`` over prior draws."""
    if s < 1:
        raise ValueError("need at least one sample")
    mu = np.asarray(mu, dtype=np.float64)
    z = mu + rng.generator().standard_normal((s, mu.size))
    ll = gaussian_loglik(np.asarray(y, dtype=np.float64), decoder_forward(params, z))
    return float(log_mean_exp(np.atleast_1d(ll)))
