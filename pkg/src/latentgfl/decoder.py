"""Three-layer ReLU decoder, its Gaussian likelihood, gradients and Adam.

All functions accept either a single latent vector ``z`` of shape ``(d,)``
or a batch ``(m, d)``; batched inputs return batched outputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields

import numpy as np

_NAMES = ("W1", "b1", "W2", "b2", "W3", "b3")
LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class DecoderParams:
    """Weights and biases of ``h(z) = W3 relu(W2 relu(W1 z + b1) + b2) + b3``."""

    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray
    W3: np.ndarray
    b3: np.ndarray

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, np.asarray(getattr(self, f.name), dtype=np.float64))
        h1, d = self.W1.shape
        h2 = self.W2.shape[0]
        n = self.W3.shape[0]
        expected = {"b1": (h1,), "W2": (h2, h1), "b2": (h2,), "W3": (n, h2), "b3": (n,)}
        for name, shape in expected.items():
            if getattr(self, name).shape != shape:
                raise ValueError(f"{name} has shape {getattr(self, name).shape}, expected {shape}")

    @property
    def latent_dim(self) -> int:
        return self.W1.shape[1]

    @property
    def hidden(self) -> tuple[int, int]:
        return self.W1.shape[0], self.W2.shape[0]

    @property
    def out_dim(self) -> int:
        return self.W3.shape[0]

    def arrays(self) -> tuple[np.ndarray, ...]:
        return tuple(getattr(self, k) for k in _NAMES)

    @classmethod
    def from_arrays(cls, arrays) -> "DecoderParams":
        return cls(*arrays)

    def n_params(self) -> int:
        return sum(a.size for a in self.arrays())

    def flat(self) -> np.ndarray:
        return np.concatenate([a.ravel() for a in self.arrays()])

    def unflat(self, vec: np.ndarray) -> "DecoderParams":
        out, pos = [], 0
        for a in self.arrays():
            out.append(np.asarray(vec[pos:pos + a.size], dtype=np.float64).reshape(a.shape))
            pos += a.size
        return DecoderParams.from_arrays(out)

    def map(self, fn, *others: "DecoderParams") -> "DecoderParams":
        return DecoderParams.from_arrays(
            fn(*xs) for xs in zip(self.arrays(), *(o.arrays() for o in others)))

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(a)) for a in self.arrays())

    def to_dict(self) -> dict:
        doc = {"shapes": {k: list(getattr(self, k).shape) for k in _NAMES}}
        for k in _NAMES:
            doc[k] = getattr(self, k).ravel().tolist()
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "DecoderParams":
        shapes = doc["shapes"]
        return cls(*(np.asarray(doc[k], dtype=np.float64).reshape(shapes[k]) for k in _NAMES))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "DecoderParams":
        return cls.from_dict(json.loads(text))


def init_decoder(latent_dim: int, hidden: tuple[int, int], out_dim: int,
                 rng: np.random.Generator) -> DecoderParams:
    """Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases."""
    h1, h2 = hidden

    def layer(fan_out, fan_in):
        bound = 1.0 / np.sqrt(fan_in)
        return rng.uniform(-bound, bound, size=(fan_out, fan_in))

    return DecoderParams(
        W1=layer(h1, latent_dim), b1=np.zeros(h1),
        W2=layer(h2, h1), b2=np.zeros(h2),
        W3=layer(out_dim, h2), b3=np.zeros(out_dim),
    )


def _as_batch(z, d: int) -> tuple[np.ndarray, bool]:
    z = np.asarray(z, dtype=np.float64)
    single = z.ndim == 1
    zb = z[None, :] if single else z
    if zb.ndim != 2 or zb.shape[1] != d:
        raise ValueError(f"latent input has shape {z.shape}, expected (..., {d})")
    return zb, single


def _forward_cache(params: DecoderParams, zb: np.ndarray):
    a1 = zb @ params.W1.T + params.b1
    r1 = np.maximum(a1, 0.0)
    a2 = r1 @ params.W2.T + params.b2
    r2 = np.maximum(a2, 0.0)
    out = r2 @ params.W3.T + params.b3
    return a1, r1, a2, r2, out


def decoder_forward(params: DecoderParams, z) -> np.ndarray:
    """Mean of the conditional Gaussian over the series given ``z``."""
    zb, single = _as_batch(z, params.latent_dim)
    out = _forward_cache(params, zb)[-1]
    return out[0] if single else out


def gaussian_loglik(y, mean) -> np.ndarray | float:
    """Log-density of ``N(mean, I)`` at ``y``; reduces over the last axis."""
    y = np.asarray(y, dtype=np.float64)
    mean = np.asarray(mean, dtype=np.float64)
    if y.shape[-1] != mean.shape[-1]:
        raise ValueError(f"length mismatch: {y.shape[-1]} vs {mean.shape[-1]}")
    resid = y - mean
    n = y.shape[-1]
    val = -0.5 * n * LOG_2PI - 0.5 * np.sum(resid * resid, axis=-1)
    return float(val) if np.ndim(val) == 0 else val


def decoder_grad_z(params: DecoderParams, z, y) -> np.ndarray:
    """Gradient of ``log N(y; h(z), I)`` with respect to ``z``.

    ``y`` broadcasts against the batch: shape ``(n,)`` or ``(m, n)``.
    ReLU derivative at exactly zero is taken as zero.
    """
    zb, single = _as_batch(z, params.latent_dim)
    a1, _, a2, _, out = _forward_cache(params, zb)
    resid = np.asarray(y, dtype=np.float64) - out
    g = (resid @ params.W3) * (a2 > 0)
    g = (g @ params.W2) * (a1 > 0)
    g = g @ params.W1
    return g[0] if single else g


def decoder_grad_params(params: DecoderParams, z, y) -> DecoderParams:
    """Gradient of ``-mean_m log N(y_m; h(z_m), I)`` over a sample batch.

    ``z`` is ``(m, d)`` and ``y`` is ``(m, n)`` (or ``(n,)``, shared by all
    samples).
    """
    zb, _ = _as_batch(z, params.latent_dim)
    m = zb.shape[0]
    if m == 0:
        raise ValueError("empty sample list")
    a1, r1, a2, r2, out = _forward_cache(params, zb)
    dout = (out - np.broadcast_to(np.asarray(y, dtype=np.float64), out.shape)) / m
    dW3 = dout.T @ r2
    db3 = dout.sum(axis=0)
    da2 = (dout @ params.W3) * (a2 > 0)
    dW2 = da2.T @ r1
    db2 = da2.sum(axis=0)
    da1 = (da2 @ params.W2) * (a1 > 0)
    dW1 = da1.T @ zb
    db1 = da1.sum(axis=0)
    return DecoderParams(W1=dW1, b1=db1, W2=dW2, b2=db2, W3=dW3, b3=db3)


@dataclass(frozen=True)
class AdamState:
    m: DecoderParams
    v: DecoderParams
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def fresh(cls, params: DecoderParams, **kw) -> "AdamState":
        zeros = params.map(np.zeros_like)
        return cls(m=zeros, v=zeros, **kw)


def adam_step(params: DecoderParams, state: AdamState, grad: DecoderParams,
              lr: float) -> tuple[DecoderParams, AdamState]:
    """One bias-corrected Adam update; returns new params and state."""
    if lr <= 0:
        raise ValueError(f"learning rate must be positive, got {lr}")
    if not grad.is_finite():
        raise FloatingPointError("non-finite gradient passed to adam_step")
    b1, b2 = state.beta1, state.beta2
    t = state.step + 1
    m = state.m.map(lambda m_, g: b1 * m_ + (1 - b1) * g, grad)
    v = state.v.map(lambda v_, g: b2 * v_ + (1 - b2) * g * g, grad)
    c1 = 1 - b1 ** t
    c2 = 1 - b2 ** t
    new = params.map(lambda p, m_, v_: p - lr * (m_ / c1) / (np.sqrt(v_ / c2) + state.eps), m, v)
    return new, AdamState(m=m, v=v, step=t, beta1=b1, beta2=b2, eps=state.eps)


# Node-grouped fast paths. With samples grouped as Z[i, u] sharing the series
# Y[i], the n-dimensional output layer folds into hidden-size statistics:
# W3^T (y - h) = W3^T (y - b3) - (W3^T W3) r2, so nothing of size n is formed
# per sample.

def _hidden(params: DecoderParams, zf: np.ndarray):
    a1 = zf @ params.W1.T + params.b1
    r1 = np.maximum(a1, 0.0)
    a2 = r1 @ params.W2.T + params.b2
    r2 = np.maximum(a2, 0.0)
    return a1, r1, a2, r2


def grad_z_nodes(params: DecoderParams, Z: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """``decoder_grad_z`` for ``Z`` of shape ``(N, s, d)`` against ``Y`` of shape ``(N, n)``."""
    N, s, d = Z.shape
    zf = Z.reshape(N * s, d)
    a1, _, a2, r2 = _hidden(params, zf)
    gram = params.W3.T @ params.W3
    proj = (Y - params.b3) @ params.W3  # (N, h2)
    g = (np.repeat(proj, s, axis=0) - r2 @ gram) * (a2 > 0)
    g = (g @ params.W2) * (a1 > 0)
    return (g @ params.W1).reshape(N, s, d)


def grad_params_nodes(params: DecoderParams, Z: np.ndarray, Y: np.ndarray) -> DecoderParams:
    """``decoder_grad_params`` over all ``N * s`` pairs ``(Z[i, u], Y[i])``."""
    N, s, d = Z.shape
    m = N * s
    zf = Z.reshape(m, d)
    a1, r1, a2, r2 = _hidden(params, zf)
    W3, b3 = params.W3, params.b3
    node_r2 = r2.reshape(N, s, -1).sum(axis=1)  # (N, h2)
    sum_r2 = node_r2.sum(axis=0)
    # dout = (W3 r2 + b3 - y) / m, contracted without forming (m, n)
    dW3 = (W3 @ (r2.T @ r2) + np.outer(b3, sum_r2) - Y.T @ node_r2) / m
    db3 = (W3 @ sum_r2 + N * s * b3 - s * Y.sum(axis=0)) / m
    gram = W3.T @ W3
    proj = (Y - b3) @ W3
    da2 = ((r2 @ gram - np.repeat(proj, s, axis=0)) / m) * (a2 > 0)
    dW2 = da2.T @ r1
    db2 = da2.sum(axis=0)
    da1 = (da2 @ params.W2) * (a1 > 0)
    dW1 = da1.T @ zf
    db1 = da1.sum(axis=0)
    return DecoderParams(W1=dW1, b1=db1, W2=dW2, b2=db2, W3=dW3, b3=db3)
