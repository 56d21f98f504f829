"""Simulation scenarios: block and grid graphs with AR(1) / VAR(1) node series.

The recursions use ``n`` for the series length (the AR/VAR recursions in
the literature often call it ``T``).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .graph import Graph, NodeSeries, graph_from_edges


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def gen_block_graph(cluster_sizes, p_in: float, p_out: float, seed) -> tuple[Graph, np.ndarray]:
    """Stochastic block model; clusters occupy contiguous index blocks."""
    if not (0 <= p_out <= 1 and 0 <= p_in <= 1):
        raise ValueError("edge probabilities must lie in [0, 1]")
    labels = np.repeat(np.arange(len(cluster_sizes)), cluster_sizes)
    N = labels.size
    rng = _rng(seed)
    iu, ju = np.triu_indices(N, k=1)
    prob = np.where(labels[iu] == labels[ju], p_in, p_out)
    keep = rng.random(iu.size) < prob
    return graph_from_edges(N, zip(iu[keep], ju[keep])), labels


def grid_labels(rows: int, cols: int, sizes) -> np.ndarray:
    """Four corner regions of a grid with prescribed sizes (TL, TR, BL, BR).

    The left region (TL + BL) is the first cells in column-major order;
    inside each side the top cluster takes the first cells in row-major
    order. Rectangular splits come out as exact quadrants.
    """
    s_tl, s_tr, s_bl, s_br = (int(s) for s in sizes)
    if min(sizes) < 1 or sum(sizes) != rows * cols:
        raise ValueError(f"sizes {tuple(sizes)} do not partition a {rows}x{cols} grid")
    lab = np.empty((rows, cols), dtype=np.int64)
    colmajor = [(r, c) for c in range(cols) for r in range(rows)]
    left = set(colmajor[: s_tl + s_bl])
    left_cells = sorted(left)
    right_cells = sorted(set(colmajor) - left)
    for idx, (r, c) in enumerate(left_cells):
        lab[r, c] = 0 if idx < s_tl else 2
    for idx, (r, c) in enumerate(right_cells):
        lab[r, c] = 1 if idx < s_tr else 3
    return lab.ravel()


def gen_grid_graph(rows: int, cols: int, row_split: int | None = None, col_split: int | None = None,
                   sizes=None) -> tuple[Graph, np.ndarray]:
    """4-neighbor lattice with quadrant labels.

    Give either ``(row_split, col_split)`` for rectangular quadrants or
    ``sizes`` for unbalanced corner regions (see :func:`grid_labels`).
    Node ``r * cols + c`` sits at row ``r``, column ``c``.
    """
    if sizes is None:
        if row_split is None or col_split is None:
            raise ValueError("give either splits or sizes")
        if not (0 < row_split < rows and 0 < col_split < cols):
            raise ValueError("splits must lie strictly inside the grid")
        r, c = row_split, col_split
        sizes = (r * c, r * (cols - c), (rows - r) * c, (rows - r) * (cols - c))
    labels = grid_labels(rows, cols, sizes)
    idx = np.arange(rows * cols).reshape(rows, cols)
    edges = list(zip(idx[:, :-1].ravel(), idx[:, 1:].ravel()))
    edges += list(zip(idx[:-1, :].ravel(), idx[1:, :].ravel()))
    return graph_from_edges(rows * cols, edges), labels


def gen_ar_series(true_labels, means, psis, sigma2, n: int, seed) -> NodeSeries:
    """Independent stationary AR(1) series, parameters indexed by cluster label.

    The first value is drawn from the stationary law
    ``N(mean, sigma2 / (1 - psi^2))``.
    """
    labels = np.asarray(true_labels)
    means, psis, sigma2 = (np.asarray(a, dtype=np.float64) for a in (means, psis, sigma2))
    if np.any(np.abs(psis) >= 1):
        raise ValueError("AR coefficients must satisfy |psi| < 1")
    if np.any(sigma2 <= 0):
        raise ValueError("noise variances must be positive")
    mu, psi, sd = means[labels], psis[labels], np.sqrt(sigma2[labels])
    rng = _rng(seed)
    N = labels.size
    Y = np.empty((N, n))
    Y[:, 0] = mu + sd / np.sqrt(1 - psi ** 2) * rng.standard_normal(N)
    eps = rng.standard_normal((N, n - 1)) * sd[:, None]
    for t in range(1, n):
        Y[:, t] = mu + psi * (Y[:, t - 1] - mu) + eps[:, t - 1]
    return NodeSeries(Y)


def equicorrelated_noise(true_labels, rho: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` draws of ``N(0, Sigma)`` with unit variances, correlation ``rho``
    inside each cluster and zero across clusters. Shape ``(size, N)``."""
    if not 0 <= rho < 1:
        raise ValueError(f"rho must lie in [0, 1) for a positive definite Sigma, got {rho}")
    labels = np.asarray(true_labels)
    _, lab = np.unique(labels, return_inverse=True)
    shared = rng.standard_normal((size, lab.max() + 1))
    own = rng.standard_normal((size, labels.size))
    return np.sqrt(rho) * shared[:, lab] + np.sqrt(1 - rho) * own


def gen_var_series(true_labels, means, phi_scale: float, rho: float, n: int, burn_in: int,
                   seed) -> NodeSeries:
    """VAR(1) with coefficient ``phi_scale * I`` and block-equicorrelated noise.

    Starts at zero, discards ``burn_in`` steps and returns the next ``n``.
    """
    if abs(phi_scale) >= 1:
        raise ValueError("|phi_scale| must be < 1")
    labels = np.asarray(true_labels)
    beta = np.asarray(means, dtype=np.float64)[labels]
    rng = _rng(seed)
    xi = equicorrelated_noise(labels, rho, burn_in + n, rng)
    y = np.zeros(labels.size)
    out = np.empty((labels.size, n))
    for t in range(burn_in + n):
        y = beta + phi_scale * (y - beta) + xi[t]
        if t >= burn_in:
            out[:, t - burn_in] = y
    return NodeSeries(out)


@dataclass(frozen=True)
class ScenarioSpec:
    scenario: int
    cluster_sizes: tuple[int, ...]
    n: int = 100
    means: tuple[float, ...] = (-1.0, 0.0, 1.0)
    psi: float = 0.5
    sigma2: float = 1.0
    rho: float = 0.3
    phi_scale: float = 0.5
    burn_in: int = 100
    p_in: float = 0.30
    p_out: float = 0.15
    grid: tuple[int, int] | None = None
    seed: int = 0

    def __post_init__(self):
        if self.scenario not in (1, 2, 3):
            raise ValueError(f"unknown scenario {self.scenario}")
        if len(self.means) != len(self.cluster_sizes):
            raise ValueError("need one mean per cluster")
        if abs(self.psi) >= 1 or abs(self.phi_scale) >= 1:
            raise ValueError("AR/VAR coefficients must be < 1 in magnitude")
        if self.sigma2 <= 0 or not 0 <= self.rho < 1:
            raise ValueError("need sigma2 > 0 and 0 <= rho < 1")
        if not (0 <= self.p_out <= 1 and 0 <= self.p_in <= 1):
            raise ValueError("edge probabilities must lie in [0, 1]")
        if self.scenario == 2:
            if self.grid is None or len(self.cluster_sizes) != 4:
                raise ValueError("scenario 2 needs a grid and four cluster sizes")
            if self.grid[0] * self.grid[1] != sum(self.cluster_sizes):
                raise ValueError("grid size does not match cluster sizes")

    @property
    def n_nodes(self) -> int:
        return sum(self.cluster_sizes)

    @classmethod
    def default(cls, scenario: int, n_nodes: int | None = None, seed: int = 0, **kw) -> "ScenarioSpec":
        if scenario in (1, 3):
            sizes = {120: (30, 40, 50), 210: (60, 70, 80)}
            n_nodes = n_nodes or 120
            if n_nodes not in sizes:
                raise ValueError(f"scenario {scenario} is defined for N in {sorted(sizes)}")
            return cls(scenario=scenario, cluster_sizes=sizes[n_nodes], seed=seed, **kw)
        sizes = {144: ((12, 12), (25, 30, 42, 47)), 196: ((14, 14), (35, 40, 42, 79))}
        n_nodes = n_nodes or 144
        if n_nodes not in sizes:
            raise ValueError(f"scenario 2 is defined for N in {sorted(sizes)}")
        grid, cs = sizes[n_nodes]
        return cls(scenario=2, cluster_sizes=cs, means=(-0.8, 0.0, 0.8, 1.6), grid=grid,
                   seed=seed, **kw)

    def to_dict(self) -> dict:
        return asdict(self)


def run_scenario(spec: ScenarioSpec) -> tuple[Graph, NodeSeries, np.ndarray]:
    ss = np.random.SeedSequence(spec.seed)
    g_seed, y_seed = ss.spawn(2)
    k = len(spec.cluster_sizes)
    if spec.scenario == 2:
        graph, labels = gen_grid_graph(*spec.grid, sizes=spec.cluster_sizes)
    else:
        graph, labels = gen_block_graph(spec.cluster_sizes, spec.p_in, spec.p_out, g_seed)
    if spec.scenario == 3:
        series = gen_var_series(labels, spec.means, spec.phi_scale, spec.rho, spec.n,
                                spec.burn_in, y_seed)
    else:
        series = gen_ar_series(labels, spec.means, [spec.psi] * k, [spec.sigma2] * k, spec.n, y_seed)
    return graph, series, labels
