"""External clustering metrics computed from a contingency table.

Edge conventions for degenerate partitions (entropy ``H`` in nats):

============================  =====================================
case                          value
============================  =====================================
``H(true) == 0``              HOM = 1
``H(pred) == 0``              COM = 1
either entropy 0              NMI = 0, unless both are 0 (NMI = 1)
no pairs in either marginal   ARI = 1 (identical trivial partitions)
============================  =====================================

NMI uses the geometric-mean normalizer; ACC is the best one-to-one
matching of clusters to classes on the zero-padded square table.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.special import comb

METRIC_NAMES = ("NMI", "ARI", "ACC", "HOM", "COM", "PUR")


@dataclass(frozen=True)
class ContingencyTable:
    counts: np.ndarray  # (classes, clusters)

    @property
    def rows(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def cols(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def contingency(true_labels, pred_labels) -> ContingencyTable:
    t = np.asarray(true_labels)
    p = np.asarray(pred_labels)
    if t.shape != p.shape or t.ndim != 1:
        raise ValueError(f"label arrays differ in shape: {t.shape} vs {p.shape}")
    if t.size == 0:
        raise ValueError("empty label arrays")
    _, ti = np.unique(t, return_inverse=True)
    _, pi = np.unique(p, return_inverse=True)
    counts = np.zeros((ti.max() + 1, pi.max() + 1), dtype=np.int64)
    np.add.at(counts, (ti, pi), 1)
    return ContingencyTable(counts)


def _entropy(marg: np.ndarray, n: int) -> float:
    p = marg[marg > 0] / n
    return float(-np.sum(p * np.log(p)))


def mutual_info(table: ContingencyTable) -> float:
    c, n = table.counts, table.total
    nz = c > 0
    outer = np.outer(table.rows, table.cols)
    return float(np.sum(c[nz] / n * np.log(c[nz] * n / outer[nz])))


def ari_raw(table: ContingencyTable) -> float:
    c, n = table.counts, table.total
    sum_cells = comb(c, 2).sum()
    sum_rows = comb(table.rows, 2).sum()
    sum_cols = comb(table.cols, 2).sum()
    total_pairs = comb(n, 2)
    expected = sum_rows * sum_cols / total_pairs if total_pairs > 0 else 0.0
    max_index = 0.5 * (sum_rows + sum_cols)
    if max_index == expected:
        return 1.0
    return float((sum_cells - expected) / (max_index - expected))


def accuracy(table: ContingencyTable) -> float:
    c = table.counts
    m = max(c.shape)
    padded = np.zeros((m, m), dtype=np.int64)
    padded[: c.shape[0], : c.shape[1]] = c
    r, k = linear_sum_assignment(padded, maximize=True)
    return float(padded[r, k].sum() / table.total)


def purity(table: ContingencyTable) -> float:
    return float(table.counts.max(axis=0).sum() / table.total)


def evaluate(true_labels, pred_labels) -> dict:
    """All six metrics plus ``ARI_raw`` (ARI before clamping to ``[0, 1]``)."""
    table = contingency(true_labels, pred_labels)
    n = table.total
    h_true = _entropy(table.rows, n)
    h_pred = _entropy(table.cols, n)
    mi = mutual_info(table)
    if h_true == 0 and h_pred == 0:
        nmi = 1.0
    elif h_true == 0 or h_pred == 0:
        nmi = 0.0
    else:
        nmi = mi / np.sqrt(h_true * h_pred)
    hom = 1.0 if h_true == 0 else 1.0 - (h_true - mi) / h_true
    com = 1.0 if h_pred == 0 else 1.0 - (h_pred - mi) / h_pred
    ari = ari_raw(table)
    clip = lambda x: float(min(1.0, max(0.0, x)))
    return {
        "NMI": clip(nmi),
        "ARI": clip(ari),
        "ACC": accuracy(table),
        "HOM": clip(hom),
        "COM": clip(com),
        "PUR": purity(table),
        "ARI_raw": ari,
    }
