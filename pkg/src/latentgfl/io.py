"""File formats: TSV edge lists, CSV series and labels, JSON documents."""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from .graph import Graph, NodeSeries, graph_from_edges


def read_edges(path) -> list[tuple[int, int]]:
    """``i<TAB>j`` per line, 0-based; ``#`` starts a comment."""
    pairs = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected two node ids, got {line!r}")
            try:
                pairs.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: node ids must be integers") from None
    return pairs


def write_edges(path, graph: Graph) -> None:
    with open(path, "w") as fh:
        fh.write(f"# {graph.n_nodes} nodes, {graph.n_edges} edges\n")
        for i, j in graph.edges:
            fh.write(f"{i}\t{j}\n")


def read_series(path, header: bool = False) -> NodeSeries:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if header:
        rows = rows[1:]
    rows = [r for r in rows if r]
    if not rows:
        raise ValueError(f"{path}: no series rows")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValueError(f"{path}: rows have differing lengths {sorted(widths)}")
    try:
        values = np.array([[float(x) for x in r] for r in rows])
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None
    return NodeSeries(values)


def write_series(path, series: NodeSeries) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for row in series.values:
            w.writerow([repr(float(x)) for x in row])


def load_graph(edges_path, n_nodes: int) -> Graph:
    return graph_from_edges(n_nodes, read_edges(edges_path))


def write_labels(path, labels, header=("node", "cluster")) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for i, c in enumerate(labels):
            w.writerow([i, int(c)])


def read_labels(path) -> np.ndarray:
    """Two-column CSV ``node,cluster`` with a header row; returned in node order."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if rows and not rows[0][0].lstrip("-").isdigit():
        rows = rows[1:]
    if not rows:
        raise ValueError(f"{path}: no labels")
    pairs = sorted((int(r[0]), int(r[1])) for r in rows)
    nodes = [p[0] for p in pairs]
    if nodes != list(range(len(nodes))):
        raise ValueError(f"{path}: node ids must be 0..N-1 without gaps")
    return np.array([p[1] for p in pairs])


def write_json(path, doc) -> None:
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")


def read_json(path):
    return json.loads(Path(path).read_text())


def digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
