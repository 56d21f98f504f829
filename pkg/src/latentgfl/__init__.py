"""Latent-space graph-fused LASSO clustering of nodes carrying time series."""

from .graph import Graph, NodeSeries, graph_from_edges, standardize_seasonal, standardize_zscore
from .decoder import DecoderParams, AdamState, init_decoder
from .inference import LangevinConfig, RngStream
from .admm import FitConfig, AdmmState, FitResult, fit, select_lambda
from .clustering import ClusterResult, kmeans, silhouette, select_k
from .metrics import ContingencyTable, contingency, evaluate
from .simgen import ScenarioSpec, run_scenario

__version__ = "0.1.0"

__all__ = [
    "Graph", "NodeSeries", "graph_from_edges", "standardize_seasonal", "standardize_zscore",
    "DecoderParams", "AdamState", "init_decoder",
    "LangevinConfig", "RngStream",
    "FitConfig", "AdmmState", "FitResult", "fit", "select_lambda",
    "ClusterResult", "kmeans", "silhouette", "select_k",
    "ContingencyTable", "contingency", "evaluate",
    "ScenarioSpec", "run_scenario",
]
