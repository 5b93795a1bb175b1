"""Entangled graphs: spectral-entropy node importance for weighted graphs,
module-contrastive feature learning, and an importance-aware transformer
classifier, with classical centrality baselines."""

__version__ = "0.1.0"
