"""graphrf: receptive-field extraction from attributed graphs.

Converts graphs into fixed-size tensor representations via a
select / assemble / normalize pipeline, evaluates candidate node
labelings with a sampled adjacency-distance estimator, and trains a
small from-scratch convolutional classifier on the extracted tensors.
"""

__version__ = "0.1.0"

from .graph_core import Graph, build_graph  # noqa: F401
