"""Dummy-vertex and edge-to-vertex transforms for labeled digraphs, with graph kernels and an SVM harness."""

from .graph import GraphError, LabeledDigraph, is_isomorphic, make_graph, validate
from .kernels import GramMatrix, KernelSpec, gram_matrix, kernel
from .labels import DUMMY_EDGE, DUMMY_VERTEX, UNIVERSE, LabelUniverse
from .transform import (TransformError, augment_dummy, edge_to_vertex, inverse_edge_to_vertex,
                        line_graph, transform_stats)

__version__ = "0.1.0"
