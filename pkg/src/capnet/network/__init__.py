"""Exact electrical-network computations on small oriented multigraphs."""
from .blocks import Block, DeletionBounds, PrunedNetwork, biconnected_components, deletion_bounds, prune_irrelevant_blocks
from .electrical import NetworkSolution, capacity, dual_current, kirchhoff_voltage
from .graph import AdmittanceVector, OrientedGraph, incidence_matrix, laplacian, support_components, weighted_laplacian
from .netfile import NetworkFile, format_network, parse_network, read_network, write_network
from .trees import (contract, log_effective_conductance, log_tree_polynomial, spanning_trees,
                    tree_polynomial_det, tree_polynomial_enum, tree_polynomial_exact)

__all__ = [
    "AdmittanceVector", "Block", "DeletionBounds", "NetworkFile", "NetworkSolution", "OrientedGraph",
    "PrunedNetwork", "biconnected_components", "capacity", "contract", "deletion_bounds", "dual_current",
    "format_network", "incidence_matrix", "kirchhoff_voltage", "laplacian", "log_effective_conductance",
    "log_tree_polynomial", "parse_network", "prune_irrelevant_blocks", "read_network", "spanning_trees",
    "support_components", "tree_polynomial_det", "tree_polynomial_enum", "tree_polynomial_exact",
    "weighted_laplacian", "write_network",
]
