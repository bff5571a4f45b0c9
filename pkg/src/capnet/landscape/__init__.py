from .build import (LandscapeNetwork, SaddleOverride, analyze_landscape, build_network,
                    quadratic_descriptor)
from .catalog import CATALOG, CatalogEntry, get as catalog_entry
from .critical import CriticalPoint, classify, find_critical_points, make_critical_point
from .potential import Potential
from .topology import (Bridge, CommunicationHeight, Grid, IslandDecomposition, boxes_intersect,
                       bridge_box, bridges_disjoint, communication_height, decompose_islands,
                       estimate_delta1)

__all__ = [
    "Bridge", "CATALOG", "CatalogEntry", "CommunicationHeight", "CriticalPoint", "Grid",
    "IslandDecomposition", "LandscapeNetwork", "Potential", "SaddleOverride", "analyze_landscape",
    "boxes_intersect", "bridge_box", "bridges_disjoint", "build_network", "catalog_entry", "classify",
    "communication_height", "decompose_islands", "estimate_delta1", "find_critical_points",
    "make_critical_point", "quadratic_descriptor",
]
