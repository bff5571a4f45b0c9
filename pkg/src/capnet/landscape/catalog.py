"""Built-in landscapes. Counts were derived by hand from the gradient roots."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from .potential import Potential

SILVER = 1.0 + math.sqrt(2.0)


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    expression: str
    params: Dict[str, float]
    box: Tuple[Tuple[float, float], ...]
    a: Tuple[float, ...]
    b: Tuple[float, ...]
    description: str
    minima: int = 0
    saddles: int = 0
    vertices: int = 0
    edges: int = 0
    oracle_only: bool = False

    def potential(self, **overrides) -> Potential:
        params = dict(self.params)
        unknown = set(overrides) - set(params)
        if unknown:
            raise KeyError(f"{self.name} has no parameters {sorted(unknown)}")
        params.update(overrides)
        return Potential.from_expression(self.expression, self.box, params, name=self.name)


CATALOG: Dict[str, CatalogEntry] = {e.name: e for e in (
    CatalogEntry("double-well", "(x^2 - 1)^2 + y^2", {}, ((-2, 2), (-1.5, 1.5)), (-1, 0), (1, 0),
                 "two wells joined by one Morse saddle at the origin", 2, 1, 2, 1),
    CatalogEntry("asymmetric-double-well", "(x^2 - 1)^2 + y^2 + a*x^3", {"a": 0.25},
                 ((-2.2, 2), (-1.5, 1.5)), (-1.1, 0), (0.9, 0),
                 "double well with unequal minima and the same saddle", 2, 1, 2, 1),
    CatalogEntry("parallel-3", "(x^2 - 1)^2 + y^2 + exp(-x^2)*(k*y^2*(y^2 - 1)^2 - y^2)", {"k": 3.0},
                 ((-2, 2), (-2, 2)), (-1, 0), (1, 0),
                 "two wells joined by three saddles of equal height", 2, 3, 2, 3),
    CatalogEntry("series-2", "6.75*x^2*(x^2 - 1)^2 + y^2", {}, ((-1.8, 1.8), (-1.5, 1.5)), (-1, 0), (1, 0),
                 "three wells in a row, two saddles in series", 3, 2, 3, 2),
    CatalogEntry("triangle", "(x^2 + y^2 - 1)^2 + c*(1 - (x^3 - 3*x*y^2))", {"c": 0.5},
                 ((-2, 2), (-2, 2)), (1.2049, 0), (-0.6025, 1.0435),
                 "three wells on a ring, three saddles forming a cycle", 3, 3, 3, 3),
    CatalogEntry("block-pruning", "((x^2 - 1)*(x^2 - b^2))^2/b^4 + y^2", {"b": SILVER},
                 ((-3.2, 3.2), (-1.5, 1.5)), (-1, 0), (1, 0),
                 "four wells in a row; the outer wells hang off pendant blocks", 4, 3, 4, 3),
    CatalogEntry("strip", "0*x", {}, ((0, 4), (0, 1)), (0.25, 0.5), (3.75, 0.5),
                 "flat strip; no saddle, oracle sanity check only", oracle_only=True),
)}


def get(name: str) -> CatalogEntry:
    try:
        return CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown catalog entry {name!r}; choose from {sorted(CATALOG)}") from None
