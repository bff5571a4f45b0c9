from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Mapping, Optional, Tuple

import numpy as np

from .derive import KinkWarning, derivative
from .evaluate import evaluate
from .nodes import Node, Param, free_names, to_source
from .parser import DSLError, parse_node

VARIABLES = ("x", "y", "z")


@dataclass(frozen=True)
class Expression:
    """Parsed expression in the variables of a fixed dimension.

    Parameters are bound at load time through ``params``; ``eval`` may
    override individual values.
    """

    root: Node
    variables: Tuple[str, ...] = VARIABLES[:2]
    params: Mapping[str, float] = field(default_factory=dict)
    kinked: bool = False

    def __eq__(self, other):
        return isinstance(other, Expression) and self.root == other.root

    def __hash__(self):
        return hash(self.root)

    @property
    def dimension(self) -> int:
        return len(self.variables)

    def __str__(self):
        return to_source(self.root)

    def to_source(self) -> str:
        return to_source(self.root)

    def eval(self, point, params: Optional[Mapping[str, float]] = None):
        """Evaluate at ``point`` (a sequence of coordinates, each a float or
        an array of a common shape)."""
        values = tuple(point)
        if len(values) != self.dimension:
            raise ValueError(f"expected {self.dimension} coordinates, got {len(values)}")
        env = dict(self.params)
        if params:
            env.update(params)
        missing = free_names(self.root, kind=Param) - env.keys()
        if missing:
            raise DSLError(f"unbound parameters: {sorted(missing)}")
        env.update(zip(self.variables, values))
        out = evaluate(self.root, env)
        if np.ndim(out) == 0:
            return float(out)
        shape = np.broadcast_shapes(*(np.shape(v) for v in values))
        return np.broadcast_to(out, shape).astype(float, copy=True)

    __call__ = eval

    def differentiate(self, var: str) -> "Expression":
        if var not in self.variables:
            raise ValueError(f"{var!r} is not a variable of this expression")
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", KinkWarning)
            root = derivative(self.root, var)
        hit = any(issubclass(w.category, KinkWarning) for w in caught)
        kinked = self.kinked or hit
        if hit:
            warnings.warn(f"derivative of {self} w.r.t. {var} is valid away from kinks only",
                          KinkWarning, stacklevel=2)
        return Expression(root, self.variables, self.params, kinked)


def parse(src: str, dimension: int = 2, params: Optional[Mapping[str, float]] = None) -> Expression:
    """Parse ``src`` over the first ``dimension`` of ``x, y, z``."""
    if dimension not in (1, 2, 3):
        raise ValueError("dimension must be 1, 2 or 3")
    variables = VARIABLES[:dimension]
    params = dict(params or {})
    root = parse_node(src, variables, params.keys())
    return Expression(root, variables, {k: float(v) for k, v in params.items()})


def differentiate(e: Expression, var: str) -> Expression:
    return e.differentiate(var)


def eval_expression(e: Expression, point, params=None):
    return e.eval(point, params)
