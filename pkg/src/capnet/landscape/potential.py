"""Potentials on a box: value, gradient and Hessian, all vectorized over points."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..dsl import Expression, parse

_FD_STEP = 1e-5


def _as_box(box) -> np.ndarray:
    b = np.asarray(box, dtype=float)
    if b.ndim != 2 or b.shape[1] != 2 or np.any(b[:, 1] <= b[:, 0]):
        raise ValueError("box must be a sequence of (low, high) pairs with low < high")
    return b


@dataclass(frozen=True)
class Potential:
    """``F: R^n -> R`` restricted to an axis-aligned ``box``.

    ``func`` maps an array of points with shape ``(..., n)`` to ``(...)``.
    Missing derivatives fall back to central differences.
    """

    func: Callable
    box: np.ndarray
    grad_func: Optional[Callable] = None
    hess_func: Optional[Callable] = None
    name: str = "potential"
    source: Optional[str] = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "box", _as_box(self.box))
        if self.dimension not in (2, 3):
            raise ValueError("landscapes are supported in dimension 2 and 3 only")

    @classmethod
    def from_expression(cls, expr, box, params=None, name=None) -> "Potential":
        box = _as_box(box)
        if isinstance(expr, str):
            src = expr
            expr = parse(expr, dimension=box.shape[0], params=params)
        else:
            src = expr.to_source()
        if expr.dimension != box.shape[0]:
            raise ValueError("expression dimension does not match the box")
        grads = [expr.differentiate(v) for v in expr.variables]
        hess = [[g.differentiate(v) for v in expr.variables] for g in grads]

        def coords(x):
            x = np.asarray(x, dtype=float)
            return tuple(x[..., k] for k in range(x.shape[-1]))

        def f(x):
            x = np.asarray(x, dtype=float)
            return np.broadcast_to(expr.eval(coords(x)), x.shape[:-1]).astype(float)

        def g(x):
            x = np.asarray(x, dtype=float)
            return np.stack([np.broadcast_to(d.eval(coords(x)), x.shape[:-1]) for d in grads], -1)

        def h(x):
            x = np.asarray(x, dtype=float)
            rows = [np.stack([np.broadcast_to(d.eval(coords(x)), x.shape[:-1]) for d in r], -1)
                    for r in hess]
            H = np.stack(rows, -2)
            return 0.5 * (H + np.swapaxes(H, -1, -2))

        return cls(f, box, g, h, name or src, src, dict(expr.params))

    @property
    def dimension(self) -> int:
        return self.box.shape[0]

    def __call__(self, x):
        return self.func(np.asarray(x, dtype=float))

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        if self.grad_func is not None:
            return self.grad_func(x)
        out = np.empty(x.shape)
        for k in range(self.dimension):
            step = _FD_STEP * np.maximum(1.0, np.abs(x[..., k]))
            e = np.zeros(self.dimension)
            e[k] = 1.0
            out[..., k] = (self(x + step[..., None] * e) - self(x - step[..., None] * e)) / (2 * step)
        return out

    def hessian(self, x):
        x = np.asarray(x, dtype=float)
        if self.hess_func is not None:
            return self.hess_func(x)
        n = self.dimension
        H = np.empty(x.shape + (n,))
        for k in range(n):
            step = _FD_STEP * np.maximum(1.0, np.abs(x[..., k]))
            e = np.zeros(n)
            e[k] = 1.0
            H[..., :, k] = (self.gradient(x + step[..., None] * e)
                            - self.gradient(x - step[..., None] * e)) / (2 * step[..., None])
        return 0.5 * (H + np.swapaxes(H, -1, -2))

    def shifted(self, c: float) -> "Potential":
        """``F + c``."""
        f, g, h = self.func, self.gradient, self.hessian
        return Potential(lambda x: f(x) + c, self.box, g, h, f"{self.name} + {c}")

    def rotated(self, R, center=None) -> "Potential":
        """``x -> F(R^T (x - c) + c)``; the box becomes the bounding box of the rotated one."""
        R = np.asarray(R, dtype=float)
        c = np.zeros(self.dimension) if center is None else np.asarray(center, dtype=float)
        f, g, h = self.func, self.gradient, self.hessian
        back = lambda x: (np.asarray(x, dtype=float) - c) @ R + c
        corners = np.array(np.meshgrid(*self.box, indexing="ij")).reshape(self.dimension, -1).T
        moved = (corners - c) @ R.T + c
        box = np.stack([moved.min(0), moved.max(0)], 1)
        return Potential(lambda x: f(back(x)), box,
                         lambda x: g(back(x)) @ R.T,
                         lambda x: R @ h(back(x)) @ R.T,
                         f"rotated {self.name}")

    def boundary_samples(self, per_axis: int = 64) -> np.ndarray:
        """Points on the faces of the box."""
        axes = [np.linspace(lo, hi, per_axis) for lo, hi in self.box]
        pts = []
        for k in range(self.dimension):
            for side in self.box[k]:
                grids = axes[:k] + [np.array([side])] + axes[k + 1:]
                mesh = np.meshgrid(*grids, indexing="ij")
                pts.append(np.stack([m.ravel() for m in mesh], 1))
        return np.concatenate(pts)

    def growth_constant(self, per_axis: int = 64) -> float:
        """Smallest ``C0`` with ``F(x) >= |x|^2/C0 - C0`` on boundary samples."""
        pts = self.boundary_samples(per_axis)
        F = self(pts)
        r2 = np.sum(pts * pts, axis=1)
        # F + C >= r2 / C  <=>  C^2 + F C - r2 >= 0
        roots = 0.5 * (-F + np.sqrt(F * F + 4.0 * r2))
        return float(max(np.max(roots), 1e-12))

    def describe(self) -> dict:
        return {"name": self.name, "expression": self.source, "params": dict(self.params),
                "box": self.box.tolist()}
