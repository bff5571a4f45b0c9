"""Landscape files and run configuration.

A landscape file is YAML::

    catalog: double-well          # or: potential: "(x^2 - 1)^2 + y^2"
    params: {a: 0.25}
    box: [[-2, 2], [-1.5, 1.5]]   # required with potential:, optional with catalog:
    a: [-1, 0]
    b: [1, 0]
    eps: [0.2, 0.1, 0.05]
    delta: null
    grid_n: 256
    oracle_grid: 400
    saddles:
      - at: [0, 0]
        unstable: {kind: even-power, lam: 4, p: 4}
        stable: {kind: quadratic, lam: 2}
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
import yaml

from .admittance import profile_from_dict
from .exceptions import CapnetError
from .landscape import Potential, SaddleOverride, catalog_entry

MODES = ("network", "capacity", "verify", "report")
FORMATS = ("csv", "json")


class ConfigError(CapnetError, ValueError):
    """Malformed configuration or landscape file."""


@dataclass
class LandscapeConfig:
    name: str
    expression: str
    params: Dict[str, float]
    box: List[List[float]]
    a: List[float]
    b: List[float]
    eps: List[float] = field(default_factory=list)
    delta: Optional[float] = None
    grid_n: int = 256
    oracle_grid: int = 400
    saddles: List[dict] = field(default_factory=list)
    oracle_only: bool = False

    def potential(self) -> Potential:
        return Potential.from_expression(self.expression, self.box, self.params, name=self.name)

    def overrides(self) -> List[SaddleOverride]:
        out = []
        for s in self.saddles:
            try:
                out.append(SaddleOverride(np.asarray(s["at"], float), profile_from_dict(s["unstable"]),
                                          profile_from_dict(s["stable"]), s.get("height")))
            except KeyError as exc:
                raise ConfigError(f"saddle override needs key {exc}") from None
        return out

    def to_dict(self) -> dict:
        return asdict(self)


def _floats(v, what, length=None):
    try:
        out = [float(x) for x in v]
    except (TypeError, ValueError):
        raise ConfigError(f"{what} must be a list of numbers") from None
    if length is not None and len(out) != length:
        raise ConfigError(f"{what} must have {length} entries")
    return out


def landscape_from_dict(data: dict, param_overrides: Optional[Dict[str, float]] = None) -> LandscapeConfig:
    if not isinstance(data, dict):
        raise ConfigError("landscape file must be a mapping")
    known = {"name", "catalog", "potential", "params", "box", "a", "b", "eps", "delta", "grid_n",
             "oracle_grid", "saddles"}
    extra = set(data) - known
    if extra:
        raise ConfigError(f"unknown landscape keys: {sorted(extra)}")
    if ("catalog" in data) == ("potential" in data):
        raise ConfigError("give exactly one of 'catalog' or 'potential'")
    params = {str(k): float(v) for k, v in (data.get("params") or {}).items()}
    params.update(param_overrides or {})
    oracle_only = False
    if "catalog" in data:
        try:
            entry = catalog_entry(str(data["catalog"]))
        except KeyError as exc:
            raise ConfigError(str(exc.args[0])) from None
        unknown = set(params) - set(entry.params)
        if unknown:
            raise ConfigError(f"{entry.name} has no parameters {sorted(unknown)}")
        params = {**entry.params, **params}
        expression, name = entry.expression, data.get("name", entry.name)
        box = data.get("box", [list(r) for r in entry.box])
        a, b = data.get("a", list(entry.a)), data.get("b", list(entry.b))
        oracle_only = entry.oracle_only
    else:
        expression, name = str(data["potential"]), str(data.get("name", "custom"))
        for key in ("box", "a", "b"):
            if key not in data:
                raise ConfigError(f"landscape with an explicit potential needs '{key}'")
        box, a, b = data["box"], data["a"], data["b"]
    box = [_floats(r, "box row", 2) for r in box]
    dim = len(box)
    eps = _floats(data.get("eps") or [], "eps")
    delta = data.get("delta")
    return LandscapeConfig(name, expression, params, box, _floats(a, "a", dim), _floats(b, "b", dim),
                           eps, None if delta is None else float(delta), int(data.get("grid_n", 256)),
                           int(data.get("oracle_grid", 400)), list(data.get("saddles") or []), oracle_only)


def load_landscape(path, param_overrides=None) -> LandscapeConfig:
    text = Path(path).read_text()
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}, column {mark.column + 1}: " if mark else ""
        raise ConfigError(f"{where}{getattr(exc, 'problem', exc)}") from None
    return landscape_from_dict(data, param_overrides)


@dataclass
class RunConfig:
    mode: str
    input: Optional[str] = None
    catalog: Optional[str] = None
    params: Dict[str, float] = field(default_factory=dict)
    eps: Tuple[float, ...] = ()
    grid_n: Optional[int] = None
    oracle_grid: Optional[int] = None
    delta: Optional[float] = None
    out: Optional[str] = None
    format: str = "json"
    terminals: Optional[Tuple[int, int]] = None
    timing: bool = False
    snapshot: Optional[str] = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        if (self.input is None) == (self.catalog is None):
            raise ConfigError("give exactly one input source: --input or --catalog")
        if self.catalog is not None and self.mode in ("network", "report"):
            raise ConfigError(f"{self.mode} mode reads --input only")
        eps = tuple(float(e) for e in self.eps)
        if any(not e > 0 for e in eps):
            raise ConfigError("eps values must be positive")
        # coarse to fine, the order in which convergence is judged
        self.eps = tuple(sorted(set(eps), reverse=True))
        if self.delta is not None and not self.delta > 0:
            raise ConfigError("delta must be positive")

    def canonical(self) -> dict:
        d = asdict(self)
        for key in ("out", "format", "timing", "snapshot"):
            d.pop(key)
        d["eps"] = list(self.eps)
        if self.terminals is not None:
            d["terminals"] = list(self.terminals)
        return d

    def hash(self, extra: Optional[dict] = None) -> str:
        payload = {"run": self.canonical(), "input": extra}
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()
