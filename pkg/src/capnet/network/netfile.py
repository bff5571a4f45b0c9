"""Plain-text network files.

Grammar (see also ``docs/network-format.md``)::

    file       = { line } ;
    line       = [ statement ] [ "#" comment ] newline ;
    statement  = "vertices:" int
               | "terminals:" int int
               | "vertex" int label
               | "edge" int int weight [ label ] ;
    weight     = real | "logw:" real ;

``vertices:`` must come before any ``vertex``/``edge`` line. Plain weights
are written with 17 significant digits so parse/serialize is lossless.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..exceptions import NetworkFormatError
from .graph import AdmittanceVector, OrientedGraph, check_network


@dataclass(frozen=True)
class NetworkFile:
    graph: OrientedGraph
    admittance: AdmittanceVector
    terminals: Optional[tuple] = None


def _parse_int(tok, lineno, what):
    try:
        return int(tok)
    except ValueError:
        raise NetworkFormatError(f"expected integer {what}, got {tok!r}", lineno) from None


def _parse_real(tok, lineno):
    try:
        x = float(tok)
    except ValueError:
        raise NetworkFormatError(f"expected real number, got {tok!r}", lineno) from None
    if math.isnan(x):
        raise NetworkFormatError("NaN weight", lineno)
    return x


def parse_network(text: str) -> NetworkFile:
    n = None
    terminals = None
    vlabels = {}
    edges, elabels, values, logs, is_log = [], [], [], [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        head = toks[0]
        if head == "vertices:" or head.startswith("vertices:"):
            rest = toks[1:] if head == "vertices:" else [head[len("vertices:"):]] + toks[1:]
            if n is not None:
                raise NetworkFormatError("duplicate 'vertices:' line", lineno)
            if len(rest) != 1:
                raise NetworkFormatError("'vertices:' takes one integer", lineno)
            n = _parse_int(rest[0], lineno, "vertex count")
            if n < 1:
                raise NetworkFormatError("vertex count must be >= 1", lineno)
        elif head == "terminals:":
            if len(toks) != 3:
                raise NetworkFormatError("'terminals:' takes two vertex ids", lineno)
            terminals = (_parse_int(toks[1], lineno, "vertex id"), _parse_int(toks[2], lineno, "vertex id"))
        elif head in ("vertex", "edge"):
            if n is None:
                raise NetworkFormatError(f"'{head}' before 'vertices:'", lineno)
            if head == "vertex":
                if len(toks) != 3:
                    raise NetworkFormatError("'vertex' takes an id and a label", lineno)
                v = _parse_int(toks[1], lineno, "vertex id")
                if not 0 <= v < n:
                    raise NetworkFormatError(f"vertex id {v} out of range", lineno)
                vlabels[v] = toks[2]
                continue
            if len(toks) not in (4, 5):
                raise NetworkFormatError("'edge' takes tail head weight [label]", lineno)
            t = _parse_int(toks[1], lineno, "tail")
            h = _parse_int(toks[2], lineno, "head")
            for x in (t, h):
                if not 0 <= x < n:
                    raise NetworkFormatError(f"vertex id {x} out of range", lineno)
            wtok = toks[3]
            if wtok.startswith("logw:"):
                lv = _parse_real(wtok[5:], lineno)
                if lv == math.inf:
                    raise NetworkFormatError("log weight +inf", lineno)
                logs.append(lv)
                values.append(math.exp(lv) if lv > -745 else 0.0)
                is_log.append(True)
            else:
                v = _parse_real(wtok, lineno)
                if v < 0 or math.isinf(v):
                    raise NetworkFormatError("weights must be finite and nonnegative", lineno)
                values.append(v)
                logs.append(math.log(v) if v > 0 else -math.inf)
                is_log.append(False)
            if t == h and logs[-1] != -math.inf:
                raise NetworkFormatError("self-loop must have zero weight", lineno)
            edges.append((t, h))
            elabels.append(toks[4] if len(toks) == 5 else None)
        else:
            raise NetworkFormatError(f"unknown statement {head!r}", lineno)
    if n is None:
        raise NetworkFormatError("missing 'vertices:' line")
    if terminals is not None:
        for x in terminals:
            if not 0 <= x < n:
                raise NetworkFormatError(f"terminal {x} out of range")
    vl = None
    if vlabels:
        vl = tuple(vlabels.get(v, str(v)) for v in range(n))
    el = tuple(elabels) if any(lbl is not None for lbl in elabels) else None
    graph = OrientedGraph(n, tuple(edges), vl, el)
    y = AdmittanceVector(np.array(values, dtype=float), np.array(logs, dtype=float),
                         np.array(is_log, dtype=bool))
    return NetworkFile(graph, check_network(graph, y, require_zero_loops=True), terminals)


def read_network(path) -> NetworkFile:
    with open(path, encoding="utf-8") as fh:
        return parse_network(fh.read())


def _fmt(x: float) -> str:
    if x == -math.inf:
        return "-inf"
    return format(x, ".17g")


def format_network(g: OrientedGraph, y, terminals=None) -> str:
    y = check_network(g, y)
    lines = [f"vertices: {g.vertex_count}"]
    if terminals is not None:
        lines.append(f"terminals: {terminals[0]} {terminals[1]}")
    if g.vertex_labels is not None:
        for v, lbl in enumerate(g.vertex_labels):
            lines.append(f"vertex {v} {lbl}")
    for e, (t, h) in enumerate(g.edges):
        weight = f"logw:{_fmt(y.log_values[e])}" if y.is_log[e] else _fmt(float(y.values[e]))
        parts = ["edge", str(t), str(h), weight]
        if g.edge_labels is not None and g.edge_labels[e] is not None:
            parts.append(str(g.edge_labels[e]))
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def write_network(path, g: OrientedGraph, y, terminals=None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_network(g, y, terminals))
