"""Run modes and machine-readable reports.

CSV columns are frozen (see ``NETWORK_COLUMNS`` and ``SWEEP_COLUMNS``);
JSON carries the same rows plus nested per-edge detail.
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .config import ConfigError, LandscapeConfig, RunConfig, landscape_from_dict, load_landscape
from .exceptions import CapnetError, InadmissibleError, OracleError
from .network import (capacity, dual_current, log_effective_conductance, log_tree_polynomial,
                      prune_irrelevant_blocks, read_network)
from .network.trees import contract
from .oracle import GridProblem, bridge_cut, discrete_thompson, edge_current, solve_capacity, write_snapshot

SCHEMA_VERSION = "1.0"

NETWORK_COLUMNS = (
    "vertices", "edges", "u", "w", "capacity", "log_capacity", "log_tree_polynomial",
    "log_tree_polynomial_contracted", "kirchhoff_voltage", "pruned_capacity", "removed_blocks",
)

SWEEP_COLUMNS = (
    "eps", "status", "network_log_capacity", "network_mantissa", "network_log_scale",
    "oracle_log_capacity", "oracle_mantissa", "oracle_log_scale", "log_ratio", "ratio",
    "oracle_grid", "oracle_residual", "oracle_flux_in", "oracle_flux_out", "thompson_product",
)

CUT_HEIGHT = 12.0


def _num(x):
    if x is None:
        return None
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return int(x)
    x = float(x) + 0.0
    if math.isnan(x):
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _header(cfg: RunConfig, mode: str, source: dict) -> dict:
    return {"schema_version": SCHEMA_VERSION, "capnet_version": __version__, "mode": mode,
            "config": cfg.canonical(), "config_hash": cfg.hash(source)}


def run_network(cfg: RunConfig) -> dict:
    text = Path(cfg.input).read_text()
    nf = read_network(cfg.input)
    g, y = nf.graph, nf.admittance
    terminals = cfg.terminals or nf.terminals
    if terminals is None:
        raise ConfigError("network file has no 'terminals' line; pass --terminals")
    u, w = terminals
    if not (0 <= u < g.vertex_count and 0 <= w < g.vertex_count) or u == w:
        raise ConfigError("terminals must be two distinct vertex ids")
    t0 = time.perf_counter()
    sol = dual_current(g, y, u, w)
    if not sol.connected:
        raise CapnetError("terminals are disconnected")
    pruned = prune_irrelevant_blocks(g, y, u, w)
    psol = capacity(pruned.graph, pruned.admittance, pruned.u, pruned.w)
    log_t = log_tree_polynomial(g, y)
    log_tc = log_tree_polynomial(contract(g, u, w), y)
    row = {
        "vertices": g.vertex_count, "edges": g.edge_count, "u": u, "w": w,
        "capacity": _num(sol.lam), "log_capacity": _num(sol.log_lam),
        "log_tree_polynomial": _num(log_t), "log_tree_polynomial_contracted": _num(log_tc),
        "kirchhoff_voltage": _num(sol.voltage), "pruned_capacity": _num(psol.lam),
        "removed_blocks": pruned.removed_blocks,
    }
    report = _header(cfg, "network", {"network": text})
    report["rows"] = [row]
    report["edges"] = [
        {"index": e, "tail": t, "head": h, "label": None if g.edge_labels is None else g.edge_labels[e],
         "admittance": _num(y.values[e]), "log_admittance": _num(y.log_values[e]),
         "current": _num(sol.current[e])}
        for e, (t, h) in enumerate(g.edges)]
    report["vertices"] = [{"index": v, "voltage": _num(sol.phi[v])} for v in range(g.vertex_count)]
    report["pruning"] = {"kept_vertices": list(pruned.kept_vertices), "kept_edges": list(pruned.kept_edges),
                         "removed_blocks": pruned.removed_blocks}
    if cfg.timing:
        report["timing"] = {"seconds": time.perf_counter() - t0}
    return report


def _landscape(cfg: RunConfig) -> LandscapeConfig:
    if cfg.catalog is not None:
        lc = landscape_from_dict({"catalog": cfg.catalog}, cfg.params)
    else:
        lc = load_landscape(cfg.input, cfg.params)
    if cfg.eps:
        lc.eps = list(cfg.eps)
    if not lc.eps:
        raise ConfigError("no eps values given (use --eps or an 'eps' list in the file)")
    lc.eps = sorted(set(lc.eps), reverse=True)
    if cfg.grid_n is not None:
        lc.grid_n = cfg.grid_n
    if cfg.oracle_grid is not None:
        lc.oracle_grid = cfg.oracle_grid
    if cfg.delta is not None:
        lc.delta = cfg.delta
    return lc


def _analyze(lc: LandscapeConfig):
    from .landscape import analyze_landscape
    p = lc.potential()
    return p, analyze_landscape(p, lc.a, lc.b, lc.delta, lc.grid_n, lc.overrides())


def _network_row(net, eps):
    y = net.admittance(eps)
    sol = dual_current(net.graph, y, net.u, net.w)
    if not sol.connected:
        raise CapnetError("terminal islands are not joined by any bridge")
    offset = net.log_offset(eps)
    edges = [{"index": e, "tail": t, "head": h, "log_admittance": _num(y.log_values[e] + offset),
              "admittance_mantissa": _num(y.values[e]), "dual_current": _num(sol.current[e])}
             for e, (t, h) in enumerate(net.graph.edges)]
    return {"network_log_capacity": sol.log_lam + offset, "network_mantissa": sol.lam,
            "network_log_scale": offset}, edges


def _empty_row(eps):
    row = {c: None for c in SWEEP_COLUMNS}
    row["eps"] = eps
    return row


def run_capacity(cfg: RunConfig) -> dict:
    lc = _landscape(cfg)
    t0 = time.perf_counter()
    p, net = _analyze(lc)
    report = _header(cfg, "capacity", {"landscape": lc.to_dict()})
    report["landscape"] = dict(lc.to_dict(), inventory=net.inventory())
    rows = []
    for eps in lc.eps:
        row = _empty_row(eps)
        vals, edges = _network_row(net, eps)
        row.update({k: _num(v) for k, v in vals.items()})
        row["status"] = "network"
        row["edge_detail"] = edges
        rows.append(row)
    report["rows"] = rows
    if cfg.timing:
        report["timing"] = {"seconds": time.perf_counter() - t0}
    return report


def _oracle(p, lc, eps, centers, level, delta, net=None, snapshot=None):
    gp = GridProblem.from_potential(p, eps, centers[0], centers[1], lc.oracle_grid, level, delta)
    res = solve_capacity(gp)
    th = discrete_thompson(gp, res)
    out = {"oracle_log_capacity": res.log_capacity, "oracle_mantissa": res.capacity_scaled,
           "oracle_log_scale": gp.log_offset, "oracle_grid": int(gp.grid.shape[0]),
           "oracle_residual": res.residual, "oracle_flux_in": res.flux_in, "oracle_flux_out": res.flux_out,
           "thompson_product": th.value_scaled * res.capacity_scaled}
    currents = None
    if net is not None:
        currents = []
        for k, d in enumerate(net.descriptors):
            if d is None:
                currents.append(None)
                continue
            try:
                cut = bridge_cut(p, d.translation, d.rotation[:, 1], level + CUT_HEIGHT * eps, grid=gp.grid)
                currents.append(edge_current(gp, res, cut, d.rotation[:, 0]))
            except OracleError:
                currents.append(None)
    if snapshot is not None:
        write_snapshot(f"{snapshot}.eps{eps:g}.bin", res.h, gp.grid.box)
    return out, currents


def monotonicity(rows) -> dict:
    errs = [(r["eps"], abs(r["ratio"] - 1.0)) for r in rows if r.get("ratio") is not None]
    steps = [b[1] < a[1] for a, b in zip(errs, errs[1:])]
    return {"eps": [e for e, _ in errs], "abs_ratio_error": [v for _, v in errs],
            "steps_decreasing": steps, "decreasing": bool(errs) and all(steps),
            "final_abs_error": errs[-1][1] if errs else None}


def run_verify(cfg: RunConfig) -> dict:
    lc = _landscape(cfg)
    if len(lc.box) != 2:
        raise ConfigError("verify needs a two-dimensional landscape")
    t0 = time.perf_counter()
    p = lc.potential()
    report = _header(cfg, "verify", {"landscape": lc.to_dict()})
    net, network_error = None, None
    try:
        _, net = _analyze(lc)
    except InadmissibleError as exc:
        network_error = str(exc)
    if net is not None:
        centers = (net.vertex_minima[net.u], net.vertex_minima[net.w])
        level, delta = net.level, net.delta
        report["landscape"] = dict(lc.to_dict(), inventory=net.inventory())
    else:
        centers, delta = (lc.a, lc.b), None
        level = float(max(p(np.asarray(lc.a)), p(np.asarray(lc.b))))
        report["landscape"] = dict(lc.to_dict(), network_error=network_error)
    rows = []
    for eps in lc.eps:
        row = _empty_row(eps)
        edges = None
        if net is not None:
            vals, edges = _network_row(net, eps)
            row.update({k: _num(v) for k, v in vals.items()})
        try:
            ovals, currents = _oracle(p, lc, eps, centers, level, delta, net, cfg.snapshot)
            row.update({k: _num(v) for k, v in ovals.items()})
            if edges is not None:
                for e, c in zip(edges, currents):
                    e["oracle_current"] = _num(c)
            if net is not None:
                lr = vals["network_log_capacity"] - ovals["oracle_log_capacity"]
                row["log_ratio"], row["ratio"] = _num(lr), _num(math.exp(lr))
                row["status"] = "ok"
            else:
                row["status"] = "oracle-only"
        except (OracleError, CapnetError) as exc:
            row["status"] = f"oracle-failed: {exc}"
        if edges is not None:
            row["edge_detail"] = edges
        rows.append(row)
    report["rows"] = rows
    report["monotonicity"] = monotonicity(rows)
    if cfg.timing:
        report["timing"] = {"seconds": time.perf_counter() - t0}
    return report


def run_report(cfg: RunConfig) -> dict:
    """Re-emit a saved JSON report (format conversion only)."""
    try:
        data = json.loads(Path(cfg.input).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict) or "schema_version" not in data or "rows" not in data:
        raise ConfigError("not a capnet report")
    if data["schema_version"].split(".")[0] != SCHEMA_VERSION.split(".")[0]:
        raise ConfigError(f"unsupported report schema {data['schema_version']}")
    return data


RUNNERS = {"network": run_network, "capacity": run_capacity, "verify": run_verify, "report": run_report}


def run(cfg: RunConfig) -> dict:
    return RUNNERS[cfg.mode](cfg)


def to_json(report: dict) -> str:
    return json.dumps(report, indent=2, allow_nan=False) + "\n"


def to_csv(report: dict) -> str:
    columns = NETWORK_COLUMNS if report["mode"] == "network" else SWEEP_COLUMNS
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in report["rows"]:
        writer.writerow(["" if row.get(c) is None else (repr(row[c]) if isinstance(row[c], float) else row[c])
                         for c in columns])
    return buf.getvalue()


def render(report: dict, fmt: str) -> str:
    return to_json(report) if fmt == "json" else to_csv(report)
