import math

import numpy as np
import pytest

from capnet.exceptions import OracleError
from capnet.landscape import Grid, Potential, analyze_landscape, catalog_entry
from capnet.oracle import (GridProblem, bridge_cut, discrete_thompson, edge_current, read_snapshot, richardson,
                           solve_capacity, write_snapshot)

DW = catalog_entry("double-well")


def strip_problem(n=200, m=50, length=4.0, width=1.0, eps=0.1):
    g = Grid(np.array([[0.0, length], [0.0, width]]), (n, m))
    A = np.zeros(g.shape, bool)
    B = A.copy()
    A[0], B[-1] = True, True
    return GridProblem(g, np.zeros(g.shape), A, B, eps)


@pytest.fixture(scope="module")
def dw_solved():
    gp = GridProblem.from_potential(DW.potential(), 0.1, DW.a, DW.b, 200, 1.0, 0.1)
    return gp, solve_capacity(gp)


class TestStrip:
    def test_resistor(self):
        gp = strip_problem()
        res = solve_capacity(gp)
        dx = gp.grid.spacing[0]
        # masks are end columns, so the effective length is between their centres
        assert res.capacity == pytest.approx(0.1 * 1.0 / (4.0 - dx), rel=1e-9)

    def test_linear_profile(self):
        res = solve_capacity(strip_problem())
        np.testing.assert_allclose(res.h[:, 7], np.linspace(1, 0, 200), atol=1e-9)

    def test_dual(self):
        gp = strip_problem()
        res = solve_capacity(gp)
        th = discrete_thompson(gp, res)
        assert th.value == pytest.approx((4.0 - gp.grid.spacing[0]) / 0.1, rel=1e-8)

    def test_cg_matches_direct(self):
        gp = strip_problem(60, 20)
        a = solve_capacity(gp)
        b = solve_capacity(gp, solver="cg")
        assert b.capacity == pytest.approx(a.capacity, rel=1e-8)
        assert b.solver == "cg" and b.iterations > 0


class TestValidation:
    def test_overlap_rejected(self):
        g = Grid(np.array([[0.0, 1.0], [0.0, 1.0]]), (10, 10))
        A = np.zeros(g.shape, bool)
        A[0] = True
        with pytest.raises(OracleError):
            GridProblem(g, np.zeros(g.shape), A, A.copy(), 0.1)

    def test_empty_rejected(self):
        g = Grid(np.array([[0.0, 1.0], [0.0, 1.0]]), (10, 10))
        A = np.zeros(g.shape, bool)
        B = A.copy()
        B[-1] = True
        with pytest.raises(OracleError):
            GridProblem(g, np.zeros(g.shape), A, B, 0.1)

    def test_nonfinite_weights(self):
        g = Grid(np.array([[0.0, 1.0], [0.0, 1.0]]), (10, 10))
        A = np.zeros(g.shape, bool)
        B = A.copy()
        A[0], B[-1] = True, True
        lw = np.zeros(g.shape)
        lw[5, 5] = np.inf
        with pytest.raises(OracleError):
            GridProblem(g, lw, A, B, 0.1)

    def test_margin_check(self):
        p = Potential.from_expression(DW.expression, [[-1.3, 1.3], [-0.3, 0.3]])
        with pytest.raises(OracleError):
            GridProblem.from_potential(p, 0.1, DW.a, DW.b, 100, 1.0, 0.3)

    def test_ball_refinement(self):
        gp = GridProblem.from_potential(DW.potential(), 0.01, DW.a, DW.b, 64, 1.0)
        assert gp.grid.shape[0] >= 1200

    def test_three_dimensional_rejected(self):
        g = Grid(np.array([[0.0, 1.0]] * 3), (4, 4, 4))
        z = np.zeros(g.shape, bool)
        with pytest.raises(OracleError):
            GridProblem(g, np.zeros(g.shape), z, z, 0.1)


class TestInvariants:
    def test_maximum_principle(self, dw_solved):
        gp, res = dw_solved
        assert res.h.min() == 0.0 and res.h.max() == 1.0
        assert np.all(res.h[gp.A] == 1.0) and np.all(res.h[gp.B] == 0.0)

    def test_flux_balance(self, dw_solved):
        _, res = dw_solved
        assert abs(res.flux_in - res.flux_out) <= 1e-6 * res.flux_in

    def test_energy_equals_flux(self, dw_solved):
        gp, res = dw_solved
        assert res.energy == pytest.approx(res.flux_in, rel=1e-6)

    def test_thompson(self, dw_solved):
        gp, res = dw_solved
        th = discrete_thompson(gp, res)
        assert th.value_scaled * res.capacity_scaled == pytest.approx(1.0, abs=1e-4)
        assert th.divergence < 1e-8

    def test_log_space(self, dw_solved):
        gp, res = dw_solved
        assert res.log_capacity == pytest.approx(math.log(res.capacity_scaled) + gp.log_offset)

    def test_localization(self):
        p = DW.potential()
        big = Potential.from_expression(DW.expression, [[-3, 3], [-2.25, 2.25]])
        small = solve_capacity(GridProblem.from_potential(p, 0.05, DW.a, DW.b, 200, 1.0, 0.1))
        large = solve_capacity(GridProblem.from_potential(big, 0.05, DW.a, DW.b, 300, 1.0, 0.1))
        factor = small.capacity_scaled / large.capacity_scaled
        assert 0.99 <= factor <= 1.0 + 1e-9

    def test_grid_convergence(self):
        p = DW.potential()
        vals = [solve_capacity(GridProblem.from_potential(p, 0.1, DW.a, DW.b, n, 1.0)).capacity_scaled
                for n in (100, 200, 400)]
        assert abs(vals[0] - vals[1]) <= 4 * abs(vals[1] - vals[2])
        limit, order = richardson(vals)
        assert order > 0.5
        assert abs(limit - vals[2]) < abs(vals[2] - vals[1])

    def test_rough_bound_shape(self):
        p = DW.potential()
        logs = []
        for eps in (0.2, 0.1, 0.05):
            res = solve_capacity(GridProblem.from_potential(p, eps, DW.a, DW.b, 200, 1.0))
            logs.append(math.log(res.capacity_scaled) / math.log(1 / eps))
        assert max(abs(v) for v in logs) < 3.0


class TestCurrents:
    def test_single_saddle(self, dw_solved):
        gp, res = dw_solved
        cut = bridge_cut(DW.potential(), [0, 0], [0, 1], 1.0 + 12 * 0.1, grid=gp.grid)
        j = edge_current(gp, res, cut, [1, 0])
        assert j == pytest.approx(-1.0, abs=1e-3)

    def test_symmetric_parallel_pair(self):
        e = catalog_entry("parallel-3")
        p = e.potential()
        net = analyze_landscape(p, e.a, e.b)
        gp = GridProblem.from_potential(p, 0.1, net.vertex_minima[net.u], net.vertex_minima[net.w], 200,
                                        net.level, net.delta)
        res = solve_capacity(gp)
        js = []
        for d in net.descriptors:
            cut = bridge_cut(p, d.translation, d.rotation[:, 1], net.level + 1.2, grid=gp.grid)
            js.append(abs(edge_current(gp, res, cut, d.rotation[:, 0])))
        js = sorted(js)
        assert js[0] == pytest.approx(js[1], rel=1e-6)
        assert sum(js) == pytest.approx(1.0, abs=2e-3)

    def test_cut_must_cross(self, dw_solved):
        gp, res = dw_solved
        with pytest.raises(OracleError):
            edge_current(gp, res, ([5.0, 5.0], [5.0, 6.0]), [1, 0])


class TestSnapshot:
    def test_round_trip(self, tmp_path):
        h = np.random.default_rng(3).random((7, 5))
        box = np.array([[0.0, 1.0], [-2.0, 2.0]])
        path = tmp_path / "h.bin"
        write_snapshot(path, h, box)
        h2, box2 = read_snapshot(path)
        np.testing.assert_array_equal(h, h2)
        np.testing.assert_array_equal(box, box2)
        assert path.read_bytes()[:8] == b"CAPNETH1"

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "x.bin"
        path.write_bytes(b"NOTVALID" + bytes(16))
        with pytest.raises(OracleError):
            read_snapshot(path)


def test_richardson_exact_second_order():
    vals = [1 + 0.8, 1 + 0.2, 1 + 0.05]
    limit, order = richardson(vals)
    assert limit == pytest.approx(1.0) and order == pytest.approx(2.0)


def test_asymmetric_wells_symmetric_capacity():
    e = catalog_entry("asymmetric-double-well")
    p = e.potential()
    fwd = solve_capacity(GridProblem.from_potential(p, 0.1, e.a, e.b, 150, 1.0))
    rev = solve_capacity(GridProblem.from_potential(p, 0.1, e.b, e.a, 150, 1.0))
    assert fwd.capacity_scaled == pytest.approx(rev.capacity_scaled, rel=1e-9)
