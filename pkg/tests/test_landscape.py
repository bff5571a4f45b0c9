import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from capnet.exceptions import InadmissibleError
from capnet.admittance import EvenPower, Quadratic
from capnet.landscape import (Bridge, Grid, Potential, SaddleOverride, analyze_landscape, boxes_intersect,
                              bridge_box, bridges_disjoint, catalog_entry, classify, communication_height,
                              estimate_delta1, find_critical_points, make_critical_point)

DW = catalog_entry("double-well")

EXPECTED = {
    "double-well": (2, 1),
    "asymmetric-double-well": (2, 1),
    "parallel-3": (2, 3),
    "series-2": (3, 2),
    "triangle": (3, 3),
    "block-pruning": (4, 3),
}


def rotation(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


@pytest.fixture(scope="module")
def networks():
    out = {}
    for name in EXPECTED:
        e = catalog_entry(name)
        out[name] = analyze_landscape(e.potential(), e.a, e.b)
    return out


class TestPotential:
    def test_expression_values(self):
        p = DW.potential()
        assert p(np.array([1.0, 0.0])) == 0.0
        assert p(np.array([0.0, 0.0])) == 1.0

    def test_vectorized_shape(self):
        p = DW.potential()
        assert p(np.zeros((4, 5, 2))).shape == (4, 5)
        assert p.gradient(np.zeros((3, 2))).shape == (3, 2)
        assert p.hessian(np.zeros((3, 2))).shape == (3, 2, 2)

    def test_hessian_at_saddle(self):
        H = DW.potential().hessian(np.zeros(2))
        np.testing.assert_allclose(H, [[-4, 0], [0, 2]], atol=1e-12)

    def test_finite_difference_fallback(self):
        p = Potential(lambda x: x[..., 0] ** 2 + 3 * x[..., 1] ** 2, [[-1, 1], [-1, 1]])
        np.testing.assert_allclose(p.gradient(np.array([0.5, 0.5])), [1.0, 3.0], rtol=1e-6)
        np.testing.assert_allclose(p.hessian(np.array([0.2, 0.1])), [[2, 0], [0, 6]], atol=1e-3)

    def test_dimension_limits(self):
        with pytest.raises(ValueError):
            Potential.from_expression("x^2", [[-1, 1]])

    def test_shifted(self):
        p = DW.potential().shifted(2.5)
        assert p(np.zeros(2)) == 3.5

    def test_rotated_values(self):
        p = DW.potential()
        R = rotation(0.4)
        q = p.rotated(R, center=[0, 0])
        x = np.array([0.3, -0.2])
        assert q(R @ x) == pytest.approx(p(x), abs=1e-12)
        np.testing.assert_allclose(q.gradient(R @ x), R @ p.gradient(x), atol=1e-12)


class TestCritical:
    def test_classify(self):
        assert classify(np.array([1.0, 2.0])) == "minimum"
        assert classify(np.array([-1.0, 2.0])) == "saddle"
        assert classify(np.array([-1.0, -2.0])) == "maximum"
        assert classify(np.array([0.0, 2.0])) == "degenerate"
        assert classify(np.array([-1.0, -1.0, 2.0])) == "index-2"

    def test_double_well(self):
        cps = find_critical_points(DW.potential())
        kinds = sorted(c.kind for c in cps)
        assert kinds == ["minimum", "minimum", "saddle"]
        saddle = next(c for c in cps if c.is_saddle)
        np.testing.assert_allclose(saddle.location, [0, 0], atol=1e-10)
        assert saddle.height == pytest.approx(1.0)
        np.testing.assert_allclose(saddle.hessian_eigs, [-4, 2], atol=1e-9)

    def test_bowl(self):
        cps = find_critical_points(Potential.from_expression("x^2 + y^2", [[-1, 1], [-1, 1]]))
        assert len(cps) == 1 and cps[0].kind == "minimum"

    def test_triangle_counts(self):
        cps = find_critical_points(catalog_entry("triangle").potential())
        kinds = [c.kind for c in cps]
        assert kinds.count("minimum") == 3 and kinds.count("saddle") == 3

    def test_degenerate_minimum(self):
        cps = find_critical_points(Potential.from_expression("x^4 + y^2", [[-1, 1], [-1, 1]]))
        assert len(cps) == 1 and cps[0].kind == "degenerate"
        assert abs(cps[0].location[0]) < 1e-3

    def test_make_critical_point(self):
        c = make_critical_point(DW.potential(), [1.0, 0.0])
        assert c.kind == "minimum" and c.index == 0
        d = c.to_dict()
        assert d["kind"] == "minimum" and d["height"] == 0.0


class TestCommunicationHeight:
    def test_double_well(self):
        ch = communication_height(DW.potential(), DW.a, DW.b, grid_n=256)
        assert abs(ch.value - 1.0) <= 2 * ch.cell_tolerance
        assert ch.lo <= 1.0 + 2 * ch.cell_tolerance

    def test_same_point(self):
        ch = communication_height(DW.potential(), DW.a, DW.a, grid_n=64)
        assert ch.value == pytest.approx(DW.potential()(np.array(DW.a)))

    def test_bowl_is_max_endpoint(self):
        p = Potential.from_expression("x^2 + y^2", [[-1, 1], [-1, 1]])
        ch = communication_height(p, (0, 0), (0.5, 0), grid_n=128)
        assert ch.value == pytest.approx(0.25, abs=2 * ch.cell_tolerance)

    def test_symmetric(self):
        p = catalog_entry("triangle").potential()
        e = catalog_entry("triangle")
        h1 = communication_height(p, e.a, e.b, grid_n=128).value
        h2 = communication_height(p, e.b, e.a, grid_n=128).value
        assert h1 == h2

    def test_small_grid_rejected(self):
        with pytest.raises(ValueError):
            communication_height(DW.potential(), DW.a, DW.b, grid_n=16)

    def test_grid_cells(self):
        g = Grid.square(np.array([[0.0, 1.0], [0.0, 2.0]]), 10)
        assert g.points().shape[-1] == 2
        assert g.cell_of([0.05, 0.05]) == (0, 0)


class TestIslands:
    @pytest.mark.parametrize("name", sorted(EXPECTED))
    def test_counts(self, networks, name):
        net = networks[name]
        assert (net.graph.vertex_count, net.graph.edge_count) == EXPECTED[name]
        assert net.u != net.w

    def test_double_well_level(self, networks):
        net = networks["double-well"]
        assert net.level == pytest.approx(1.0, abs=1e-12)
        assert net.delta == pytest.approx(0.1)

    def test_default_delta_respects_gap(self, networks):
        for net in networks.values():
            dec = net.decomposition
            assert 0 < net.delta
            assert dec.delta1 is None or net.delta < dec.delta1

    def test_block_pruning_removes_side_well(self, networks):
        from capnet.network import prune_irrelevant_blocks
        net = networks["block-pruning"]
        y = net.admittance(0.1)
        pr = prune_irrelevant_blocks(net.graph, y, net.u, net.w)
        assert pr.removed_blocks >= 1

    def test_shift_invariance(self, networks):
        e = DW
        net = networks["double-well"]
        shifted = analyze_landscape(e.potential().shifted(3.0), e.a, e.b)
        assert shifted.level == pytest.approx(net.level + 3.0, abs=1e-12)
        np.testing.assert_allclose(shifted.admittance(0.1).log_values, net.admittance(0.1).log_values,
                                   rtol=1e-12)

    @settings(max_examples=5, deadline=None)
    @given(st.floats(0.05, 3.0))
    def test_rotation_invariance(self, theta):
        e = DW
        R = rotation(theta)
        base = analyze_landscape(e.potential(), e.a, e.b)
        rot = analyze_landscape(e.potential().rotated(R, center=[0, 0]), R @ np.array(e.a), R @ np.array(e.b))
        assert rot.level == pytest.approx(base.level, abs=1e-12)
        np.testing.assert_allclose(rot.admittance(0.1).log_values, base.admittance(0.1).log_values,
                                   rtol=1e-12, atol=1e-12)

    def test_degenerate_saddle_needs_override(self):
        p = Potential.from_expression("(x^2 - 1)^2 + y^4", [[-2, 2], [-1.5, 1.5]])
        with pytest.raises(InadmissibleError):
            analyze_landscape(p, (-1, 0), (1, 0))

    def test_degenerate_saddle_with_override(self):
        p = Potential.from_expression("(x^2 - 1)^2 + y^4", [[-2, 2], [-1.5, 1.5]])
        ov = SaddleOverride(np.zeros(2), Quadratic(4.0), EvenPower(4.0, 4))
        net = analyze_landscape(p, (-1, 0), (1, 0), overrides=[ov])
        assert net.graph.edge_count == 1
        y = net.admittance(0.1)
        assert np.isfinite(y.log_values[0])

    def test_inventory(self, networks):
        inv = networks["triangle"].inventory()
        assert inv["vertices"] == 3 and len(inv["saddles"]) == 3


class TestBridges:
    def test_box_halfwidths(self):
        s = make_critical_point(DW.potential(), [0.0, 0.0])
        b = bridge_box(s, 0.1)
        np.testing.assert_allclose(sorted(b.halfwidths), sorted([math.sqrt(0.2 / 4), math.sqrt(0.2 / 2)]))
        assert b.contains(np.zeros((1, 2)))[0]

    def test_separating_axis(self):
        I = np.eye(2)
        a = Bridge(np.zeros(2), I, np.array([1.0, 1.0]))
        b = Bridge(np.array([1.4, 0.0]), rotation(0.3), np.array([0.5, 0.5]))
        c = Bridge(np.array([3.0, 0.0]), rotation(math.pi / 4), np.array([0.5, 0.5]))
        assert boxes_intersect(a, b)
        assert not boxes_intersect(a, c)

    def test_delta1(self):
        cps = [c for c in find_critical_points(catalog_entry("parallel-3").potential()) if c.is_saddle]
        d1 = estimate_delta1(cps, upper=10.0)
        assert d1 > 0
        assert bridges_disjoint(cps, 3 * 0.99 * d1)
        assert not bridges_disjoint(cps, 3 * 1.01 * d1)
