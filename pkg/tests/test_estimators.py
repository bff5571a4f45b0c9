import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from capnet.admittance import quadratic_admittance
from capnet.estimators import NetworkCapacity, OracleCapacity, check_eps, check_point
from capnet.landscape import catalog_entry

DW = catalog_entry("double-well")


def test_get_params_and_clone():
    est = NetworkCapacity(delta=0.05, grid_n=128)
    assert est.get_params() == {"delta": 0.05, "grid_n": 128, "method": "auto"}
    twin = clone(est)
    assert twin.get_params() == est.get_params() and twin is not est
    est.set_params(grid_n=64)
    assert est.grid_n == 64


def test_not_fitted():
    with pytest.raises(NotFittedError):
        NetworkCapacity().predict([0.1])


def test_double_well_prediction():
    est = NetworkCapacity().fit(DW.potential(), DW.a, DW.b)
    assert est.n_edges_ == 1 and est.level_ == pytest.approx(1.0)
    y = quadratic_admittance([-4.0, 2.0], 0.0, 0.1)
    log_pred = est.predict_log([0.1])[0]
    assert log_pred == pytest.approx(y.log - 1.0 / 0.1, rel=1e-10)
    assert est.transform([0.2, 0.1]).shape == (2, 1)


def test_oracle_agrees_roughly():
    net = NetworkCapacity().fit(DW.potential(), DW.a, DW.b)
    orc = OracleCapacity(grid_n=150).fit(DW.potential(), DW.a, DW.b, level=1.0)
    ratio = math.exp(net.predict_log([0.1])[0] - orc.predict_log([0.1])[0])
    assert 0.8 < ratio < 1.25
    assert 0.1 in orc.results_


@pytest.mark.parametrize("bad", [[-0.1], [0.0], [np.nan], [np.inf]])
def test_check_eps_rejects(bad):
    with pytest.raises(ValueError):
        check_eps(bad)


def test_check_eps_scalar():
    np.testing.assert_array_equal(check_eps(0.1), [0.1])


def test_check_point():
    np.testing.assert_array_equal(check_point([1, 2], 2), [1.0, 2.0])
    with pytest.raises(ValueError):
        check_point([1, 2, 3], 2)


def test_fit_rejects_non_potential():
    with pytest.raises(TypeError):
        NetworkCapacity().fit("x^2", (0, 0), (1, 0))
