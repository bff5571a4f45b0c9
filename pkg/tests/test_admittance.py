import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from capnet.admittance import (EvenPower, FunctionProfile, Quadratic, SaddleDescriptor, Separable,
                               Tabulated, admittance, geodesic_distance, log_laplace_integral,
                               minimal_cut, profile_from_dict, quadratic_admittance, quadrature_1d,
                               quadrature_2d, validate_profile)
from capnet.exceptions import ProfileError


def saddle(l1, l2, height=0.0, **kw):
    return SaddleDescriptor(height, Quadratic(l1), Quadratic(l2), **kw)


class TestClosedForms:
    def test_geodesic_gaussian(self):
        d = geodesic_distance(saddle(2.0, 1.0), 0.1)
        assert math.isclose(d.value, math.sqrt(0.1 * math.pi), rel_tol=1e-14)
        assert math.isclose(d.value, 0.56050, rel_tol=1e-5)

    def test_geodesic_height_factor(self):
        d0 = geodesic_distance(saddle(2.0, 1.0), 0.1)
        d1 = geodesic_distance(saddle(2.0, 1.0, height=1.0), 0.1)
        assert math.isclose(d1.log - d0.log, 10.0, rel_tol=1e-14)

    def test_minimal_cut(self):
        v = minimal_cut(saddle(2.0, 1.0), 0.1)
        assert math.isclose(v.value, math.sqrt(2 * math.pi * 0.1), rel_tol=1e-14)
        assert math.isclose(v.value, 0.79267, rel_tol=1e-5)
        v1 = minimal_cut(saddle(2.0, 1.0, height=1.0), 0.1)
        assert math.isclose(v0 := v.log - v1.log, 10.0, rel_tol=1e-14)

    def test_separable_cut_is_product(self):
        s = SaddleDescriptor(0.0, Quadratic(1.0), Separable((Quadratic(2.0), Quadratic(5.0))))
        eps = 0.07
        expect = math.sqrt(2 * math.pi * eps / 2.0) * math.sqrt(2 * math.pi * eps / 5.0)
        assert math.isclose(minimal_cut(s, eps).value, expect, rel_tol=1e-14)

    @pytest.mark.parametrize("l1,l2,expect", [(1.0, 1.0, 1.0), (4.0, 1.0, 2.0)])
    def test_admittance_examples(self, l1, l2, expect):
        for eps in (0.01, 0.1, 0.5):
            assert math.isclose(admittance(saddle(l1, l2), eps).value, expect * eps, rel_tol=1e-14)

    def test_height_scales_by_arrhenius(self):
        eps, h = 0.1, 0.7
        y0, y1 = admittance(saddle(1.0, 1.0), eps), admittance(saddle(1.0, 1.0, height=h), eps)
        assert math.isclose(y0.log - y1.log, h / eps, rel_tol=1e-14)

    def test_huge_barrier_stays_finite_in_log(self):
        y = admittance(saddle(1.0, 1.0, height=100.0), 0.01)
        assert y.value == 0.0
        assert math.isclose(y.log, math.log(0.01) - 1e4, rel_tol=1e-14)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_general_dimension_formula(self, n):
        lam = [-2.5] + [0.5 + k for k in range(n - 1)]
        eps = 0.03
        stable = Separable(tuple(Quadratic(l) for l in lam[1:])) if n > 2 else Quadratic(lam[1])
        s = SaddleDescriptor(0.3, Quadratic(2.5), stable, delta=0.1)
        assert math.isclose(admittance(s, eps).log, quadratic_admittance(lam, 0.3, eps).log, rel_tol=1e-13)

    def test_even_power_closed_form(self):
        eps = 0.1
        # int exp(-s^4/(4 eps)) = (4 eps)^(1/4) Gamma(1/4) / 2
        expect = (4 * eps) ** 0.25 * math.gamma(0.25) / 2
        assert math.isclose(math.exp(EvenPower(1.0, 4).log_integral_closed(eps)), expect, rel_tol=1e-14)
        oracle = float(mpmath.quad(lambda s: mpmath.exp(-s ** 4 / (4 * eps)), [-mpmath.inf, 0, mpmath.inf]))
        assert math.isclose(expect, oracle, rel_tol=1e-12)


class TestQuadrature:
    @pytest.mark.parametrize("l1", [0.5, 1.0, 4.0])
    @pytest.mark.parametrize("l2", [0.5, 1.0, 2.0])
    @pytest.mark.parametrize("eps", [1e-3, 1e-2, 0.1])
    def test_gaussian_grid(self, l1, l2, eps):
        q = admittance(saddle(l1, l2, height=0.4), eps, method="quadrature")
        c = eps * math.sqrt(l1 / l2)
        assert math.isclose(q.mantissa, c, rel_tol=1e-8)
        assert q.log_scale == -0.4 / eps

    @pytest.mark.parametrize("eps", [1e-3, 0.01, 0.1, 0.5, 1.0])
    def test_quadratic_against_closed_form(self, eps):
        assert math.isclose(quadrature_1d(Quadratic(1.0), eps).value, math.sqrt(2 * math.pi * eps), rel_tol=1e-8)

    def test_abs_profile(self):
        f = FunctionProfile(lambda s: np.abs(s))
        assert math.isclose(quadrature_1d(f, 0.1).value, 0.2, rel_tol=1e-9)

    def test_zero_profile_rejected(self):
        with pytest.raises(ProfileError):
            quadrature_1d(FunctionProfile(lambda s: 0.0 * s), 0.1)

    def test_one_sided_growth_rejected(self):
        with pytest.raises(ProfileError):
            quadrature_1d(FunctionProfile(lambda s: np.maximum(s, 0.0)), 0.1)

    @pytest.mark.parametrize("p,lam", [(4.0, 1.0), (6.0, 3.0), (2.5, 0.7)])
    def test_even_power_quadrature(self, p, lam):
        f = EvenPower(lam, p)
        assert math.isclose(quadrature_1d(f, 0.1).log, f.log_integral_closed(0.1), abs_tol=1e-9)

    def test_asymmetric_against_mpmath(self):
        f = FunctionProfile(lambda s: np.where(s > 0, s * s, 0.25 * s ** 4 + 0.5 * s * s))
        eps = 0.05
        expect = float(mpmath.quad(lambda s: mpmath.exp(-s * s / eps), [0, mpmath.inf])
                       + mpmath.quad(lambda s: mpmath.exp(-(s ** 4 / 4 + s * s / 2) / eps), [-mpmath.inf, 0]))
        assert math.isclose(quadrature_1d(f, eps).value, expect, rel_tol=1e-9)

    def test_quadrature_2d_separable(self):
        f = Separable((Quadratic(1.0), Quadratic(3.0)))
        eps = 0.05
        assert math.isclose(quadrature_2d(f, eps, tol=1e-9).log, f.log_integral_closed(eps), abs_tol=1e-8)

    def test_quadrature_2d_rotated_quadratic(self):
        # G(s) = s^T A s / 2 with det A = 2: integral 2 pi eps / sqrt(det A)
        A = np.array([[1.5, 0.5], [0.5, 1.5]])
        f = FunctionProfile(lambda s: 0.5 * np.einsum("...i,ij,...j->...", s, A, s), 2)
        eps = 0.1
        expect = 2 * math.pi * eps / math.sqrt(np.linalg.det(A))
        assert math.isclose(quadrature_2d(f, eps, tol=1e-9).value, expect, rel_tol=1e-8)

    def test_level_truncation_within_tolerance(self):
        eps, delta = 0.02, 0.3
        full = quadrature_1d(Quadratic(2.0), eps)
        cut = quadrature_1d(Quadratic(2.0), eps, level=delta)
        tol_conv = math.exp(-delta / (2 * eps)) / eps
        ratio = cut.value / full.value
        assert 1 - 10 * tol_conv <= ratio <= 1.0
        assert math.isclose(ratio, math.erf(math.sqrt(delta / eps)), rel_tol=1e-9)

    def test_closed_method_requires_closed_form(self):
        with pytest.raises(ProfileError):
            log_laplace_integral(FunctionProfile(np.abs), 0.1, method="closed")

    def test_bad_method(self):
        with pytest.raises(ValueError):
            log_laplace_integral(Quadratic(1.0), 0.1, method="magic")


class TestProperties:
    @settings(max_examples=60, deadline=None)
    @given(st.floats(0.1, 10), st.floats(0.1, 10), st.floats(0.01, 1), st.floats(0.1, 10))
    def test_scaling_law(self, l1, l2, eps, c):
        y1 = admittance(saddle(l1, l2), eps)
        y2 = admittance(saddle(l1, l2), c * eps)
        assert math.isclose(y1.value / eps, y2.value / (c * eps), rel_tol=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(st.floats(0.1, 10), st.floats(0.1, 10), st.floats(0.01, 1), st.floats(0.0, 5), st.floats(1e-3, 5))
    def test_monotone_in_height(self, l1, l2, eps, h, dh):
        lo = admittance(saddle(l1, l2, height=h), eps)
        hi = admittance(saddle(l1, l2, height=h + dh), eps)
        assert hi.log < lo.log

    def test_orientation_independent(self):
        R = np.array([[0.0, 1.0], [1.0, 0.0]])
        a = admittance(saddle(2.0, 3.0), 0.1)
        b = admittance(saddle(2.0, 3.0, rotation=R), 0.1)
        c = admittance(saddle(2.0, 3.0, rotation=-np.eye(2)), 0.1)
        assert a == b == c


class TestValidation:
    def test_profile_kinds_reject_bad_parameters(self):
        for bad in (lambda: Quadratic(0.0), lambda: Quadratic(-1.0), lambda: EvenPower(1.0, 1.5),
                    lambda: EvenPower(-1.0, 4)):
            with pytest.raises(ProfileError):
                bad()

    def test_nonzero_at_origin(self):
        with pytest.raises(ProfileError):
            validate_profile(FunctionProfile(lambda s: s * s + 1.0))

    def test_nonconvex_rejected(self):
        with pytest.raises(ProfileError):
            validate_profile(FunctionProfile(lambda s: np.sqrt(np.abs(s))))

    def test_nonconvex_2d_rejected(self):
        with pytest.raises(ProfileError):
            validate_profile(FunctionProfile(lambda s: np.sqrt(np.abs(s[..., 0])) + s[..., 1] ** 2, 2))

    def test_tabulated_convex_ok_and_bad(self):
        t = np.linspace(-2, 2, 41)
        validate_profile(Tabulated((t,), 0.5 * t ** 2))
        with pytest.raises(ProfileError):
            validate_profile(Tabulated((t,), np.sqrt(np.abs(t))))

    @pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
    def test_tabulated_matches_quadratic(self):
        t = np.linspace(-3, 3, 6001)
        tab = Tabulated((t,), 0.5 * t ** 2)
        assert math.isclose(quadrature_1d(tab, 0.1, tol=1e-8).value, math.sqrt(2 * math.pi * 0.1), rel_tol=1e-5)

    def test_tabulated_2d(self):
        t = np.linspace(-2, 2, 201)
        X, Y = np.meshgrid(t, t, indexing="ij")
        tab = Tabulated((t, t), 0.5 * X ** 2 + Y ** 2)
        validate_profile(tab)
        expect = 2 * math.pi * 0.1 / math.sqrt(2.0)
        assert math.isclose(math.exp(log_laplace_integral(tab, 0.1, tol=1e-7)), expect, rel_tol=1e-3)

    def test_tabulated_shape_checks(self):
        with pytest.raises(ProfileError):
            Tabulated((np.linspace(0, 1, 5),), np.zeros(5))
        with pytest.raises(ProfileError):
            Tabulated((np.linspace(-1, 1, 5),), np.zeros(4))

    def test_frame_must_be_orthogonal(self):
        with pytest.raises(ProfileError):
            saddle(1.0, 1.0, rotation=np.array([[1.0, 1e-9], [0.0, 1.0]]))
        saddle(1.0, 1.0, rotation=np.array([[0.6, -0.8], [0.8, 0.6]]))

    def test_frame_dimension(self):
        with pytest.raises(ProfileError):
            saddle(1.0, 1.0, rotation=np.eye(3))

    def test_omega_budget(self):
        saddle(1.0, 1.0, delta=0.1, omega=lambda d: d * d / 100)
        with pytest.raises(ProfileError):
            saddle(1.0, 1.0, delta=0.1, omega=lambda d: d / 50)

    def test_unstable_must_be_1d(self):
        with pytest.raises(ProfileError):
            SaddleDescriptor(0.0, Separable((Quadratic(1.0), Quadratic(1.0))), Quadratic(1.0))

    def test_eps_positive(self):
        for fn in (admittance, geodesic_distance, minimal_cut):
            with pytest.raises(ValueError):
                fn(saddle(1.0, 1.0), 0.0)

    def test_serialization_roundtrip(self):
        a = 0.3
        R = np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])
        s = SaddleDescriptor(0.2, EvenPower(2.0, 4), Quadratic(3.0), R, np.array([0.1, -0.2]), 0.05)
        back = SaddleDescriptor.from_dict(s.to_dict())
        np.testing.assert_allclose(back.rotation, R, atol=1e-15)
        assert admittance(back, 0.1) == admittance(s, 0.1)
        assert profile_from_dict(Separable((Quadratic(1.0), EvenPower(1.0, 6))).to_dict()).dim == 2
