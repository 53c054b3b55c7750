import numpy as np
import pytest
from hypothesis import given, strategies as st

from anisolab import (ConfigError, EllipticityError, coefficient_family,
                      make_grid, observed_ellipticity, scale_coefficients,
                      scaling_factors, verify_ellipticity)


class TestScalingFactors:
    def test_two_dim_pattern(self):
        s = scaling_factors(2, 1, 0.5)
        assert s[0, 0] == 0.25
        assert s[1, 1] == 1.0
        assert s[0, 1] == 0.5 and s[1, 0] == 0.5

    def test_three_dim_split_one(self):
        s = scaling_factors(3, 1, 0.1)
        expect = np.array([[0.01, 0.1, 0.1],
                           [0.1, 1.0, 1.0],
                           [0.1, 1.0, 1.0]])
        assert np.allclose(s, expect)

    def test_epsilon_one_is_identity_scaling(self):
        assert np.array_equal(scaling_factors(3, 2, 1.0), np.ones((3, 3)))

    def test_epsilon_out_of_range(self):
        for eps in (0.0, -0.5, 1.5):
            with pytest.raises(ConfigError):
                scaling_factors(2, 1, eps)


class TestScaledField:
    def test_offdiagonal_scaling(self, unit_square):
        g = unit_square(4)
        base = coefficient_family(
            "constant", g, matrix=[[2.0, 0.5], [0.5, 1.0]])
        sc = scale_coefficients(base, 0.1)
        assert np.allclose(sc.entries[0, 0], 0.02)
        assert np.allclose(sc.entries[0, 1], 0.05)
        assert np.allclose(sc.entries[1, 0], 0.05)
        assert np.allclose(sc.entries[1, 1], 1.0)

    def test_epsilon_one_unchanged(self, unit_square):
        g = unit_square(4)
        base = coefficient_family("variable", g)
        sc = scale_coefficients(base, 1.0)
        assert np.array_equal(sc.entries, base.entries)

    def test_scaled_identity_x1_block_eig(self, unit_square):
        g = unit_square(4)
        base = coefficient_family("identity", g)
        for eps in (0.5, 0.1, 0.01):
            sc = scale_coefficients(base, eps)
            lo, _ = observed_ellipticity(sc.entries)
            assert lo == pytest.approx(eps ** 2, rel=1e-12)

    def test_derivs_scale_with_entries(self, unit_square):
        g = unit_square(4)
        base = coefficient_family("variable", g)
        sc = scale_coefficients(base, 0.5)
        # d_i a^eps_ij carries the same factor as a^eps_ij itself
        assert np.allclose(sc.derivs[0, 1], 0.5 * base.derivs[0, 1])
        assert np.allclose(sc.derivs[1, 1], base.derivs[1, 1])
        assert np.allclose(sc.derivs[0, 0], 0.25 * base.derivs[0, 0])
        assert np.any(base.derivs[0, 1] != 0.0)


class TestEllipticity:
    def test_observed_matches_dense_eig(self, unit_square):
        g = unit_square(4)
        m = np.array([[1.0, 0.5], [0.5, 1.0]])
        f = coefficient_family("constant", g, matrix=m, lam=0.5)
        lo, node = observed_ellipticity(f.entries)
        assert lo == pytest.approx(np.linalg.eigvalsh(m)[0], abs=1e-14)
        verify_ellipticity(f)

    def test_overclaimed_constant_rejected(self, unit_square):
        g = unit_square(4)
        f = coefficient_family(
            "constant", g, matrix=[[1.0, 0.5], [0.5, 1.0]], lam=0.6)
        with pytest.raises(EllipticityError) as err:
            verify_ellipticity(f)
        assert "0.6" in str(err.value)

    def test_nonelliptic_matrix_rejected(self, unit_square):
        g = unit_square(4)
        with pytest.raises(ConfigError):
            coefficient_family("constant", g, matrix=[[1.0, 2.0], [2.0, 1.0]])

    def test_variable_family_certificate_holds(self, unit_square):
        g = unit_square(8)
        f = coefficient_family("variable", g)
        lo, _ = observed_ellipticity(f.entries)
        assert lo >= f.lam
        verify_ellipticity(f)

    @given(st.floats(0.01, 1.0), st.floats(-3, 3), st.floats(-3, 3),
           st.floats(-3, 3), st.floats(-3, 3))
    def test_scaled_quadratic_form_lower_bound(self, eps, z1, z2, w1, w2):
        g = make_grid([(0, 1), (0, 1)], (4, 4), q=1)
        base = coefficient_family("variable", g)
        sc = scale_coefficients(base, eps)
        zeta = np.array([z1, z2])
        a = sc.entries[:, :, w_idx(g, w1), w_idx(g, w2)]
        form = zeta @ a @ zeta
        bound = base.lam * (eps ** 2 * z1 ** 2 + z2 ** 2)
        assert form >= bound - 1e-12 * max(1.0, abs(form))


def w_idx(grid, t: float) -> int:
    # map a float in [-3, 3] onto a node index deterministically
    n = grid.cells[0]
    return int(round((t + 3.0) / 6.0 * n))


class TestVariableFamily:
    def test_entries_formula(self, unit_square):
        g = unit_square(4)
        f = coefficient_family("variable", g)
        x = g.meshgrid()
        assert np.allclose(f.entries[0, 0], 1.0 + 0.5 * x[1] ** 2)
        assert np.allclose(f.entries[1, 1], 1.0 + 0.5 * x[0] ** 2)
        g_cpl = 0.25 / 1.0  # one off-diagonal partner, coords bounded by 1
        assert np.allclose(f.entries[0, 1], g_cpl * x[0] * x[1])
        assert np.array_equal(f.entries[0, 1], f.entries[1, 0])

    def test_derivs_match_centered_differences(self, unit_square):
        g = unit_square(16)
        f = coefficient_family("variable", g)
        h = g.spacing
        # derivs[i, j] holds d a_ij / d x_i; entries are degree <= 2
        # polynomials per axis, so second order differences are exact
        for i in range(2):
            for j in range(2):
                num = np.gradient(f.entries[i, j], h[i], axis=i,
                                  edge_order=2)
                assert np.allclose(f.derivs[i, j], num, atol=1e-12)

    def test_unknown_family_rejected(self, unit_square):
        with pytest.raises(ConfigError):
            coefficient_family("perlin", unit_square(4))

    def test_identity_family(self, unit_square):
        g = unit_square(4)
        f = coefficient_family("identity", g)
        assert f.lam == 1.0
        assert np.allclose(f.entries[0, 0], 1.0)
        assert np.allclose(f.entries[0, 1], 0.0)
        assert all(np.count_nonzero(d) == 0 for d in f.derivs)
