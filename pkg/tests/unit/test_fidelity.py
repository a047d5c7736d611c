"""
Unit tests for the least-squares and Kullback-Leibler data terms and the
concavity-condition calibrations.
"""
import math

import numpy as np
import pytest

from pybrex.exceptions import DomainError
from pybrex.relaxation.fidelity import (
    DEFAULT_SAFETY, KullbackLeiblerFidelity, LeastSquaresFidelity, cc_calibrate_kl, cc_calibrate_quadratic,
    fidelity_from_kind,
)


def finite_difference_gradient(f, w, h=1e-6):
    g = np.zeros_like(w)
    for j in range(w.size):
        e = np.zeros_like(w)
        e[j] = h
        g[j] = (f.value(w + e) - f.value(w - e)) / (2 * h)
    return g


@pytest.mark.unit
class TestLeastSquaresFidelity:

    def test_perfect_fit(self):
        f = LeastSquaresFidelity([1.0, -2.0])
        assert f.value([1.0, -2.0]) == 0.0
        np.testing.assert_array_equal(f.gradient([1.0, -2.0]), [0.0, 0.0])

    def test_value_and_gradient(self):
        f = LeastSquaresFidelity([1.0, 0.0])
        assert f.value([0.0, 2.0]) == pytest.approx(2.5)
        np.testing.assert_allclose(f.gradient([0.0, 2.0]), [-1.0, 2.0])

    def test_value_columns(self):
        f = LeastSquaresFidelity([1.0, 0.0])
        W = np.array([[1.0, 0.0], [0.0, 2.0]])
        np.testing.assert_allclose(f.value_columns(W), [0.0, 2.5])

    def test_lipschitz(self):
        info = LeastSquaresFidelity([1.0]).lipschitz_info(np.eye(1))
        assert info.L == 1.0 and info.L_tilde == 1.0

    def test_shape_checked(self):
        with pytest.raises(DomainError):
            LeastSquaresFidelity([1.0, 2.0]).value([1.0])


@pytest.mark.unit
class TestKullbackLeiblerFidelity:

    def test_minimum_at_data(self):
        f = KullbackLeiblerFidelity([2.0], [1.0])
        assert f.value([1.0]) == pytest.approx(0.0, abs=1e-15)
        assert f.gradient([1.0])[0] == pytest.approx(0.0, abs=1e-15)

    def test_zero_count_convention(self):
        """0 log 0 = 0: with y = 0 the term is w + b."""
        f = KullbackLeiblerFidelity([0.0], [1.0])
        assert f.value([3.0]) == pytest.approx(4.0)
        assert f.gradient([3.0])[0] == pytest.approx(1.0)

    def test_domain(self):
        f = KullbackLeiblerFidelity([1.0], [1.0])
        assert not f.in_domain([-1.0])
        with pytest.raises(DomainError):
            f.value([-1.0])
        with pytest.raises(DomainError):
            f.value_columns(np.array([[-2.0]]))
        with pytest.raises(DomainError):
            KullbackLeiblerFidelity([-1.0], [1.0])
        with pytest.raises(DomainError):
            KullbackLeiblerFidelity([1.0], [0.0])

    def test_value_columns_match_value(self):
        f = KullbackLeiblerFidelity([3.0, 0.0, 1.0], [1.0, 0.5, 2.0])
        W = np.array([[0.0, 1.0], [2.0, 0.0], [0.5, 4.0]])
        np.testing.assert_allclose(f.value_columns(W), [f.value(W[:, 0]), f.value(W[:, 1])], rtol=1e-14)

    def test_lipschitz_constants(self):
        info = KullbackLeiblerFidelity([4.0, 1.0], [2.0, 1.0]).lipschitz_info(np.eye(2))
        assert info.L == pytest.approx(1.0)
        assert info.L_tilde == pytest.approx(1.0 / (2 * 0.99 / math.sqrt(2) - (0.99 / math.sqrt(2)) ** 2), rel=1e-12)
        assert info.L_tilde >= info.L
        single = KullbackLeiblerFidelity([4.0], [1.0]).lipschitz_info(np.eye(1))
        assert single.L == pytest.approx(4.0)
        assert single.L_tilde == pytest.approx(4.0)

    def test_lipschitz_needs_nonnegative_matrix(self):
        with pytest.raises(DomainError):
            KullbackLeiblerFidelity([1.0], [1.0]).lipschitz_info(np.array([[-1.0]]))

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(3)
        f = KullbackLeiblerFidelity(rng.poisson(5.0, 6).astype(float), rng.uniform(0.5, 2.0, 6))
        w = rng.uniform(0.5, 5.0, 6)
        g = f.gradient(w)
        fd = finite_difference_gradient(f, w)
        assert np.all(np.abs(g - fd) <= 1e-6 * np.maximum(1.0, np.abs(g)))

    def test_symmetric_divergence_nonnegative(self):
        A = np.array([[1.0, 0.5], [0.2, 1.0]])
        f = KullbackLeiblerFidelity([3.0, 2.0], [1.0, 1.0])
        assert f.symmetric_divergence(A, [0.0, 4.0], [2.0, 0.5]) > 0.0
        assert f.symmetric_divergence(A, [1.0, 1.0], [1.0, 1.0]) == 0.0

    def test_fidelity_from_kind(self):
        assert isinstance(fidelity_from_kind("ls", [1.0]), LeastSquaresFidelity)
        assert isinstance(fidelity_from_kind("kl", [1.0], [1.0]), KullbackLeiblerFidelity)
        with pytest.raises(DomainError):
            fidelity_from_kind("kl", [1.0])
        with pytest.raises(ValueError, match="Unknown fidelity kind"):
            fidelity_from_kind("huber", [1.0])


@pytest.mark.unit
class TestCalibration:

    def test_quadratic_small_columns(self):
        f = LeastSquaresFidelity([0.0, 0.0])
        assert cc_calibrate_quadratic(f, 0.5 * np.eye(2)) == 1.0

    def test_quadratic_scales_with_column_norms(self):
        f = LeastSquaresFidelity([0.0, 0.0])
        assert cc_calibrate_quadratic(f, 2.0 * np.eye(2), safety=1.01) == pytest.approx(4.04)

    def test_quadratic_unit_columns_keep_headroom(self):
        f = LeastSquaresFidelity([0.0, 0.0])
        gamma = cc_calibrate_quadratic(f, np.eye(2))
        assert gamma == DEFAULT_SAFETY
        assert gamma > 1.0

    def test_quadratic_rejects_bad_input(self):
        f = LeastSquaresFidelity([0.0, 0.0])
        with pytest.raises(DomainError):
            cc_calibrate_quadratic(f, np.array([[1.0, 0.0], [0.0, 0.0]]))
        with pytest.raises(DomainError):
            cc_calibrate_quadratic(KullbackLeiblerFidelity([1.0, 1.0], [1.0, 1.0]), np.eye(2))
        with pytest.raises(DomainError):
            cc_calibrate_quadratic(f, np.eye(2), safety=0.5)

    @pytest.mark.parametrize("safety", [1.0, 0.999])
    def test_safety_must_exceed_one(self, safety):
        with pytest.raises(DomainError, match="must be > 1"):
            cc_calibrate_quadratic(LeastSquaresFidelity([0.0, 0.0]), np.eye(2), safety=safety)
        with pytest.raises(DomainError, match="must be > 1"):
            cc_calibrate_kl(KullbackLeiblerFidelity([1.0, 1.0], [1.0, 1.0]), np.eye(2), safety=safety)

    def test_kl_calibration(self):
        A = np.array([[1.0, 2.0], [3.0, 4.0]])
        f = KullbackLeiblerFidelity([1.0, 1.0], [1.0, 2.0])
        xi, c, gamma = cc_calibrate_kl(f, A, safety=1.5)
        assert xi == 1.0
        np.testing.assert_allclose(c, [1.0, 2.0])
        np.testing.assert_allclose(gamma, [15.0, 7.5])

    def test_kl_calibration_zero_counts_hit_floor(self):
        f = KullbackLeiblerFidelity([0.0, 0.0], [1.0, 1.0])
        _, _, gamma = cc_calibrate_kl(f, np.eye(2))
        np.testing.assert_allclose(gamma, 1e-6, rtol=1e-6)

    def test_kl_xi_override(self):
        f = KullbackLeiblerFidelity([1.0, 1.0], [1.0, 2.0])
        xi, _, _ = cc_calibrate_kl(f, np.eye(2), xi=0.5)
        assert xi == 0.5
        with pytest.raises(DomainError):
            cc_calibrate_kl(f, np.eye(2), xi=1.5)

    def test_kl_needs_nonnegative_matrix(self):
        f = KullbackLeiblerFidelity([1.0, 1.0], [1.0, 1.0])
        with pytest.raises(DomainError):
            cc_calibrate_kl(f, -np.eye(2))
        with pytest.raises(DomainError):
            cc_calibrate_kl(LeastSquaresFidelity([1.0, 1.0]), np.eye(2))
