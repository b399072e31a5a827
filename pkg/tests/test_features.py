import numpy as np
import pytest

from narxdd import (
    DesignMatrix,
    FeatureMap,
    LagSpec,
    RegressorSet,
    Signal,
    TimeSeries,
    apply_map,
    build_regressors,
    min_norm_ls,
    new_linear,
    new_rbf,
    new_rff,
)


def series(u, y):
    return TimeSeries(u=Signal(np.asarray(u, float)), y=Signal(np.asarray(y, float)))


class TestBuildRegressors:
    def test_hand_constructed_row(self):
        regs = build_regressors(series([1, 2, 3], [10, 20, 30]), LagSpec(2, 2))
        assert regs.X.shape == (1, 4)
        np.testing.assert_array_equal(regs.X[0], [2, 1, 20, 10])
        assert regs.targets[0] == 30
        assert regs.t_index == 2

    def test_single_lag(self):
        regs = build_regressors(series([5, 7], [11, 13]), LagSpec(1, 1))
        np.testing.assert_array_equal(regs.X, [[5, 11]])
        np.testing.assert_array_equal(regs.targets, [13])

    def test_too_short_series(self):
        with pytest.raises(ValueError, match="too short"):
            build_regressors(series([1, 2], [3, 4]), LagSpec(2, 2))

    def test_row_count_and_order(self):
        u = np.arange(10.0)
        y = np.arange(10.0) + 100
        regs = build_regressors(series(u, y), LagSpec(2, 2))
        assert regs.n_rows == 8
        # row i predicts y[i + 2] from strictly earlier samples
        for i in range(8):
            t = i + 2
            np.testing.assert_array_equal(
                regs.X[i], [u[t - 1], u[t - 2], y[t - 1], y[t - 2]]
            )
            assert regs.targets[i] == y[t]

    def test_shift_alignment(self):
        # dropping the first sample shifts rows and targets together
        u = np.random.default_rng(0).standard_normal(30)
        y = np.random.default_rng(1).standard_normal(30)
        full = build_regressors(series(u, y), LagSpec(2, 2))
        shifted = build_regressors(series(u[1:], y[1:]), LagSpec(2, 2))
        np.testing.assert_array_equal(full.X[1:], shifted.X)
        np.testing.assert_array_equal(full.targets[1:], shifted.targets)

    def test_asymmetric_lags(self):
        regs = build_regressors(series([1, 2, 3, 4], [5, 6, 7, 8]), LagSpec(1, 3))
        # horizon 3: single row for t=3 (0-based)
        np.testing.assert_array_equal(regs.X, [[3, 7, 6, 5]])
        np.testing.assert_array_equal(regs.targets, [8])


class TestRff:
    def test_feature_formula_at_zero(self):
        fmap = FeatureMap(
            kind="rff", m=2, input_dim=3,
            freqs=np.ones((2, 3)), offsets=np.zeros(2),
        )
        np.testing.assert_allclose(fmap.apply(np.zeros(3))[0], [1.0, 1.0])

    def test_frequency_variance(self):
        # entries drawn with variance 2*gamma
        fmap = new_rff(4, 10_000, gamma=0.6, seed=0)
        assert fmap.freqs.var() == pytest.approx(1.2, rel=0.1)

    def test_offsets_uniform_range(self):
        fmap = new_rff(3, 5000, gamma=1.0, seed=1)
        assert fmap.offsets.min() >= 0.0
        assert fmap.offsets.max() < 2 * np.pi
        assert fmap.offsets.mean() == pytest.approx(np.pi, rel=0.05)

    def test_kernel_convergence(self):
        # Monte Carlo feature products approximate the Gaussian kernel
        gamma = 0.6
        fmap = new_rff(4, 100_000, gamma, seed=3)
        rng = np.random.default_rng(4)
        x = rng.standard_normal(4) * 0.5
        for scale in (0.2, 0.7, 1.2):
            xp = x + scale * rng.standard_normal(4) / np.sqrt(4)
            empirical = float(fmap.apply(x)[0] @ fmap.apply(xp)[0])
            exact = np.exp(-gamma * np.sum((x - xp) ** 2))
            assert abs(empirical - exact) < 0.02

    def test_bounded_features(self):
        fmap = new_rff(4, 64, gamma=0.6, seed=5)
        rows = fmap.apply(np.random.default_rng(6).standard_normal((50, 4)))
        bound = np.sqrt(2.0 / 64)
        assert np.all(np.abs(rows) <= bound + 1e-15)
        assert np.all(np.linalg.norm(rows, axis=1) <= np.sqrt(2.0) + 1e-12)

    def test_frozen_and_reconstructible(self):
        a = new_rff(4, 32, 0.6, seed=9)
        b = new_rff(4, 32, 0.6, seed=9)
        x = np.random.default_rng(0).standard_normal((5, 4))
        assert np.array_equal(a.apply(x), b.apply(x))
        assert np.array_equal(a.apply(x), a.apply(x))


class TestRbf:
    def test_unit_at_center(self):
        fmap = new_rbf(4, 8, gamma=0.25, eta=5.0, seed=2)
        for i in (0, 3, 7):
            assert fmap.apply(fmap.centers[i])[0][i] == pytest.approx(1.0)

    def test_unsquared_norm_value(self):
        # distance 2 with gamma 0.25 gives exp(-0.5), not exp(-1)
        fmap = FeatureMap(
            kind="rbf", m=1, input_dim=2, gamma=0.25,
            centers=np.zeros((1, 2)),
        )
        val = fmap.apply(np.array([2.0, 0.0]))[0, 0]
        assert val == pytest.approx(np.exp(-0.5), abs=1e-12)
        assert val == pytest.approx(0.6065, abs=5e-5)

    def test_range(self):
        fmap = new_rbf(4, 16, gamma=0.25, eta=5.0, seed=3)
        rows = fmap.apply(np.random.default_rng(1).standard_normal((40, 4)) * 3)
        assert np.all(rows > 0.0)
        assert np.all(rows <= 1.0)

    def test_center_variance(self):
        fmap = new_rbf(4, 20_000, gamma=0.25, eta=5.0, seed=4)
        assert fmap.centers.var() == pytest.approx(5.0, rel=0.1)


class TestLinear:
    def test_bias_feature(self):
        fmap = new_linear(4)
        np.testing.assert_array_equal(
            fmap.apply(np.array([1.0, 2.0, 3.0, 4.0]))[0], [1, 2, 3, 4, 1]
        )
        np.testing.assert_array_equal(fmap.apply(np.zeros(4))[0], [0, 0, 0, 0, 1])
        assert fmap.m == 5

    def test_exact_on_affine_law(self):
        # data following an affine ARX law is fit exactly by the baseline
        rng = np.random.default_rng(7)
        u = rng.standard_normal(120)
        y = np.zeros(120)
        for t in range(2, 120):
            y[t] = 0.3 * u[t - 1] - 0.2 * u[t - 2] + 0.5 * y[t - 1] + 0.1 * y[t - 2] + 0.7
        regs = build_regressors(series(u, y), LagSpec(2, 2))
        report = min_norm_ls(apply_map(new_linear(4), regs))
        assert report.train_residual_mse < 1e-20


class TestApplyMap:
    def test_linear_on_hand_row(self):
        regs = build_regressors(series([1, 2, 3], [10, 20, 30]), LagSpec(2, 2))
        design = apply_map(new_linear(4), regs)
        np.testing.assert_array_equal(design.phi, [[2, 1, 20, 10, 1]])
        np.testing.assert_array_equal(design.targets, [30])

    def test_dimension_mismatch(self):
        regs = build_regressors(series([1, 2, 3], [10, 20, 30]), LagSpec(2, 2))
        with pytest.raises(ValueError, match="dimension"):
            apply_map(new_rff(3, 8, 0.6, 0), regs)

    def test_deterministic_application(self, chen_regs):
        regs_train, _ = chen_regs
        fmap = new_rff(4, 50, 0.6, seed=12)
        a = apply_map(fmap, regs_train)
        b = apply_map(fmap, regs_train)
        assert np.array_equal(a.phi, b.phi)

    def test_design_matrix_validation(self):
        with pytest.raises(ValueError, match="finite"):
            DesignMatrix(phi=np.array([[np.inf]]), targets=np.array([1.0]))
        with pytest.raises(ValueError):
            DesignMatrix(phi=np.ones((2, 3)), targets=np.ones(3))


class TestLagSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            LagSpec(0, 1)
        assert LagSpec(2, 3).dim == 5
        assert LagSpec(2, 3).horizon == 3


class TestRegressorSet:
    def test_validation(self):
        with pytest.raises(ValueError):
            RegressorSet(X=np.ones((2, 3)), targets=np.ones(3), t_index=0)
