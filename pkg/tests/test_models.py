"""Ridge and logistic regression against linear-algebra and gradient oracles."""

import numpy as np
import pytest

from foresim.errors import ConfigError, DataError, NumericalError
from foresim.models import (
    LogisticModel,
    ModelConfig,
    load_model,
    logistic_fit,
    logistic_predict_proba,
    ridge_fit,
    ridge_predict,
    save_model,
)
from foresim.models.logistic import objective
from foresim.targets import ClassWeights


class TestRidge:
    def test_lambda_zero_equals_ols(self, rng):
        X = rng.standard_normal((80, 4))
        y = X @ np.array([1.0, -2.0, 0.5, 3.0]) + rng.standard_normal(80)
        model = ridge_fit(X, y, 0.0)
        Xa = np.column_stack([np.ones(80), X])
        beta = np.linalg.lstsq(Xa, y, rcond=None)[0]
        np.testing.assert_allclose(model.coef, beta[1:], atol=1e-8)
        np.testing.assert_allclose(model.intercept, beta[0], atol=1e-8)

    def test_huge_lambda_shrinks_to_zero(self, rng):
        X = rng.standard_normal((60, 5))
        X = (X - X.mean(0)) / X.std(0)
        y = rng.standard_normal(60)
        model = ridge_fit(X, y, 1e6)
        assert np.abs(model.coef).max() < 1e-3
        assert abs(model.intercept - y.mean()) < 1e-3

    def test_matches_normal_equation_oracle(self, rng):
        X = rng.standard_normal((50, 5))
        y = rng.standard_normal(50)
        model = ridge_fit(X, y, 0.7)
        Xc = X - X.mean(0)
        oracle = np.linalg.solve(Xc.T @ Xc + 0.7 * np.eye(5),
                                 Xc.T @ (y - y.mean()))
        np.testing.assert_allclose(model.coef, oracle, atol=1e-8)

    @pytest.mark.parametrize("solver", ["svd", "cholesky", "lsqr",
                                        "sparse_cg", "sag", "saga"])
    def test_all_solver_tags_agree(self, solver, rng):
        X = rng.standard_normal((60, 4))
        y = rng.standard_normal(60)
        reference = ridge_fit(X, y, 0.3, solver="svd")
        model = ridge_fit(X, y, 0.3, solver=solver)
        np.testing.assert_allclose(model.coef, reference.coef, atol=1e-8)

    def test_degenerate_design_lambda_zero_errors(self, rng):
        X = rng.standard_normal((30, 3))
        X = np.column_stack([X, X[:, 0] + X[:, 1]])  # exactly collinear
        with pytest.raises(NumericalError, match="rank-deficient"):
            ridge_fit(X, rng.standard_normal(30), 0.0)
        ridge_fit(X, rng.standard_normal(30), 0.1)  # regularised is fine

    def test_prediction_invariant_to_standardisation_at_lambda_zero(self, rng):
        X = rng.standard_normal((70, 3)) * np.array([10.0, 0.1, 1.0]) + 5.0
        y = rng.standard_normal(70)
        plain = ridge_predict(ridge_fit(X, y, 0.0), X)
        Z = (X - X.mean(0)) / X.std(0)
        scaled = ridge_predict(ridge_fit(Z, y, 0.0), Z)
        np.testing.assert_allclose(plain, scaled, atol=1e-8)


class TestLogistic:
    def make_data(self, rng, n=200):
        X = rng.standard_normal((n, 3))
        beta = np.array([1.5, -2.0, 0.5])
        p = 1.0 / (1.0 + np.exp(-(X @ beta + 0.3)))
        y = (rng.random(n) < p).astype(float)
        return X, y, beta

    def test_separable_data_stays_finite(self, rng):
        X = np.vstack([rng.standard_normal((50, 2)) + 4.0,
                       rng.standard_normal((50, 2)) - 4.0])
        y = np.concatenate([np.ones(50), np.zeros(50)])
        model = logistic_fit(X, y, lam=1.0)
        assert np.isfinite(model.coef).all()
        probs = logistic_predict_proba(model, X)
        assert np.mean((probs > 0.5) == y) == 1.0

    def test_label_flip_negates_coefficients(self, rng):
        X, y, _ = self.make_data(rng)
        a = logistic_fit(X, y, 1.0)
        b = logistic_fit(X, 1.0 - y, 1.0)
        np.testing.assert_allclose(a.coef, -b.coef, atol=1e-6)
        assert abs(a.intercept + b.intercept) < 1e-6

    def test_gradient_norm_at_optimum(self, rng):
        X, y, _ = self.make_data(rng)
        model = logistic_fit(X, y, 1.0)
        params = np.concatenate([[model.intercept], model.coef])
        _, grad = objective(params, X, y, 1.0, np.ones(len(y)))
        assert np.linalg.norm(grad) < 1e-6

    def test_recovers_generating_coefficients(self, rng):
        X, y, beta = self.make_data(rng, n=2000)
        model = logistic_fit(X, y, 1e-8)
        # with n=2000 the asymptotic SE is ~0.06; allow 2 standard errors
        np.testing.assert_allclose(model.coef, beta, atol=0.2)

    @pytest.mark.parametrize("solver", ["lbfgs", "liblinear", "newton_cg",
                                        "newton_cholesky", "sag", "saga"])
    def test_all_solver_tags_agree(self, solver, rng):
        X, y, _ = self.make_data(rng)
        reference = logistic_fit(X, y, 2.0, solver="newton_cg")
        model = logistic_fit(X, y, 2.0, solver=solver)
        np.testing.assert_allclose(model.coef, reference.coef, atol=1e-5)

    def test_class_weights_shift_the_boundary(self, rng):
        X, y, _ = self.make_data(rng)
        plain = logistic_fit(X, y, 1.0)
        weighted = logistic_fit(X, y, 1.0, weights=ClassWeights(5.0, 0.5))
        p_plain = logistic_predict_proba(plain, X).mean()
        p_weighted = logistic_predict_proba(weighted, X).mean()
        assert p_weighted > p_plain  # up-weighted positives raise probabilities

    def test_argmax_class_invariant_under_affine_rescale_lambda_zero(self, rng):
        X, y, _ = self.make_data(rng, n=400)
        a = logistic_fit(X, y, 0.0)
        b = logistic_fit(X * np.array([3.0, 0.2, 10.0]) + 1.0, y, 0.0)
        pa = logistic_predict_proba(a, X)
        pb = logistic_predict_proba(b, X * np.array([3.0, 0.2, 10.0]) + 1.0)
        np.testing.assert_array_equal(pa > 0.5, pb > 0.5)

    def test_single_class_errors(self, rng):
        with pytest.raises(DataError, match="both classes"):
            logistic_fit(rng.standard_normal((10, 2)), np.ones(10), 1.0)


class TestModelConfig:
    def test_ranges_enforced(self):
        ModelConfig(family="ridge", ridge_lambda=50.0).validate()
        with pytest.raises(ConfigError, match="outside allowed range"):
            ModelConfig(family="ridge", ridge_lambda=500.0).validate()
        with pytest.raises(ConfigError, match="outside allowed range"):
            ModelConfig(family="logistic", logistic_lambda=1e-5).validate()
        with pytest.raises(ConfigError, match="not one of"):
            ModelConfig(family="mlp", mlp_activation="swish").validate()
        with pytest.raises(ConfigError, match="number of MLP layers"):
            ModelConfig(family="mlp", mlp_layers=(10,) * 5).validate()
        with pytest.raises(ConfigError, match="MLP layer size"):
            ModelConfig(family="mlp", mlp_layers=(300,)).validate()

    def test_unknown_family(self):
        with pytest.raises(ConfigError, match="unknown model family"):
            ModelConfig(family="xgboost").validate()


class TestSerialization:
    def test_ridge_round_trip(self, tmp_path, rng):
        X = rng.standard_normal((40, 3))
        y = rng.standard_normal(40)
        model = ridge_fit(X, y, 0.5)
        path = tmp_path / "model.exbt"
        save_model(model, path)
        assert path.read_bytes()[:4] == b"EXBT"
        loaded = load_model(path)
        np.testing.assert_array_equal(loaded.coef, model.coef)
        assert loaded.intercept == model.intercept

    def test_logistic_round_trip(self, tmp_path, rng):
        X = rng.standard_normal((60, 2))
        y = (rng.random(60) < 0.5).astype(float)
        model = logistic_fit(X, y, 1.0)
        save_model(model, tmp_path / "m.exbt")
        loaded = load_model(tmp_path / "m.exbt")
        assert isinstance(loaded, LogisticModel)
        np.testing.assert_array_equal(
            logistic_predict_proba(loaded, X), logistic_predict_proba(model, X))

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "junk.exbt"
        path.write_bytes(b"NOPE" + b"\x00" * 32)
        with pytest.raises(DataError, match="bad magic"):
            load_model(path)
