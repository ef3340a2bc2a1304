import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from glkern.estimators import known_design_density, nw_known_density
from glkern.kernels import GAUSSIAN
from glkern.processes import ProcessSpec, bump_line, generate_sample
from glkern.regression import GoldenshlugerLepskiRegressor


@pytest.fixture(scope="module")
def fitted():
    sample = generate_sample(ProcessSpec(), bump_line, 0.3, 400, seed=17)
    model = GoldenshlugerLepskiRegressor(gamma=0.01)
    model.fit(sample.x, sample.y)
    return sample, model


class TestSklearnContract:
    def test_get_set_params_roundtrip(self):
        model = GoldenshlugerLepskiRegressor(gamma=0.02, kernel="epanechnikov")
        params = model.get_params()
        assert params["gamma"] == 0.02
        assert params["kernel"] == "epanechnikov"
        other = GoldenshlugerLepskiRegressor().set_params(**params)
        assert other.get_params() == params

    def test_cloneable(self):
        model = GoldenshlugerLepskiRegressor(bandwidth=0.3)
        assert clone(model).get_params() == model.get_params()

    def test_predict_before_fit_raises(self):
        with pytest.raises(NotFittedError):
            GoldenshlugerLepskiRegressor().predict([0.0])

    def test_fit_returns_self(self, fitted):
        sample, model = fitted
        assert model.fit(sample.x, sample.y) is model


class TestBehaviour:
    def test_adaptive_predict_shape_and_diagnostics(self, fitted):
        _, model = fitted
        xs = np.linspace(-1, 1, 5)
        preds = model.predict(xs)
        assert preds.shape == (5,)
        assert np.all(np.isfinite(preds))
        hs = model.select_bandwidths(xs)
        assert np.all(np.isin(hs, model.grid_.values))

    def test_column_vector_accepted(self, fitted):
        sample, model = fitted
        column = sample.x[:, None]
        refit = GoldenshlugerLepskiRegressor(gamma=0.01).fit(column, sample.y)
        assert np.array_equal(refit.predict([[0.0], [0.5]]),
                              model.predict([0.0, 0.5]))

    def test_multicolumn_rejected(self):
        X = np.ones((10, 2))
        with pytest.raises(ValueError):
            GoldenshlugerLepskiRegressor().fit(X, np.ones(10))

    def test_fixed_bandwidth_matches_plain_estimator(self):
        sample = generate_sample(ProcessSpec(), bump_line, 0.3, 200, seed=18)
        model = GoldenshlugerLepskiRegressor(bandwidth=0.25).fit(sample.x, sample.y)
        g = known_design_density()
        for x in (-0.4, 0.0, 0.7):
            assert model.predict([x])[0] == pytest.approx(
                nw_known_density(sample, g, GAUSSIAN, 0.25, x), rel=1e-12)

    def test_fit_attributes(self, fitted):
        _, model = fitted
        assert model.sigma2_ > 0.0
        assert model.pilot_bandwidth_ in model.grid_.values

    def test_noise_variance_estimate_near_truth(self):
        sample = generate_sample(ProcessSpec(), bump_line, 0.5, 1500, seed=19)
        model = GoldenshlugerLepskiRegressor().fit(sample.x, sample.y)
        assert model.sigma2_ == pytest.approx(0.25, rel=0.30)

    def test_select_bandwidths_requires_adaptive(self):
        sample = generate_sample(ProcessSpec(), bump_line, 0.3, 100, seed=20)
        model = GoldenshlugerLepskiRegressor(bandwidth=0.3).fit(sample.x, sample.y)
        with pytest.raises(ValueError):
            model.select_bandwidths([0.0])

    def test_callable_density_accepted(self):
        sample = generate_sample(ProcessSpec(), bump_line, 0.3, 120, seed=21)
        tn_pdf = known_design_density().pdf
        model = GoldenshlugerLepskiRegressor(density=tn_pdf, gamma=0.01)
        model.fit(sample.x, sample.y)
        assert np.isfinite(model.predict([0.2])[0])
