import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from embezzle import EmbezzlementTransformer
from embezzle.estimator import REPORT_COLUMNS
from embezzle.protocol import bound_report

X = np.array(
    [
        [1 / math.sqrt(2), 1 / math.sqrt(2), 0.0],
        [1.0, 0.0, 0.0],
        [math.sqrt(0.5), math.sqrt(0.3), math.sqrt(0.2)],
    ]
)


def test_params_roundtrip():
    est = EmbezzlementTransformer(n=64)
    assert est.get_params() == {"n": 64, "sort": True}
    est.set_params(n=128)
    assert clone(est).n == 128


def test_transform_matches_bound_report():
    out = EmbezzlementTransformer(n=256).fit_transform(X)
    assert out.shape == (3, len(REPORT_COLUMNS))
    for row, target in zip(out, X):
        rep = bound_report(256, target[target > 0])
        np.testing.assert_array_equal(
            row,
            [rep.n, rep.m, rep.fidelity, rep.eq4_bound, rep.sum_omega_sq, rep.delta, rep.eq6_bound,
             rep.fannes_floor, rep.target_entropy_bits],
        )
    assert out[1, 2] == 1.0


def test_fitted_attributes():
    est = EmbezzlementTransformer(n=4).fit(X)
    assert est.normalizer_ == pytest.approx(25 / 12)
    assert est.embezzler_.shape == (4,)
    assert est.n_features_in_ == 3
    assert list(est.get_feature_names_out()) == list(REPORT_COLUMNS)


def test_not_fitted():
    with pytest.raises(NotFittedError):
        EmbezzlementTransformer().transform(X)


def test_validation():
    with pytest.raises(ValueError, match="not normalized"):
        EmbezzlementTransformer(n=8).fit([[0.5, 0.5]])
    with pytest.raises(ValueError, match=">= 2"):
        EmbezzlementTransformer(n=1).fit(X)
    with pytest.raises(ValueError, match="non-increasing"):
        EmbezzlementTransformer(n=8, sort=False).fit([[0.6, 0.8]])
    est = EmbezzlementTransformer(n=8).fit(X)
    with pytest.raises(ValueError, match="features"):
        est.transform(X[:, :2])


def test_pipeline_composition():
    # probabilities in, amplitudes out, then the report
    pipe = make_pipeline(FunctionTransformer(np.sqrt), EmbezzlementTransformer(n=32))
    out = pipe.fit_transform(X**2)
    np.testing.assert_allclose(out, EmbezzlementTransformer(n=32).fit_transform(X))
