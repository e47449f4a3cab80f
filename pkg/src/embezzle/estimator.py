"""scikit-learn compatible front end.

:class:`EmbezzlementTransformer` maps a batch of target states (one Schmidt
vector per row, zero-padded) to the per-instance bound report, so sweeps can
be driven from pipelines and ``ColumnTransformer``-style tooling.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .protocol import bound_report, build_embezzler, harmonic_number
from .validation import check_positive_int, check_schmidt_vector

REPORT_COLUMNS = (
    "n",
    "m",
    "fidelity",
    "eq4_bound",
    "sum_omega_sq",
    "delta",
    "eq6_bound",
    "fannes_floor",
    "entropy_bits",
)


class EmbezzlementTransformer(TransformerMixin, BaseEstimator):
    """Embezzle each row's target state out of the universal state ``mu(n)``.

    Parameters
    ----------
    n : int, default=1024
        Schmidt rank of the embezzling state; must be at least 2.
    sort : bool, default=True
        Sort each row into non-increasing order before use. When false,
        unsorted rows are rejected.

    Attributes
    ----------
    embezzler_ : ndarray of shape (n,)
        Schmidt coefficients of ``mu(n)``.
    normalizer_ : float
        The harmonic number ``C(n)``.
    n_features_in_ : int
        Maximum target rank seen during :meth:`fit`.

    Examples
    --------
    >>> import numpy as np
    >>> X = np.array([[np.sqrt(0.5), np.sqrt(0.5)], [1.0, 0.0]])
    >>> EmbezzlementTransformer(n=2).fit_transform(X)[:, 2].round(7)
    array([0.8047379, 1.       ])
    """

    def __init__(self, n=1024, sort=True):
        self.n = n
        self.sort = sort

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64, ensure_min_features=1)
        n = check_positive_int(self.n, "n", minimum=2)
        for row in X:
            check_schmidt_vector(row, sort=self.sort)
        self.embezzler_ = build_embezzler(n)
        self.normalizer_ = harmonic_number(n)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "embezzler_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, but EmbezzlementTransformer is expecting "
                f"{self.n_features_in_} features as input"
            )
        out = np.empty((X.shape[0], len(REPORT_COLUMNS)))
        for r, row in enumerate(X):
            rep = bound_report(self.n, check_schmidt_vector(row, sort=self.sort))
            out[r] = (
                rep.n,
                rep.m,
                rep.fidelity,
                rep.eq4_bound,
                rep.sum_omega_sq,
                rep.delta,
                rep.eq6_bound,
                rep.fannes_floor,
                rep.target_entropy_bits,
            )
        return out

    def get_feature_names_out(self, input_features=None):
        return np.asarray(REPORT_COLUMNS, dtype=object)
