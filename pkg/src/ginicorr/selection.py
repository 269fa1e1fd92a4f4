"""scikit-learn compatible feature selection on top of the marginal screen."""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.feature_selection import SelectorMixin
from sklearn.utils.validation import check_is_fitted, check_X_y

from .inference import screen_features


class GiniCorrelationSelector(SelectorMixin, BaseEstimator):
    """Select features by their marginal categorical Gini correlation with a
    class label.

    Fits into sklearn pipelines like ``SelectKBest``: ``fit`` scores every
    column, ``transform`` keeps the ``top_k`` best (all columns when
    ``top_k`` is None). Constant columns score NaN and always rank last.

    Parameters
    ----------
    top_k : int or None
        Number of features to keep; None keeps all of them.
    alpha : float
        Distance exponent in (0, 2); 1.0 is the Euclidean distance.

    Attributes
    ----------
    scores_ : ndarray of shape (n_features,)
        Correlation per column (NaN for constant columns).
    ranking_ : ndarray of shape (n_features,)
        Column indices from best to worst.
    """

    def __init__(self, top_k: int | None = None, alpha: float = 1.0):
        self.top_k = top_k
        self.alpha = alpha

    def fit(self, X, y):
        if self.top_k is not None and self.top_k < 1:
            raise ValueError(f"top_k must be >= 1 or None, got {self.top_k}")
        X, y = check_X_y(X, y, dtype=np.float64)
        result = screen_features(X, y, alpha=self.alpha)
        self.n_features_in_ = X.shape[1]
        self.scores_ = np.full(self.n_features_in_, np.nan)
        for score in result.ranking:
            if not score.degenerate:
                self.scores_[score.index] = score.rho
        self.ranking_ = np.array([score.index for score in result.ranking], dtype=np.intp)
        return self

    def _get_support_mask(self):
        check_is_fitted(self, "ranking_")
        keep = self.ranking_ if self.top_k is None else self.ranking_[: self.top_k]
        mask = np.zeros(self.n_features_in_, dtype=bool)
        mask[keep] = True
        return mask
