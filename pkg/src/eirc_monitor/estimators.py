"""scikit-learn compatible wrappers around the batch forms of the pipeline stages.

None of these estimators learn anything from data: every threshold and
coefficient is a constructor parameter. ``fit`` validates input shape and
records ``n_features_in_`` so the objects compose with ``Pipeline``,
``clone`` and ``get_params``/``set_params``.

>>> pipe = make_activity_pipeline()
>>> levels = pipe.fit(raw_accel).predict(raw_accel)   # doctest: +SKIP
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.pipeline import Pipeline
from sklearn.utils.validation import check_array, check_is_fitted

from .activity import LEVEL_BOUNDS, classify_level, compute_sma, extrapolate_ee
from .posture import DEFAULT_THRESHOLDS, OrientationState, classify_posture, fuse_step, tilt_from_gravity
from .preprocess import GravityState, LinearAccelSample, Window, high_pass
from .sensor_model import ActivityLevel, PostureClass


def _check_columns(X, n_cols, name):
    X = check_array(X, dtype=np.float64)
    if X.shape[1] != n_cols:
        raise ValueError(f"{name} expects {n_cols} columns, got {X.shape[1]}")
    return X


class GravityFilter(TransformerMixin, BaseEstimator):
    """Raw (n, 3) acceleration -> (n, 3) linear acceleration.

    Gravity is initialised to the first row of each ``transform`` call.
    """

    def __init__(self, alpha=0.833):
        self.alpha = alpha

    def fit(self, X, y=None):
        _check_columns(X, 3, type(self).__name__)
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        self.n_features_in_ = 3
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = _check_columns(X, 3, type(self).__name__)
        out = np.empty_like(X)
        state = GravityState.from_sample(X[0])
        for i, row in enumerate(X):
            sample, state = high_pass(tuple(row), state, self.alpha)
            out[i] = sample.as_tuple()
        return out


class SMAWindower(TransformerMixin, BaseEstimator):
    """Linear (n, 3) acceleration -> (n // samples_per_window, 1) SMA per tumbling window.

    Trailing samples that do not fill a window are ignored.
    """

    def __init__(self, samples_per_window=25):
        self.samples_per_window = samples_per_window

    def fit(self, X, y=None):
        _check_columns(X, 3, type(self).__name__)
        if self.samples_per_window < 1:
            raise ValueError("samples_per_window must be >= 1")
        self.n_features_in_ = 3
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = _check_columns(X, 3, type(self).__name__)
        n = self.samples_per_window
        smas = []
        for k in range(len(X) // n):
            block = X[k * n : (k + 1) * n]
            samples = tuple(LinearAccelSample(i, *row) for i, row in enumerate(block))
            smas.append(compute_sma(Window(k, 0, 0, samples)))
        return np.asarray(smas, dtype=np.float64).reshape(-1, 1)


class ActivityLevelClassifier(ClassifierMixin, BaseEstimator):
    """Single-column SMA -> activity level label."""

    def __init__(self, bounds=LEVEL_BOUNDS):
        self.bounds = bounds

    def fit(self, X, y=None):
        _check_columns(X, 1, type(self).__name__)
        b = tuple(self.bounds)
        if len(b) != 3 or not 0 < b[0] < b[1] < b[2]:
            raise ValueError(f"bounds must be 3 increasing positive values, got {b}")
        self.classes_ = np.array([lvl.label for lvl in ActivityLevel])
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "classes_")
        X = _check_columns(X, 1, type(self).__name__)
        if (X < 0).any():
            raise ValueError("SMA values must be >= 0")
        return np.array([classify_level(v, tuple(self.bounds)).label for v in X[:, 0]])

    def energy_expenditure(self, X):
        """Extrapolated VO2 for each SMA value."""
        X = _check_columns(X, 1, type(self).__name__)
        return np.array([extrapolate_ee(v) for v in X[:, 0]])


class TiltEstimator(TransformerMixin, BaseEstimator):
    """(n, 6) accel + gyro, or (n, 9) with magnetometer -> (n, 1) tilt in degrees."""

    def __init__(self, fusion_weight=0.98, vertical_axis="y", sample_period_ms=200):
        self.fusion_weight = fusion_weight
        self.vertical_axis = vertical_axis
        self.sample_period_ms = sample_period_ms

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        if X.shape[1] not in (6, 9):
            raise ValueError(f"TiltEstimator expects 6 or 9 columns, got {X.shape[1]}")
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = _check_columns(X, self.n_features_in_, type(self).__name__)
        dt = self.sample_period_ms / 1000.0
        has_mag = X.shape[1] == 9
        state = OrientationState.from_accel(X[0, :3], weight=self.fusion_weight)
        tilts = [tilt_from_gravity(state.gravity, self.vertical_axis)]
        for row in X[1:]:
            mag = row[6:9] if has_mag else None
            state = fuse_step(state, row[:3], row[3:6], mag, dt)
            tilts.append(tilt_from_gravity(state.gravity, self.vertical_axis))
        return np.asarray(tilts).reshape(-1, 1)


class PostureClassifier(ClassifierMixin, BaseEstimator):
    """Single-column tilt in degrees -> posture class label."""

    def __init__(self, thresholds=DEFAULT_THRESHOLDS):
        self.thresholds = thresholds

    def fit(self, X, y=None):
        _check_columns(X, 1, type(self).__name__)
        t = tuple(self.thresholds)
        if len(t) != 3 or not 0 < t[0] < t[1] < t[2] < 180:
            raise ValueError(f"thresholds must be 3 increasing values in (0, 180), got {t}")
        self.classes_ = np.array([p.label for p in PostureClass])
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "classes_")
        X = _check_columns(X, 1, type(self).__name__)
        return np.array([classify_posture(v, tuple(self.thresholds)).label for v in X[:, 0]])


def make_activity_pipeline(alpha=0.833, samples_per_window=25, bounds=LEVEL_BOUNDS) -> Pipeline:
    """Raw (n, 3) acceleration -> one activity label per full window."""
    return Pipeline(
        [
            ("gravity", GravityFilter(alpha=alpha)),
            ("sma", SMAWindower(samples_per_window=samples_per_window)),
            ("level", ActivityLevelClassifier(bounds=bounds)),
        ]
    )
