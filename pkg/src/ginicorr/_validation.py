"""Input validation helpers shared across the public entry points."""

import numpy as np

from .exceptions import InvalidInput


def check_alpha(alpha: float) -> float:
    """Validate the distance exponent; must lie in the open interval (0, 2)."""
    alpha = float(alpha)
    if not np.isfinite(alpha) or not 0.0 < alpha < 2.0:
        raise InvalidInput(f"alpha must lie in (0, 2), got {alpha!r}")
    return alpha


def check_unit_interval(value: float, name: str) -> float:
    """Validate a probability-like parameter in the open interval (0, 1)."""
    value = float(value)
    if not np.isfinite(value) or not 0.0 < value < 1.0:
        raise InvalidInput(f"{name} must lie in (0, 1), got {value!r}")
    return value


def as_data_matrix(x) -> np.ndarray:
    """Coerce numeric input to a finite float64 matrix of shape (n, d).

    1-D input becomes a single-column matrix; anything above 2-D is rejected.
    """
    X = np.asarray(x, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2:
        raise InvalidInput(f"data must be 1-D or 2-D, got ndim={X.ndim}")
    if X.shape[0] < 1 or X.shape[1] < 1:
        raise InvalidInput(f"data must be non-empty, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise InvalidInput("data contains NaN or infinite entries")
    return X


def as_labels(y, n: int) -> np.ndarray:
    """Coerce labels to a 1-D object array of length ``n``, tokens kept verbatim."""
    labels = np.asarray(y, dtype=object)
    if labels.ndim != 1:
        raise InvalidInput(f"labels must be 1-D, got ndim={labels.ndim}")
    if labels.shape[0] != n:
        raise InvalidInput(f"labels has {labels.shape[0]} entries for {n} observations")
    return labels
