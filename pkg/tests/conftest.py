"""Shared fixtures and independent brute-force oracles.

The oracles below are deliberately written as plain double loops over
Python floats so they share no code path with the library.
"""

import math

import numpy as np
import pytest

from ginicorr.dataset import TableSpec, iris_path, load


def oracle_gmd(points, alpha=1.0):
    """Gini mean difference by exhaustive pair enumeration."""
    X = np.asarray(points, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    X = X.tolist()
    m = len(X)
    total = 0.0
    for i in range(m):
        for j in range(i + 1, m):
            acc = 0.0
            for a, b in zip(X[i], X[j]):
                acc += (a - b) * (a - b)
            total += math.sqrt(acc) ** alpha
    return total / (m * (m - 1) / 2)


def oracle_cgc(x, y, alpha=1.0):
    """Categorical Gini correlation by exhaustive pair enumeration."""
    X = np.asarray(x, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    y = list(y)
    n = len(y)
    overall = oracle_gmd(X, alpha)
    classes = list(dict.fromkeys(y))
    within = 0.0
    for token in classes:
        rows = [i for i in range(n) if y[i] == token]
        within += (len(rows) / n) * oracle_gmd(X[rows], alpha)
    return (overall - within) / overall


def random_labeled_sample(rng, n_max=30, d_max=4, k_max=4, min_class=2, separation=1.0):
    """A random sample whose every class meets the minimum size."""
    k = int(rng.integers(1, k_max + 1))
    counts = rng.integers(min_class, max(min_class + 1, n_max // k + 1), size=k)
    while counts.sum() > n_max:
        counts[rng.integers(k)] = min_class
    d = int(rng.integers(1, d_max + 1))
    shifts = rng.normal(0.0, separation, size=(k, d))
    rows, labels = [], []
    for code in range(k):
        rows.append(rng.normal(0.0, 1.0, size=(counts[code], d)) + shifts[code])
        labels.extend([f"class{code}"] * counts[code])
    return np.vstack(rows), np.array(labels, dtype=object)


@pytest.fixture(scope="session")
def iris():
    return load(TableSpec(path=str(iris_path()), target="species"))


@pytest.fixture(scope="session")
def iris_csv():
    return str(iris_path())
