"""Column statistics, exponentially weighted moments and q-q pairs."""

from __future__ import annotations

import numpy as np

from ..values import as_matrix


class InsufficientDataError(ValueError):
    pass


def _as_2d(M) -> np.ndarray:
    m = np.asarray(M, dtype=float)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    return m


def _colsum(a: np.ndarray) -> np.ndarray:
    # each column summed as its own contiguous vector, so a column's result
    # does not depend on which other columns travel with it
    return np.ascontiguousarray(a.T).sum(axis=1)


def _center(m: np.ndarray) -> np.ndarray:
    return m - _colsum(m) / m.shape[0]


def mean(M) -> np.ndarray:
    m = _as_2d(M)
    if m.shape[0] < 1:
        raise InsufficientDataError("mean needs at least one row")
    return as_matrix((_colsum(m) / m.shape[0]).reshape(1, -1))


def var(M) -> np.ndarray:
    """Sample variance of each column (divisor n - 1).

    Summed exactly like the diagonal of :func:`cov`, so the two agree bit
    for bit.
    """
    m = _as_2d(M)
    n = m.shape[0]
    if n < 2:
        raise InsufficientDataError(f"var needs at least 2 rows, got {n}")
    dev = _center(m)
    return as_matrix((_colsum(dev * dev) / (n - 1)).reshape(1, -1))


def cov(M) -> np.ndarray:
    """Sample covariance of the columns (divisor n - 1)."""
    m = _as_2d(M)
    n, k = m.shape
    if n < 2:
        raise InsufficientDataError(f"cov needs at least 2 rows, got {n}")
    dev = _center(m)
    c = np.empty((k, k))
    for i in range(k):
        c[i] = _colsum(dev[:, i:i + 1] * dev) / (n - 1)
    return as_matrix(0.5 * (c + c.T))


def ewstats(R, decay: float = 1.0):
    """Exponentially weighted expected return and covariance.

    Row t of ``R`` (1-based, oldest first) gets weight proportional to
    ``decay ** (n - t)``. Weights sum to one, so ``decay=1`` gives the plain
    mean and the population covariance (divisor n).
    """
    r = _as_2d(R)
    n = r.shape[0]
    if n < 1:
        raise InsufficientDataError("ewstats needs at least one row")
    decay = float(decay)
    if not 0.0 < decay <= 1.0:
        raise ValueError(f"decay must lie in (0, 1], got {decay!r}")
    w = decay ** np.arange(n - 1, -1, -1, dtype=float)
    w /= w.sum()
    exp_return = w @ r
    dev = r - exp_return
    exp_cov = (dev * w[:, None]).T @ dev
    return as_matrix(exp_return), as_matrix(0.5 * (exp_cov + exp_cov.T))


def _hazen_quantiles(sample: np.ndarray, probs: np.ndarray) -> np.ndarray:
    s = np.sort(sample)
    n = s.size
    positions = (np.arange(1, n + 1) - 0.5) / n
    return np.interp(probs, positions, s)


def qqplot(x, y) -> np.ndarray:
    """Quantile pairs of two samples at plotting positions (i - 0.5) / p,
    p = min(len(x), len(y))."""
    xs = np.asarray(x, dtype=float).ravel()
    ys = np.asarray(y, dtype=float).ravel()
    if xs.size < 2 or ys.size < 2:
        raise InsufficientDataError("qqplot needs at least 2 observations per sample")
    p = min(xs.size, ys.size)
    probs = (np.arange(1, p + 1) - 0.5) / p
    return as_matrix(np.column_stack([_hazen_quantiles(xs, probs), _hazen_quantiles(ys, probs)]))
