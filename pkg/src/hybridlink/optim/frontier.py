"""Mean-variance efficient frontier (long-only, fully invested)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from .qp import InfeasibleTargetError, active_set_qp, check_covariance

# relative slack when deciding a target sits on the achievable-return boundary
_TARGET_TOL = 1e-12


@dataclass(frozen=True)
class FrontierPoint:
    risk: float
    ror: float
    weights: np.ndarray


@dataclass
class FrontierResult:
    points: List[FrontierPoint]
    mu: np.ndarray
    sigma: np.ndarray

    @property
    def risk(self) -> np.ndarray:
        return np.array([p.risk for p in self.points])

    @property
    def ror(self) -> np.ndarray:
        return np.array([p.ror for p in self.points])

    @property
    def weights(self) -> np.ndarray:
        return np.vstack([p.weights for p in self.points])

    def __len__(self) -> int:
        return len(self.points)


def _prepare(mu, sigma):
    mu = np.asarray(mu, dtype=float).ravel()
    if mu.size < 1:
        raise ValueError("need at least one asset")
    if not np.all(np.isfinite(mu)):
        raise ValueError("expected returns contain NaN or Inf")
    return mu, check_covariance(sigma, mu.size)


def _risk(sigma, w) -> float:
    return float(np.sqrt(max(float(w @ sigma @ w), 0.0)))


def min_variance_portfolio(mu, sigma) -> np.ndarray:
    """Long-only fully-invested minimum-variance weights."""
    mu, sigma = _prepare(mu, sigma)
    if mu.size == 1:
        return np.ones(1)
    return active_set_qp(sigma).weights


def solve_qp_target_return(mu, sigma, target: float) -> np.ndarray:
    """Minimum-variance weights among portfolios returning exactly ``target``.

    At ``target == max(mu)`` the only feasible portfolios sit on the face of
    the assets sharing the maximal mean, so without ties this is the pure
    vertex of the best asset.
    """
    mu, sigma = _prepare(mu, sigma)
    lo, hi = float(mu.min()), float(mu.max())
    tol = _TARGET_TOL * max(1.0, abs(lo), abs(hi))
    if target < lo - tol or target > hi + tol:
        raise InfeasibleTargetError(
            f"target return {target!r} outside achievable range [{lo!r}, {hi!r}]")
    if mu.size == 1:
        return np.ones(1)
    target = min(max(float(target), lo), hi)
    return active_set_qp(sigma, mu, target).weights


def portopt(mu, sigma, npts: int = 10) -> FrontierResult:
    """``npts`` portfolios at evenly spaced returns from the minimum-variance
    portfolio's return up to the largest expected return."""
    npts = int(npts)
    if npts < 2:
        raise ValueError(f"npts must be >= 2, got {npts}")
    mu, sigma = _prepare(mu, sigma)

    w_min = min_variance_portfolio(mu, sigma)
    targets = np.linspace(float(mu @ w_min), float(mu.max()), npts)
    points = []
    for i, t in enumerate(targets):
        w = w_min if i == 0 else solve_qp_target_return(mu, sigma, t)
        points.append(FrontierPoint(risk=_risk(sigma, w), ror=float(t), weights=w))
    return FrontierResult(points=points, mu=mu, sigma=sigma)
