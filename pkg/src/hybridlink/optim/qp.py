"""Primal active-set solver for small quadratic programs over the simplex.

Solves

    min  w' S w
    s.t. A w = b,  w >= 0

where the rows of ``A`` always include the budget constraint ``sum(w) = 1``
and optionally a target-return row ``mu' w = t``. The feasible set is
bounded, so the method only needs a feasible starting point, which is
built by mixing the lowest- and highest-return assets.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

PIVOT_FLOOR = 1e-12


class QPError(Exception):
    pass


class InfeasibleTargetError(QPError):
    pass


@dataclass
class QPResult:
    weights: np.ndarray
    iterations: int
    active: tuple


def regularize(sigma: np.ndarray) -> np.ndarray:
    """Add a ridge of PIVOT_FLOOR relative to the diagonal scale.

    Keeps every subproblem strictly convex when ``sigma`` is singular
    (few observations, duplicated assets, all-zero risk). The ridge scales
    with ``sigma`` so weights stay invariant under ``c * sigma``.
    """
    k = sigma.shape[0]
    scale = float(np.trace(sigma)) / k if k else 0.0
    if scale <= 0.0:
        scale = 1.0
    return sigma + PIVOT_FLOOR * scale * np.eye(k)


def check_covariance(sigma, k: Optional[int] = None) -> np.ndarray:
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise ValueError(f"covariance must be square, got shape {sigma.shape}")
    if k is not None and sigma.shape[0] != k:
        raise ValueError(f"covariance is {sigma.shape[0]}x{sigma.shape[0]}, expected {k}x{k}")
    if not np.all(np.isfinite(sigma)):
        raise ValueError("covariance contains NaN or Inf")
    scale = max(1.0, float(np.max(np.abs(sigma)))) if sigma.size else 1.0
    if np.max(np.abs(sigma - sigma.T), initial=0.0) > 1e-9 * scale:
        raise ValueError("covariance is not symmetric")
    return 0.5 * (sigma + sigma.T)


def _solve_on_free(G, A, b, free):
    """Minimize w'Gw with A w = b and w[~free] = 0; returns (w, lam)."""
    k = G.shape[0]
    F = np.flatnonzero(free)
    GF = G[np.ix_(F, F)]
    AF = A[:, F]
    m = A.shape[0]
    kkt = np.block([[2.0 * GF, AF.T], [AF, np.zeros((m, m))]])
    rhs = np.concatenate([np.zeros(len(F)), b])
    # lstsq tolerates dependent equality rows (e.g. free assets with equal mu)
    sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
    # one round of iterative refinement keeps the equalities tight
    sol = sol + np.linalg.lstsq(kkt, rhs - kkt @ sol, rcond=None)[0]
    w = np.zeros(k)
    w[F] = sol[: len(F)]
    lam = -sol[len(F):]
    return w, lam


def _start_point(A, b, mu):
    k = A.shape[1]
    w = np.zeros(k)
    if mu is None:
        w[:] = 1.0 / k
        return w
    target = b[1]
    lo, hi = int(np.argmin(mu)), int(np.argmax(mu))
    if mu[hi] == mu[lo]:
        w[lo] = 1.0
        return w
    theta = (target - mu[lo]) / (mu[hi] - mu[lo])
    theta = min(max(theta, 0.0), 1.0)
    w[lo] += 1.0 - theta
    w[hi] += theta
    return w


def active_set_qp(sigma, mu=None, target=None, max_iter: int = 500) -> QPResult:
    """Solve the long-only, fully-invested minimum-variance problem.

    With ``target`` given, ``mu' w = target`` is added as an equality.
    """
    sigma = np.asarray(sigma, dtype=float)
    k = sigma.shape[0]
    if target is not None:
        mu_vec = np.asarray(mu, dtype=float).ravel()
        tol = 1e-12 * max(1.0, float(np.max(np.abs(mu_vec))))
        if target >= mu_vec.max() - tol or target <= mu_vec.min() + tol:
            # extreme target: only the face of assets with mu == target is
            # feasible, and its vertices are degenerate for the 2-row system
            face = np.flatnonzero(np.abs(mu_vec - target) <= tol)
            if face.size == 0:
                raise InfeasibleTargetError(f"target return {target!r} is not attainable")
            sub = active_set_qp(sigma[np.ix_(face, face)], max_iter=max_iter)
            w = np.zeros(k)
            w[face] = sub.weights
            return QPResult(w, sub.iterations, tuple(np.flatnonzero(w == 0.0)))
    G = regularize(sigma)
    # unit diagonal scale so the KKT blocks are comparable in magnitude
    G = G / (float(np.max(np.abs(G))) or 1.0)
    if target is None:
        A = np.ones((1, k))
        b = np.array([1.0])
        mu_vec = None
    else:
        mu_vec = np.asarray(mu, dtype=float).ravel()
        A = np.vstack([np.ones(k), mu_vec])
        b = np.array([1.0, float(target)])

    w = _start_point(A, b, mu_vec)
    free = w > 0.0
    released = set()

    for it in range(1, max_iter + 1):
        cand, lam = _solve_on_free(G, A, b, free)
        step = cand - w
        if np.max(np.abs(step)) <= 1e-15 * max(1.0, np.max(np.abs(w))):
            # stationary on the working set: check bound multipliers
            grad = 2.0 * G @ cand
            nu = grad - A.T @ lam
            nu[free] = 0.0
            gscale = max(1.0, float(np.max(np.abs(grad))))
            bound = np.flatnonzero(~free)
            if bound.size == 0 or np.min(nu[bound]) >= -1e-13 * gscale:
                w = cand
                w[~free] = 0.0
                return QPResult(w, it, tuple(np.flatnonzero(~free)))
            release = bound[int(np.argmin(nu[bound]))]
            key = (release, free.tobytes())
            if key in released:
                raise QPError("active-set cycling on a degenerate working set")
            released.add(key)
            free[release] = True
            w = cand
            continue
        # ratio test over free coordinates moving toward zero
        alpha = 1.0
        blocking = None
        for i in np.flatnonzero(free & (step < 0)):
            ratio = -w[i] / step[i]
            if ratio < alpha:
                alpha, blocking = ratio, i
        w = w + alpha * step
        if blocking is not None:
            w[blocking] = 0.0
            free[blocking] = False
    raise QPError(f"active-set iteration did not converge in {max_iter} steps")
