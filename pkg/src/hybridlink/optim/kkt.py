"""Solver-independent optimality certificate for simplex-constrained QPs.

Nothing here is shared with the active-set code: multipliers are
recovered from the supplied weights alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import linprog


@dataclass
class KKTReport:
    stationarity: float
    primal: float
    dual: float
    complementarity: float

    @property
    def worst(self) -> float:
        return max(self.stationarity, self.primal, self.dual, self.complementarity)

    def ok(self, tol: float = 1e-8) -> bool:
        return self.worst < tol


def _fit_multipliers_lp(A, grad, support):
    """Multipliers minimizing the worst KKT violation when they are not unique.

    Variables (lam, t): minimize t subject to |grad_S - A_S' lam| <= t and
    -(grad_O - A_O' lam) <= t on the off-support coordinates O.
    """
    m, k = A.shape
    # HiGHS tolerances are absolute, so solve with a unit-scale gradient
    gscale = float(np.max(np.abs(grad), initial=0.0)) or 1.0
    grad = grad / gscale
    A_ub, b_ub = [], []
    for i in range(k):
        a = A[:, i]
        if support[i]:
            A_ub.append(np.concatenate([-a, [-1.0]]))
            b_ub.append(-grad[i])
            A_ub.append(np.concatenate([a, [-1.0]]))
            b_ub.append(grad[i])
        else:
            A_ub.append(np.concatenate([a, [-1.0]]))
            b_ub.append(grad[i])
    c = np.zeros(m + 1)
    c[-1] = 1.0
    bounds = [(None, None)] * m + [(0.0, None)]
    res = linprog(c, A_ub=np.array(A_ub), b_ub=np.array(b_ub), bounds=bounds, method="highs")
    if res.status != 0:
        return np.zeros(m)
    return res.x[:m] * gscale


def kkt_residuals(sigma, w, mu=None, target: Optional[float] = None,
                  support_tol: float = 1e-9) -> KKTReport:
    """Residuals of the KKT system for min w'Sw, 1'w=1, [mu'w=t], w>=0.

    Stationarity: 2 S w = A' lam + nu with nu >= 0 and nu_i w_i = 0.
    ``lam`` is fitted by least squares on the support (w_i > support_tol);
    ``nu`` is then the residual gradient.

    Gradient-based residuals are divided by ``max(1, max|S|)`` so the report
    does not change when ``S`` is rescaled by a large constant.
    """
    S = np.asarray(sigma, dtype=float)
    w = np.asarray(w, dtype=float).ravel()
    k = w.size
    rows = [np.ones(k)]
    rhs = [1.0]
    if target is not None:
        rows.append(np.asarray(mu, dtype=float).ravel())
        rhs.append(float(target))
    A = np.array(rows)
    grad = 2.0 * S.dot(w)

    support = w > support_tol
    if np.linalg.matrix_rank(A[:, support]) == A.shape[0]:
        lam, *_ = np.linalg.lstsq(A[:, support].T, grad[support], rcond=None)
    else:
        lam = _fit_multipliers_lp(A, grad, support)
    nu = (grad - A.T.dot(lam)) / max(1.0, float(np.max(np.abs(S), initial=0.0)))

    stationarity = float(np.max(np.abs(nu[support]))) if support.any() else 0.0
    primal = float(max(np.max(np.abs(A.dot(w) - np.array(rhs))), max(0.0, -w.min())))
    off = ~support
    dual = float(max(0.0, -nu[off].min())) if off.any() else 0.0
    complementarity = float(np.max(np.abs(w * nu)))
    return KKTReport(stationarity, primal, dual, complementarity)
