from .frontier import (
    FrontierPoint,
    FrontierResult,
    min_variance_portfolio,
    portopt,
    solve_qp_target_return,
)
from .kkt import KKTReport, kkt_residuals
from .qp import InfeasibleTargetError, QPError, active_set_qp

__all__ = [
    "FrontierPoint",
    "FrontierResult",
    "InfeasibleTargetError",
    "KKTReport",
    "QPError",
    "active_set_qp",
    "kkt_residuals",
    "min_variance_portfolio",
    "portopt",
    "solve_qp_target_return",
]
