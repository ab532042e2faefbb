"""The compute side of the link: workspace, command language, builtins."""

from .errors import CommandSyntaxError, DimensionError, EvalError, KernelError, UnboundNameError
from .evaluator import (
    BUILTINS,
    EvalOutput,
    PlotArtifact,
    Workspace,
    apply_directive,
    call_builtin,
    eval_command,
)
from .parser import Command, parse_command, pretty_print
from .pricing import blackscholes
from .stats import cov, ewstats, mean, qqplot, var

__all__ = [
    "BUILTINS",
    "Command",
    "CommandSyntaxError",
    "DimensionError",
    "EvalError",
    "EvalOutput",
    "KernelError",
    "PlotArtifact",
    "UnboundNameError",
    "Workspace",
    "apply_directive",
    "blackscholes",
    "call_builtin",
    "cov",
    "eval_command",
    "ewstats",
    "mean",
    "parse_command",
    "pretty_print",
    "qqplot",
    "var",
]
