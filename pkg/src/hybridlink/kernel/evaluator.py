"""Workspace and command evaluation.

Evaluation is transactional: a command string runs against a scratch copy
of the bindings and the caller only sees the new workspace if every
statement succeeded.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from ..optim import FrontierResult, QPError, portopt
from ..values import NonFiniteError, StringList, Value, as_matrix, canonical, dumps, is_matrix
from . import stats
from .errors import DimensionError, EvalError, UnboundNameError
from .parser import (
    Assign,
    Call,
    CellIndex,
    ColIndex,
    ExprStatement,
    Ident,
    MultiAssign,
    Number,
    PlotDirective,
    RowIndex,
    String,
    parse_command,
)
from .pricing import DomainError, blackscholes

_IDENT_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")


class Workspace:
    """Name -> value bindings. Values are immutable, so copies are shallow."""

    def __init__(self, bindings: Optional[Dict[str, Value]] = None):
        self._bindings: Dict[str, Value] = {}
        for name, value in (bindings or {}).items():
            self.bind(name, value)

    def bind(self, name: str, value) -> None:
        if not _IDENT_RE.match(name or ""):
            raise EvalError(f"invalid identifier {name!r}")
        if isinstance(value, str):
            value = StringList([value])
        elif not isinstance(value, StringList):
            try:
                value = as_matrix(value)
            except NonFiniteError as exc:
                raise EvalError(f"{name}: {exc}") from None
        self._bindings[name] = value

    def __getitem__(self, name: str) -> Value:
        try:
            return self._bindings[name]
        except KeyError:
            raise UnboundNameError(f"undefined variable {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._bindings

    def __delitem__(self, name: str) -> None:
        if name not in self._bindings:
            raise UnboundNameError(f"undefined variable {name!r}")
        del self._bindings[name]

    def __len__(self) -> int:
        return len(self._bindings)

    def as_dict(self) -> Dict[str, Value]:
        return dict(self._bindings)

    def names(self) -> List[str]:
        return sorted(self._bindings)

    def copy(self) -> "Workspace":
        ws = Workspace()
        ws._bindings = dict(self._bindings)
        return ws

    def digest(self) -> str:
        payload = dumps({k: canonical(v) for k, v in sorted(self._bindings.items())})
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass
class PlotArtifact:
    frontier: FrontierResult
    xlabel: Optional[str] = None
    ylabel: Optional[str] = None
    title: Optional[str] = None
    grid: bool = False


@dataclass
class EvalOutput:
    assigned: Tuple[str, ...] = ()
    value: object = None
    plot: Optional[PlotArtifact] = None
    directives: List[Tuple[str, object]] = field(default_factory=list)


# -- builtins -----------------------------------------------------------------

def _matrix(v, fname: str) -> np.ndarray:
    if not is_matrix(v):
        raise DimensionError(f"{fname}: expected a numeric matrix, got text")
    return v


def _scalar(v, fname: str) -> float:
    m = _matrix(v, fname)
    if m.shape != (1, 1):
        raise DimensionError(f"{fname}: expected a scalar, got {m.shape[0]}x{m.shape[1]}")
    return float(m[0, 0])


def _vector(v, fname: str) -> np.ndarray:
    m = _matrix(v, fname)
    if 1 not in m.shape:
        raise DimensionError(f"{fname}: expected a vector, got {m.shape[0]}x{m.shape[1]}")
    return m.ravel()


def _bi_ewstats(R, decay=None):
    r = _matrix(R, "ewstats")
    d = 1.0 if decay is None else _scalar(decay, "ewstats")
    return stats.ewstats(r, d)


def _bi_portopt(ret, cov, npts=None):
    mu = _vector(ret, "portopt")
    sigma = _matrix(cov, "portopt")
    if sigma.shape != (mu.size, mu.size):
        raise DimensionError(
            f"portopt: covariance is {sigma.shape[0]}x{sigma.shape[1]} for {mu.size} assets")
    n = 10 if npts is None else _scalar(npts, "portopt")
    if n != int(n):
        raise DimensionError("portopt: number of portfolios must be an integer")
    frontier = portopt(mu, sigma, int(n))
    return (as_matrix(frontier.risk.reshape(-1, 1)),
            as_matrix(frontier.ror.reshape(-1, 1)),
            as_matrix(frontier.weights),
            frontier)


def _bi_blackscholes(S, K, r, sigma, T):
    args = [_scalar(v, "blackscholes") for v in (S, K, r, sigma, T)]
    call, put = blackscholes(*args)
    return as_matrix(call), as_matrix(put)


@dataclass(frozen=True)
class Builtin:
    fn: Callable
    min_args: int
    max_args: int
    nout: int


BUILTINS: Dict[str, Builtin] = {
    "mean": Builtin(lambda M: (stats.mean(_matrix(M, "mean")),), 1, 1, 1),
    "var": Builtin(lambda M: (stats.var(_matrix(M, "var")),), 1, 1, 1),
    "cov": Builtin(lambda M: (stats.cov(_matrix(M, "cov")),), 1, 1, 1),
    "ewstats": Builtin(_bi_ewstats, 1, 2, 2),
    "portopt": Builtin(_bi_portopt, 2, 3, 3),
    "blackscholes": Builtin(_bi_blackscholes, 5, 5, 2),
    "qqplot": Builtin(lambda x, y: (stats.qqplot(_vector(x, "qqplot"), _vector(y, "qqplot")),), 2, 2, 1),
    "identity": Builtin(lambda M: (_matrix(M, "identity"),), 1, 1, 1),
}


def call_builtin(name: str, args) -> tuple:
    """Apply builtin ``name``; returns its outputs as a tuple of values."""
    try:
        b = BUILTINS[name]
    except KeyError:
        raise EvalError(f"undefined function {name!r}") from None
    if not b.min_args <= len(args) <= b.max_args:
        want = str(b.min_args) if b.min_args == b.max_args else f"{b.min_args}-{b.max_args}"
        raise EvalError(f"{name} takes {want} argument(s), got {len(args)}")
    try:
        return tuple(b.fn(*args))
    except (DimensionError, EvalError):
        raise
    except (ValueError, DomainError, QPError, ZeroDivisionError) as exc:
        raise EvalError(f"{name}: {exc}") from None


# -- evaluation ---------------------------------------------------------------

def _text(value, what: str) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, StringList) and len(value) == 1:
        return value[0]
    raise DimensionError(f"{what} expects text")


class _Evaluator:
    def __init__(self, ws: Workspace):
        self.ws = ws

    def outputs(self, call: Call) -> tuple:
        args = [self.value(a) for a in call.args]
        return call_builtin(call.name, args)

    def value(self, e):
        if isinstance(e, Number):
            return as_matrix(e.value)
        if isinstance(e, String):
            return e.value
        if isinstance(e, Ident):
            return self.ws[e.name]
        if isinstance(e, Call):
            return self.outputs(e)[0]
        if isinstance(e, (ColIndex, RowIndex)):
            m = self.ws[e.target.name]
            if not is_matrix(m):
                raise DimensionError(f"{e.target.name} is text; use {{k}} indexing")
            axis = 1 if isinstance(e, ColIndex) else 0
            if e.index > m.shape[axis]:
                kind = "column" if axis else "row"
                raise DimensionError(
                    f"{kind} {e.index} out of range for {e.target.name} "
                    f"({m.shape[0]}x{m.shape[1]})")
            sub = m[:, e.index - 1:e.index] if axis else m[e.index - 1:e.index, :]
            return as_matrix(sub)
        if isinstance(e, CellIndex):
            v = self.ws[e.target.name]
            if not isinstance(v, StringList):
                raise DimensionError(f"{e.target.name} is not a string list")
            if e.index > len(v):
                raise DimensionError(f"index {e.index} out of range for {e.target.name} (length {len(v)})")
            return v[e.index - 1]
        raise EvalError(f"cannot evaluate {e!r}")


def eval_command(ws: Workspace, cmd) -> Tuple[Workspace, EvalOutput]:
    """Evaluate a command (text or parsed) against ``ws``.

    Returns the new workspace and the output. On any error the exception
    propagates and ``ws`` is untouched.
    """
    if isinstance(cmd, str):
        cmd = parse_command(cmd)
    scratch = ws.copy()
    ev = _Evaluator(scratch)
    out = EvalOutput()
    assigned: List[str] = []
    for st in cmd.statements:
        if isinstance(st, Assign):
            scratch.bind(st.target, ev.value(st.expr))
            assigned.append(st.target)
        elif isinstance(st, MultiAssign):
            results = ev.outputs(st.call)
            nout = BUILTINS[st.call.name].nout
            if len(st.targets) > nout:
                raise EvalError(
                    f"{st.call.name} returns {nout} output(s), {len(st.targets)} requested")
            for name, val in zip(st.targets, results):
                scratch.bind(name, val)
                assigned.append(name)
        elif isinstance(st, ExprStatement):
            if isinstance(st.expr, Call) and st.expr.name == "portopt":
                *_, frontier = ev.outputs(st.expr)
                out.plot = PlotArtifact(frontier)
                out.value = frontier
            else:
                out.value = ev.value(st.expr)
        elif isinstance(st, PlotDirective):
            arg = st.arg if st.name == "grid" else _text(ev.value(st.arg), st.name)
            out.directives.append((st.name, arg))
            if out.plot is not None:
                apply_directive(out.plot, st.name, arg)
    out.assigned = tuple(assigned)
    return scratch, out


def apply_directive(plot: PlotArtifact, name: str, arg) -> None:
    if name == "grid":
        plot.grid = arg == "on"
    else:
        setattr(plot, name, arg)
