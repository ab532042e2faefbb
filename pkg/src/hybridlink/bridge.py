"""Link protocol between the workbook and the workspace.

One :class:`Session` exposes every link-management and data-management
call. Names map 1:1 onto the spreadsheet-side functions::

    matlabinit          -> matlabinit() / Session.matlabinit
    MLAutoStart         -> Session.ml_auto_start
    MLOpen / MLClose    -> Session.ml_open / Session.ml_close
    matlabfcn           -> Session.matlabfcn
    matlabsub           -> Session.matlabsub
    MLAppendMatrix      -> Session.ml_append_matrix
    MLDeleteMatrix      -> Session.ml_delete_matrix
    MLEvalString        -> Session.ml_eval_string
    MLGetFigure         -> Session.ml_get_figure
    MLGetMatrix         -> Session.ml_get_matrix
    MLGetVar            -> Session.ml_get_var
    MLPutMatrix         -> Session.ml_put_matrix
    MLPutVar            -> Session.ml_put_var   (API only, never from scripts)
    MLShowMatlabErrors  -> Session.ml_show_matlab_errors
    MLStartDir          -> Session.ml_start_dir
    MLUseFullDesktop    -> Session.ml_use_full_desktop

Every call, successful or not, appends exactly one audit record. Calls
that fail leave the workspace and the workbook as they were.
"""

from __future__ import annotations

import enum
import json
import os
import time
import uuid
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .audit import AuditLog
from .kernel import (
    CommandSyntaxError,
    DimensionError,
    EvalError,
    PlotArtifact,
    Workspace,
    apply_directive,
    call_builtin,
    eval_command,
    parse_command,
)
from .optim import QPError
from .values import StringList, Value, as_matrix, canonical, dumps, from_canonical, is_matrix, value_digest
from .workbook import (
    MissingDataError,
    RangeRef,
    RangeTypeError,
    RefError,
    Workbook,
    parse_cell,
)

OK = 0
STATE_ERROR = 1
PARSE_ERROR = 2
EVAL_ERROR = 3
TYPE_ERROR = 4
REF_ERROR = 5


class State(enum.Enum):
    UNINITIALIZED = "uninitialized"
    RUNNING = "running"
    CLOSED = "closed"


class ErrorMode(enum.Enum):
    STANDARD = "standard"
    FULL = "full"


class SessionStateError(Exception):
    pass


class ScriptSyntaxError(Exception):
    pass


class VariableRefError(Exception):
    """A workspace variable named by a link call does not exist."""


@dataclass(frozen=True)
class StatusResult:
    code: int
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.code == OK

    def __str__(self) -> str:
        return f"{self.code}" + (f": {self.detail}" if self.detail else "")


class BridgeError(Exception):
    """Raised by the value-returning calls (matlabfcn, ml_get_var) on failure."""

    def __init__(self, status: StatusResult):
        super().__init__(str(status))
        self.status = status


@dataclass
class LinkConfig:
    auto_start: bool = True
    start_dir: Optional[str] = None
    full_errors: bool = False
    use_full_desktop: bool = False
    session_id: Optional[str] = None
    clock: Callable[[], int] = time.time_ns

    def snapshot(self) -> dict:
        return {
            "auto_start": self.auto_start,
            "full_errors": self.full_errors,
            "start_dir": self.start_dir,
            "use_full_desktop": self.use_full_desktop,
        }


def status_code(exc: BaseException) -> int:
    if isinstance(exc, SessionStateError):
        return STATE_ERROR
    if isinstance(exc, (CommandSyntaxError, ScriptSyntaxError)):
        return PARSE_ERROR
    if isinstance(exc, (DimensionError, RangeTypeError, MissingDataError)):
        return TYPE_ERROR
    if isinstance(exc, (RefError, VariableRefError)):
        return REF_ERROR
    if isinstance(exc, (EvalError, QPError)):
        return EVAL_ERROR
    raise exc


def _args(*values) -> str:
    return dumps(list(values))


class Session:
    def __init__(self, workbook: Optional[Workbook] = None, config: Optional[LinkConfig] = None):
        self.config = config or LinkConfig()
        self.workbook = workbook if workbook is not None else Workbook()
        self.workspace = Workspace()
        self.state = State.UNINITIALIZED
        self.error_mode = ErrorMode.FULL if self.config.full_errors else ErrorMode.STANDARD
        self.plot: Optional[PlotArtifact] = None
        self.session_id = self.config.session_id or uuid.uuid4().hex
        self.audit = AuditLog(self.session_id, clock=self.config.clock)

    # -- plumbing -------------------------------------------------------------

    def _require_running(self) -> None:
        if self.state is not State.RUNNING:
            raise SessionStateError(f"session is {self.state.value}, not running")

    def _detail(self, exc: BaseException) -> str:
        return str(exc) if self.error_mode is ErrorMode.FULL else ""

    def _call(self, op: str, args: str, provenance: Sequence[str],
              destination: Sequence[str], body: Callable[[], Tuple[object, object]]):
        """Run ``body`` and audit it; returns (StatusResult, result)."""
        try:
            digest_of, result = body()
        except Exception as exc:  # noqa: BLE001 - mapped or re-raised by status_code
            code = status_code(exc)
            self.audit.record(op, args, provenance, destination, value_digest(None), code)
            return StatusResult(code, self._detail(exc)), None
        self.audit.record(op, args, provenance, destination, value_digest(digest_of), OK)
        return StatusResult(OK), result

    def _lookup(self, name: str) -> Value:
        if name not in self.workspace:
            raise VariableRefError(f"undefined variable {name!r}")
        return self.workspace[name]

    def resolve_path(self, path) -> Path:
        p = Path(path)
        if p.is_absolute():
            return p
        return Path(self.config.start_dir or os.getcwd()) / p

    # -- link management ------------------------------------------------------

    def matlabinit(self) -> StatusResult:
        """Initialize (or re-initialize) the link with an empty workspace."""
        def body():
            self.workspace = Workspace()
            self.plot = None
            self.state = State.RUNNING
            return self.workspace.as_dict(), None

        args = dumps({**self.config.snapshot(), "workbook": self.workbook.digest()})
        return self._call("matlabinit", args, [], [], body)[0]

    def ml_auto_start(self, flag: bool) -> StatusResult:
        def body():
            self.config.auto_start = bool(flag)
            return None, None
        return self._call("ml_auto_start", _args(bool(flag)), [], [], body)[0]

    def ml_close(self) -> StatusResult:
        def body():
            self._require_running()
            self.state = State.CLOSED
            self.workspace = Workspace()
            self.plot = None
            return self.workspace.as_dict(), None
        return self._call("ml_close", _args(), [], [], body)[0]

    def ml_open(self) -> StatusResult:
        def body():
            if self.state is not State.CLOSED:
                raise SessionStateError(f"session is {self.state.value}, not closed")
            self.state = State.RUNNING
            self.workspace = Workspace()
            return self.workspace.as_dict(), None
        return self._call("ml_open", _args(), [], [], body)[0]

    # -- data management ------------------------------------------------------

    def ml_put_matrix(self, name: str, ref: str) -> StatusResult:
        def body():
            self._require_running()
            value = self.workbook.read_range(ref)
            ws = self.workspace.copy()
            ws.bind(name, value)
            self.workspace = ws
            return value, None
        return self._call("ml_put_matrix", _args(name, ref), [ref], [name], body)[0]

    def ml_append_matrix(self, name: str, ref: str) -> StatusResult:
        def body():
            self._require_running()
            block = self.workbook.read_range(ref)
            if name in self.workspace:
                old = self.workspace[name]
                if isinstance(old, StringList) or isinstance(block, StringList):
                    if not (isinstance(old, StringList) and isinstance(block, StringList)):
                        raise DimensionError(f"cannot append text and numbers in {name!r}")
                    value = StringList(tuple(old) + tuple(block))
                else:
                    if old.shape[1] != block.shape[1]:
                        raise DimensionError(
                            f"cannot append {block.shape[1]}-column block to "
                            f"{old.shape[1]}-column {name!r}")
                    value = np.vstack([old, block])
            else:
                value = block
            ws = self.workspace.copy()
            ws.bind(name, value)
            self.workspace = ws
            return ws[name], None
        return self._call("ml_append_matrix", _args(name, ref), [ref], [name], body)[0]

    def ml_delete_matrix(self, name: str) -> StatusResult:
        def body():
            self._require_running()
            self._lookup(name)
            ws = self.workspace.copy()
            del ws[name]
            self.workspace = ws
            return None, None
        return self._call("ml_delete_matrix", _args(name), [], [name], body)[0]

    def ml_eval_string(self, command: str) -> StatusResult:
        def body():
            self._require_running()
            cmd = parse_command(command)
            ws, out = eval_command(self.workspace, cmd)
            self.workspace = ws
            if out.plot is not None:
                self.plot = out.plot
            elif out.directives and self.plot is not None:
                for name, arg in out.directives:
                    apply_directive(self.plot, name, arg)
            digest_of = {name: ws[name] for name in out.assigned}
            if out.plot is not None:
                f = out.plot.frontier
                digest_of["__plot__"] = np.column_stack([f.risk, f.ror, f.weights])
            return digest_of, out
        return self._call("ml_eval_string", _args(command), [], [], body)[0]

    def ml_get_matrix(self, name: str, anchor: str) -> StatusResult:
        def body():
            self._require_running()
            value = self._lookup(name)
            if not is_matrix(value):
                raise DimensionError(f"{name!r} holds text; only matrices are written to cells")
            cell = parse_cell(anchor)
            self.workbook.write_matrix(cell, value)
            return value, None
        dest = [anchor]
        if name in self.workspace and is_matrix(self.workspace[name]):
            try:
                m = self.workspace[name]
                dest = [str(RangeRef.from_shape(parse_cell(anchor), *m.shape))]
            except RefError:
                pass
        return self._call("ml_get_matrix", _args(name, anchor), [name], dest, body)[0]

    def ml_get_var(self, name: str) -> Value:
        def body():
            self._require_running()
            value = self._lookup(name)
            return value, value
        status, value = self._call("ml_get_var", _args(name), [name], [], body)
        if not status.ok:
            raise BridgeError(status)
        return value

    def ml_put_var(self, name: str, value) -> StatusResult:
        """Bind a host-program value directly, bypassing the grid."""
        problem = None
        try:
            if isinstance(value, str):
                value = StringList([value])
            elif isinstance(value, (list, tuple)) and value and all(isinstance(v, str) for v in value):
                value = StringList(value)
            elif not isinstance(value, StringList):
                value = as_matrix(value)
            encoded = canonical(value)
        except (TypeError, ValueError) as exc:
            problem, encoded = exc, None

        def body():
            self._require_running()
            if problem is not None:
                raise DimensionError(f"cannot store {name!r}: {problem}")
            ws = self.workspace.copy()
            ws.bind(name, value)
            self.workspace = ws
            return ws[name], None
        return self._call("ml_put_var", _args(name, encoded), [], [name], body)[0]

    def matlabfcn(self, fn: str, ref: str) -> Value:
        def body():
            self._require_running()
            data = self.workbook.read_range(ref)
            result = call_builtin(fn, [data])[0]
            return result, result
        status, value = self._call("matlabfcn", _args(fn, ref), [ref], [], body)
        if not status.ok:
            raise BridgeError(status)
        return value

    def matlabsub(self, fn: str, out: str, ref: str) -> StatusResult:
        def body():
            self._require_running()
            anchor = parse_cell(out)
            data = self.workbook.read_range(ref)
            result = call_builtin(fn, [data])[0]
            if not is_matrix(result):
                raise DimensionError(f"{fn} returned text; only matrices are written to cells")
            self.workbook.write_matrix(anchor, result)
            return result, None
        return self._call("matlabsub", _args(fn, out, ref), [ref], [out], body)[0]

    def ml_get_figure(self, anchor: str) -> StatusResult:
        """Write the current frontier figure's data table (risk, ror, weights) at ``anchor``."""
        def body():
            self._require_running()
            if self.plot is None:
                raise EvalError("no current figure")
            f = self.plot.frontier
            table = np.column_stack([f.risk, f.ror, f.weights])
            self.workbook.write_matrix(parse_cell(anchor), table)
            return table, None
        return self._call("ml_get_figure", _args(anchor), ["figure"], [anchor], body)[0]

    def ml_show_matlab_errors(self, full: bool) -> StatusResult:
        def body():
            self.error_mode = ErrorMode.FULL if full else ErrorMode.STANDARD
            self.config.full_errors = bool(full)
            return None, None
        return self._call("ml_show_matlab_errors", _args(bool(full)), [], [], body)[0]

    def ml_start_dir(self, path: str) -> StatusResult:
        def body():
            self._require_running()
            self.config.start_dir = str(path)
            return None, None
        return self._call("ml_start_dir", _args(str(path)), [], [], body)[0]

    def ml_use_full_desktop(self, flag: bool) -> StatusResult:
        # no desktop exists here; the setting is kept and audited only
        def body():
            self.config.use_full_desktop = bool(flag)
            return None, None
        return self._call("ml_use_full_desktop", _args(bool(flag)), [], [], body)[0]

    # -- scripts and replay ---------------------------------------------------

    def execute(self, text: str) -> StatusResult:
        """Parse one script statement (spreadsheet formula syntax) and run it."""
        try:
            op, args = parse_statement(text)
        except ScriptSyntaxError as exc:
            self.audit.record("statement", _args(text), [], [], value_digest(None), PARSE_ERROR)
            return StatusResult(PARSE_ERROR, self._detail(exc))
        return self._dispatch(op, args)

    def _dispatch(self, op: str, args: list) -> StatusResult:
        method = getattr(self, op)
        if op in ("matlabfcn", "ml_get_var"):
            try:
                method(*args)
            except BridgeError as exc:
                return exc.status
            return StatusResult(OK)
        return method(*args)

    def replay_call(self, op: str, args: str) -> None:
        """Re-issue a logged call from its audit ``op`` and ``args``."""
        values = json.loads(args)
        if op == "statement":
            self.execute(values[0])
        elif op == "matlabinit":
            self.matlabinit()
        elif op == "ml_put_var":
            name, encoded = values
            value = from_canonical(encoded) if encoded is not None else None
            self.ml_put_var(name, value)
        elif op in _REPLAYABLE:
            self._dispatch(op, values)
        else:
            self.audit.record(op, args, [], [], value_digest(None), EVAL_ERROR)

    @classmethod
    def from_init_args(cls, args: str, workbook: Workbook, **overrides) -> "Session":
        snap = json.loads(args)
        config = LinkConfig(
            auto_start=snap.get("auto_start", True),
            start_dir=snap.get("start_dir"),
            full_errors=snap.get("full_errors", False),
            use_full_desktop=snap.get("use_full_desktop", False),
            **overrides,
        )
        s = cls(workbook, config)
        s.matlabinit()
        return s


_REPLAYABLE = {
    "ml_auto_start", "ml_close", "ml_open", "ml_put_matrix", "ml_append_matrix",
    "ml_delete_matrix", "ml_eval_string", "ml_get_matrix", "ml_get_var", "matlabfcn",
    "matlabsub", "ml_get_figure", "ml_show_matlab_errors", "ml_start_dir",
    "ml_use_full_desktop",
}


def matlabinit(config: Optional[LinkConfig] = None, workbook: Optional[Workbook] = None) -> Session:
    """Create a running session; its first audit record is the init event."""
    s = Session(workbook, config)
    s.matlabinit()
    return s


# -- script statement syntax ---------------------------------------------------

# spreadsheet name (lower-cased) -> (session method, argument kinds)
STATEMENTS = {
    "matlabinit": ("matlabinit", ()),
    "mlautostart": ("ml_auto_start", ("flag",)),
    "mlclose": ("ml_close", ()),
    "mlopen": ("ml_open", ()),
    "matlabfcn": ("matlabfcn", ("text", "text")),
    "matlabsub": ("matlabsub", ("text", "text", "text")),
    "mlappendmatrix": ("ml_append_matrix", ("text", "text")),
    "mldeletematrix": ("ml_delete_matrix", ("text",)),
    "mlevalstring": ("ml_eval_string", ("text",)),
    "mlgetfigure": ("ml_get_figure", ("text",)),
    "mlgetmatrix": ("ml_get_matrix", ("text", "text")),
    "mlgetvar": ("ml_get_var", ("text",)),
    "mlputmatrix": ("ml_put_matrix", ("text", "text")),
    "mlshowmatlaberrors": ("ml_show_matlab_errors", ("flag",)),
    "mlstartdir": ("ml_start_dir", ("text",)),
    "mlusefulldesktop": ("ml_use_full_desktop", ("flag",)),
}

_OPEN_QUOTES = '"“”'
_CLOSE_FOR = {'"': '"', "“": "”", "”": "”"}
_FLAGS = {"true": True, "false": False, "1": True, "0": False, "on": True, "off": False,
          "yes": True, "no": False}


def _split_args(inner: str) -> List[str]:
    """Split a call's argument text on top-level commas.

    An argument that starts with a double quote (straight or curly) is a
    string literal; doubled quotes escape. Bare arguments keep their text
    with stray quote characters stripped, so ``A4:A1003”`` reads as
    ``A4:A1003``.
    """
    args = []
    i, n = 0, len(inner)
    while True:
        while i < n and inner[i].isspace():
            i += 1
        if i < n and inner[i] in _OPEN_QUOTES:
            close = _CLOSE_FOR[inner[i]]
            closers = {close, '"'}
            buf = []
            i += 1
            while True:
                if i >= n:
                    raise ScriptSyntaxError("unterminated string argument")
                if inner[i] in closers:
                    if i + 1 < n and inner[i + 1] == inner[i]:
                        buf.append(inner[i])
                        i += 2
                        continue
                    i += 1
                    break
                buf.append(inner[i])
                i += 1
            args.append("".join(buf))
            while i < n and inner[i].isspace():
                i += 1
        else:
            j = inner.find(",", i)
            j = n if j < 0 else j
            token = inner[i:j].strip().strip(_OPEN_QUOTES).strip()
            if not token:
                if not args and j == n:
                    return []
                raise ScriptSyntaxError("empty argument")
            args.append(token)
            i = j
        if i >= n:
            return args
        if inner[i] != ",":
            raise ScriptSyntaxError(f"expected ',' between arguments, found {inner[i]!r}")
        i += 1


def parse_statement(text: str) -> Tuple[str, list]:
    """Parse ``Name(arg, ...)`` into (session method name, argument list).

    A leading ``0 <==`` status echo, as shown next to link formulas in a
    sheet, is ignored, as is a leading ``=``.
    """
    s = text.strip()
    if "<==" in s:
        s = s.split("<==", 1)[1].strip()
    s = s.lstrip("=").strip()
    paren = s.find("(")
    if paren < 0:
        name, inner = s, None
    else:
        if not s.endswith(")"):
            raise ScriptSyntaxError(f"missing closing parenthesis in {text.strip()!r}")
        name, inner = s[:paren].strip(), s[paren + 1:-1]
    key = name.lower()
    if key == "mlputvar":
        raise ScriptSyntaxError("MLPutVar is only available from the programmatic API")
    if key not in STATEMENTS:
        raise ScriptSyntaxError(f"unknown link function {name!r}")
    op, kinds = STATEMENTS[key]
    raw = _split_args(inner) if inner is not None else []
    if len(raw) != len(kinds):
        raise ScriptSyntaxError(f"{name} takes {len(kinds)} argument(s), got {len(raw)}")
    args = []
    for kind, value in zip(kinds, raw):
        if kind == "flag":
            if value.lower() not in _FLAGS:
                raise ScriptSyntaxError(f"{name}: expected TRUE or FALSE, got {value!r}")
            args.append(_FLAGS[value.lower()])
        else:
            args.append(value)
    return op, args
