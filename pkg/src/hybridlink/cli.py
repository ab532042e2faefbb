"""Command-line runner: workbook CSV + script of link calls -> outputs.

    hybridlink --workbook returns.csv --script frontier.txt \\
        --out result.csv --audit audit.jsonl --plot frontier
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple

from . import audit
from .bridge import OK, LinkConfig, Session, StatusResult
from .plot import emit_frontier_plot
from .workbook import Workbook, load_csv

log = logging.getLogger("hybridlink")


@dataclass(frozen=True)
class ScriptLine:
    lineno: int
    text: str


def read_script(path) -> List[ScriptLine]:
    """Statements of a script file; ``#`` comments and blank lines skipped."""
    lines = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        lines.append(ScriptLine(lineno, text))
    return lines


@dataclass
class RunResult:
    exit_code: int
    session: Session
    statuses: List[Tuple[ScriptLine, StatusResult]]


def start_session(workbook: Workbook, config: Optional[LinkConfig] = None) -> Session:
    config = config or LinkConfig()
    session = Session(workbook, config)
    if config.auto_start:
        session.matlabinit()
    return session


def execute_lines(session: Session, script: List[ScriptLine], keep_going: bool = False) -> RunResult:
    statuses = []
    exit_code = OK
    for line in script:
        status = session.execute(line.text)
        statuses.append((line, status))
        if not status.ok:
            log.error("line %d: %s -> status %s", line.lineno, line.text, status)
            if exit_code == OK:
                exit_code = status.code
            if not keep_going:
                break
    return RunResult(exit_code, session, statuses)


def run_script(script: List[ScriptLine], workbook: Workbook, config: Optional[LinkConfig] = None,
               keep_going: bool = False) -> RunResult:
    return execute_lines(start_session(workbook, config), script, keep_going)


def run(script_path, workbook_path, out_path, audit_path, plot_path=None, *,
        keep_going: bool = False, full_errors: bool = False, start_dir: Optional[str] = None,
        auto_start: bool = True, config: Optional[LinkConfig] = None) -> int:
    """Execute a script end to end and write every output. Returns the exit code."""
    config = config or LinkConfig()
    config.full_errors = config.full_errors or full_errors
    config.auto_start = auto_start
    if start_dir is not None:
        config.start_dir = str(start_dir)
    script = read_script(script_path)
    session = start_session(load_csv(workbook_path), config)
    try:
        result = execute_lines(session, script, keep_going)
    finally:
        audit.export_jsonl(session.audit.records, audit_path)
    session.workbook.save_csv(out_path)
    if plot_path is not None and session.plot is not None:
        emit_frontier_plot(session.plot, session.resolve_path(plot_path))
    return result.exit_code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hybridlink",
                                description="Run a script of link calls against a CSV workbook.")
    p.add_argument("--workbook", required=True, help="input workbook (CSV)")
    p.add_argument("--script", required=True, help="script of link calls, one per line")
    p.add_argument("--out", required=True, help="where to write the final workbook (CSV)")
    p.add_argument("--audit", required=True, help="where to write the audit log (JSONL)")
    p.add_argument("--plot", help="base path for frontier outputs (<base>.csv, <base>.svg)")
    p.add_argument("--keep-going", action="store_true", help="continue after a failing statement")
    p.add_argument("--full-errors", action="store_true", help="report full diagnostics (MLShowMatlabErrors)")
    p.add_argument("--start-dir", help="directory for relative plot paths (MLStartDir)")
    p.add_argument("--no-auto-start", action="store_true",
                   help="do not initialize the link; the script must call matlabinit")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    return run(args.script, args.workbook, args.out, args.audit, args.plot,
               keep_going=args.keep_going, full_errors=args.full_errors,
               start_dir=args.start_dir, auto_start=not args.no_auto_start)


if __name__ == "__main__":
    sys.exit(main())
