import json

import numpy as np
import pytest

from hybridlink import data
from hybridlink.audit import import_jsonl, verify_chain
from hybridlink.cli import main, read_script, run
from hybridlink.workbook import load_csv

from oracles import FIG7_RISK, FIG7_ROR, FIG7_WEIGHTS


def outputs(tmp_path, name="r"):
    d = tmp_path / name
    d.mkdir()
    return d / "out.csv", d / "audit.jsonl", d / "frontier"


def run_fig6(tmp_path, name="r", **kw):
    out, aud, plot = outputs(tmp_path, name)
    code = run(data.figure6_script(), data.figure6_workbook(), out, aud, plot, **kw)
    return code, out, aud, plot


def test_figure6_run(tmp_path):
    code, out, aud, plot = run_fig6(tmp_path)
    assert code == 0
    wb = load_csv(out)
    np.testing.assert_allclose(wb.read_range("F4:F12").ravel(), FIG7_RISK, atol=5e-4)
    np.testing.assert_allclose(wb.read_range("G4:G12").ravel(), FIG7_ROR, atol=5e-4)
    np.testing.assert_allclose(wb.read_range("H4:J12"), FIG7_WEIGHTS, atol=5e-4)
    assert wb.read_range("F4:J23").shape == (20, 5)
    assert wb["F24"] is None
    assert verify_chain(import_jsonl(aud)) is None
    assert (plot.parent / "frontier.svg").exists()


def test_outputs_byte_identical(tmp_path):
    _, out1, _, plot1 = run_fig6(tmp_path, "a")
    _, out2, _, plot2 = run_fig6(tmp_path, "b")
    assert out1.read_bytes() == out2.read_bytes()
    assert (plot1.parent / "frontier.csv").read_bytes() == (plot2.parent / "frontier.csv").read_bytes()


def test_empty_script(tmp_path):
    script = tmp_path / "empty.txt"
    script.write_text("# nothing here\n\n")
    out, aud, _ = outputs(tmp_path)
    assert run(script, data.figure6_workbook(), out, aud) == 0
    assert load_csv(out) == load_csv(data.figure6_workbook())
    assert [r.op for r in import_jsonl(aud)] == ["matlabinit"]


def test_unknown_statement(tmp_path):
    script = tmp_path / "bad.txt"
    script.write_text('MLPutMatrix("r", B4:D9)\nFrobnicate(1)\nMLEvalString("m = mean(r)")\n')
    out, aud, _ = outputs(tmp_path)
    assert run(script, data.figure6_workbook(), out, aud) == 2
    recs = import_jsonl(aud)
    assert [r.op for r in recs] == ["matlabinit", "ml_put_matrix", "statement"]
    assert recs[-1].status == 2 and "Frobnicate" in json.loads(recs[-1].args)[0]


def test_keep_going(tmp_path):
    script = tmp_path / "bad.txt"
    script.write_text('MLPutMatrix("r", B4:D9)\nMLGetMatrix("nope", "A1")\nMLEvalString("m = mean(r)")\n'
                      'MLEvalString("m = (")\n')
    out, aud, _ = outputs(tmp_path)
    assert run(script, data.figure6_workbook(), out, aud, keep_going=True) == 5
    statuses = [r.status for r in import_jsonl(aud)]
    assert statuses == [0, 0, 5, 0, 2]


@pytest.mark.parametrize("lines", [
    [],
    ['MLPutMatrix("r", B4:D9)'],
    ['MLPutMatrix("r", B4:D9)', 'MLEvalString("x = r(:,9)")'],
    ['MLClose', 'MLPutMatrix("r", B4:D9)'],
])
def test_exit_zero_iff_clean_log(tmp_path, lines):
    script = tmp_path / "s.txt"
    script.write_text("\n".join(lines) + "\n")
    out, aud, _ = outputs(tmp_path)
    code = run(script, data.figure6_workbook(), out, aud, keep_going=True)
    assert (code == 0) == all(r.status == 0 for r in import_jsonl(aud))


def test_start_dir_places_plot(tmp_path):
    out, aud, _ = outputs(tmp_path)
    target = tmp_path / "plots"
    code = main(["--workbook", str(data.figure6_workbook()), "--script", str(data.figure6_script()),
                 "--out", str(out), "--audit", str(aud), "--plot", "frontier", "--start-dir", str(target)])
    assert code == 0
    assert (target / "frontier.svg").exists() and (target / "frontier.csv").exists()


def test_script_start_dir(tmp_path):
    script = tmp_path / "s.txt"
    lines = read_script(data.figure6_script())
    body = "\n".join(line.text for line in lines)
    script.write_text(f'MLStartDir("{tmp_path / "there"}")\n{body}\n')
    out, aud, _ = outputs(tmp_path)
    assert run(script, data.figure6_workbook(), out, aud, "fig") == 0
    assert (tmp_path / "there" / "fig.svg").exists()


def test_full_errors_flag(tmp_path, caplog):
    script = tmp_path / "s.txt"
    script.write_text('MLEvalString("x = (")\n')
    out, aud, _ = outputs(tmp_path)
    assert main(["--workbook", str(data.figure6_workbook()), "--script", str(script),
                 "--out", str(out), "--audit", str(aud), "--full-errors"]) == 2
    assert "position" in caplog.text


def test_no_auto_start(tmp_path):
    script = tmp_path / "s.txt"
    script.write_text('MLPutMatrix("r", B4:D9)\n')
    out, aud, _ = outputs(tmp_path)
    assert run(script, data.figure6_workbook(), out, aud, auto_start=False) == 1
    script.write_text('matlabinit\nMLPutMatrix("r", B4:D9)\n')
    assert run(script, data.figure6_workbook(), out, aud, auto_start=False) == 0


def test_module_entry_point(tmp_path):
    import subprocess
    import sys
    out, aud, _ = outputs(tmp_path)
    proc = subprocess.run([sys.executable, "-m", "hybridlink", "--workbook", str(data.figure6_workbook()),
                           "--script", str(data.figure6_script()), "--out", str(out), "--audit", str(aud)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert out.exists()
